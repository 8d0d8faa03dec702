#include "tracerecon/bodyfile.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

namespace trace_recon {

namespace {

constexpr std::size_t kFieldCount = 11;
constexpr std::string_view kDeletedSuffix = " (deleted)";

bool parse_integer(std::string_view text, std::int64_t& out) {
    if (text.empty()) return false;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

std::string_view trim_line_end(std::string_view line) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.remove_suffix(1);
    return line;
}

bool is_blank(std::string_view line) {
    return std::all_of(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\t'; });
}

}  // namespace

std::optional<BodyfileLine> parse_bodyfile_line(std::string_view line, std::string& error) {
    std::vector<std::string_view> fields;
    fields.reserve(kFieldCount);
    std::size_t begin = 0;
    for (;;) {
        const std::size_t bar = line.find('|', begin);
        if (bar == std::string_view::npos) {
            fields.push_back(line.substr(begin));
            break;
        }
        fields.push_back(line.substr(begin, bar - begin));
        begin = bar + 1;
    }
    if (fields.size() != kFieldCount) {
        error = "expected 11 fields, found " + std::to_string(fields.size());
        return std::nullopt;
    }

    BodyfileLine out;
    out.md5 = fields[0];
    out.name = fields[1];
    out.inode = fields[2];
    out.mode = fields[3];

    struct NumericField {
        const char* label;
        std::int64_t* slot;
        std::string_view text;
        bool is_time;
    };
    const NumericField numeric[] = {
        {"uid", &out.uid, fields[4], false},       {"gid", &out.gid, fields[5], false},
        {"size", &out.size, fields[6], false},     {"atime", &out.atime, fields[7], true},
        {"mtime", &out.mtime, fields[8], true},    {"ctime", &out.ctime, fields[9], true},
        {"crtime", &out.crtime, fields[10], true},
    };
    for (const auto& field : numeric) {
        if (!parse_integer(field.text, *field.slot)) {
            error = std::string("field ") + field.label + " is not an integer: '" +
                    std::string(field.text) + "'";
            return std::nullopt;
        }
        if (field.is_time && *field.slot < 0) {
            error = std::string("field ") + field.label + " is negative";
            return std::nullopt;
        }
    }
    if (out.name.empty()) {
        error = "empty name field";
        return std::nullopt;
    }
    return out;
}

ObjectRecord to_object_record(const BodyfileLine& line) {
    ObjectRecord rec;
    std::string name = line.name;
    if (name.size() > kDeletedSuffix.size() && name.ends_with(kDeletedSuffix)) {
        rec.deleted = true;
        name.resize(name.size() - kDeletedSuffix.size());
    }
    std::replace(name.begin(), name.end(), '\\', '/');
    rec.path = std::move(name);

    auto time_or_absent = [](std::int64_t v) -> std::optional<Timestamp> {
        if (v == 0) return std::nullopt;
        return Timestamp{v};
    };
    rec.accessed = time_or_absent(line.atime);
    rec.modified = time_or_absent(line.mtime);
    rec.metachanged = time_or_absent(line.ctime);
    rec.created = time_or_absent(line.crtime);
    return rec;
}

BodyfileParse parse_bodyfile(std::istream& in) {
    BodyfileParse result;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = trim_line_end(raw);
        if (is_blank(line) || line.front() == '#') continue;

        std::string error;
        auto parsed = parse_bodyfile_line(line, error);
        if (!parsed) {
            result.diagnostics.push_back({line_no, error});
            continue;
        }
        ObjectRecord rec = to_object_record(*parsed);
        if (!rec.has_any_time()) {
            result.diagnostics.push_back({line_no, "no usable timestamps: " + rec.path});
            continue;
        }
        result.records.push_back(std::move(rec));
    }
    return result;
}

std::string to_bodyfile_line(const ObjectRecord& record) {
    if (record.path.find_first_of("|\n\r") != std::string::npos) {
        throw std::invalid_argument("path cannot be written to a body file: " + record.path);
    }
    auto t = [](const std::optional<Timestamp>& v) { return v ? v->seconds : 0; };
    std::ostringstream line;
    line << "0|" << record.path << (record.deleted ? kDeletedSuffix : "") << "|0|r/rrwxrwxrwx|0|0|0|"
         << t(record.accessed) << '|' << t(record.modified) << '|' << t(record.metachanged) << '|'
         << t(record.created);
    return line.str();
}

void write_bodyfile(std::ostream& out, std::span<const ObjectRecord> records) {
    for (const auto& rec : records) out << to_bodyfile_line(rec) << '\n';
}

std::optional<MetadataFormat> parse_metadata_format(std::string_view tag) {
    if (ascii_lower(tag) == "bodyfile") return MetadataFormat::Bodyfile;
    return std::nullopt;
}

std::vector<ObjectRecord> load_metadata(const std::string& source, MetadataFormat format,
                                        std::vector<ParseDiagnostic>* diagnostics) {
    BodyfileParse parsed;
    switch (format) {
        case MetadataFormat::Bodyfile:
            if (source == "-") {
                parsed = parse_bodyfile(std::cin);
            } else {
                std::ifstream in(source, std::ios::binary);
                if (!in) throw IoError(source, "cannot open metadata file");
                parsed = parse_bodyfile(in);
                if (in.bad()) throw IoError(source, "read error");
            }
            break;
    }
    if (diagnostics) {
        diagnostics->insert(diagnostics->end(), parsed.diagnostics.begin(),
                            parsed.diagnostics.end());
    }
    return std::move(parsed.records);
}

}  // namespace trace_recon
