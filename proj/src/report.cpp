#include "tracerecon/report.hpp"

#include <algorithm>
#include <array>
#include <tuple>
#include <json.hpp>

namespace trace_recon {

namespace {

std::string show(Timestamp t, TimeDisplay display) {
    return display == TimeDisplay::Iso8601 ? format_utc(t) : std::to_string(t.seconds);
}

std::array<std::string, 8> cells(const ReportRow& row, TimeDisplay display) {
    return {row.computer_label,
            row.action,
            std::string(to_string(row.rank)),
            show(row.detected, display),
            show(row.interval_start, display),
            show(row.interval_end, display),
            std::to_string(row.evidence_count),
            row.note};
}

constexpr std::array<const char*, 8> kHeader = {"computer", "action", "rank", "detected",
                                                "start", "end", "evidence", "note"};

std::string csv_field(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

bool is_ambiguous(const ReportRow& row) {
    return row.note == to_string(ConfidenceNote::SharedAmbiguous);
}

}  // namespace

std::vector<ReportRow> build_report_rows(const std::string& computer_label, const Reconstruction& reconstruction) {
    std::vector<ReportRow> rows;
    for (const auto& inst : reconstruction.instances) {
        rows.push_back(ReportRow{computer_label, inst.action_name, inst.rank, inst.anchor,
                                 inst.interval.start.value_or(Timestamp{0}),
                                 inst.interval.end.value_or(inst.anchor), inst.evidence.size(),
                                 std::string(to_string(inst.note))});
    }

    std::vector<ReportRow> ambiguous;
    for (const auto& attribution : reconstruction.shared) {
        if (attribution.resolved) continue;
        std::string names;
        for (const auto& candidate : attribution.candidate_actions) {
            if (!names.empty()) names += '|';
            names += candidate;
        }
        const TimeInterval interval = aia(attribution.cluster.oldest(), attribution.theta);
        ambiguous.push_back(ReportRow{computer_label, names, InstanceRank::Past, attribution.cluster.oldest(),
                                      *interval.start, attribution.cluster.newest(),
                                      attribution.cluster.members.size(),
                                      std::string(to_string(ConfidenceNote::SharedAmbiguous))});
    }
    std::stable_sort(ambiguous.begin(), ambiguous.end(), [](const ReportRow& a, const ReportRow& b) {
        return std::tie(b.detected, a.action) < std::tie(a.detected, b.action);
    });
    rows.insert(rows.end(), ambiguous.begin(), ambiguous.end());
    return rows;
}

void render_table(std::ostream& out, const std::vector<ReportRow>& rows, TimeDisplay display) {
    std::array<std::size_t, 8> width{};
    for (std::size_t c = 0; c < kHeader.size(); ++c) width[c] = std::string_view(kHeader[c]).size();
    std::vector<std::array<std::string, 8>> table;
    table.reserve(rows.size());
    for (const auto& row : rows) {
        table.push_back(cells(row, display));
        for (std::size_t c = 0; c < width.size(); ++c) width[c] = std::max(width[c], table.back()[c].size());
    }
    auto emit = [&](const auto& line) {
        std::string text;
        for (std::size_t c = 0; c < width.size(); ++c) {
            const std::string cell = line[c];
            text += cell;
            if (c + 1 < width.size()) text += std::string(width[c] - cell.size() + 2, ' ');
        }
        while (!text.empty() && text.back() == ' ') text.pop_back();
        out << text << '\n';
    };
    if (!rows.empty()) {
        emit(kHeader);
        for (const auto& line : table) emit(line);
    }
    const auto ambiguous = static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), is_ambiguous));
    const std::size_t detections = rows.size() - ambiguous;
    out << detections << (detections == 1 ? " detection" : " detections");
    if (ambiguous > 0) {
        out << ", " << ambiguous << (ambiguous == 1 ? " unresolved shared cluster" : " unresolved shared clusters");
    }
    out << '\n';
}

void render_csv(std::ostream& out, const std::vector<ReportRow>& rows, TimeDisplay display) {
    for (std::size_t c = 0; c < kHeader.size(); ++c) out << (c ? "," : "") << kHeader[c];
    out << '\n';
    for (const auto& row : rows) {
        const auto line = cells(row, display);
        for (std::size_t c = 0; c < line.size(); ++c) out << (c ? "," : "") << csv_field(line[c]);
        out << '\n';
    }
}

void render_records(std::ostream& out, const std::vector<ReportRow>& rows, TimeDisplay display) {
    auto time_value = [&](Timestamp t) -> nlohmann::ordered_json {
        if (display == TimeDisplay::Iso8601) return format_utc(t);
        return t.seconds;
    };
    for (const auto& row : rows) {
        nlohmann::ordered_json record;
        record["computer"] = row.computer_label;
        record["action"] = row.action;
        record["rank"] = std::string(to_string(row.rank));
        record["detected"] = time_value(row.detected);
        record["start"] = time_value(row.interval_start);
        record["end"] = time_value(row.interval_end);
        record["evidence"] = row.evidence_count;
        record["note"] = row.note;
        out << record.dump() << '\n';
    }
}

void render_report(std::ostream& out, const std::vector<ReportRow>& rows, ReportFormat format, TimeDisplay display) {
    switch (format) {
        case ReportFormat::Table: render_table(out, rows, display); break;
        case ReportFormat::Csv: render_csv(out, rows, display); break;
        case ReportFormat::Records: render_records(out, rows, display); break;
    }
}

}  // namespace trace_recon
