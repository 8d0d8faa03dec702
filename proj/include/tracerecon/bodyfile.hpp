#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tracerecon/model.hpp"

namespace trace_recon {

/// One raw line of a Sleuth Kit 3.x body file:
/// `MD5|name|inode|mode_as_string|UID|GID|size|atime|mtime|ctime|crtime`
struct BodyfileLine {
    std::string md5;
    std::string name;
    std::string inode;
    std::string mode;
    std::int64_t uid{0};
    std::int64_t gid{0};
    std::int64_t size{0};
    std::int64_t atime{0};
    std::int64_t mtime{0};
    std::int64_t ctime{0};
    std::int64_t crtime{0};
};

struct ParseDiagnostic {
    std::size_t line{0};  // 1-based
    std::string message;
};

struct BodyfileParse {
    std::vector<ObjectRecord> records;
    std::vector<ParseDiagnostic> diagnostics;
};

/// Splits and validates a single line. On failure returns std::nullopt and
/// writes the reason to `error`.
std::optional<BodyfileLine> parse_bodyfile_line(std::string_view line, std::string& error);

/// Converts a parsed line to a record: zero times become absent, backslashes
/// become forward slashes and a trailing " (deleted)" sets the deleted flag.
ObjectRecord to_object_record(const BodyfileLine& line);

/// Parses a whole body file. Malformed lines produce diagnostics and are
/// skipped; blank lines and `#` comments are ignored silently.
BodyfileParse parse_bodyfile(std::istream& in);

/// Formats a record as a body file line (no trailing newline). Throws
/// std::invalid_argument when the path contains `|` or a newline.
std::string to_bodyfile_line(const ObjectRecord& record);

void write_bodyfile(std::ostream& out, std::span<const ObjectRecord> records);

enum class MetadataFormat { Bodyfile };

std::optional<MetadataFormat> parse_metadata_format(std::string_view tag);

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

/// Reads metadata from `source` (`-` is stdin). Throws IoError when the
/// source cannot be opened. Diagnostics are appended when a sink is given.
std::vector<ObjectRecord> load_metadata(const std::string& source, MetadataFormat format,
                                        std::vector<ParseDiagnostic>* diagnostics = nullptr);

}  // namespace trace_recon
