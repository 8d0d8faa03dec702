#include "tracerecon/model.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <stdexcept>
#include <tuple>

namespace trace_recon {

std::string_view to_string(TimestampKind kind) {
    switch (kind) {
        case TimestampKind::Accessed: return "accessed";
        case TimestampKind::Modified: return "modified";
        case TimestampKind::Created: return "created";
        case TimestampKind::MetaChanged: return "metachanged";
    }
    return "unknown";
}

std::optional<TimestampKind> parse_timestamp_kind(std::string_view word) {
    const std::string lower = ascii_lower(word);
    for (TimestampKind kind : kAllTimestampKinds) {
        if (lower == to_string(kind)) return kind;
    }
    return std::nullopt;
}

std::optional<Timestamp> ObjectRecord::time(TimestampKind kind) const {
    switch (kind) {
        case TimestampKind::Accessed: return accessed;
        case TimestampKind::Modified: return modified;
        case TimestampKind::Created: return created;
        case TimestampKind::MetaChanged: return metachanged;
    }
    return std::nullopt;
}

std::optional<Timestamp>& ObjectRecord::time_slot(TimestampKind kind) {
    switch (kind) {
        case TimestampKind::Accessed: return accessed;
        case TimestampKind::Modified: return modified;
        case TimestampKind::Created: return created;
        case TimestampKind::MetaChanged: break;
    }
    return metachanged;
}

bool ObjectRecord::has_any_time() const {
    return accessed || modified || metachanged || created;
}

bool trace_order(const TraceState& a, const TraceState& b) {
    return std::tie(a.value, a.object_path, a.kind) < std::tie(b.value, b.object_path, b.kind);
}

bool TimeInterval::contains(Timestamp t) const {
    if (start && t < *start) return false;
    if (end && *end < t) return false;
    return true;
}

std::string_view to_string(InstanceRank rank) {
    return rank == InstanceRank::MostRecent ? "most-recent" : "past";
}

std::string_view to_string(ConfidenceNote note) {
    switch (note) {
        case ConfidenceNote::Definite: return "definite";
        case ConfidenceNote::SharedAmbiguous: return "shared-ambiguous";
        case ConfidenceNote::ParallelInstanceDiagnostic: return "parallel-instances";
    }
    return "unknown";
}

TimeInterval aia(Timestamp tau, Seconds theta) {
    if (theta < 0) throw std::invalid_argument("threshold must be non-negative");
    return TimeInterval{Timestamp{std::max<std::int64_t>(0, tau.seconds - theta)}, tau};
}

std::string format_utc(Timestamp t) {
    using namespace std::chrono;
    const sys_seconds at{seconds{t.seconds}};
    const auto day = floor<days>(at);
    const year_month_day ymd{day};
    const hh_mm_ss hms{at - day};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

}  // namespace trace_recon
