#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace trace_recon {

/// Whole seconds. Used for thresholds and delays.
using Seconds = std::int64_t;

/// Seconds since the Unix epoch, UTC.
struct Timestamp {
    std::int64_t seconds{0};

    friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

enum class TimestampKind { Accessed, Modified, Created, MetaChanged };

inline constexpr TimestampKind kAllTimestampKinds[] = {
    TimestampKind::Accessed, TimestampKind::Modified, TimestampKind::Created,
    TimestampKind::MetaChanged};

std::string_view to_string(TimestampKind kind);

/// Accepts the lowercase keywords used by signature and scenario files
/// (`accessed`, `modified`, `created`, `metachanged`), case-insensitively.
std::optional<TimestampKind> parse_timestamp_kind(std::string_view word);

/// One file-system object as seen in a metadata extract.
struct ObjectRecord {
    std::string path;
    std::optional<Timestamp> accessed;
    std::optional<Timestamp> modified;
    std::optional<Timestamp> metachanged;
    std::optional<Timestamp> created;
    bool deleted{false};

    std::optional<Timestamp> time(TimestampKind kind) const;
    std::optional<Timestamp>& time_slot(TimestampKind kind);
    bool has_any_time() const;

    friend bool operator==(const ObjectRecord&, const ObjectRecord&) = default;
};

/// A resolved (object, timestamp kind, value) triple.
struct TraceState {
    std::string object_path;
    TimestampKind kind{TimestampKind::Modified};
    Timestamp value;

    friend bool operator==(const TraceState&, const TraceState&) = default;
};

/// Orders by value, then path, then kind. Every sorted list of trace states in
/// the library uses this order so results do not depend on input order.
bool trace_order(const TraceState& a, const TraceState& b);

/// Closed interval; an absent bound means no limit in that direction.
struct TimeInterval {
    std::optional<Timestamp> start;
    std::optional<Timestamp> end;

    bool contains(Timestamp t) const;

    friend bool operator==(const TimeInterval&, const TimeInterval&) = default;
};

enum class InstanceRank { MostRecent, Past };

enum class ConfidenceNote { Definite, SharedAmbiguous, ParallelInstanceDiagnostic };

std::string_view to_string(InstanceRank rank);
std::string_view to_string(ConfidenceNote note);

/// An action together with the interval in which one of its instances must
/// have happened. `anchor` is the oldest trace value that pins the instance.
struct ActionInstanceApproximation {
    std::string action_name;
    TimeInterval interval;
    Timestamp anchor;
    std::vector<TraceState> evidence;
    InstanceRank rank{InstanceRank::Past};
    ConfidenceNote note{ConfidenceNote::Definite};

    friend bool operator==(const ActionInstanceApproximation&, const ActionInstanceApproximation&) = default;
};

/// Interval [tau - theta, tau] in which the instance that wrote `tau` ran.
/// The lower bound is clamped at the epoch. Throws std::invalid_argument for a
/// negative threshold.
TimeInterval aia(Timestamp tau, Seconds theta);

/// ISO-8601 rendering, e.g. `2011-07-24T15:02:31Z`.
std::string format_utc(Timestamp t);

/// Lowercases ASCII letters; paths are compared case-insensitively.
std::string ascii_lower(std::string_view s);

}  // namespace trace_recon
