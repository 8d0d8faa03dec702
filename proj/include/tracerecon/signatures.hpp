#pragma once

#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tracerecon/model.hpp"
#include "tracerecon/pattern.hpp"

namespace trace_recon {

enum class TraceCategory { Core, Supporting, Shared };

std::string_view to_string(TraceCategory category);

struct TracePattern {
    TraceCategory category{TraceCategory::Supporting};
    TimestampKind kind{TimestampKind::Modified};
    Pattern pattern;
};

struct Signature {
    std::string action_name;
    Seconds theta{0};
    std::vector<TracePattern> traces;
};

/// Identity of a trace pattern across signatures: kind plus lowercased source.
using PatternKey = std::pair<TimestampKind, std::string>;

PatternKey pattern_key(const TracePattern& trace);

class SignatureError : public std::runtime_error {
public:
    SignatureError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Immutable set of signatures plus an index of the shared patterns.
class SignaturePack {
public:
    SignaturePack() = default;

    /// Validates the signature invariants (unique names, theta > 0, at least
    /// one trace) and builds the shared index. Throws std::invalid_argument.
    static SignaturePack build(std::vector<Signature> signatures);

    const std::vector<Signature>& signatures() const { return signatures_; }

    /// Patterns used with the Shared category by at least one signature,
    /// mapped to every action that references the pattern.
    const std::map<PatternKey, std::set<std::string>>& shared_index() const { return shared_index_; }

    const Signature* find(std::string_view action_name) const;

private:
    std::vector<Signature> signatures_;
    std::map<PatternKey, std::set<std::string>> shared_index_;
};

/// Parses the line-oriented signature file format:
///
///     action: Open Firefox 3.6
///     threshold: 50
///     core modified .*/Prefetch/Firefox\.EXE-.*\.pf
///     ---
///
/// Errors carry the offending line number.
SignaturePack parse_signature_pack(std::istream& in);

/// Same, from a file. Throws IoError if unreadable, SignatureError on syntax.
SignaturePack load_signature_pack(const std::string& path);

/// Concatenates packs; throws std::invalid_argument on duplicate actions.
SignaturePack merge_packs(std::span<const SignaturePack> packs);

/// Trace states of one signature over `objects`, sorted by trace_order.
/// With a category filter only traces of that category are considered. An
/// object contributes at most one state per timestamp kind.
std::vector<TraceState> match_signature(const Signature& signature,
                                        std::span<const ObjectRecord> objects,
                                        std::optional<TraceCategory> category = std::nullopt);

/// match_signature for every signature in the pack, in pack order.
std::vector<std::vector<TraceState>> match_objects(const SignaturePack& pack,
                                                   std::span<const ObjectRecord> objects);

}  // namespace trace_recon
