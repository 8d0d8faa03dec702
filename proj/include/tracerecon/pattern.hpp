#pragma once

#include <bitset>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace trace_recon {

class PatternError : public std::runtime_error {
public:
    PatternError(std::string_view source, std::size_t offset, const std::string& what)
        : std::runtime_error("pattern '" + std::string(source) + "' at offset " +
                             std::to_string(offset) + ": " + what) {}
};

/// Case-insensitive path pattern with search semantics.
///
/// Supported syntax is a small portable regex subset:
///   - literal characters, and `\x` for any literal x (so `\.`, `\[`, `\\`)
///   - `.` for any character
///   - `[...]` / `[^...]` classes with ranges (`[0-9]`) and escapes
///   - the quantifiers `*`, `+`, `?`, `{m}`, `{m,}`, `{m,n}`
///   - `^` at the start and `$` at the end
///
/// Groups and alternation are rejected at compile time. Matching is a
/// position-set simulation, linear in pattern length times input length.
class Pattern {
public:
    /// Throws PatternError on empty input or unsupported syntax.
    static Pattern compile(std::string_view source);

    /// True when the pattern matches anywhere in `text` (or at the anchors).
    bool search(std::string_view text) const;

    const std::string& source() const { return source_; }

private:
    enum class Repeat : std::uint8_t { Once, Optional, Star };

    struct Atom {
        std::bitset<256> accepts;
        Repeat repeat{Repeat::Once};
    };

    Pattern() = default;

    std::string source_;
    std::vector<Atom> atoms_;
    bool anchored_start_{false};
    bool anchored_end_{false};
};

/// Escapes a literal string so that Pattern::compile matches it verbatim.
std::string escape_pattern_literal(std::string_view literal);

}  // namespace trace_recon
