#include "tracerecon/pattern.hpp"

#include <cctype>

namespace trace_recon {

namespace {

constexpr std::size_t kMaxRepeat = 255;

constexpr std::string_view kMetaChars = ".[]()*+?{}|^$\\";

unsigned char fold(unsigned char c) {
    return static_cast<unsigned char>(std::tolower(c));
}

void add_char(std::bitset<256>& set, unsigned char c) {
    set.set(fold(c));
}

}  // namespace

Pattern Pattern::compile(std::string_view source) {
    if (source.empty()) throw PatternError(source, 0, "empty pattern");

    Pattern p;
    p.source_ = std::string(source);

    std::size_t i = 0;
    const std::size_t n = source.size();
    if (source[0] == '^') {
        p.anchored_start_ = true;
        ++i;
    }

    // Set while the last emitted atom may still take a quantifier.
    bool have_atom = false;

    while (i < n) {
        const char c = source[i];
        const std::size_t at = i;

        if (c == '$') {
            if (i + 1 != n) throw PatternError(source, at, "'$' is only allowed at the end");
            p.anchored_end_ = true;
            ++i;
            have_atom = false;
            continue;
        }
        if (c == '(' || c == ')' || c == '|') {
            throw PatternError(source, at, std::string("unsupported construct '") + c + "'");
        }
        if (c == '^') throw PatternError(source, at, "'^' is only allowed at the start");

        if (c == '*' || c == '+' || c == '?' || c == '{') {
            if (!have_atom) throw PatternError(source, at, "quantifier without a preceding atom");
            Atom base = p.atoms_.back();
            p.atoms_.pop_back();
            std::size_t min_count = 0;
            std::size_t max_count = 0;  // 0 with unbounded = star tail
            bool unbounded = false;
            if (c == '*') {
                unbounded = true;
                ++i;
            } else if (c == '+') {
                min_count = 1;
                unbounded = true;
                ++i;
            } else if (c == '?') {
                max_count = 1;
                ++i;
            } else {
                const std::size_t close = source.find('}', i);
                if (close == std::string_view::npos) throw PatternError(source, at, "unterminated '{'");
                const std::string_view body = source.substr(i + 1, close - i - 1);
                const std::size_t comma = body.find(',');
                auto parse_count = [&](std::string_view digits) {
                    if (digits.empty() || digits.size() > 3) {
                        throw PatternError(source, at, "bad repetition count");
                    }
                    std::size_t v = 0;
                    for (char d : digits) {
                        if (d < '0' || d > '9') throw PatternError(source, at, "bad repetition count");
                        v = v * 10 + static_cast<std::size_t>(d - '0');
                    }
                    if (v > kMaxRepeat) throw PatternError(source, at, "repetition count too large");
                    return v;
                };
                if (comma == std::string_view::npos) {
                    min_count = max_count = parse_count(body);
                } else {
                    min_count = parse_count(body.substr(0, comma));
                    const std::string_view upper = body.substr(comma + 1);
                    if (upper.empty()) {
                        unbounded = true;
                    } else {
                        max_count = parse_count(upper);
                        if (max_count < min_count) throw PatternError(source, at, "bad repetition range");
                    }
                }
                i = close + 1;
            }
            for (std::size_t k = 0; k < min_count; ++k) p.atoms_.push_back(base);
            if (unbounded) {
                base.repeat = Repeat::Star;
                p.atoms_.push_back(base);
            } else {
                base.repeat = Repeat::Optional;
                for (std::size_t k = min_count; k < max_count; ++k) p.atoms_.push_back(base);
            }
            have_atom = false;
            continue;
        }

        Atom atom;
        if (c == '.') {
            atom.accepts.set();
            ++i;
        } else if (c == '\\') {
            if (i + 1 >= n) throw PatternError(source, at, "trailing backslash");
            add_char(atom.accepts, static_cast<unsigned char>(source[i + 1]));
            i += 2;
        } else if (c == '[') {
            ++i;
            bool negate = false;
            if (i < n && source[i] == '^') {
                negate = true;
                ++i;
            }
            std::bitset<256> set;
            bool first = true;
            bool closed = false;
            while (i < n) {
                char lo = source[i];
                if (lo == ']' && !first) {
                    closed = true;
                    ++i;
                    break;
                }
                first = false;
                if (lo == '\\') {
                    if (i + 1 >= n) break;
                    lo = source[i + 1];
                    i += 2;
                } else {
                    ++i;
                }
                char hi = lo;
                if (i + 1 < n && source[i] == '-' && source[i + 1] != ']') {
                    hi = source[i + 1];
                    i += 2;
                    if (hi == '\\') {
                        if (i >= n) break;
                        hi = source[i];
                        ++i;
                    }
                    if (static_cast<unsigned char>(hi) < static_cast<unsigned char>(lo)) {
                        throw PatternError(source, at, "reversed class range");
                    }
                }
                for (unsigned v = static_cast<unsigned char>(lo); v <= static_cast<unsigned char>(hi); ++v) {
                    add_char(set, static_cast<unsigned char>(v));
                }
            }
            if (!closed) throw PatternError(source, at, "unterminated character class");
            if (negate) {
                // Negation is computed over folded characters so that [^a]
                // also rejects 'A'.
                std::bitset<256> folded;
                for (unsigned v = 0; v < 256; ++v) {
                    if (!set.test(fold(static_cast<unsigned char>(v)))) folded.set(v);
                }
                set = folded;
            }
            atom.accepts = set;
        } else if (c == ']' || c == '}') {
            throw PatternError(source, at, std::string("unbalanced '") + c + "'");
        } else {
            add_char(atom.accepts, static_cast<unsigned char>(c));
            ++i;
        }
        p.atoms_.push_back(atom);
        have_atom = true;
    }
    if (p.atoms_.empty()) throw PatternError(source, 0, "pattern matches nothing but anchors");
    return p;
}

bool Pattern::search(std::string_view text) const {
    const std::size_t count = atoms_.size();
    // State k means "the first k atoms have been matched".
    std::vector<char> current(count + 1, 0);
    std::vector<char> next(count + 1, 0);

    auto close_over_optional = [&](std::vector<char>& states) {
        for (std::size_t k = 0; k < count; ++k) {
            if (states[k] && atoms_[k].repeat != Repeat::Once) states[k + 1] = 1;
        }
    };

    current[0] = 1;
    close_over_optional(current);
    if (current[count] && !anchored_end_) return true;

    for (std::size_t pos = 0; pos < text.size(); ++pos) {
        const unsigned char ch = fold(static_cast<unsigned char>(text[pos]));
        std::fill(next.begin(), next.end(), 0);
        for (std::size_t k = 0; k < count; ++k) {
            if (!current[k] || !atoms_[k].accepts.test(ch)) continue;
            if (atoms_[k].repeat == Repeat::Star) {
                next[k] = 1;
            } else {
                next[k + 1] = 1;
            }
        }
        if (!anchored_start_) next[0] = 1;
        close_over_optional(next);
        current.swap(next);
        if (current[count] && !anchored_end_) return true;
    }
    return current[count] != 0;
}

std::string escape_pattern_literal(std::string_view literal) {
    std::string out;
    out.reserve(literal.size() * 2);
    for (char c : literal) {
        if (kMetaChars.find(c) != std::string_view::npos) out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

}  // namespace trace_recon
