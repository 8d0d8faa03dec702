#include "tracerecon/signatures.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

#include "tracerecon/bodyfile.hpp"

namespace trace_recon {

namespace {

std::string_view trim(std::string_view s) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

// Splits off the first whitespace-delimited word.
std::string_view take_word(std::string_view& rest) {
    rest = trim(rest);
    std::size_t end = 0;
    while (end < rest.size() && rest[end] != ' ' && rest[end] != '\t') ++end;
    std::string_view word = rest.substr(0, end);
    rest = trim(rest.substr(end));
    return word;
}

std::optional<TraceCategory> parse_category(std::string_view word) {
    const std::string lower = ascii_lower(word);
    if (lower == "core") return TraceCategory::Core;
    if (lower == "support" || lower == "supporting") return TraceCategory::Supporting;
    if (lower == "shared") return TraceCategory::Shared;
    return std::nullopt;
}

struct PendingSignature {
    std::size_t line{0};
    std::string name;
    std::optional<Seconds> theta;
    std::vector<TracePattern> traces;
};

}  // namespace

std::string_view to_string(TraceCategory category) {
    switch (category) {
        case TraceCategory::Core: return "core";
        case TraceCategory::Supporting: return "support";
        case TraceCategory::Shared: return "shared";
    }
    return "unknown";
}

PatternKey pattern_key(const TracePattern& trace) {
    return {trace.kind, ascii_lower(trace.pattern.source())};
}

SignaturePack SignaturePack::build(std::vector<Signature> signatures) {
    SignaturePack pack;
    std::set<std::string> names;
    for (const auto& sig : signatures) {
        if (sig.action_name.empty()) throw std::invalid_argument("signature without an action name");
        if (!names.insert(sig.action_name).second) {
            throw std::invalid_argument("duplicate action '" + sig.action_name + "'");
        }
        if (sig.theta <= 0) {
            throw std::invalid_argument("action '" + sig.action_name + "' needs a positive threshold");
        }
        if (sig.traces.empty()) {
            throw std::invalid_argument("action '" + sig.action_name + "' has no traces");
        }
    }

    std::map<PatternKey, std::set<std::string>> references;
    std::set<PatternKey> shared;
    for (const auto& sig : signatures) {
        for (const auto& trace : sig.traces) {
            const PatternKey key = pattern_key(trace);
            references[key].insert(sig.action_name);
            if (trace.category == TraceCategory::Shared) shared.insert(key);
        }
    }
    for (const auto& key : shared) pack.shared_index_[key] = references[key];
    pack.signatures_ = std::move(signatures);
    return pack;
}

const Signature* SignaturePack::find(std::string_view action_name) const {
    for (const auto& sig : signatures_) {
        if (sig.action_name == action_name) return &sig;
    }
    return nullptr;
}

SignaturePack parse_signature_pack(std::istream& in) {
    std::vector<Signature> done;
    std::set<std::string> names;
    std::optional<PendingSignature> pending;

    auto finish = [&]() {
        if (!pending) return;
        if (!pending->theta) throw SignatureError(pending->line, "action '" + pending->name + "' has no threshold");
        if (pending->traces.empty()) throw SignatureError(pending->line, "action '" + pending->name + "' has no traces");
        if (!names.insert(pending->name).second) {
            throw SignatureError(pending->line, "duplicate action '" + pending->name + "'");
        }
        done.push_back(Signature{pending->name, *pending->theta, std::move(pending->traces)});
        pending.reset();
    };

    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;

        if (line == "---") {
            finish();
            continue;
        }

        const std::size_t colon = line.find(':');
        const std::string_view head = colon == std::string_view::npos ? std::string_view{} : trim(line.substr(0, colon));
        if (head == "action") {
            finish();
            const std::string_view name = trim(line.substr(colon + 1));
            if (name.empty()) throw SignatureError(line_no, "empty action name");
            pending = PendingSignature{line_no, std::string(name), std::nullopt, {}};
            continue;
        }
        if (head == "threshold") {
            if (!pending) throw SignatureError(line_no, "threshold outside an action block");
            if (pending->theta) throw SignatureError(line_no, "threshold given twice");
            const std::string_view text = trim(line.substr(colon + 1));
            Seconds value = 0;
            auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
            if (ec != std::errc{} || ptr != text.data() + text.size()) {
                throw SignatureError(line_no, "threshold is not an integer: '" + std::string(text) + "'");
            }
            if (value <= 0) throw SignatureError(line_no, "threshold must be positive");
            pending->theta = value;
            continue;
        }

        std::string_view rest = line;
        const std::string_view category_word = take_word(rest);
        const auto category = parse_category(category_word);
        if (!category) throw SignatureError(line_no, "unknown category '" + std::string(category_word) + "'");
        if (!pending) throw SignatureError(line_no, "trace outside an action block");
        const std::string_view kind_word = take_word(rest);
        const auto kind = parse_timestamp_kind(kind_word);
        if (!kind) throw SignatureError(line_no, "unknown timestamp kind '" + std::string(kind_word) + "'");
        if (rest.empty()) throw SignatureError(line_no, "missing pattern");
        try {
            pending->traces.push_back(TracePattern{*category, *kind, Pattern::compile(rest)});
        } catch (const PatternError& e) {
            throw SignatureError(line_no, e.what());
        }
    }
    finish();

    try {
        return SignaturePack::build(std::move(done));
    } catch (const std::invalid_argument& e) {
        throw SignatureError(line_no, e.what());
    }
}

SignaturePack load_signature_pack(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path, "cannot open signature file");
    return parse_signature_pack(in);
}

SignaturePack merge_packs(std::span<const SignaturePack> packs) {
    std::vector<Signature> all;
    for (const auto& pack : packs) {
        all.insert(all.end(), pack.signatures().begin(), pack.signatures().end());
    }
    return SignaturePack::build(std::move(all));
}

std::vector<TraceState> match_signature(const Signature& signature,
                                        std::span<const ObjectRecord> objects,
                                        std::optional<TraceCategory> category) {
    std::vector<TraceState> states;
    for (const auto& object : objects) {
        // A file matched by two patterns of the same kind is one trace.
        bool taken[4] = {false, false, false, false};
        for (const auto& trace : signature.traces) {
            if (category && trace.category != *category) continue;
            const auto slot = static_cast<std::size_t>(trace.kind);
            if (taken[slot]) continue;
            const auto value = object.time(trace.kind);
            if (!value || !trace.pattern.search(object.path)) continue;
            taken[slot] = true;
            states.push_back(TraceState{object.path, trace.kind, *value});
        }
    }
    std::sort(states.begin(), states.end(), trace_order);
    return states;
}

std::vector<std::vector<TraceState>> match_objects(const SignaturePack& pack,
                                                   std::span<const ObjectRecord> objects) {
    std::vector<std::vector<TraceState>> out;
    out.reserve(pack.signatures().size());
    for (const auto& sig : pack.signatures()) out.push_back(match_signature(sig, objects));
    return out;
}

}  // namespace trace_recon
