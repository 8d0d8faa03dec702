#include "tracerecon/simulator.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "tracerecon/bodyfile.hpp"

namespace trace_recon {

namespace {

std::string_view trim(std::string_view s) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::string_view take_word(std::string_view& rest) {
    rest = trim(rest);
    std::size_t end = 0;
    while (end < rest.size() && rest[end] != ' ' && rest[end] != '\t') ++end;
    std::string_view word = rest.substr(0, end);
    rest = trim(rest.substr(end));
    return word;
}

template <typename Int>
bool parse_int(std::string_view text, Int& out) {
    if (text.empty()) return false;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

// Uniform integer in [0, bound] from raw 64-bit draws.
std::uint64_t uniform_below_or_equal(SimulationRng& rng, std::uint64_t bound) {
    if (bound == 0) return 0;
    const std::uint64_t range = bound + 1;
    if (range == 0) return rng();
    const std::uint64_t limit = SimulationRng::max() - SimulationRng::max() % range;
    for (;;) {
        const std::uint64_t x = rng();
        if (x < limit) return x % range;
    }
}

std::size_t pick(SimulationRng& rng, std::size_t count) {
    return static_cast<std::size_t>(uniform_below_or_equal(rng, count - 1));
}

bool coin(SimulationRng& rng) { return (rng() >> 63) != 0; }

}  // namespace

void ActionSpec::validate() const {
    if (name.empty()) throw std::invalid_argument("action without a name");
    if (variants.empty()) throw std::invalid_argument("action '" + name + "' has no variants");
    if (theta < 0) throw std::invalid_argument("action '" + name + "' has a negative threshold");
    for (const auto& variant : variants) {
        for (const auto& d : variant.defaults) {
            for (const auto& u : variant.updates) {
                if (u.path == d.path && u.kind == d.kind) {
                    throw std::invalid_argument("action '" + name + "' both updates and defaults " + d.path);
                }
            }
        }
    }
}

Seconds draw_delay(SimulationRng& rng, Seconds theta) {
    if (theta <= 0) return 0;
    return static_cast<Seconds>(uniform_below_or_equal(rng, static_cast<std::uint64_t>(theta)));
}

ObjectState apply_instance(ObjectState state, const ActionSpec& spec, std::size_t variant, Timestamp tau,
                           SimulationRng& rng, std::vector<WriteEvent>* log, std::size_t instance_index) {
    if (variant >= spec.variants.size()) {
        throw SimulationError("action '" + spec.name + "' has no variant " + std::to_string(variant));
    }
    const PathVariant& path = spec.variants[variant];

    auto object_at = [&](const std::string& p) -> ObjectRecord& {
        auto [it, inserted] = state.try_emplace(p);
        if (inserted) it->second.path = p;
        return it->second;
    };

    for (const auto& p : path.creates) object_at(p);
    for (const auto& target : path.updates) {
        const Timestamp value{tau.seconds + draw_delay(rng, spec.theta)};
        object_at(target.path).time_slot(target.kind) = value;
        if (log) log->push_back(WriteEvent{instance_index, target.path, target.kind, value, false});
    }
    for (const auto& target : path.defaults) {
        object_at(target.path).time_slot(target.kind) = target.value;
        if (log) log->push_back(WriteEvent{instance_index, target.path, target.kind, target.value, true});
    }
    return state;
}

SimulationResult simulate(const ObjectState& initial, const ActionSpecs& specs,
                          const InstanceSchedule& schedule, std::uint64_t seed) {
    std::vector<ScheduledInstance> entries = schedule.entries;
    std::stable_sort(entries.begin(), entries.end(),
                     [](const ScheduledInstance& a, const ScheduledInstance& b) { return a.tau < b.tau; });

    SimulationRng rng(seed);
    SimulationResult result;
    result.final_state = initial;
    for (const auto& entry : entries) {
        const auto it = specs.find(entry.action);
        if (it == specs.end()) throw SimulationError("unknown action '" + entry.action + "'");
        const ActionSpec& spec = it->second;
        const std::size_t variant = entry.variant ? *entry.variant : pick(rng, spec.variants.size());
        const std::size_t index = result.truth.instances.size();
        result.truth.instances.push_back(TrueInstance{entry.action, entry.tau, variant});
        result.final_state = apply_instance(std::move(result.final_state), spec, variant, entry.tau, rng,
                                            &result.truth.writes, index);
    }
    return result;
}

std::vector<ObjectRecord> to_object_records(const ObjectState& state) {
    std::vector<ObjectRecord> out;
    for (const auto& [path, record] : state) {
        if (record.has_any_time()) out.push_back(record);
    }
    return out;
}

void write_ground_truth(std::ostream& out, const GroundTruth& truth) {
    out << "# instance\tindex\ttau\tvariant\taction\n";
    out << "# write\tindex\tvalue\tkind\tsource\tpath\n";
    for (std::size_t i = 0; i < truth.instances.size(); ++i) {
        const auto& inst = truth.instances[i];
        out << "instance\t" << i << '\t' << inst.tau.seconds << '\t' << inst.variant << '\t' << inst.action << '\n';
    }
    for (const auto& w : truth.writes) {
        out << "write\t" << w.instance << '\t' << w.value.seconds << '\t' << to_string(w.kind) << '\t'
            << (w.is_default ? "da" : "ma") << '\t' << w.path << '\n';
    }
}

std::map<std::string, std::set<UpdateTarget>> core_targets(const ActionSpecs& specs) {
    std::map<UpdateTarget, std::set<std::string>> writers;
    for (const auto& [name, spec] : specs) {
        for (const auto& variant : spec.variants) {
            for (const auto& target : variant.updates) writers[target].insert(name);
        }
    }
    std::map<std::string, std::set<UpdateTarget>> out;
    for (const auto& [name, spec] : specs) {
        auto& core = out[name];
        if (spec.variants.empty()) continue;
        for (const auto& target : spec.variants.front().updates) {
            if (writers[target].size() != 1) continue;
            const bool everywhere = std::all_of(spec.variants.begin(), spec.variants.end(), [&](const PathVariant& v) {
                return std::find(v.updates.begin(), v.updates.end(), target) != v.updates.end();
            });
            if (everywhere) core.insert(target);
        }
    }
    return out;
}

SignaturePack derive_signature_pack(const ActionSpecs& specs) {
    std::map<UpdateTarget, std::set<std::string>> writers;
    for (const auto& [name, spec] : specs) {
        for (const auto& variant : spec.variants) {
            for (const auto& target : variant.updates) writers[target].insert(name);
        }
    }
    const auto core = core_targets(specs);

    std::vector<Signature> signatures;
    for (const auto& [name, spec] : specs) {
        std::set<UpdateTarget> targets;
        for (const auto& variant : spec.variants) targets.insert(variant.updates.begin(), variant.updates.end());
        if (targets.empty()) continue;

        Signature sig{name, std::max<Seconds>(spec.theta, 1), {}};
        for (const auto& target : targets) {
            TraceCategory category = TraceCategory::Supporting;
            if (writers[target].size() > 1) {
                category = TraceCategory::Shared;
            } else if (core.at(name).contains(target)) {
                category = TraceCategory::Core;
            }
            sig.traces.push_back(
                TracePattern{category, target.kind, Pattern::compile("^" + escape_pattern_literal(target.path) + "$")});
        }
        signatures.push_back(std::move(sig));
    }
    return SignaturePack::build(std::move(signatures));
}

void write_signature_pack(std::ostream& out, const SignaturePack& pack) {
    bool first = true;
    for (const auto& sig : pack.signatures()) {
        if (!first) out << "---\n";
        first = false;
        out << "action: " << sig.action_name << '\n';
        out << "threshold: " << sig.theta << '\n';
        for (const auto& trace : sig.traces) {
            out << to_string(trace.category) << ' ' << to_string(trace.kind) << ' ' << trace.pattern.source() << '\n';
        }
    }
}

Scenario parse_scenario(std::istream& in) {
    Scenario scenario;
    std::optional<ActionSpec> pending;
    std::size_t pending_line = 0;
    bool in_schedule = false;
    std::vector<std::size_t> schedule_lines;

    auto finish = [&]() {
        if (!pending) return;
        if (pending->variants.empty()) throw ScenarioError(pending_line, "action '" + pending->name + "' has no variants");
        try {
            pending->validate();
        } catch (const std::invalid_argument& e) {
            throw ScenarioError(pending_line, e.what());
        }
        const std::string name = pending->name;
        if (!scenario.specs.emplace(name, std::move(*pending)).second) {
            throw ScenarioError(pending_line, "duplicate action '" + name + "'");
        }
        pending.reset();
    };
    auto current_variant = [&](std::size_t line_no) -> PathVariant& {
        if (!pending) throw ScenarioError(line_no, "target outside an action block");
        if (pending->variants.empty()) pending->variants.emplace_back();
        return pending->variants.back();
    };

    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (line == "---") {
            finish();
            in_schedule = false;
            continue;
        }

        if (in_schedule) {
            std::string_view rest = line;
            const std::string_view tau_word = take_word(rest);
            std::int64_t tau = 0;
            if (!parse_int(tau_word, tau) || tau < 0) throw ScenarioError(line_no, "bad instance time '" + std::string(tau_word) + "'");
            const std::size_t split = rest.find_last_of(" \t");
            if (split == std::string_view::npos) throw ScenarioError(line_no, "expected '<epoch> <action> <variant>'");
            const std::string_view variant_word = trim(rest.substr(split + 1));
            const std::string_view action = trim(rest.substr(0, split));
            ScheduledInstance entry{std::string(action), Timestamp{tau}, std::nullopt};
            if (variant_word != "*") {
                std::size_t v = 0;
                if (!parse_int(variant_word, v)) throw ScenarioError(line_no, "bad variant '" + std::string(variant_word) + "'");
                entry.variant = v;
            }
            scenario.schedule.entries.push_back(std::move(entry));
            schedule_lines.push_back(line_no);
            continue;
        }

        const std::size_t colon = line.find(':');
        const std::string_view head = colon == std::string_view::npos ? std::string_view{} : trim(line.substr(0, colon));
        if (head == "action") {
            finish();
            const std::string_view name = trim(line.substr(colon + 1));
            if (name.empty()) throw ScenarioError(line_no, "empty action name");
            pending = ActionSpec{std::string(name), {}, 1};
            pending_line = line_no;
            continue;
        }
        if (head == "threshold") {
            if (!pending) throw ScenarioError(line_no, "threshold outside an action block");
            Seconds theta = 0;
            if (!parse_int(trim(line.substr(colon + 1)), theta) || theta <= 0) {
                throw ScenarioError(line_no, "threshold must be a positive integer");
            }
            pending->theta = theta;
            continue;
        }
        if (head == "variant") {
            if (!pending) throw ScenarioError(line_no, "variant outside an action block");
            pending->variants.emplace_back();
            continue;
        }
        if (head == "schedule") {
            finish();
            in_schedule = true;
            continue;
        }

        std::string_view rest = line;
        const std::string verb = ascii_lower(take_word(rest));
        if (verb == "ma" || verb == "da") {
            const std::string_view kind_word = take_word(rest);
            const auto kind = parse_timestamp_kind(kind_word);
            if (!kind) throw ScenarioError(line_no, "unknown timestamp kind '" + std::string(kind_word) + "'");
            PathVariant& variant = current_variant(line_no);
            if (verb == "ma") {
                if (rest.empty()) throw ScenarioError(line_no, "missing path");
                variant.updates.push_back(UpdateTarget{std::string(rest), *kind});
            } else {
                const std::string_view value_word = take_word(rest);
                std::int64_t value = 0;
                if (!parse_int(value_word, value) || value <= 0) throw ScenarioError(line_no, "bad default time");
                if (rest.empty()) throw ScenarioError(line_no, "missing path");
                variant.defaults.push_back(DefaultTarget{std::string(rest), *kind, Timestamp{value}});
            }
        } else if (verb == "oa") {
            if (rest.empty()) throw ScenarioError(line_no, "missing path");
            current_variant(line_no).creates.emplace_back(rest);
        } else {
            throw ScenarioError(line_no, "unrecognised line");
        }
    }
    finish();

    for (std::size_t i = 0; i < scenario.schedule.entries.size(); ++i) {
        const auto& entry = scenario.schedule.entries[i];
        const auto it = scenario.specs.find(entry.action);
        if (it == scenario.specs.end()) throw ScenarioError(schedule_lines[i], "unknown action '" + entry.action + "'");
        if (entry.variant && *entry.variant >= it->second.variants.size()) {
            throw ScenarioError(schedule_lines[i], "action '" + entry.action + "' has no variant " + std::to_string(*entry.variant));
        }
    }
    return scenario;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path, "cannot open scenario file");
    return parse_scenario(in);
}

OracleReport oracle_check(const GroundTruth& truth, const ActionSpecs& specs,
                          std::span<const ActionInstanceApproximation> results) {
    OracleReport report;
    auto fail = [&](bool& flag, std::string property, const std::string& action, std::string detail) {
        flag = false;
        report.violations.push_back(OracleViolation{std::move(property), action, std::move(detail)});
    };

    std::map<std::string, std::vector<Timestamp>> true_times;
    for (const auto& inst : truth.instances) true_times[inst.action].push_back(inst.tau);
    std::map<std::string, std::size_t> reported;

    for (const auto& r : results) {
        ++reported[r.action_name];
        const auto& times = true_times[r.action_name];
        const bool covered = std::any_of(times.begin(), times.end(), [&](Timestamp t) { return r.interval.contains(t); });
        if (!covered) {
            std::ostringstream detail;
            detail << "interval [" << (r.interval.start ? std::to_string(r.interval.start->seconds) : "-inf") << ", "
                   << (r.interval.end ? std::to_string(r.interval.end->seconds) : "+inf")
                   << "] contains no true instance";
            fail(report.soundness, "soundness", r.action_name, detail.str());
        }
    }
    for (const auto& [action, count] : reported) {
        const std::size_t actual = true_times[action].size();
        if (actual == 0) {
            fail(report.no_false_positives, "false-positive", action,
                 std::to_string(count) + " approximation(s) for an action that never ran");
        } else if (count > actual) {
            fail(report.count_bound, "count-bound", action,
                 std::to_string(count) + " approximations for " + std::to_string(actual) + " instance(s)");
        }
    }

    const auto core = core_targets(specs);
    for (const auto& [action, targets] : core) {
        if (targets.empty()) continue;
        const auto it = true_times.find(action);
        if (it == true_times.end() || it->second.empty()) continue;
        const Timestamp last = *std::max_element(it->second.begin(), it->second.end());
        const auto most_recent = std::find_if(results.begin(), results.end(), [&](const ActionInstanceApproximation& r) {
            return r.action_name == action && r.rank == InstanceRank::MostRecent;
        });
        if (most_recent == results.end()) {
            fail(report.most_recent, "most-recent", action, "no most-recent approximation");
        } else if (!most_recent->interval.contains(last)) {
            fail(report.most_recent, "most-recent", action,
                 "most-recent interval misses last instance at " + std::to_string(last.seconds));
        }
    }
    return report;
}

Scenario make_random_scenario(std::uint64_t seed, const RandomScenarioLimits& limits) {
    SimulationRng rng(seed);
    Scenario scenario;

    const std::size_t action_count = 1 + pick(rng, std::max<std::size_t>(limits.max_actions, 1));
    const std::size_t object_count = 1 + pick(rng, std::max<std::size_t>(limits.max_objects, 1));

    std::vector<std::string> names;
    for (std::size_t a = 0; a < action_count; ++a) {
        names.push_back("Action" + std::string(1, static_cast<char>('A' + a)));
        ActionSpec spec;
        spec.name = names.back();
        spec.theta = limits.min_theta +
                     static_cast<Seconds>(uniform_below_or_equal(rng, static_cast<std::uint64_t>(limits.max_theta - limits.min_theta)));
        scenario.specs.emplace(spec.name, spec);
    }

    // Each object carries one trace with an intended role.
    enum class Role { Core, Support, Shared };
    struct Trace {
        UpdateTarget target;
        Role role;
        std::set<std::string> owners;
    };
    std::vector<Trace> traces;
    for (std::size_t o = 0; o < object_count; ++o) {
        Trace trace;
        trace.target = UpdateTarget{"C:/sim/obj" + std::to_string(o) + ".dat", kAllTimestampKinds[pick(rng, 4)]};
        const std::size_t roll = pick(rng, 3);
        trace.role = roll == 0 ? Role::Core : roll == 1 ? Role::Support : Role::Shared;
        if (trace.role == Role::Shared && (!limits.shared_traces || action_count < 2)) trace.role = Role::Support;
        trace.owners.insert(names[pick(rng, action_count)]);
        if (trace.role == Role::Shared) {
            while (trace.owners.size() < 2) trace.owners.insert(names[pick(rng, action_count)]);
        }
        traces.push_back(std::move(trace));
    }

    for (auto& [name, spec] : scenario.specs) {
        const std::size_t variant_count = 1 + pick(rng, 3);
        for (std::size_t v = 0; v < variant_count; ++v) {
            PathVariant variant;
            for (const auto& trace : traces) {
                if (!trace.owners.contains(name)) continue;
                if (trace.role == Role::Core || coin(rng)) {
                    variant.updates.push_back(trace.target);
                    if (coin(rng)) variant.creates.push_back(trace.target.path);
                }
            }
            spec.variants.push_back(std::move(variant));
        }
    }

    const std::size_t instance_count = 1 + pick(rng, std::max<std::size_t>(limits.max_instances, 1));
    const std::int64_t base = 1300000000;
    for (std::size_t i = 0; i < instance_count; ++i) {
        const std::string& name = names[pick(rng, action_count)];
        const auto offset = static_cast<std::int64_t>(uniform_below_or_equal(rng, static_cast<std::uint64_t>(limits.horizon)));
        const std::size_t variant = pick(rng, scenario.specs.at(name).variants.size());
        scenario.schedule.entries.push_back(ScheduledInstance{name, Timestamp{base + offset}, variant});
    }
    std::stable_sort(scenario.schedule.entries.begin(), scenario.schedule.entries.end(),
                     [](const ScheduledInstance& a, const ScheduledInstance& b) { return a.tau < b.tau; });
    return scenario;
}

}  // namespace trace_recon
