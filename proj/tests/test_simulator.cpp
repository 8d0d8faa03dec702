#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "support.hpp"
#include "tracerecon/bodyfile.hpp"
#include "tracerecon/engine.hpp"
#include "tracerecon/simulator.hpp"

using namespace trace_recon;

namespace {

ActionSpec editor_spec(Seconds theta = 40) {
    PathVariant v;
    v.updates = {{"C:/app/settings.ini", TimestampKind::Modified}, {"C:/app/app.exe", TimestampKind::Accessed}};
    v.defaults = {{"C:/app/template.dot", TimestampKind::Created, Timestamp{1262304000}}};
    v.creates = {"C:/app/cache"};
    return ActionSpec{"Open Editor", {v}, theta};
}

Scenario parse(const std::string& text) {
    std::istringstream in(text);
    return parse_scenario(in);
}

std::size_t scenario_error_line(const std::string& text) {
    try {
        parse(text);
    } catch (const ScenarioError& e) {
        return e.line();
    }
    return 0;
}

}  // namespace

TEST_CASE("delays stay within the threshold") {
    SimulationRng rng(1);
    bool saw_zero = false;
    bool saw_max = false;
    for (int i = 0; i < 5000; ++i) {
        const Seconds d = draw_delay(rng, 5);
        CHECK(d >= 0);
        CHECK(d <= 5);
        saw_zero |= d == 0;
        saw_max |= d == 5;
    }
    CHECK(saw_zero);
    CHECK(saw_max);
    CHECK(draw_delay(rng, 0) == 0);
}

TEST_CASE("applying an instance writes updates, defaults and creates") {
    SimulationRng rng(2);
    std::vector<WriteEvent> log;
    const Timestamp tau{1311516000};
    const auto state = apply_instance({}, editor_spec(), 0, tau, rng, &log, 7);

    REQUIRE(state.size() == 4);
    const auto& settings = state.at("C:/app/settings.ini");
    REQUIRE(settings.modified.has_value());
    CHECK(*settings.modified >= tau);
    CHECK(settings.modified->seconds <= tau.seconds + 40);
    CHECK_FALSE(settings.accessed.has_value());
    CHECK(state.at("C:/app/app.exe").accessed.has_value());
    CHECK(state.at("C:/app/template.dot").created == Timestamp{1262304000});
    CHECK_FALSE(state.at("C:/app/cache").has_any_time());

    REQUIRE(log.size() == 3);
    for (const auto& w : log) CHECK(w.instance == 7);
    CHECK(log[2].is_default);

    // A created-but-untouched object is not exported.
    CHECK(to_object_records(state).size() == 3);
}

TEST_CASE("untouched objects keep their timestamps") {
    ObjectState initial;
    initial["C:/other"] = ObjectRecord{"C:/other", Timestamp{5}, Timestamp{6}, std::nullopt, Timestamp{7}, false};
    SimulationRng rng(3);
    const auto state = apply_instance(initial, editor_spec(), 0, Timestamp{1000}, rng);
    CHECK(state.at("C:/other") == initial.at("C:/other"));
}

TEST_CASE("an empty schedule leaves the state unchanged") {
    ObjectState initial;
    initial["C:/x"] = ObjectRecord{"C:/x", std::nullopt, Timestamp{10}, std::nullopt, std::nullopt, false};
    const ActionSpecs specs{{"Open Editor", editor_spec()}};
    const auto result = simulate(initial, specs, {}, 99);
    CHECK(result.final_state == initial);
    CHECK(result.truth.instances.empty());
    CHECK(result.truth.writes.empty());
}

TEST_CASE("same seed, same result") {
    const auto scenario = load_scenario(test_support::fixture("two_actions.scn"));
    const auto a = simulate({}, scenario.specs, scenario.schedule, 42);
    const auto b = simulate({}, scenario.specs, scenario.schedule, 42);
    CHECK(a.final_state == b.final_state);
    std::ostringstream ta;
    std::ostringstream tb;
    write_ground_truth(ta, a.truth);
    write_ground_truth(tb, b.truth);
    CHECK(ta.str() == tb.str());

    bool any_difference = false;
    for (std::uint64_t seed = 1; seed < 20 && !any_difference; ++seed) {
        any_difference = simulate({}, scenario.specs, scenario.schedule, seed).final_state != a.final_state;
    }
    CHECK(any_difference);
}

TEST_CASE("every update lies in the window of the instance that wrote it") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto scenario = make_random_scenario(seed);
        const auto result = simulate({}, scenario.specs, scenario.schedule, seed);
        for (const auto& w : result.truth.writes) {
            const auto& inst = result.truth.instances.at(w.instance);
            const Seconds theta = scenario.specs.at(inst.action).theta;
            if (w.is_default) continue;
            CHECK(w.value >= inst.tau);
            CHECK(w.value.seconds <= inst.tau.seconds + theta);
        }
        // The final value of each timestamp is the last write to it.
        for (const auto& [path, record] : result.final_state) {
            for (auto kind : kAllTimestampKinds) {
                std::optional<Timestamp> last;
                for (const auto& w : result.truth.writes) {
                    if (w.path == path && w.kind == kind) last = w.value;
                }
                CHECK(record.time(kind) == last);
            }
        }
    }
}

TEST_CASE("instances more than a threshold apart are told apart") {
    const ActionSpecs specs{{"Open Editor", editor_spec(30)}};
    const auto pack = derive_signature_pack(specs);
    // Two update targets, both Core. 200 s apart: the later run overwrites
    // everything, so only one instance can be seen.
    InstanceSchedule schedule{{{"Open Editor", Timestamp{1000}, 0}, {"Open Editor", Timestamp{1200}, 0}}};
    auto result = simulate({}, specs, schedule, 5);
    auto found = reconstruct(to_object_records(result.final_state), pack);
    REQUIRE(found.size() == 1);
    CHECK(found[0].interval.contains(Timestamp{1200}));

    // With a variant that updates only one target, both runs stay visible.
    ActionSpec split = editor_spec(30);
    split.variants.push_back(PathVariant{{{"C:/app/app.exe", TimestampKind::Accessed}}, {}, {}});
    split.variants.push_back(PathVariant{{{"C:/app/settings.ini", TimestampKind::Modified}}, {}, {}});
    const ActionSpecs specs2{{"Open Editor", split}};
    const auto pack2 = derive_signature_pack(specs2);
    InstanceSchedule far{{{"Open Editor", Timestamp{1000}, 1}, {"Open Editor", Timestamp{1200}, 2}}};
    result = simulate({}, specs2, far, 5);
    found = reconstruct(to_object_records(result.final_state), pack2);
    CHECK(found.size() == 2);
    CHECK(oracle_check(result.truth, specs2, found).passed());

    // Close runs: the written values decide whether they can be separated.
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        InstanceSchedule near{{{"Open Editor", Timestamp{1000}, 1}, {"Open Editor", Timestamp{1010}, 2}}};
        result = simulate({}, specs2, near, seed);
        found = reconstruct(to_object_records(result.final_state), pack2);
        const auto gap = std::abs(result.truth.writes[0].value.seconds - result.truth.writes[1].value.seconds);
        CHECK(found.size() == (gap <= 30 ? 1u : 2u));
        CHECK(oracle_check(result.truth, specs2, found).passed());
    }
}

TEST_CASE("derived packs categorize targets") {
    const auto scenario = load_scenario(test_support::fixture("two_actions.scn"));
    const auto pack = derive_signature_pack(scenario.specs);
    REQUIRE(pack.signatures().size() == 2);
    const auto* editor = pack.find("Open Editor");
    REQUIRE(editor != nullptr);
    std::map<TraceCategory, int> counts;
    for (const auto& t : editor->traces) ++counts[t.category];
    CHECK(counts[TraceCategory::Core] == 2);
    CHECK(counts[TraceCategory::Supporting] == 1);
    CHECK(counts[TraceCategory::Shared] == 1);
    CHECK(pack.shared_index().size() == 1);

    // The text form parses back to the same structure.
    std::ostringstream out;
    write_signature_pack(out, pack);
    std::istringstream in(out.str());
    const auto reparsed = parse_signature_pack(in);
    REQUIRE(reparsed.signatures().size() == 2);
    CHECK(reparsed.shared_index() == pack.shared_index());
    CHECK(reparsed.find("Open Viewer")->theta == 25);
}

TEST_CASE("the oracle flags bad reconstructions") {
    const ActionSpecs specs{{"Open Editor", editor_spec(30)}};
    InstanceSchedule schedule{{{"Open Editor", Timestamp{1000}, 0}}};
    const auto result = simulate({}, specs, schedule, 1);

    std::vector<ActionInstanceApproximation> wrong_time{
        {"Open Editor", TimeInterval{Timestamp{5000}, Timestamp{5030}}, Timestamp{5000}, {}, InstanceRank::MostRecent,
         ConfidenceNote::Definite}};
    auto report = oracle_check(result.truth, specs, wrong_time);
    CHECK_FALSE(report.soundness);
    CHECK_FALSE(report.most_recent);
    CHECK_FALSE(report.passed());

    auto doubled = reconstruct(to_object_records(result.final_state), derive_signature_pack(specs));
    REQUIRE(doubled.size() == 1);
    doubled.push_back(doubled[0]);
    doubled[1].rank = InstanceRank::Past;
    report = oracle_check(result.truth, specs, doubled);
    CHECK_FALSE(report.count_bound);

    std::vector<ActionInstanceApproximation> phantom{
        {"Open Viewer", TimeInterval{Timestamp{970}, Timestamp{1000}}, Timestamp{1000}, {}, InstanceRank::MostRecent,
         ConfidenceNote::Definite}};
    report = oracle_check(result.truth, specs, phantom);
    CHECK_FALSE(report.no_false_positives);
    CHECK_FALSE(report.violations.empty());
}

TEST_CASE("scenario parse errors") {
    CHECK(scenario_error_line(test_support::read_file(test_support::fixture("unknown_action.scn"))) > 0);
    CHECK(scenario_error_line("ma modified C:/x\n") == 1);
    CHECK(scenario_error_line("action: A\nthreshold: 0\n") == 2);
    CHECK(scenario_error_line("action: A\nthreshold: 5\nma sideways C:/x\n") == 3);
    CHECK(scenario_error_line("action: A\nthreshold: 5\nda created -1 C:/x\n") == 3);
    CHECK(scenario_error_line("action: A\nthreshold: 5\nfrobnicate\n") == 3);
    CHECK(scenario_error_line("action: A\nthreshold: 5\nma modified C:/x\n---\nschedule:\n100 A 3\n") == 6);
    CHECK(scenario_error_line("action: A\nthreshold: 5\nma modified C:/x\n---\nschedule:\nsoon A 0\n") == 6);
    CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.scn"), IoError);
}

TEST_CASE("scenario with implicit variant and random schedule entries") {
    const auto s = parse(
        "action: Open Thing\nthreshold: 20\nma modified C:/t/a\noa C:/t/b\n---\n"
        "schedule:\n1000 Open Thing *\n2000 Open Thing 0\n");
    REQUIRE(s.specs.size() == 1);
    CHECK(s.specs.at("Open Thing").variants.size() == 1);
    REQUIRE(s.schedule.entries.size() == 2);
    CHECK_FALSE(s.schedule.entries[0].variant.has_value());
    CHECK(s.schedule.entries[1].variant == std::optional<std::size_t>(0));
    CHECK(s.schedule.entries[1].action == "Open Thing");
}

TEST_CASE("random scenarios respect their limits") {
    const RandomScenarioLimits limits;
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const auto s = make_random_scenario(seed, limits);
        CHECK(s.specs.size() >= 1);
        CHECK(s.specs.size() <= limits.max_actions);
        CHECK(s.schedule.entries.size() <= limits.max_instances);
        std::set<std::string> paths;
        for (const auto& [name, spec] : s.specs) {
            CHECK(spec.theta >= limits.min_theta);
            CHECK(spec.theta <= limits.max_theta);
            for (const auto& v : spec.variants) {
                CHECK(v.defaults.empty());
                for (const auto& u : v.updates) paths.insert(u.path);
            }
        }
        CHECK(paths.size() <= limits.max_objects);
    }
}
