#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tracerecon/model.hpp"
#include "tracerecon/signatures.hpp"

namespace trace_recon {

/// A timestamp an action path sets to the current clock (plus delay).
struct UpdateTarget {
    std::string path;
    TimestampKind kind{TimestampKind::Modified};

    friend auto operator<=>(const UpdateTarget&, const UpdateTarget&) = default;
};

/// A timestamp an action path sets to a fixed value.
struct DefaultTarget {
    std::string path;
    TimestampKind kind{TimestampKind::Modified};
    Timestamp value;
};

/// One execution path of an action: updated timestamps, defaulted
/// timestamps, and objects created when missing.
struct PathVariant {
    std::vector<UpdateTarget> updates;
    std::vector<DefaultTarget> defaults;
    std::vector<std::string> creates;
};

struct ActionSpec {
    std::string name;
    std::vector<PathVariant> variants;
    Seconds theta{1};

    /// Throws std::invalid_argument when there is no variant, theta < 0, or a
    /// variant both updates and defaults the same timestamp.
    void validate() const;
};

using ActionSpecs = std::map<std::string, ActionSpec>;

struct ScheduledInstance {
    std::string action;
    Timestamp tau;
    /// Absent means "pick uniformly under the simulation seed".
    std::optional<std::size_t> variant;
};

struct InstanceSchedule {
    std::vector<ScheduledInstance> entries;
};

/// Object state keyed by path. Objects may exist with no timestamps yet.
using ObjectState = std::map<std::string, ObjectRecord>;

struct TrueInstance {
    std::string action;
    Timestamp tau;
    std::size_t variant{0};
};

struct WriteEvent {
    std::size_t instance{0};  // index into GroundTruth::instances
    std::string path;
    TimestampKind kind{TimestampKind::Modified};
    Timestamp value;
    bool is_default{false};
};

struct GroundTruth {
    std::vector<TrueInstance> instances;  // in application order
    std::vector<WriteEvent> writes;
};

struct SimulationResult {
    ObjectState final_state;
    GroundTruth truth;
};

using SimulationRng = std::mt19937_64;

/// Delay drawn uniformly from [0, theta]. Rejection sampling on raw engine
/// output keeps the sequence identical across standard libraries.
Seconds draw_delay(SimulationRng& rng, Seconds theta);

/// Applies one instance: creates missing objects, writes tau + delay to each
/// update target and the fixed value to each default target.
ObjectState apply_instance(ObjectState state, const ActionSpec& spec, std::size_t variant, Timestamp tau,
                           SimulationRng& rng, std::vector<WriteEvent>* log = nullptr,
                           std::size_t instance_index = 0);

class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Applies the schedule in tau order (stable for ties). Identical seeds give
/// identical results. Throws SimulationError on an unknown action or a bad
/// variant index.
SimulationResult simulate(const ObjectState& initial, const ActionSpecs& specs,
                          const InstanceSchedule& schedule, std::uint64_t seed);

/// Records for every object carrying at least one timestamp, in path order.
std::vector<ObjectRecord> to_object_records(const ObjectState& state);

void write_ground_truth(std::ostream& out, const GroundTruth& truth);

/// Update targets written by every variant of exactly one action, per action.
std::map<std::string, std::set<UpdateTarget>> core_targets(const ActionSpecs& specs);

/// Signature pack implied by the specs: each update target becomes an
/// anchored literal pattern. Targets written by several actions are Shared,
/// targets in every variant of their only writer are Core, the rest are
/// Supporting. Actions with no update targets are left out.
SignaturePack derive_signature_pack(const ActionSpecs& specs);

void write_signature_pack(std::ostream& out, const SignaturePack& pack);

struct Scenario {
    ActionSpecs specs;
    InstanceSchedule schedule;
};

class ScenarioError : public std::runtime_error {
public:
    ScenarioError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Scenario file:
///
///     action: Open Editor
///     threshold: 40
///     variant:
///     ma modified C:/app/settings.ini
///     da created 1262304000 C:/app/template.dot
///     oa C:/app/cache
///     ---
///     schedule:
///     1311516151 Open Editor 0
///
/// A schedule variant of `*` is chosen at random under the seed.
Scenario parse_scenario(std::istream& in);

Scenario load_scenario(const std::string& path);

struct OracleViolation {
    std::string property;
    std::string action;
    std::string detail;
};

struct OracleReport {
    bool soundness{true};
    bool count_bound{true};
    bool most_recent{true};
    bool no_false_positives{true};
    std::vector<OracleViolation> violations;

    bool passed() const { return soundness && count_bound && most_recent && no_false_positives; }
};

/// Checks reconstruction output against the ground truth:
///   - every interval contains a true instance time of its action
///   - no action gets more approximations than it had instances
///   - actions that never ran get none
///   - for actions with Core targets, the MostRecent approximation covers the
///     last true instance
OracleReport oracle_check(const GroundTruth& truth, const ActionSpecs& specs,
                          std::span<const ActionInstanceApproximation> results);

struct RandomScenarioLimits {
    std::size_t max_actions{3};
    std::size_t max_instances{6};
    std::size_t max_objects{8};
    Seconds min_theta{10};
    Seconds max_theta{120};
    Seconds horizon{900};
    bool shared_traces{true};
};

/// Small random scenario without default-time writes, for oracle campaigns.
Scenario make_random_scenario(std::uint64_t seed, const RandomScenarioLimits& limits = {});

}  // namespace trace_recon
