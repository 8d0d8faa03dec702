#include "tracerecon/engine.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

namespace trace_recon {

namespace {

std::vector<TraceState> sorted_copy(std::span<const TraceState> states) {
    std::vector<TraceState> out(states.begin(), states.end());
    std::sort(out.begin(), out.end(), trace_order);
    return out;
}

// An instance under construction for one action.
struct InstanceGroup {
    Timestamp anchor;
    Timestamp oldest;
    Timestamp newest;
    std::vector<TraceState> evidence;
    // Anchored on a Core cluster of a MultiInstance verdict; the anchor does
    // not move when evidence is attached.
    bool pinned{false};

    static InstanceGroup from(const Cluster& cluster) {
        return InstanceGroup{cluster.oldest(), cluster.oldest(), cluster.newest(), cluster.members};
    }

    bool accepts(const Cluster& cluster, Seconds theta) const {
        if (pinned) {
            return cluster.oldest().seconds >= anchor.seconds - theta &&
                   cluster.newest().seconds <= newest.seconds + theta;
        }
        return cluster.oldest().seconds <= newest.seconds + theta &&
               cluster.newest().seconds + theta >= oldest.seconds;
    }

    void absorb(const Cluster& cluster) {
        evidence.insert(evidence.end(), cluster.members.begin(), cluster.members.end());
        oldest = std::min(oldest, cluster.oldest());
        newest = std::max(newest, cluster.newest());
        if (!pinned) anchor = oldest;
    }
};

std::vector<ActionInstanceApproximation> build_instances(const std::string& action,
                                                         const ActionFindings& findings,
                                                         const std::vector<Cluster>& resolved_shared) {
    const Seconds theta = findings.theta;
    std::vector<InstanceGroup> groups;

    for (const auto& cluster : findings.core.clusters) {
        InstanceGroup group = InstanceGroup::from(cluster);
        group.pinned = findings.core.status == CoreStatus::MultiInstance;
        groups.push_back(std::move(group));
    }
    const std::size_t core_count = groups.size();

    // Supporting clusters merge only into Core groups, compared against the
    // Core cluster's own span.
    for (const auto& cluster : findings.support) {
        bool attached = false;
        for (std::size_t g = 0; g < core_count && !attached; ++g) {
            const InstanceGroup probe = InstanceGroup::from(findings.core.clusters[g]);
            InstanceGroup& target = groups[g];
            if (target.pinned ? target.accepts(cluster, theta) : probe.accepts(cluster, theta)) {
                target.absorb(cluster);
                attached = true;
            }
        }
        if (!attached) groups.push_back(InstanceGroup::from(cluster));
    }

    // Resolved shared clusters join the earliest instance within reach.
    for (const auto& cluster : resolved_shared) {
        std::sort(groups.begin(), groups.end(),
                  [](const InstanceGroup& a, const InstanceGroup& b) { return a.oldest < b.oldest; });
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const InstanceGroup& g) { return g.accepts(cluster, theta); });
        if (it != groups.end()) {
            it->absorb(cluster);
        } else {
            groups.push_back(InstanceGroup::from(cluster));
        }
    }

    std::vector<ActionInstanceApproximation> out;
    out.reserve(groups.size());
    for (auto& group : groups) {
        std::sort(group.evidence.begin(), group.evidence.end(), trace_order);
        ActionInstanceApproximation inst;
        inst.action_name = action;
        inst.anchor = group.anchor;
        inst.interval = aia(group.anchor, theta);
        inst.interval.end = group.newest;
        inst.evidence = std::move(group.evidence);
        inst.note = group.pinned ? ConfidenceNote::ParallelInstanceDiagnostic : ConfidenceNote::Definite;
        out.push_back(std::move(inst));
    }
    if (!out.empty()) {
        auto latest = std::max_element(out.begin(), out.end(), [](const auto& a, const auto& b) {
            return a.anchor < b.anchor;
        });
        latest->rank = InstanceRank::MostRecent;
    }
    return out;
}

}  // namespace

std::vector<TraceState> get_trace_states(std::span<const ObjectRecord> objects, const Signature& signature) {
    return match_signature(signature, objects);
}

std::vector<Cluster> cluster_by_threshold(std::span<const TraceState> states, Seconds theta) {
    if (!std::is_sorted(states.begin(), states.end(), trace_order)) {
        throw std::invalid_argument("cluster_by_threshold requires sorted trace states");
    }
    std::vector<Cluster> clusters;
    for (const auto& state : states) {
        if (clusters.empty() || state.value.seconds > clusters.back().oldest().seconds + theta) {
            clusters.push_back(Cluster{{state}});
        } else {
            clusters.back().members.push_back(state);
        }
    }
    return clusters;
}

CoreVerdict core_test(Seconds theta, std::span<const TraceState> states) {
    const auto sorted = sorted_copy(states);
    CoreVerdict verdict;
    if (sorted.empty()) return verdict;
    if (sorted.back().value.seconds <= sorted.front().value.seconds + theta) {
        verdict.clusters.push_back(Cluster{sorted});
        return verdict;
    }
    verdict.status = CoreStatus::MultiInstance;
    verdict.clusters = cluster_by_threshold(sorted, theta);
    return verdict;
}

std::vector<Cluster> support_test(Seconds theta, std::span<const TraceState> states) {
    return cluster_by_threshold(sorted_copy(states), theta);
}

std::vector<SharedAttribution> shared_test(Seconds theta, std::span<const TraceState> states,
                                           const std::set<std::string>& candidates) {
    std::vector<SharedAttribution> out;
    for (auto& cluster : cluster_by_threshold(sorted_copy(states), theta)) {
        SharedAttribution attribution{std::move(cluster), candidates, std::nullopt, theta};
        if (candidates.size() == 1) attribution.resolved = *candidates.begin();
        out.push_back(std::move(attribution));
    }
    return out;
}

std::vector<SharedAttribution> disambiguate_shared(std::vector<SharedAttribution> attributions,
                                                   const std::map<std::string, ActionFindings>& findings) {
    for (auto& attribution : attributions) {
        if (attribution.resolved) continue;
        std::vector<std::string> remaining;
        for (const auto& action : attribution.candidate_actions) {
            const auto it = findings.find(action);
            bool eliminated = false;
            if (it != findings.end() && !it->second.core.clusters.empty()) {
                const Timestamp last_core = it->second.core.clusters.back().newest();
                eliminated = attribution.cluster.oldest().seconds > last_core.seconds + it->second.theta;
            }
            if (!eliminated) remaining.push_back(action);
        }
        if (remaining.size() == 1) attribution.resolved = remaining.front();
    }
    return attributions;
}

Reconstruction reconstruct_detailed(std::span<const ObjectRecord> objects, const SignaturePack& pack) {
    Reconstruction result;

    for (const auto& sig : pack.signatures()) {
        ActionFindings findings;
        findings.theta = sig.theta;
        findings.core = core_test(sig.theta, match_signature(sig, objects, TraceCategory::Core));
        findings.support = support_test(sig.theta, match_signature(sig, objects, TraceCategory::Supporting));
        result.findings.emplace(sig.action_name, std::move(findings));
    }

    // Pool shared patterns by candidate set; each pool is clustered once.
    std::map<std::set<std::string>, std::vector<Signature>> pools;
    for (const auto& [key, candidates] : pack.shared_index()) {
        for (const auto& sig : pack.signatures()) {
            auto trace = std::find_if(sig.traces.begin(), sig.traces.end(), [&](const TracePattern& t) {
                return t.category == TraceCategory::Shared && pattern_key(t) == key;
            });
            if (trace == sig.traces.end()) continue;
            auto& pool = pools[candidates];
            if (pool.empty()) pool.push_back(Signature{"", 0, {}});
            pool.front().traces.push_back(*trace);
            break;
        }
    }
    std::vector<SharedAttribution> attributions;
    for (auto& [candidates, pool] : pools) {
        Seconds theta = 0;
        for (const auto& name : candidates) theta = std::max(theta, pack.find(name)->theta);
        const auto states = match_signature(pool.front(), objects, TraceCategory::Shared);
        auto part = shared_test(theta, states, candidates);
        attributions.insert(attributions.end(), std::make_move_iterator(part.begin()),
                            std::make_move_iterator(part.end()));
    }
    result.shared = disambiguate_shared(std::move(attributions), result.findings);

    for (const auto& sig : pack.signatures()) {
        std::vector<Cluster> resolved;
        for (const auto& attribution : result.shared) {
            if (attribution.resolved == sig.action_name) resolved.push_back(attribution.cluster);
        }
        std::sort(resolved.begin(), resolved.end(),
                  [](const Cluster& a, const Cluster& b) { return a.oldest() < b.oldest(); });
        auto instances = build_instances(sig.action_name, result.findings.at(sig.action_name), resolved);
        result.instances.insert(result.instances.end(), std::make_move_iterator(instances.begin()),
                                std::make_move_iterator(instances.end()));
    }

    std::stable_sort(result.instances.begin(), result.instances.end(),
              [](const ActionInstanceApproximation& a, const ActionInstanceApproximation& b) {
                  return std::tie(b.anchor, a.action_name, b.interval.end) <
                         std::tie(a.anchor, b.action_name, a.interval.end);
              });
    return result;
}

std::vector<ActionInstanceApproximation> reconstruct(std::span<const ObjectRecord> objects,
                                                     const SignaturePack& pack) {
    return reconstruct_detailed(objects, pack).instances;
}

}  // namespace trace_recon
