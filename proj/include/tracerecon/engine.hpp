#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tracerecon/model.hpp"
#include "tracerecon/signatures.hpp"

namespace trace_recon {

/// Trace states attributed to one instance, sorted by trace_order.
struct Cluster {
    std::vector<TraceState> members;

    Timestamp oldest() const { return members.front().value; }
    Timestamp newest() const { return members.back().value; }
};

enum class CoreStatus { Consistent, MultiInstance };

struct CoreVerdict {
    CoreStatus status{CoreStatus::Consistent};
    std::vector<Cluster> clusters;
};

struct SharedAttribution {
    Cluster cluster;
    std::set<std::string> candidate_actions;
    std::optional<std::string> resolved;
    Seconds theta{0};  // threshold the cluster was built with
};

/// Per-action outcome of the Core and Supporting tests.
struct ActionFindings {
    Seconds theta{0};
    CoreVerdict core;
    std::vector<Cluster> support;
};

struct Reconstruction {
    /// Newest first.
    std::vector<ActionInstanceApproximation> instances;
    /// Every shared cluster after disambiguation, resolved or not.
    std::vector<SharedAttribution> shared;
    std::map<std::string, ActionFindings> findings;
};

std::vector<TraceState> get_trace_states(std::span<const ObjectRecord> objects, const Signature& signature);

/// Greedy left-to-right partition. A state joins the open cluster while its
/// value is at most the cluster's oldest value plus theta. Input must be
/// sorted by trace_order; throws std::invalid_argument otherwise.
std::vector<Cluster> cluster_by_threshold(std::span<const TraceState> states, Seconds theta);

/// Consistent when every Core value lies within theta of the oldest one;
/// otherwise MultiInstance with the threshold partition.
CoreVerdict core_test(Seconds theta, std::span<const TraceState> states);

std::vector<Cluster> support_test(Seconds theta, std::span<const TraceState> states);

/// One attribution per cluster. Resolved immediately when there is a single
/// candidate.
std::vector<SharedAttribution> shared_test(Seconds theta, std::span<const TraceState> states,
                                           const std::set<std::string>& candidates);

/// Drops a candidate whose Core traces show it last ran more than its
/// threshold before the shared cluster started. Core traces are rewritten on
/// every execution, so such a candidate cannot have produced the cluster.
/// Resolves the attribution when exactly one candidate survives.
std::vector<SharedAttribution> disambiguate_shared(std::vector<SharedAttribution> attributions,
                                                   const std::map<std::string, ActionFindings>& findings);

Reconstruction reconstruct_detailed(std::span<const ObjectRecord> objects, const SignaturePack& pack);

std::vector<ActionInstanceApproximation> reconstruct(std::span<const ObjectRecord> objects,
                                                     const SignaturePack& pack);

}  // namespace trace_recon
