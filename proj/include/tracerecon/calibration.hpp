#pragma once

#include <cstddef>
#include <istream>
#include <span>
#include <vector>

#include "tracerecon/model.hpp"

namespace trace_recon {

/// One measured delay between an action instance and its last trace update.
struct DurationSample {
    double seconds{0.0};
};

struct ThresholdEstimate {
    double mean{0.0};
    double sigma{0.0};
    double k{2.0};
    Seconds theta{1};
    std::size_t n{0};
};

inline constexpr double kDefaultSigmaMultiplier = 2.0;

/// round-half-up(mean + k * sigma), at least 1. Throws std::invalid_argument
/// for negative mean or sigma, or a non-positive k.
Seconds threshold_from_stats(double mean, double sigma, double k = kDefaultSigmaMultiplier);

/// Mean and sample (n - 1) standard deviation of the delays, then
/// threshold_from_stats. Needs at least two samples.
ThresholdEstimate estimate_threshold(std::span<const DurationSample> samples,
                                     double k = kDefaultSigmaMultiplier);

/// One decimal number of seconds per line; blank lines and `#` comments are
/// skipped. Throws std::invalid_argument naming the line on bad input.
std::vector<DurationSample> read_duration_samples(std::istream& in);

}  // namespace trace_recon
