#include "tracerecon/calibration.hpp"

#include <cmath>
#include <charconv>
#include <stdexcept>
#include <string>

namespace trace_recon {

Seconds threshold_from_stats(double mean, double sigma, double k) {
    if (!(mean >= 0.0)) throw std::invalid_argument("mean must be non-negative");
    if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be non-negative");
    if (!(k > 0.0)) throw std::invalid_argument("k must be positive");
    const double cutoff = mean + k * sigma;
    if (!std::isfinite(cutoff)) throw std::invalid_argument("threshold is not finite");
    const auto theta = static_cast<Seconds>(std::floor(cutoff + 0.5));
    return theta < 1 ? 1 : theta;
}

ThresholdEstimate estimate_threshold(std::span<const DurationSample> samples, double k) {
    if (samples.size() < 2) throw std::invalid_argument("insufficient samples");
    double sum = 0.0;
    for (const auto& s : samples) {
        if (!(s.seconds >= 0.0)) throw std::invalid_argument("duration samples must be non-negative");
        sum += s.seconds;
    }
    const double n = static_cast<double>(samples.size());
    const double mean = sum / n;
    double squares = 0.0;
    for (const auto& s : samples) squares += (s.seconds - mean) * (s.seconds - mean);
    const double sigma = std::sqrt(squares / (n - 1.0));
    return ThresholdEstimate{mean, sigma, k, threshold_from_stats(mean, sigma, k), samples.size()};
}

std::vector<DurationSample> read_duration_samples(std::istream& in) {
    std::vector<DurationSample> samples;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto last = line.find_last_not_of(" \t\r");
        const std::string text = line.substr(first, last - first + 1);
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value) || value < 0.0) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": not a duration: '" + text + "'");
        }
        samples.push_back(DurationSample{value});
    }
    return samples;
}

}  // namespace trace_recon
