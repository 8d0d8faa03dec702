#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include "tracerecon/model.hpp"

#ifndef TRACE_RECON_FIXTURE_DIR
#error "TRACE_RECON_FIXTURE_DIR must be defined"
#endif
#ifndef TRACE_RECON_SIGNATURE_DIR
#error "TRACE_RECON_SIGNATURE_DIR must be defined"
#endif

namespace test_support {

// Days since 1970-01-01 for a proleptic Gregorian date (H. Hinnant's
// days_from_civil), kept separate from the library's formatting code.
constexpr std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

// Table times are month/day/year wall-clock times, read as UTC.
constexpr trace_recon::Timestamp utc(int month, int day, int year, int hour, int minute, int second) {
    return trace_recon::Timestamp{days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day)) * 86400 +
                                  hour * 3600 + minute * 60 + second};
}

inline std::string fixture(const std::string& name) { return std::string(TRACE_RECON_FIXTURE_DIR) + "/" + name; }

inline std::string signature_file(const std::string& name) {
    return std::string(TRACE_RECON_SIGNATURE_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace test_support
