#include <doctest.h>

#include <random>

#include "support.hpp"
#include "tracerecon/model.hpp"

using namespace trace_recon;
using test_support::utc;

TEST_CASE("aia subtracts the threshold from the observed time") {
    CHECK(aia(Timestamp{100}, 30) == TimeInterval{Timestamp{70}, Timestamp{100}});
    CHECK(aia(Timestamp{100}, 0) == TimeInterval{Timestamp{100}, Timestamp{100}});
}

TEST_CASE("aia clamps at the epoch") {
    // 50 - 80 < 0, so the lower bound is the epoch itself.
    CHECK(aia(Timestamp{50}, 80) == TimeInterval{Timestamp{0}, Timestamp{50}});
    CHECK(aia(Timestamp{80}, 80) == TimeInterval{Timestamp{0}, Timestamp{80}});
}

TEST_CASE("aia rejects negative thresholds") {
    CHECK_THROWS_AS(aia(Timestamp{10}, -1), std::invalid_argument);
}

TEST_CASE("aia width and monotonicity") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::int64_t> tau_dist(0, 2'000'000'000);
    std::uniform_int_distribution<std::int64_t> theta_dist(0, 500);
    for (int i = 0; i < 2000; ++i) {
        const Timestamp a{tau_dist(rng)};
        const Timestamp b{tau_dist(rng)};
        const Seconds theta = theta_dist(rng);
        const auto ia = aia(a, theta);
        if (a.seconds >= theta) CHECK(ia.end->seconds - ia.start->seconds == theta);
        const auto ib = aia(b, theta);
        if (a <= b) {
            CHECK(*ia.start <= *ib.start);
            CHECK(*ia.end <= *ib.end);
        }
    }
}

TEST_CASE("interval containment treats absent bounds as unlimited") {
    const TimeInterval open{};
    CHECK(open.contains(Timestamp{0}));
    CHECK(open.contains(Timestamp{1'000'000'000}));
    const TimeInterval past_only{std::nullopt, Timestamp{10}};
    CHECK(past_only.contains(Timestamp{3}));
    CHECK_FALSE(past_only.contains(Timestamp{11}));
    const TimeInterval closed{Timestamp{5}, Timestamp{10}};
    CHECK(closed.contains(Timestamp{5}));
    CHECK(closed.contains(Timestamp{10}));
    CHECK_FALSE(closed.contains(Timestamp{4}));
}

TEST_CASE("timestamp kinds parse case-insensitively") {
    CHECK(parse_timestamp_kind("Modified") == TimestampKind::Modified);
    CHECK(parse_timestamp_kind("created") == TimestampKind::Created);
    CHECK(parse_timestamp_kind("ACCESSED") == TimestampKind::Accessed);
    CHECK(parse_timestamp_kind("metachanged") == TimestampKind::MetaChanged);
    CHECK_FALSE(parse_timestamp_kind("born").has_value());
}

TEST_CASE("ISO-8601 rendering is UTC") {
    CHECK(format_utc(Timestamp{0}) == "1970-01-01T00:00:00Z");
    CHECK(utc(7, 24, 2011, 15, 2, 31).seconds == 1311519751);
    CHECK(format_utc(utc(7, 24, 2011, 15, 2, 31)) == "2011-07-24T15:02:31Z");
    CHECK(format_utc(utc(2, 29, 2012, 23, 59, 59)) == "2012-02-29T23:59:59Z");
}
