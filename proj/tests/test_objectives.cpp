#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "mesched/objectives.hpp"
#include "mesched/profiles.hpp"

using namespace mesched;

namespace {

AgentEconParams high_penalty_econ() {
    AgentEconParams e;
    e.gamma = 0.30;
    e.delta = 0.10;
    e.theta = 0.08;
    e.p_P = 10.0;
    e.p_H = 10.0;
    e.p_e = 2.0;
    return e;
}

}  // namespace

TEST_CASE("carrier utility is the negated L1 gap", "[objectives]") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        Schedule target, cluster;
        for (std::size_t i = 0; i < kSlotCount; ++i) {
            target[i] = uni(rng);
            cluster[i] = uni(rng);
        }
        // Independent oracle: direct per-slot accumulation.
        double gap = 0.0;
        for (std::size_t i = 0; i < kSlotCount; ++i)
            gap += std::abs(target[i] - cluster[i]);
        CHECK(carrier_utility(target, cluster) == Catch::Approx(-gap));
        CHECK(carrier_utility(target, target) == 0.0);
    }
}

TEST_CASE("total utility sums both carriers", "[objectives]") {
    TargetSchedules targets;
    targets.electric = Schedule::constant(1.0);
    targets.heat = Schedule::constant(2.0);
    ClusterSchedule cluster;
    cluster.sums.electric = Schedule::constant(0.5);  // gap 0.5 * 96
    cluster.sums.heat = Schedule::constant(2.0);      // gap 0
    CHECK(total_utility(targets, cluster) == Catch::Approx(-48.0));
}

TEST_CASE("private utility slot hand value", "[objectives]") {
    const AgentEconParams e = high_penalty_econ();
    // revenue = 0.30*1.0 + 0.10*0.5 = 0.35
    // penalty = 10*(1.0-1.2)^2 + 10*(0.5-0.5)^2 + 0.08*0.1 = 0.4 + 0 + 0.008
    const double u = private_utility_slot(e, 0, 1.0, 0.5, 1.2, 0.5, 0.1);
    CHECK(u == Catch::Approx(0.35 - 0.408));
}

TEST_CASE("private utility over schedules equals the slot sum", "[objectives]") {
    const AgentEconParams e = high_penalty_econ();
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Schedule p, h, dp, dh;
    ResourceVector f;
    for (std::size_t i = 0; i < kSlotCount; ++i) {
        p[i] = uni(rng);
        h[i] = uni(rng);
        dp[i] = uni(rng);
        dh[i] = uni(rng);
        f.values[i] = std::abs(uni(rng));
    }
    double expected = 0.0;
    for (std::size_t i = 0; i < kSlotCount; ++i)
        expected += private_utility_slot(e, i, p[i], h[i], dp[i], dh[i], f.values[i]);
    CHECK(private_utility(e, p, h, dp, dh, f) == Catch::Approx(expected));
}

TEST_CASE("market prices act as a per-slot floor on the electric coefficient",
          "[objectives]") {
    AgentEconParams e = high_penalty_econ();
    CHECK(e.gamma_at(0) == 0.30);
    e.market_prices = market_price_profile();
    // The bundled price day straddles gamma: cheap overnight, expensive midday.
    CHECK(e.gamma_at(0) == 0.30);               // price ~0.14 -> floor wins
    CHECK(e.gamma_at(52) > 0.30);               // midday peak above gamma
    CHECK(e.gamma_at(52) == Catch::Approx(std::max(0.30, market_price_profile()[52])));
}

TEST_CASE("penalty dominance separates the high and low presets", "[objectives]") {
    AgentEconParams high = high_penalty_econ();
    AgentEconParams low = high_penalty_econ();
    low.p_P = 0.5;
    low.p_H = 0.5;
    const double small_rating = 0.2;
    // High preset: 10*0.04 = 0.4 > 0.3*0.2 = 0.06; low preset: 0.02 < 0.06.
    CHECK(penalty_dominance_check(high, small_rating));
    CHECK_FALSE(penalty_dominance_check(low, small_rating));
    CHECK_FALSE(penalty_dominance_check(high, 0.0));
}
