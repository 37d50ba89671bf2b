#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "mesched/core.hpp"
#include "mesched/errors.hpp"

using namespace mesched;

namespace {

Schedule random_schedule(std::mt19937_64& rng, double lo = -5.0, double hi = 5.0) {
    std::uniform_real_distribution<double> uni(lo, hi);
    Schedule s;
    for (std::size_t i = 0; i < kSlotCount; ++i) s[i] = uni(rng);
    return s;
}

}  // namespace

TEST_CASE("schedule arithmetic is element-wise", "[core]") {
    Schedule a = Schedule::constant(2.0);
    Schedule b = Schedule::constant(-0.5);
    const Schedule sum = a + b;
    const Schedule diff = a - b;
    const Schedule scaled = a * 3.0;
    for (std::size_t i = 0; i < kSlotCount; ++i) {
        CHECK(sum[i] == 1.5);
        CHECK(diff[i] == 2.5);
        CHECK(scaled[i] == 6.0);
    }
}

TEST_CASE("cluster_sum matches a naive accumulation and is permutation invariant",
          "[core]") {
    std::mt19937_64 rng(7);
    std::vector<AgentSelection> selections;
    for (int k = 0; k < 6; ++k) {
        AgentSelection sel;
        sel.agent_id = k;
        sel.schedules.electric = random_schedule(rng);
        sel.schedules.heat = random_schedule(rng);
        selections.push_back(sel);
    }

    // Independent oracle: direct per-slot accumulation.
    PerCarrier<Schedule> expected;
    for (const AgentSelection& sel : selections)
        for (Carrier c : kCarriers)
            for (std::size_t i = 0; i < kSlotCount; ++i)
                expected[c][i] += sel.schedules[c][i];

    const ClusterSchedule cluster = cluster_sum(selections);
    for (Carrier c : kCarriers)
        for (std::size_t i = 0; i < kSlotCount; ++i)
            CHECK(cluster.sums[c][i] == Catch::Approx(expected[c][i]).margin(1e-12));

    std::vector<AgentSelection> shuffled = selections;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const ClusterSchedule cluster2 = cluster_sum(shuffled);
    for (Carrier c : kCarriers)
        for (std::size_t i = 0; i < kSlotCount; ++i)
            CHECK(cluster2.sums[c][i] == Catch::Approx(cluster.sums[c][i]).margin(1e-12));
}

TEST_CASE("cluster_sum rejects non-finite schedules", "[core]") {
    AgentSelection sel;
    sel.agent_id = 0;
    sel.schedules.electric[10] = std::numeric_limits<double>::quiet_NaN();
    std::vector<AgentSelection> selections{sel};
    CHECK_THROWS_AS(cluster_sum(selections), MalformedSelection);
}

TEST_CASE("l1 distance is a metric on schedules", "[core]") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const Schedule a = random_schedule(rng);
        const Schedule b = random_schedule(rng);
        const Schedule c = random_schedule(rng);
        CHECK(l1_distance(a, a) == 0.0);
        CHECK(l1_distance(a, b) == Catch::Approx(l1_distance(b, a)));
        CHECK(l1_distance(a, c) <= l1_distance(a, b) + l1_distance(b, c) + 1e-9);
    }
}

TEST_CASE("residual is target minus cluster per carrier", "[core]") {
    TargetSchedules targets;
    targets.electric = Schedule::constant(3.0);
    targets.heat = Schedule::constant(1.0);
    ClusterSchedule cluster;
    cluster.sums.electric = Schedule::constant(2.0);
    cluster.sums.heat = Schedule::constant(1.5);
    const PerCarrier<Schedule> delta = residual(targets, cluster);
    for (std::size_t i = 0; i < kSlotCount; ++i) {
        CHECK(delta.electric[i] == 1.0);
        CHECK(delta.heat[i] == -0.5);
    }
}
