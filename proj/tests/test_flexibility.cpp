#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "mesched/flexibility.hpp"

using namespace mesched;

namespace {

StorageParams test_storage() {
    StorageParams p;
    p.capacity = 2.0;    // kWh
    p.p_ch_max = 1.5;    // kW
    p.p_dis_max = 1.5;
    p.eff_ch = 0.80;
    p.eff_dis = 0.90;
    p.soc_init = 1.0;
    return p;
}

}  // namespace

TEST_CASE("soc_step hand values", "[flexibility]") {
    const StorageParams p = test_storage();
    // Discharging 1.2 kW for 15 min drains 1.2*0.25/0.9 = 0.3333 kWh.
    CHECK(soc_step(1.0, 1.2, p) == Catch::Approx(1.0 - 1.2 * 0.25 / 0.9));
    // Charging at 1.5 kW for 15 min stores 1.5*0.25*0.8 = 0.3 kWh.
    CHECK(soc_step(1.0, -1.5, p) == Catch::Approx(1.3));
    CHECK(soc_step(0.5, 0.0, p) == 0.5);  // no self-discharge
}

TEST_CASE("soc_trace accumulates and reports the offending slot", "[flexibility]") {
    const StorageParams p = test_storage();
    Schedule s;
    s[0] = 1.2;
    s[1] = -1.0;
    const SocTrace trace = soc_trace(s, p);
    CHECK(trace.soc[0] == 1.0);
    CHECK(trace.soc[1] == Catch::Approx(1.0 - 1.2 * 0.25 / 0.9));
    CHECK(trace.soc[2] == Catch::Approx(trace.soc[1] + 1.0 * 0.25 * 0.8));
    CHECK(trace.soc[96] == Catch::Approx(trace.soc[2]));  // idle afterwards

    Schedule rating_violation;
    rating_violation[7] = 2.0;
    CHECK_THROWS_WITH(soc_trace(rating_violation, p),
                      Catch::Matchers::ContainsSubstring("slot 7"));

    Schedule depleting = Schedule::constant(1.5);  // drains 2 kWh within ~5 slots
    CHECK_THROWS_AS(soc_trace(depleting, p), InfeasibleDispatch);
}

TEST_CASE("available_band respects ratings, reservations, and stored energy",
          "[flexibility]") {
    const StorageParams p = test_storage();
    const Schedule no_obligation{};
    const FlexBand band = available_band(p, p.soc_init, no_obligation);
    // First slot: full rating both ways (1 kWh stored covers 1.5 kW for 15 min).
    CHECK(band.p_max_avail[0] == Catch::Approx(1.5));
    CHECK(band.p_min_avail[0] == Catch::Approx(-1.5));
    for (std::size_t i = 0; i < kSlotCount; ++i) {
        CHECK(band.p_max_avail[i] >= band.p_min_avail[i]);
        CHECK(band.p_max_avail[i] <= p.p_dis_max + 1e-12);
        CHECK(band.p_min_avail[i] >= -p.p_ch_max - 1e-12);
    }
    // Following the discharge edge must exhaust the stored energy: the upper
    // band has to hit zero once 1 kWh * 0.9 of dischargeable energy is gone.
    double dischargeable = p.soc_init * p.eff_dis;  // kWh deliverable
    double delivered = 0.0;
    for (std::size_t i = 0; i < kSlotCount; ++i) delivered += band.p_max_avail[i] * kSlotHours;
    CHECK(delivered <= dischargeable + 1e-9);

    // A standing discharge obligation shrinks the sellable band.
    const Schedule mpo = Schedule::constant(0.5);
    const FlexBand reserved = available_band(p, p.soc_init, mpo);
    CHECK(reserved.p_max_avail[0] == Catch::Approx(1.0));
}

TEST_CASE("random in-band schedules are always SoC-feasible", "[flexibility]") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const StorageParams p = test_storage();
    for (int trial = 0; trial < 2000; ++trial) {
        Schedule mpo{};
        if (trial % 3 == 1) mpo = Schedule::constant(0.3);
        if (trial % 3 == 2) mpo = Schedule::constant(-0.4);
        const FlexBand band = available_band(p, p.soc_init, mpo);
        Schedule s;
        for (std::size_t i = 0; i < kSlotCount; ++i)
            s[i] = band.p_min_avail[i] +
                   uni(rng) * (band.p_max_avail[i] - band.p_min_avail[i]);
        CHECK_NOTHROW(soc_trace(s, p, 1e-6));
    }
}

TEST_CASE("storage_schedule_for_residual covers what it can and stays feasible",
          "[flexibility]") {
    const StorageParams p = test_storage();

    // Small residuals inside the band are covered exactly.
    Schedule small = Schedule::constant(0.0);
    small[0] = 0.5;
    small[1] = -0.5;
    const Schedule covered = storage_schedule_for_residual(p, p.soc_init, small);
    CHECK(covered[0] == Catch::Approx(0.5));
    CHECK(covered[1] == Catch::Approx(-0.5));
    CHECK_NOTHROW(soc_trace(covered, p, 1e-6));

    // A persistent large residual is clipped to the rating, then to the
    // remaining energy, and the result is still feasible.
    const Schedule greedy =
        storage_schedule_for_residual(p, p.soc_init, Schedule::constant(5.0));
    CHECK(greedy[0] == Catch::Approx(1.5));
    double delivered = 0.0;
    for (std::size_t i = 0; i < kSlotCount; ++i) {
        CHECK(greedy[i] >= 0.0);
        delivered += greedy[i] * kSlotHours;
    }
    CHECK(delivered <= p.soc_init * p.eff_dis + 1e-9);
    CHECK_NOTHROW(soc_trace(greedy, p, 1e-6));

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uni(-4.0, 4.0);
    for (int trial = 0; trial < 500; ++trial) {
        Schedule residual;
        for (std::size_t i = 0; i < kSlotCount; ++i) residual[i] = uni(rng);
        const Schedule s = storage_schedule_for_residual(p, p.soc_init, residual);
        CHECK_NOTHROW(soc_trace(s, p, 1e-6));
    }
}

TEST_CASE("storage parameter validation", "[flexibility]") {
    StorageParams p = test_storage();
    CHECK(p.valid());
    p.eff_ch = 1.2;
    CHECK_FALSE(p.valid());
    p = test_storage();
    p.soc_init = 3.0;  // above capacity
    CHECK_FALSE(p.valid());
}
