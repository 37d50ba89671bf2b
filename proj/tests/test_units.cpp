#include <catch2/catch_amalgamated.hpp>

#include "mesched/units.hpp"

using namespace mesched;

namespace {

ChpParams test_chp() {
    ChpParams p;
    p.rho = 0.45;
    p.eta = 0.40;
    p.hhv = 50e6;   // J/kg
    p.m_dot_max = 1.0;  // kg/h
    return p;
}

}  // namespace

TEST_CASE("chp conversion hand values", "[units]") {
    const ChpParams p = test_chp();
    // 1 kg/h at HHV 50 MJ/kg is 50e6/3600 W of fuel; times rho 0.45 = 6250 W.
    CHECK(p.electric_rating_kw() == Catch::Approx(6.25));
    CHECK(p.heat_to_electric_ratio() == Catch::Approx(0.40 / 0.45));

    std::array<double, kSlotCount> gas{};
    gas[0] = 1.0;
    gas[1] = 0.5;
    const auto [electric, heat] = chp_output(gas, p);
    CHECK(electric[0] == Catch::Approx(6.25));
    CHECK(heat[0] == Catch::Approx(50e6 * 0.40 / 3600.0 / 1000.0));  // 5.5556 kW
    CHECK(electric[1] == Catch::Approx(3.125));
    CHECK(electric[2] == 0.0);
}

TEST_CASE("chp rejects out-of-range gas rates", "[units]") {
    const ChpParams p = test_chp();
    std::array<double, kSlotCount> gas{};
    gas[5] = 1.5;  // above m_dot_max
    CHECK_THROWS_AS(chp_output(gas, p), InfeasibleDispatch);
    gas[5] = -0.1;
    CHECK_THROWS_AS(chp_output(gas, p), InfeasibleDispatch);
}

TEST_CASE("chp power-to-gas inverts the forward conversion", "[units]") {
    const ChpParams p = test_chp();
    for (double target : {0.0, 0.5, 3.125, 6.25}) {
        const double m = chp_gas_for_power(target, p);
        std::array<double, kSlotCount> gas{};
        gas[0] = m;
        const auto [electric, heat] = chp_output(gas, p);
        CHECK(electric[0] == Catch::Approx(target).margin(1e-12));
    }
    CHECK_THROWS_AS(chp_gas_for_power(6.3, p), InfeasibleDispatch);
    CHECK_THROWS_AS(chp_gas_for_power(-0.1, p), InfeasibleDispatch);
}

TEST_CASE("wind base power follows the kinetic power equation", "[units]") {
    WindParams p;
    p.rotor_area = 16.0;
    p.power_coeff = 0.40;
    p.wind_speed = 8.0;
    // 0.5 * 1.225 * 16 * 8^3 * 0.40 = 2007.04 W
    CHECK(p.base_power_w() == Catch::Approx(2007.04));
    CHECK(p.valid());
    p.power_coeff = 0.60;  // beyond the Betz limit
    CHECK_FALSE(p.valid());
}

TEST_CASE("wind profile is seeded, nonnegative, and held per 30-minute step",
          "[units]") {
    WindParams p;
    p.rotor_area = 16.0;
    p.power_coeff = 0.40;
    p.wind_speed = 8.0;
    const Schedule a = wind_profile(p, 123);
    const Schedule b = wind_profile(p, 123);
    const Schedule c = wind_profile(p, 124);
    CHECK(a == b);
    CHECK_FALSE(a == c);
    for (std::size_t i = 0; i < kSlotCount; i += 2) {
        CHECK(a[i] >= 0.0);
        CHECK(a[i] == a[i + 1]);  // both 15-min slots of one change step agree
    }
}

TEST_CASE("solar profile keeps night slots at zero and clamps noise", "[units]") {
    SolarParams p;
    for (std::size_t i = 40; i < 60; ++i) p.base_profile[i] = 1.0;
    p.noise_std = 5.0;  // large so clamping is exercised
    const Schedule out = solar_profile(p, 99);
    for (std::size_t i = 0; i < kSlotCount; ++i) {
        CHECK(out[i] >= 0.0);
        if (p.base_profile[i] <= 0.0) CHECK(out[i] == 0.0);
    }
    CHECK(solar_profile(p, 99) == out);  // deterministic per seed
}

TEST_CASE("heat pump couples electric draw and heat output via the COP", "[units]") {
    HpParams p;
    p.cop = 4.0;
    p.p_el_max = 2.7;
    const auto [electric, heat] = hp_coupled(2.0, p);
    CHECK(electric == -2.0);
    CHECK(heat == 8.0);
    CHECK_THROWS_AS(hp_coupled(3.0, p), InfeasibleDispatch);
    CHECK_THROWS_AS(hp_coupled(-0.5, p), InfeasibleDispatch);
}
