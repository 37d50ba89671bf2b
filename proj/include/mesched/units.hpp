#pragma once

#include <cmath>
#include <random>
#include <string>
#include <utility>

#include "mesched/core.hpp"
#include "mesched/errors.hpp"
#include "mesched/rng.hpp"

namespace mesched {

// ---------------------------------------------------------------------------
// CHP: converts a gas rate into coupled electric and heat output. The
// conversion equations work in watts (HHV in J/kg, gas in kg/h); the public
// surface is kW.
// ---------------------------------------------------------------------------

struct ChpParams {
    double rho = 0.0;             // electric efficiency
    double eta = 0.0;             // heat efficiency
    double hhv = 0.0;             // higher heating value, J/kg
    double m_dot_max = 0.0;       // max gas rate, kg/h
    double p_reserved_max = 0.0;  // max power divertible away from the negotiation, kW

    bool valid() const {
        return rho > 0.0 && eta > 0.0 && rho + eta <= 1.0 && hhv > 0.0 &&
               m_dot_max > 0.0 && p_reserved_max >= 0.0;
    }

    // Electric rating in kW at maximum gas rate.
    double electric_rating_kw() const { return rho * m_dot_max * hhv / 3600.0 / 1000.0; }

    double heat_to_electric_ratio() const { return eta / rho; }
};

inline std::pair<Schedule, Schedule> chp_output(const std::array<double, kSlotCount>& gas_rates,
                                                const ChpParams& params) {
    Schedule electric, heat;
    for (std::size_t i = 0; i < kSlotCount; ++i) {
        const double m = gas_rates[i];
        if (m < 0.0 || m > params.m_dot_max + 1e-12)
            throw InfeasibleDispatch("chp gas rate out of [0, m_dot_max] at slot " +
                                     std::to_string(i));
        electric[i] = params.rho * m * params.hhv / 3600.0 / 1000.0;
        heat[i] = params.eta * m * params.hhv / 3600.0 / 1000.0;
    }
    return {electric, heat};
}

// Inverse of the conversion: gas rate in kg/h producing the requested electric
// power. The coupled heat output is (eta/rho) * p_el.
inline double chp_gas_for_power(double p_el_kw, const ChpParams& params) {
    if (p_el_kw < 0.0)
        throw InfeasibleDispatch("chp electric power must be nonnegative");
    if (p_el_kw > params.electric_rating_kw() + 1e-9)
        throw InfeasibleDispatch("chp electric power exceeds rating");
    const double m = 3600.0 * p_el_kw * 1000.0 / (params.rho * params.hhv);
    if (m > params.m_dot_max + 1e-9)
        throw InfeasibleDispatch("chp implied gas rate exceeds m_dot_max");
    return m;
}

// ---------------------------------------------------------------------------
// Wind: flat daily profile from the daily max wind speed, perturbed per
// 30-minute step by a normally distributed draw applied as a power offset.
// ---------------------------------------------------------------------------

struct WindParams {
    double air_density = 1.225;   // kg/m^3
    double rotor_area = 0.0;      // m^2
    double power_coeff = 0.0;     // <= 0.593 (Betz)
    double wind_speed = 0.0;      // daily max wind speed, m/s
    double noise_mean = 3.7;      // m/s-change distribution center
    double noise_variance = 0.5;  // variance, not std

    bool valid() const {
        return air_density > 0.0 && rotor_area > 0.0 && power_coeff > 0.0 &&
               power_coeff <= 0.593 && wind_speed > 0.0 && noise_variance >= 0.0;
    }

    // Deterministic part of the output in watts.
    double base_power_w() const {
        return 0.5 * air_density * rotor_area * wind_speed * wind_speed * wind_speed *
               power_coeff;
    }
};

inline Schedule wind_profile(const WindParams& params, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> delta(params.noise_mean,
                                           std::sqrt(params.noise_variance));
    const double base_w = params.base_power_w();
    Schedule out;
    // One draw per 30-minute change step, held over both 15-minute slots.
    for (std::size_t i = 0; i < kSlotCount; i += 2) {
        const double p_w = base_w + 2.0 * delta(rng);
        const double p_kw = std::max(0.0, p_w / 1000.0);
        out[i] = p_kw;
        out[i + 1] = p_kw;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Solar: bundled clear-day base profile plus per-slot Gaussian noise,
// clamped at zero and zero outside the base profile's daylight slots.
// ---------------------------------------------------------------------------

struct SolarParams {
    Schedule base_profile;  // kW, nonnegative
    double noise_std = 0.0;

    bool valid() const {
        if (noise_std < 0.0) return false;
        for (double v : base_profile.values)
            if (v < 0.0) return false;
        return true;
    }
};

inline Schedule solar_profile(const SolarParams& params, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> noise(0.0, params.noise_std);
    Schedule out;
    for (std::size_t i = 0; i < kSlotCount; ++i) {
        if (params.base_profile[i] <= 0.0) {
            out[i] = 0.0;  // no generation outside daylight
            continue;
        }
        const double v = params.base_profile[i] + (params.noise_std > 0.0 ? noise(rng) : 0.0);
        out[i] = std::max(0.0, v);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Heat pump: constant COP, electric draw shows up as negative electric
// contribution.
// ---------------------------------------------------------------------------

struct HpParams {
    double cop = 0.0;       // coefficient of performance
    double p_el_max = 0.0;  // max electric draw, kW

    bool valid() const { return cop > 1.0 && p_el_max > 0.0; }
};

// Returns (electric contribution, heat output) for an electric draw in kW.
inline std::pair<double, double> hp_coupled(double p_el_draw, const HpParams& params) {
    if (p_el_draw < 0.0 || p_el_draw > params.p_el_max + 1e-9)
        throw InfeasibleDispatch("hp electric draw out of [0, p_el_max]");
    return {-p_el_draw, params.cop * p_el_draw};
}

}  // namespace mesched
