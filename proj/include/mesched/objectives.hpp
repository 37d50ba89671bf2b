#pragma once

#include <cmath>
#include <optional>

#include "mesched/core.hpp"

namespace mesched {

// Per-agent economic parameters. Penalty terms are normalized to positive
// costs subtracted from the revenue; configured so that for the high preset a
// full-rating deviation always outweighs the slot revenue.
struct AgentEconParams {
    double gamma = 0.0;    // EUR per kW-slot electric contribution
    double delta = 0.0;    // EUR per kW-slot heat contribution
    double theta = 0.0;    // EUR per resource unit (gas kg/h)
    double p_P = 0.0;      // electric deviation penalty coefficient
    double p_H = 0.0;      // heat deviation penalty coefficient
    double p_e = 2.0;      // penalty exponent, >= 1
    std::optional<Schedule> market_prices;  // EUR/kWh, market variants only

    // Effective electric revenue coefficient at one slot; the market price
    // acts as a per-slot floor (opportunity cost of not selling).
    double gamma_at(std::size_t slot) const {
        if (market_prices) return std::max(gamma, (*market_prices)[slot]);
        return gamma;
    }

    bool valid() const { return p_P >= 0.0 && p_H >= 0.0 && p_e >= 1.0; }
};

// Gas consumed per slot in kg/h; zero for everything but CHPs.
struct ResourceVector {
    std::array<double, kSlotCount> values{};
};

// Eq-style coalition utility for one carrier: negative L1 gap, 0 at exact
// fulfillment.
inline double carrier_utility(const Schedule& target, const Schedule& cluster) {
    return -l1_distance(target, cluster);
}

inline double total_utility(const TargetSchedules& targets, const ClusterSchedule& cluster) {
    return carrier_utility(targets.electric, cluster.sums.electric) +
           carrier_utility(targets.heat, cluster.sums.heat);
}

// One slot of the private objective: revenue for contributed power minus
// deviation penalties against the residual deltas and the resource cost.
inline double private_utility_slot(const AgentEconParams& econ, std::size_t slot, double p_a,
                                   double h_a, double delta_p, double delta_h, double f_a) {
    const double revenue = econ.gamma_at(slot) * p_a + econ.delta * h_a;
    const double penalty = econ.p_P * std::pow(std::abs(p_a - delta_p), econ.p_e) +
                           econ.p_H * std::pow(std::abs(h_a - delta_h), econ.p_e) +
                           econ.theta * f_a;
    return revenue - penalty;
}

inline double private_utility(const AgentEconParams& econ, const Schedule& p_a,
                              const Schedule& h_a, const Schedule& delta_p,
                              const Schedule& delta_h, const ResourceVector& f_a) {
    double u = 0.0;
    for (std::size_t i = 0; i < kSlotCount; ++i)
        u += private_utility_slot(econ, i, p_a[i], h_a[i], delta_p[i], delta_h[i],
                                  f_a.values[i]);
    return u;
}

// True iff a full-rating deviation is penalized more than the best per-slot
// revenue it could earn, i.e. the penalty regime dominates the economics.
inline bool penalty_dominance_check(const AgentEconParams& econ, double rating_kw) {
    if (rating_kw <= 0.0) return false;
    double gamma_max = econ.gamma;
    if (econ.market_prices)
        for (double p : econ.market_prices->values) gamma_max = std::max(gamma_max, p);
    const double revenue = std::max(gamma_max, econ.delta) * rating_kw;
    const double penalty = std::min(econ.p_P, econ.p_H) * std::pow(rating_kw, econ.p_e);
    return penalty > revenue;
}

}  // namespace mesched
