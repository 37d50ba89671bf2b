#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <variant>

#include "mesched/core.hpp"
#include "mesched/flexibility.hpp"
#include "mesched/objectives.hpp"
#include "mesched/rng.hpp"
#include "mesched/units.hpp"

namespace mesched {

// ---------------------------------------------------------------------------
// Runtime unit state an agent decides over. Renewables carry their realized
// (seeded) profile; the profile is the per-slot output ceiling under
// curtailment.
// ---------------------------------------------------------------------------

struct ChpUnit {
    ChpParams params;
};

struct RenewableUnit {
    Schedule profile;  // kW, realized for this run
};

struct HpUnit {
    HpParams params;
};

struct StorageUnit {
    StorageParams params;
};

using UnitState = std::variant<ChpUnit, RenewableUnit, HpUnit, StorageUnit>;

// ---------------------------------------------------------------------------
// Interval-shrinking local search over one slot's dispatch value.
// ---------------------------------------------------------------------------

struct SearchBounds {
    double lower = 0.0;
    double upper = 0.0;
    double value = 0.0;  // current sample, lower <= value <= upper
    double step = 1.0;   // probe offset for the +/- neighbors
};

// Four-case bound update from the utilities at (value-step, value, value+step).
// Monotone runs move one bound to the center; a strict local minimum shrinks
// both bounds to the probe neighborhood; a local maximum or any tie leaves
// the bounds alone. The interval never widens.
inline SearchBounds bound_update(double u_minus, double u_center, double u_plus,
                                 SearchBounds b) {
    if (u_minus < u_center && u_center < u_plus) {
        b.lower = b.value;
    } else if (u_minus > u_center && u_center > u_plus) {
        b.upper = b.value;
    } else if (u_minus > u_center && u_plus > u_center) {
        b.lower = std::max(b.lower, b.value - b.step);
        b.upper = std::min(b.upper, b.value + b.step);
    }
    // local max or ties: keep bounds
    if (b.value < b.lower) b.value = b.lower;
    if (b.value > b.upper) b.value = b.upper;
    return b;
}

// Searches [0, p_max] for the utility maximum, starting from a random value
// in [0, min(p_max, residual_slot)]. Returns the best value encountered;
// stops after n_iterations or once a probe would leave the current interval.
// A non-positive residual degenerates the start interval: the slot is already
// covered and the unit stays off.
template <typename UtilityFn>
double local_search_slot(UtilityFn&& utility, double p_max, double residual_slot,
                         int n_iterations, Rng& rng) {
    const double upper_init = std::min(p_max, residual_slot);
    if (!(upper_init > 0.0)) return 0.0;

    // Probe step scaled to the unit size so small plants still search.
    const double step = std::max(0.01 * p_max, 0.001);
    SearchBounds b{0.0, p_max, 0.0, step};
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    b.value = uni(rng) * upper_init;

    double best_v = b.value;
    double best_u = utility(b.value);
    // Seed the search with the interval boundaries: under dominant deviation
    // penalties the optimum sits at the clipped residual (the upper bound).
    auto consider = [&](double v) {
        const double u = utility(v);
        if (u > best_u) {
            best_u = u;
            best_v = v;
        }
    };
    consider(0.0);
    consider(upper_init);
    for (int it = 0; it < n_iterations; ++it) {
        const double v_minus = b.value - step;
        const double v_plus = b.value + step;
        if (v_minus < b.lower || v_plus > b.upper) break;
        const double u_minus = utility(v_minus);
        const double u_center = utility(b.value);
        const double u_plus = utility(v_plus);
        if (u_center > best_u) {
            best_u = u_center;
            best_v = b.value;
        }
        if (u_minus > best_u) {
            best_u = u_minus;
            best_v = v_minus;
        }
        if (u_plus > best_u) {
            best_u = u_plus;
            best_v = v_plus;
        }
        b = bound_update(u_minus, u_center, u_plus, b);
        if (b.upper - b.lower < step) break;
        b.value = b.lower + uni(rng) * (b.upper - b.lower);
    }
    return std::clamp(best_v, 0.0, p_max);
}

// ---------------------------------------------------------------------------
// Candidate generation: the multi-level decide step. The residuals passed in
// exclude the agent's own current contribution (what the rest of the cluster
// leaves uncovered for this agent).
// ---------------------------------------------------------------------------

struct DecisionInputs {
    PerCarrier<Schedule> residual_excl_own;
    int n_iterations = 32;
};

namespace detail {

inline AgentSelection chp_candidate(AgentId id, const ChpUnit& unit,
                                    const AgentEconParams& econ, const DecisionInputs& in,
                                    Rng& rng) {
    AgentSelection sel;
    sel.agent_id = id;
    const double rating = unit.params.electric_rating_kw();
    const double ratio = unit.params.heat_to_electric_ratio();
    const double gas_per_kw = 3600.0 * 1000.0 / (unit.params.rho * unit.params.hhv);
    for (std::size_t i = 0; i < kSlotCount; ++i) {
        const double need_p = in.residual_excl_own.electric[i];
        const double need_h = in.residual_excl_own.heat[i];
        // Both carriers' penalties enter the slot utility; electric power is
        // the search variable, heat follows the coupling ratio.
        auto slot_utility = [&](double p) {
            return private_utility_slot(econ, i, p, ratio * p, need_p, need_h,
                                        gas_per_kw * p);
        };
        // The heat residual can also pull the CHP on when electric is covered.
        const double want = std::max(need_p, ratio > 0.0 ? need_h / ratio : 0.0);
        const double p = local_search_slot(slot_utility, rating, want, in.n_iterations, rng);
        sel.schedules.electric[i] = p;
        sel.schedules.heat[i] = ratio * p;
    }
    return sel;
}

inline AgentSelection renewable_candidate(AgentId id, const RenewableUnit& unit,
                                          const AgentEconParams& econ,
                                          const DecisionInputs& in, Rng& rng) {
    AgentSelection sel;
    sel.agent_id = id;
    for (std::size_t i = 0; i < kSlotCount; ++i) {
        const double need_p = in.residual_excl_own.electric[i];
        auto slot_utility = [&](double p) {
            return private_utility_slot(econ, i, p, 0.0, need_p, 0.0, 0.0);
        };
        sel.schedules.electric[i] =
            local_search_slot(slot_utility, unit.profile[i], need_p, in.n_iterations, rng);
    }
    return sel;
}

inline AgentSelection hp_candidate(AgentId id, const HpUnit& unit,
                                   const AgentEconParams& econ, const DecisionInputs& in,
                                   Rng& rng) {
    AgentSelection sel;
    sel.agent_id = id;
    const double cop = unit.params.cop;
    for (std::size_t i = 0; i < kSlotCount; ++i) {
        const double need_p = in.residual_excl_own.electric[i];
        const double need_h = in.residual_excl_own.heat[i];
        // Search variable is the electric draw; the electric side counts as a
        // negative contribution against the electric residual.
        auto slot_utility = [&](double d) {
            return private_utility_slot(econ, i, -d, cop * d, need_p, need_h, 0.0);
        };
        const double want = need_h / cop;
        const double d =
            local_search_slot(slot_utility, unit.params.p_el_max, want, in.n_iterations, rng);
        sel.schedules.electric[i] = -d;
        sel.schedules.heat[i] = cop * d;
    }
    return sel;
}

inline AgentSelection storage_candidate(AgentId id, const StorageUnit& unit,
                                        const DecisionInputs& in) {
    AgentSelection sel;
    sel.agent_id = id;
    const Carrier c = unit.params.carrier;
    sel.schedules[c] = storage_schedule_for_residual(unit.params, unit.params.soc_init,
                                                     in.residual_excl_own[c]);
    return sel;
}

}  // namespace detail

inline AgentSelection build_candidate(AgentId id, const UnitState& unit,
                                      const AgentEconParams& econ, const DecisionInputs& in,
                                      Rng& rng) {
    return std::visit(
        [&](const auto& u) -> AgentSelection {
            using U = std::decay_t<decltype(u)>;
            if constexpr (std::is_same_v<U, ChpUnit>)
                return detail::chp_candidate(id, u, econ, in, rng);
            else if constexpr (std::is_same_v<U, RenewableUnit>)
                return detail::renewable_candidate(id, u, econ, in, rng);
            else if constexpr (std::is_same_v<U, HpUnit>)
                return detail::hp_candidate(id, u, econ, in, rng);
            else
                return detail::storage_candidate(id, u, in);
        },
        unit);
}

struct DecisionOutcome {
    bool accepted = false;
    std::optional<AgentSelection> new_selection;
    double new_global_utility = -std::numeric_limits<double>::infinity();
};

}  // namespace mesched
