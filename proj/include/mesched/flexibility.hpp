#pragma once

#include <algorithm>
#include <string>

#include "mesched/core.hpp"
#include "mesched/errors.hpp"

namespace mesched {

// Storage with charge/discharge efficiencies and no self-discharge. Sign
// convention follows the rest of the system: discharge (generation) positive,
// charge negative.
struct StorageParams {
    double capacity = 0.0;    // kWh
    double p_ch_max = 0.0;    // kW
    double p_dis_max = 0.0;   // kW
    double eff_ch = 1.0;
    double eff_dis = 1.0;
    Carrier carrier = Carrier::Electric;
    double soc_init = 0.0;    // kWh

    bool valid() const {
        return capacity > 0.0 && p_ch_max > 0.0 && p_dis_max > 0.0 && eff_ch > 0.0 &&
               eff_ch <= 1.0 && eff_dis > 0.0 && eff_dis <= 1.0 && soc_init >= 0.0 &&
               soc_init <= capacity;
    }
};

// State of charge before slot 0 through after slot 95.
struct SocTrace {
    std::array<double, kSlotCount + 1> soc{};
};

// SoC change of one slot: discharge drains soc by p*dt/eff_dis, charge fills
// it by |p|*dt*eff_ch.
inline double soc_step(double soc, double power_kw, const StorageParams& params) {
    if (power_kw >= 0.0) return soc - power_kw * kSlotHours / params.eff_dis;
    return soc - power_kw * kSlotHours * params.eff_ch;
}

inline SocTrace soc_trace(const Schedule& schedule, const StorageParams& params,
                          double tolerance = 1e-9) {
    SocTrace trace;
    trace.soc[0] = params.soc_init;
    for (std::size_t i = 0; i < kSlotCount; ++i) {
        const double p = schedule[i];
        if (p > params.p_dis_max + tolerance || p < -params.p_ch_max - tolerance)
            throw InfeasibleDispatch("storage power exceeds rating at slot " +
                                     std::to_string(i));
        const double next = soc_step(trace.soc[i], p, params);
        if (next < -tolerance || next > params.capacity + tolerance)
            throw InfeasibleDispatch("storage SoC bound violated at slot " +
                                     std::to_string(i));
        trace.soc[i + 1] = std::clamp(next, 0.0, params.capacity);
    }
    return trace;
}

// Per-slot feasible power band. Any schedule inside the band slot-wise is
// SoC-feasible (the band edges are tightened conservatively against the
// worst-case energy trajectories).
struct FlexBand {
    Schedule p_min_avail;  // kW, <= 0 at charge-capable slots
    Schedule p_max_avail;  // kW, >= 0 at discharge-capable slots
};

// Rating band minus the multi-purpose obligation, then tightened by a forward
// energy pass: the discharge edge is followed until the stored energy is
// exhausted, the charge edge until capacity is reached. Tracing either edge
// keeps SoC within [0, capacity]; interior schedules only have more headroom.
inline FlexBand available_band(const StorageParams& params, double soc_init,
                               const Schedule& mpo) {
    FlexBand band;
    double soc_dis = soc_init;           // SoC along the max-discharge edge
    double soc_ch = soc_init;            // SoC along the max-charge edge
    for (std::size_t i = 0; i < kSlotCount; ++i) {
        const double reserved_dis = std::max(0.0, mpo[i]);
        const double reserved_ch = std::max(0.0, -mpo[i]);
        double upper = std::max(0.0, params.p_dis_max - reserved_dis);
        double lower = -std::max(0.0, params.p_ch_max - reserved_ch);

        // Energy tightening. Obligation power also moves SoC along the edges.
        const double dischargeable = (soc_dis * params.eff_dis) / kSlotHours;
        upper = std::min(upper, std::max(0.0, dischargeable - reserved_dis));
        const double chargeable = (params.capacity - soc_ch) / (kSlotHours * params.eff_ch);
        lower = std::max(lower, -std::max(0.0, chargeable - reserved_ch));

        band.p_max_avail[i] = upper;
        band.p_min_avail[i] = std::min(lower, upper);

        soc_dis = soc_step(soc_dis, band.p_max_avail[i] + reserved_dis, params);
        soc_ch = soc_step(soc_ch, band.p_min_avail[i] - reserved_ch, params);
        soc_dis = std::clamp(soc_dis, 0.0, params.capacity);
        soc_ch = std::clamp(soc_ch, 0.0, params.capacity);
    }
    return band;
}

// Covers as much of the residual as the storage allows: a forward pass clips
// each slot into the instantaneous feasible range and updates the SoC before
// moving on. The result always passes soc_trace.
inline Schedule storage_schedule_for_residual(const StorageParams& params, double soc_init,
                                              const Schedule& residual) {
    Schedule out;
    double soc = soc_init;
    for (std::size_t i = 0; i < kSlotCount; ++i) {
        const double upper = std::min(params.p_dis_max, soc * params.eff_dis / kSlotHours);
        const double lower =
            std::max(-params.p_ch_max, -(params.capacity - soc) / (kSlotHours * params.eff_ch));
        out[i] = std::clamp(residual[i], std::min(lower, upper), std::max(lower, upper));
        soc = std::clamp(soc_step(soc, out[i], params), 0.0, params.capacity);
    }
    return out;
}

}  // namespace mesched
