#pragma once

#include <cmath>

#include "mesched/core.hpp"

namespace mesched {

// Bundled day profiles. The solar base is a normalized clear-day bell curve
// (peak 1.0 around 13:00, zero outside roughly 06:30-19:30); unit builders
// scale it by the plant rating. The market prices are a representative
// day-ahead spot day in EUR/kWh with a morning ramp and an evening peak.

inline const Schedule& solar_base_profile() {
    static const Schedule profile = [] {
        Schedule s;
        for (std::size_t i = 0; i < kSlotCount; ++i) {
            const double x = (static_cast<double>(i) - 52.0) / 11.0;
            const double v = std::exp(-0.5 * x * x);
            s[i] = v > 0.05 ? (v - 0.05) / 0.95 : 0.0;
        }
        return s;
    }();
    return profile;
}

inline const Schedule& market_price_profile() {
    static const Schedule profile = [] {
        Schedule p;
        for (std::size_t i = 0; i < kSlotCount; ++i) {
            const double t = static_cast<double>(i);
            const double morning = std::exp(-0.5 * std::pow((t - 10.0) / 6.0, 2.0));
            const double midday = std::exp(-0.5 * std::pow((t - 52.0) / 8.0, 2.0));
            p[i] = 0.14 + 0.08 * morning + 0.42 * midday;
        }
        return p;
    }();
    return profile;
}

}  // namespace mesched
