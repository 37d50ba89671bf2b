#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "mesched/errors.hpp"

namespace mesched {

// Planning horizon: one day at 15-minute resolution. Fixed at the type level;
// scenario files cannot change it.
inline constexpr std::size_t kSlotCount = 96;
inline constexpr double kSlotHours = 0.25;

// Energy carriers. Sign convention everywhere: generation positive,
// consumption negative (a heat pump's electric draw is a negative electric
// contribution).
enum class Carrier { Electric = 0, Heat = 1 };

inline constexpr std::array<Carrier, 2> kCarriers{Carrier::Electric, Carrier::Heat};

inline const char* carrier_name(Carrier c) {
    return c == Carrier::Electric ? "electric" : "heat";
}

// One day of power values in kW, one per 15-minute slot.
struct Schedule {
    std::array<double, kSlotCount> values{};

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }

    static Schedule constant(double v) {
        Schedule s;
        s.values.fill(v);
        return s;
    }

    bool all_finite() const {
        for (double v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }

    friend bool operator==(const Schedule&, const Schedule&) = default;
};

inline Schedule operator+(const Schedule& a, const Schedule& b) {
    Schedule r;
    for (std::size_t i = 0; i < kSlotCount; ++i) r[i] = a[i] + b[i];
    return r;
}

inline Schedule operator-(const Schedule& a, const Schedule& b) {
    Schedule r;
    for (std::size_t i = 0; i < kSlotCount; ++i) r[i] = a[i] - b[i];
    return r;
}

inline Schedule operator*(const Schedule& a, double k) {
    Schedule r;
    for (std::size_t i = 0; i < kSlotCount; ++i) r[i] = a[i] * k;
    return r;
}

// Fixed-size per-carrier container; cheaper and stricter than a map since the
// carrier set is closed.
template <typename T>
struct PerCarrier {
    T electric{};
    T heat{};

    T& operator[](Carrier c) { return c == Carrier::Electric ? electric : heat; }
    const T& operator[](Carrier c) const {
        return c == Carrier::Electric ? electric : heat;
    }

    friend bool operator==(const PerCarrier&, const PerCarrier&) = default;
};

// Per-carrier target profiles the coalition must collectively match.
using TargetSchedules = PerCarrier<Schedule>;

using AgentId = int;

// An agent's currently chosen schedule, one per carrier. Exactly one schedule
// is ever selected per carrier per agent; alternatives are generated on the
// fly by the decision step and never materialized as a set.
struct AgentSelection {
    AgentId agent_id = -1;
    PerCarrier<Schedule> schedules;

    friend bool operator==(const AgentSelection&, const AgentSelection&) = default;
};

// Element-wise sum of all agents' selected schedules, per carrier.
struct ClusterSchedule {
    PerCarrier<Schedule> sums;

    friend bool operator==(const ClusterSchedule&, const ClusterSchedule&) = default;
};

template <typename Range>
ClusterSchedule cluster_sum(const Range& selections) {
    ClusterSchedule cluster;
    for (const AgentSelection& sel : selections) {
        for (Carrier c : kCarriers) {
            if (!sel.schedules[c].all_finite())
                throw MalformedSelection("non-finite schedule in selection of agent " +
                                         std::to_string(sel.agent_id));
            for (std::size_t i = 0; i < kSlotCount; ++i)
                cluster.sums[c][i] += sel.schedules[c][i];
        }
    }
    return cluster;
}

inline ClusterSchedule cluster_sum(const std::vector<AgentSelection>& selections) {
    return cluster_sum<std::vector<AgentSelection>>(selections);
}

// Per-carrier target minus cluster. Positive means under-fulfillment.
inline PerCarrier<Schedule> residual(const TargetSchedules& target,
                                     const ClusterSchedule& cluster) {
    PerCarrier<Schedule> delta;
    for (Carrier c : kCarriers) delta[c] = target[c] - cluster.sums[c];
    return delta;
}

inline double l1_distance(const Schedule& a, const Schedule& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < kSlotCount; ++i) sum += std::abs(a[i] - b[i]);
    return sum;
}

inline double l1_norm(const Schedule& a) {
    double sum = 0.0;
    for (double v : a.values) sum += std::abs(v);
    return sum;
}

}  // namespace mesched
