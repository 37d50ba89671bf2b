#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "mesched/core.hpp"
#include "mesched/decision.hpp"
#include "mesched/gossip.hpp"
#include "mesched/scenarios.hpp"

namespace mesched {

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

// 100 * max(0, 1 - sum|target - cluster| / sum|target|).
inline double fulfillment_rate(const Schedule& target, const Schedule& cluster) {
    const double norm = l1_norm(target);
    if (norm <= 0.0) throw MetricUndefined("fulfillment rate needs a nonzero target norm");
    return 100.0 * std::max(0.0, 1.0 - l1_distance(target, cluster) / norm);
}

struct RunResult {
    std::uint64_t seed = 0;
    double fulfillment_electric = 0.0;
    double fulfillment_heat = 0.0;
    double fulfillment_combined = 0.0;  // unweighted mean of the carrier rates
    double global_utility = kNegInf;
    std::vector<double> private_utilities;  // by agent index
    int cycles = 0;
    bool converged = false;
    std::size_t messages = 0;
    double wall_ms = 0.0;
};

// Gas consumption implied by a CHP electric schedule; zero for other units.
inline ResourceVector resources_for(const UnitState& unit, const Schedule& electric) {
    ResourceVector f;
    if (const ChpUnit* chp = std::get_if<ChpUnit>(&unit)) {
        const double gas_per_kw = 3600.0 * 1000.0 / (chp->params.rho * chp->params.hhv);
        for (std::size_t i = 0; i < kSlotCount; ++i) f.values[i] = gas_per_kw * electric[i];
    }
    return f;
}

inline RunResult evaluate_run(const ScenarioSpec& spec, const std::vector<AgentRuntime>& agents,
                              const NegotiationResult& negotiation, std::uint64_t seed) {
    RunResult r;
    r.seed = seed;
    r.fulfillment_electric =
        fulfillment_rate(spec.targets.electric, negotiation.cluster.sums.electric);
    r.fulfillment_heat = fulfillment_rate(spec.targets.heat, negotiation.cluster.sums.heat);
    r.fulfillment_combined = 0.5 * (r.fulfillment_electric + r.fulfillment_heat);
    r.global_utility = negotiation.best.utility;
    r.cycles = negotiation.cycles;
    r.converged = negotiation.converged;
    r.messages = negotiation.messages_total;

    const PerCarrier<Schedule> delta = residual(spec.targets, negotiation.cluster);
    for (const AgentRuntime& agent : agents) {
        auto it = negotiation.best.selections.find(agent.id);
        if (it == negotiation.best.selections.end()) {
            r.private_utilities.push_back(0.0);
            continue;
        }
        const AgentSelection& sel = *it->second;
        const ResourceVector f = resources_for(agent.unit, sel.schedules.electric);
        r.private_utilities.push_back(private_utility(agent.econ, sel.schedules.electric,
                                                      sel.schedules.heat, delta.electric,
                                                      delta.heat, f));
    }
    return r;
}

// ---------------------------------------------------------------------------
// Experiment batching and file emission
// ---------------------------------------------------------------------------

namespace detail {

inline std::string csv_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

inline const char* unit_type_name(const UnitState& unit) {
    if (std::holds_alternative<ChpUnit>(unit)) return "chp";
    if (std::holds_alternative<HpUnit>(unit)) return "hp";
    if (std::holds_alternative<StorageUnit>(unit)) return "storage";
    return "renewable";
}

inline void write_convergence_csv(const std::string& path, const NegotiationTrace& trace) {
    std::ofstream out(path);
    out << "cycle,best_utility_total,best_utility_P,best_utility_H,messages_sent,accepting_agent\n";
    for (const TraceRow& row : trace)
        out << row.cycle << ',' << csv_num(row.best_utility_total) << ','
            << csv_num(row.best_utility_electric) << ',' << csv_num(row.best_utility_heat) << ','
            << row.messages_sent << ',' << row.accepting_agent << '\n';
}

inline void write_stacked_csv(const std::string& path, Carrier carrier,
                              const ScenarioSpec& spec, const std::vector<AgentRuntime>& agents,
                              const NegotiationResult& negotiation) {
    // Per-slot schedule sums grouped by agent type, plus the target.
    std::map<std::string, Schedule> by_type;
    for (const AgentRuntime& agent : agents) {
        auto it = negotiation.best.selections.find(agent.id);
        if (it == negotiation.best.selections.end()) continue;
        Schedule& acc = by_type[unit_type_name(agent.unit)];
        for (std::size_t i = 0; i < kSlotCount; ++i) acc[i] += it->second->schedules[carrier][i];
    }
    std::ofstream out(path);
    out << "slot,target";
    for (const auto& [type, _] : by_type) out << ',' << type;
    out << '\n';
    for (std::size_t i = 0; i < kSlotCount; ++i) {
        out << i << ',' << csv_num(spec.targets[carrier][i]);
        for (const auto& [_, sched] : by_type) out << ',' << csv_num(sched[i]);
        out << '\n';
    }
}

}  // namespace detail

struct ExperimentResult {
    std::vector<RunResult> runs;

    double mean_combined() const {
        double s = 0.0;
        for (const RunResult& r : runs) s += r.fulfillment_combined;
        return runs.empty() ? 0.0 : s / static_cast<double>(runs.size());
    }
};

inline ExperimentResult run_experiment(const ScenarioSpec& spec, int n_runs,
                                       std::uint64_t base_seed,
                                       const std::string& out_dir = "") {
    namespace fs = std::filesystem;
    const bool emit = !out_dir.empty();
    if (emit) fs::create_directories(out_dir);

    ExperimentResult result;
    std::ofstream results_csv;
    if (emit) {
        results_csv.open(fs::path(out_dir) / "results.csv");
        // Timing stays out of this file so identical seeds give identical bytes.
        results_csv << "run,seed,fulfillment_electric,fulfillment_heat,fulfillment_combined,"
                       "global_utility,cycles,converged,messages\n";
    }

    for (int k = 0; k < n_runs; ++k) {
        const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(k);
        std::vector<AgentRuntime> agents = instantiate_agents(spec, seed);
        std::vector<AgentId> ids;
        for (const AgentRuntime& a : agents) ids.push_back(a.id);
        const Topology topology = Topology::complete(ids);

        const auto t0 = std::chrono::steady_clock::now();
        NegotiationResult negotiation =
            spec.negotiation.mode == ExecutionMode::Concurrent
                ? run_concurrent(agents, topology, spec.negotiation)
                : run_rounds(agents, topology, spec.negotiation);
        const auto t1 = std::chrono::steady_clock::now();

        RunResult run = evaluate_run(spec, agents, negotiation, seed);
        run.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

        if (emit) {
            results_csv << k << ',' << seed << ',' << detail::csv_num(run.fulfillment_electric)
                        << ',' << detail::csv_num(run.fulfillment_heat) << ','
                        << detail::csv_num(run.fulfillment_combined) << ','
                        << detail::csv_num(run.global_utility) << ',' << run.cycles << ','
                        << (run.converged ? 1 : 0) << ',' << run.messages << '\n';
            detail::write_convergence_csv(
                (fs::path(out_dir) / ("convergence_" + std::to_string(k) + ".csv")).string(),
                negotiation.trace);
            for (Carrier c : kCarriers)
                detail::write_stacked_csv(
                    (fs::path(out_dir) / ("stacked_" + std::string(carrier_name(c)) + "_" +
                                          std::to_string(k) + ".csv"))
                        .string(),
                    c, spec, agents, negotiation);
        }
        result.runs.push_back(std::move(run));
    }

    if (emit) {
        nlohmann::json summary;
        summary["variant"] = spec.variant;
        summary["runs"] = result.runs.size();
        summary["base_seed"] = base_seed;
        summary["mean_fulfillment_combined"] = result.mean_combined();
        double min_c = 1e9, max_c = -1e9, mean_e = 0, mean_h = 0, mean_wall = 0;
        for (const RunResult& r : result.runs) {
            min_c = std::min(min_c, r.fulfillment_combined);
            max_c = std::max(max_c, r.fulfillment_combined);
            mean_e += r.fulfillment_electric;
            mean_h += r.fulfillment_heat;
            mean_wall += r.wall_ms;
        }
        const double n = std::max<std::size_t>(result.runs.size(), 1);
        summary["min_fulfillment_combined"] = min_c;
        summary["max_fulfillment_combined"] = max_c;
        summary["mean_fulfillment_electric"] = mean_e / n;
        summary["mean_fulfillment_heat"] = mean_h / n;
        summary["mean_wall_ms"] = mean_wall / n;  // informational only
        std::ofstream((fs::path(out_dir) / "summary.json").string()) << summary.dump(2) << '\n';
    }
    return result;
}

// ---------------------------------------------------------------------------
// Brute-force oracle for tiny instances. Non-storage units decompose per
// slot, so their joint dispatch is optimized slot-by-slot over a discrete
// grid; storage sequences are enumerated depth-first with SoC propagation.
// ---------------------------------------------------------------------------

struct TinyScenario {
    std::vector<UnitState> units;
    TargetSchedules targets;  // must be zero at and beyond n_slots
    std::size_t n_slots = 6;
    double step = 0.25;  // discretization, kW
};

struct OracleResult {
    double utility = kNegInf;
    std::vector<AgentSelection> selections;  // indexed like TinyScenario::units
};

namespace detail {

// Per-slot dispatch options of one unit as (electric, heat) pairs.
inline std::vector<std::pair<double, double>> unit_options(const UnitState& unit,
                                                           std::size_t slot, double step) {
    std::vector<std::pair<double, double>> opts;
    if (const ChpUnit* chp = std::get_if<ChpUnit>(&unit)) {
        const double rating = chp->params.electric_rating_kw();
        const double ratio = chp->params.heat_to_electric_ratio();
        for (double p = 0.0; p <= rating + 1e-12; p += step) opts.emplace_back(p, ratio * p);
    } else if (const RenewableUnit* ren = std::get_if<RenewableUnit>(&unit)) {
        for (double p = 0.0; p <= ren->profile[slot] + 1e-12; p += step)
            opts.emplace_back(p, 0.0);
        if (opts.empty()) opts.emplace_back(0.0, 0.0);
    } else if (const HpUnit* hp = std::get_if<HpUnit>(&unit)) {
        for (double d = 0.0; d <= hp->params.p_el_max + 1e-12; d += step)
            opts.emplace_back(-d, hp->params.cop * d);
    } else {
        const StorageUnit& st = std::get<StorageUnit>(unit);
        const Carrier c = st.params.carrier;
        for (double p = -st.params.p_ch_max; p <= st.params.p_dis_max + 1e-12; p += step)
            opts.emplace_back(c == Carrier::Electric ? p : 0.0, c == Carrier::Heat ? p : 0.0);
    }
    return opts;
}

}  // namespace detail

inline OracleResult brute_force_oracle(const TinyScenario& scenario,
                                       double point_budget = 1e7) {
    if (scenario.n_slots > 6) throw OracleTooLarge("oracle instances are capped at 6 slots");
    if (scenario.units.size() > 3) throw OracleTooLarge("oracle instances are capped at 3 agents");

    std::vector<std::size_t> storage_idx, stateless_idx;
    for (std::size_t u = 0; u < scenario.units.size(); ++u) {
        if (std::holds_alternative<StorageUnit>(scenario.units[u]))
            storage_idx.push_back(u);
        else
            stateless_idx.push_back(u);
    }

    // Enumeration size estimate.
    double points = 0.0;
    double storage_combos_per_slot = 1.0;
    for (std::size_t s = 0; s < scenario.n_slots; ++s) {
        double joint = 1.0;
        for (std::size_t u : stateless_idx)
            joint *= detail::unit_options(scenario.units[u], s, scenario.step).size();
        double st = 1.0;
        for (std::size_t u : storage_idx)
            st *= detail::unit_options(scenario.units[u], s, scenario.step).size();
        storage_combos_per_slot = std::max(storage_combos_per_slot, st);
        points += joint * st;
    }
    points += std::pow(storage_combos_per_slot, static_cast<double>(scenario.n_slots));
    if (points > point_budget)
        throw OracleTooLarge("discretized decision space exceeds the point budget");

    // For every slot and every joint storage dispatch, the best achievable
    // slot cost |dP| + |dH| over the stateless units' joint grid.
    struct SlotTable {
        std::vector<std::pair<double, double>> storage_combo;  // summed (P, H) of storages
        std::vector<std::vector<std::pair<double, double>>> combo_parts;  // per combo, per storage
        std::vector<double> best_cost;
        std::vector<std::vector<std::pair<double, double>>> stateless_pick;  // per combo, per unit
    };

    const std::size_t n_slots = scenario.n_slots;
    std::vector<SlotTable> tables(n_slots);

    for (std::size_t s = 0; s < n_slots; ++s) {
        // Joint storage dispatch combos at this slot.
        std::vector<std::vector<std::pair<double, double>>> st_opts;
        for (std::size_t u : storage_idx)
            st_opts.push_back(detail::unit_options(scenario.units[u], s, scenario.step));
        std::vector<std::pair<double, double>> combos{{0.0, 0.0}};
        std::vector<std::vector<std::pair<double, double>>> combo_parts{{}};
        for (const auto& opts : st_opts) {
            std::vector<std::pair<double, double>> next;
            std::vector<std::vector<std::pair<double, double>>> next_parts;
            for (std::size_t c = 0; c < combos.size(); ++c)
                for (const auto& [p, h] : opts) {
                    next.emplace_back(combos[c].first + p, combos[c].second + h);
                    auto parts = combo_parts[c];
                    parts.emplace_back(p, h);
                    next_parts.push_back(std::move(parts));
                }
            combos = std::move(next);
            combo_parts = std::move(next_parts);
        }

        // Stateless joint grid at this slot.
        std::vector<std::vector<std::pair<double, double>>> free_opts;
        for (std::size_t u : stateless_idx)
            free_opts.push_back(detail::unit_options(scenario.units[u], s, scenario.step));

        SlotTable& table = tables[s];
        table.storage_combo = combos;
        for (std::size_t c = 0; c < combos.size(); ++c) {
            double best_cost = std::numeric_limits<double>::infinity();
            std::vector<std::pair<double, double>> best_pick(stateless_idx.size(), {0.0, 0.0});
            std::vector<std::size_t> cursor(stateless_idx.size(), 0);
            for (;;) {
                double p_sum = combos[c].first, h_sum = combos[c].second;
                for (std::size_t u = 0; u < stateless_idx.size(); ++u) {
                    p_sum += free_opts[u][cursor[u]].first;
                    h_sum += free_opts[u][cursor[u]].second;
                }
                const double cost = std::abs(scenario.targets.electric[s] - p_sum) +
                                    std::abs(scenario.targets.heat[s] - h_sum);
                if (cost < best_cost) {
                    best_cost = cost;
                    for (std::size_t u = 0; u < stateless_idx.size(); ++u)
                        best_pick[u] = free_opts[u][cursor[u]];
                }
                // advance the odometer
                std::size_t u = 0;
                for (; u < cursor.size(); ++u) {
                    if (++cursor[u] < free_opts[u].size()) break;
                    cursor[u] = 0;
                }
                if (u == cursor.size()) break;
                if (cursor.empty()) break;
            }
            if (stateless_idx.empty())
                best_cost = std::abs(scenario.targets.electric[s] - combos[c].first) +
                            std::abs(scenario.targets.heat[s] - combos[c].second);
            table.best_cost.push_back(best_cost);
            table.stateless_pick.push_back(std::move(best_pick));
        }
        table.combo_parts = std::move(combo_parts);
    }

    // Depth-first search over storage dispatch sequences with SoC tracking.
    struct Best {
        double cost = std::numeric_limits<double>::infinity();
        std::vector<std::size_t> combo_by_slot;
    } best;

    std::vector<double> soc(storage_idx.size());
    for (std::size_t k = 0; k < storage_idx.size(); ++k)
        soc[k] = std::get<StorageUnit>(scenario.units[storage_idx[k]]).params.soc_init;

    std::vector<std::size_t> chosen(n_slots, 0);
    std::function<void(std::size_t, double, std::vector<double>)> dfs =
        [&](std::size_t s, double cost_so_far, std::vector<double> soc_now) {
            if (cost_so_far >= best.cost) return;
            if (s == n_slots) {
                best.cost = cost_so_far;
                best.combo_by_slot = chosen;
                return;
            }
            const SlotTable& table = tables[s];
            for (std::size_t c = 0; c < table.storage_combo.size(); ++c) {
                std::vector<double> soc_next = soc_now;
                bool feasible = true;
                for (std::size_t k = 0; k < storage_idx.size(); ++k) {
                    const StorageUnit& st =
                        std::get<StorageUnit>(scenario.units[storage_idx[k]]);
                    const auto& [p, h] = table.combo_parts[c][k];
                    const double power = st.params.carrier == Carrier::Electric ? p : h;
                    const double next = soc_step(soc_next[k], power, st.params);
                    if (next < -1e-9 || next > st.params.capacity + 1e-9) {
                        feasible = false;
                        break;
                    }
                    soc_next[k] = next;
                }
                if (!feasible) continue;
                chosen[s] = c;
                dfs(s + 1, cost_so_far + table.best_cost[c], std::move(soc_next));
            }
        };
    dfs(0, 0.0, soc);

    OracleResult result;
    if (!std::isfinite(best.cost)) return result;  // no feasible assignment

    // Slots at and beyond n_slots contribute |target| which is required zero;
    // the optimum utility is just the negated accumulated cost.
    result.utility = -best.cost;
    result.selections.resize(scenario.units.size());
    for (std::size_t u = 0; u < scenario.units.size(); ++u)
        result.selections[u].agent_id = static_cast<AgentId>(u);
    for (std::size_t s = 0; s < n_slots; ++s) {
        const SlotTable& table = tables[s];
        const std::size_t c = best.combo_by_slot[s];
        for (std::size_t k = 0; k < storage_idx.size(); ++k) {
            const auto& [p, h] = table.combo_parts[c][k];
            result.selections[storage_idx[k]].schedules.electric[s] = p;
            result.selections[storage_idx[k]].schedules.heat[s] = h;
        }
        for (std::size_t k = 0; k < stateless_idx.size(); ++k) {
            const auto& [p, h] = table.stateless_pick[c][k];
            result.selections[stateless_idx[k]].schedules.electric[s] = p;
            result.selections[stateless_idx[k]].schedules.heat[s] = h;
        }
    }
    return result;
}

}  // namespace mesched
