#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "mesched/config_text.hpp"
#include "mesched/core.hpp"
#include "mesched/gossip.hpp"
#include "mesched/profiles.hpp"
#include "mesched/units.hpp"

namespace mesched {

using UnitModel = std::variant<ChpParams, WindParams, SolarParams, HpParams, StorageParams>;

struct AgentSpec {
    std::string name;
    UnitModel unit;
    AgentEconParams econ;

    friend bool operator==(const AgentSpec& a, const AgentSpec& b) {
        if (a.name != b.name) return false;
        auto econ_eq = [](const AgentEconParams& x, const AgentEconParams& y) {
            return x.gamma == y.gamma && x.delta == y.delta && x.theta == y.theta &&
                   x.p_P == y.p_P && x.p_H == y.p_H && x.p_e == y.p_e &&
                   x.market_prices == y.market_prices;
        };
        if (!econ_eq(a.econ, b.econ)) return false;
        if (a.unit.index() != b.unit.index()) return false;
        return std::visit(
            [&](const auto& ua) {
                using U = std::decay_t<decltype(ua)>;
                const auto& ub = std::get<U>(b.unit);
                if constexpr (std::is_same_v<U, ChpParams>)
                    return ua.rho == ub.rho && ua.eta == ub.eta && ua.hhv == ub.hhv &&
                           ua.m_dot_max == ub.m_dot_max &&
                           ua.p_reserved_max == ub.p_reserved_max;
                else if constexpr (std::is_same_v<U, WindParams>)
                    return ua.air_density == ub.air_density && ua.rotor_area == ub.rotor_area &&
                           ua.power_coeff == ub.power_coeff && ua.wind_speed == ub.wind_speed &&
                           ua.noise_mean == ub.noise_mean &&
                           ua.noise_variance == ub.noise_variance;
                else if constexpr (std::is_same_v<U, SolarParams>)
                    return ua.base_profile == ub.base_profile && ua.noise_std == ub.noise_std;
                else if constexpr (std::is_same_v<U, HpParams>)
                    return ua.cop == ub.cop && ua.p_el_max == ub.p_el_max;
                else
                    return ua.capacity == ub.capacity && ua.p_ch_max == ub.p_ch_max &&
                           ua.p_dis_max == ub.p_dis_max && ua.eff_ch == ub.eff_ch &&
                           ua.eff_dis == ub.eff_dis && ua.carrier == ub.carrier &&
                           ua.soc_init == ub.soc_init;
            },
            a.unit);
    }
};

struct ScenarioSpec {
    std::string variant;
    std::vector<AgentSpec> agents;
    TargetSchedules targets;
    std::uint64_t seed = 0;
    NegotiationParams negotiation;

    friend bool operator==(const ScenarioSpec& a, const ScenarioSpec& b) {
        return a.variant == b.variant && a.agents == b.agents && a.targets == b.targets &&
               a.seed == b.seed && a.negotiation.max_cycles == b.negotiation.max_cycles &&
               a.negotiation.n_iterations == b.negotiation.n_iterations;
    }
};

// ---------------------------------------------------------------------------
// Presets and calibration constants (artifact constants, tunable)
// ---------------------------------------------------------------------------

namespace preset {

inline constexpr double kGamma = 0.30;        // EUR / kW-slot electric
inline constexpr double kDelta = 0.10;        // EUR / kW-slot heat
inline constexpr double kThetaGas = 0.08;     // EUR per gas kg/h slot
// Penalty presets. High dominates the economics outright; low is weak enough
// that revenue wins at unit scale (selfish dispatch); the market variant sits
// between — an even weighting of economics plus the price-floor opportunity.
inline constexpr double kPenaltyHigh = 10.0;  // EUR / kW^2
inline constexpr double kPenaltyMarket = 0.3;
inline constexpr double kPenaltyLow = 0.002;
inline constexpr double kPenaltyExponent = 2.0;
inline constexpr double kHhv = 50e6;          // J/kg natural gas

// Target energy as a fraction of the gas roster's maximum deliverable energy
// per carrier; both scenario families share the resulting targets.
inline constexpr double kTargetScaleElectric = 0.55;
inline constexpr double kTargetScaleHeat = 0.57;

// Calibrated so the seed-0 wind plant mean output lands near 2 kW.
inline constexpr double kWindRotorArea = 16.0;   // m^2
inline constexpr double kWindSpeed = 8.0;        // m/s daily max
inline constexpr double kWindPowerCoeff = 0.40;

inline AgentEconParams econ(double penalty, bool market, double theta = 0.0) {
    AgentEconParams e;
    e.gamma = kGamma;
    e.delta = kDelta;
    e.theta = theta;
    e.p_P = penalty;
    e.p_H = penalty;
    e.p_e = kPenaltyExponent;
    if (market) e.market_prices = market_price_profile();
    return e;
}

inline ChpParams chp(double rating_kw, double rho, double eta) {
    ChpParams p;
    p.rho = rho;
    p.eta = eta;
    p.hhv = kHhv;
    p.m_dot_max = rating_kw * 1000.0 * 3600.0 / (rho * kHhv);
    p.p_reserved_max = 0.0;
    return p;
}

inline SolarParams solar(double rating_kw) {
    SolarParams p;
    p.base_profile = solar_base_profile() * rating_kw;
    p.noise_std = 0.05 * rating_kw;
    return p;
}

inline WindParams wind() {
    WindParams p;
    p.rotor_area = kWindRotorArea;
    p.wind_speed = kWindSpeed;
    p.power_coeff = kWindPowerCoeff;
    return p;
}

inline StorageParams storage(Carrier carrier, double power_kw, double eff, double capacity) {
    StorageParams p;
    p.capacity = capacity;
    p.p_ch_max = power_kw;
    p.p_dis_max = power_kw;
    p.eff_ch = eff;
    p.eff_dis = eff;
    p.carrier = carrier;
    p.soc_init = 0.5 * capacity;
    return p;
}

}  // namespace preset

// ---------------------------------------------------------------------------
// Target generation. Electric: double-peaked residential day; heat: early
// morning / late evening peaks with a midday trough. Absolute scale is
// anchored to the gas roster's maximum deliverable energy per carrier so the
// gas and electric scenario families share one set of targets.
// ---------------------------------------------------------------------------

namespace detail {

inline double gauss(double x, double center, double width) {
    const double z = (x - center) / width;
    return std::exp(-0.5 * z * z);
}

}  // namespace detail

inline TargetSchedules generate_targets(std::uint64_t /*seed*/) {
    Schedule electric_shape, heat_shape;
    for (std::size_t i = 0; i < kSlotCount; ++i) {
        const double t = static_cast<double>(i);
        electric_shape[i] = 0.15 + 0.90 * detail::gauss(t, 30.0, 8.0) +
                            1.10 * detail::gauss(t, 76.0, 7.0);
        heat_shape[i] = 0.10 + 1.10 * detail::gauss(t, 22.0, 7.0) +
                        1.00 * detail::gauss(t, 86.0, 6.0);
    }

    // Gas roster capability per slot: 6 CHPs at full dispatch plus 15 solar
    // plants following the base profile.
    const double chp_electric = 3.0 * 1.1 + 3.0 * 0.7;
    const double chp_heat = 3.0 * 1.1 * (0.40 / 0.45) + 3.0 * 0.7 * (0.45 / 0.40);
    double max_electric_energy = 0.0;
    double max_heat_energy = 0.0;
    for (std::size_t i = 0; i < kSlotCount; ++i) {
        max_electric_energy += (chp_electric + 15.0 * 0.2 * solar_base_profile()[i]) * kSlotHours;
        max_heat_energy += chp_heat * kSlotHours;
    }

    double electric_shape_energy = 0.0, heat_shape_energy = 0.0;
    for (std::size_t i = 0; i < kSlotCount; ++i) {
        electric_shape_energy += electric_shape[i] * kSlotHours;
        heat_shape_energy += heat_shape[i] * kSlotHours;
    }

    TargetSchedules targets;
    targets.electric =
        electric_shape * (preset::kTargetScaleElectric * max_electric_energy / electric_shape_energy);
    targets.heat = heat_shape * (preset::kTargetScaleHeat * max_heat_energy / heat_shape_energy);
    return targets;
}

// ---------------------------------------------------------------------------
// Rosters
// ---------------------------------------------------------------------------

namespace detail {

struct VariantFlags {
    double penalty = preset::kPenaltyHigh;
    bool market = false;
};

inline VariantFlags variant_flags(const std::string& variant) {
    VariantFlags f;
    if (variant.size() >= 2 && variant.substr(variant.size() - 2) == "-L") {
        f.penalty = preset::kPenaltyLow;
    } else if (variant.size() >= 2 && variant.substr(variant.size() - 2) == "-M") {
        f.penalty = preset::kPenaltyMarket;  // even economics/goal weighting
        f.market = true;
    }
    return f;
}

}  // namespace detail

inline ScenarioSpec build_gas_scenario(const std::string& variant, std::uint64_t seed) {
    if (variant != "GB" && variant != "GBS-H" && variant != "GBS-L" && variant != "GBS-M")
        throw ConfigError("unknown gas variant '" + variant + "'");
    const detail::VariantFlags flags = detail::variant_flags(variant);

    ScenarioSpec spec;
    spec.variant = variant;
    spec.seed = seed;
    spec.targets = generate_targets(seed);

    for (int k = 0; k < 15; ++k)
        spec.agents.push_back({"solar_" + std::to_string(k), preset::solar(0.2),
                               preset::econ(flags.penalty, flags.market)});
    // Two CHP classes, three plants each: 1.1 kW at rho 0.45 / eta 0.40 and
    // 0.7 kW at rho 0.40 / eta 0.45.
    for (int k = 0; k < 3; ++k)
        spec.agents.push_back({"chp_large_" + std::to_string(k), preset::chp(1.1, 0.45, 0.40),
                               preset::econ(flags.penalty, flags.market, preset::kThetaGas)});
    for (int k = 0; k < 3; ++k)
        spec.agents.push_back({"chp_small_" + std::to_string(k), preset::chp(0.7, 0.40, 0.45),
                               preset::econ(flags.penalty, flags.market, preset::kThetaGas)});
    if (variant != "GB") {
        spec.agents.push_back({"hs_0", preset::storage(Carrier::Heat, 1.5, 0.99, 12.0),
                               preset::econ(flags.penalty, flags.market)});
        spec.agents.push_back({"hs_1", preset::storage(Carrier::Heat, 1.5, 0.99, 16.0),
                               preset::econ(flags.penalty, flags.market)});
        spec.agents.push_back({"es_0", preset::storage(Carrier::Electric, 1.5, 0.95, 12.0),
                               preset::econ(flags.penalty, flags.market)});
        spec.agents.push_back({"es_1", preset::storage(Carrier::Electric, 1.5, 0.95, 16.0),
                               preset::econ(flags.penalty, flags.market)});
    }
    return spec;
}

inline ScenarioSpec build_electric_scenario(const std::string& variant, std::uint64_t seed) {
    if (variant != "PES-H" && variant != "PES-L" && variant != "PES-M")
        throw ConfigError("unknown electric variant '" + variant + "'");
    const detail::VariantFlags flags = detail::variant_flags(variant);

    ScenarioSpec spec;
    spec.variant = variant;
    spec.seed = seed;
    spec.targets = generate_targets(seed);

    for (int k = 0; k < 15; ++k)
        spec.agents.push_back({"solar_" + std::to_string(k), preset::solar(1.1),
                               preset::econ(flags.penalty, flags.market)});
    for (int k = 0; k < 5; ++k)
        spec.agents.push_back({"wind_" + std::to_string(k), preset::wind(),
                               preset::econ(flags.penalty, flags.market)});
    const double hp_ratings[3] = {2.7, 2.0, 1.3};
    for (int k = 0; k < 3; ++k) {
        HpParams hp;
        hp.cop = 4.0;
        hp.p_el_max = hp_ratings[k];
        spec.agents.push_back({"hp_" + std::to_string(k), hp,
                               preset::econ(flags.penalty, flags.market)});
    }
    spec.agents.push_back({"hs_0", preset::storage(Carrier::Heat, 10.0, 0.99, 84.0),
                           preset::econ(flags.penalty, flags.market)});
    spec.agents.push_back({"es_0", preset::storage(Carrier::Electric, 10.0, 0.95, 84.0),
                           preset::econ(flags.penalty, flags.market)});
    return spec;
}

inline ScenarioSpec build_scenario(const std::string& variant, std::uint64_t seed = 20240101) {
    if (variant.rfind("GB", 0) == 0) return build_gas_scenario(variant, seed);
    return build_electric_scenario(variant, seed);
}

// ---------------------------------------------------------------------------
// Instantiation: realize seeded profiles and working memories for one run.
// ---------------------------------------------------------------------------

inline std::vector<AgentRuntime> instantiate_agents(const ScenarioSpec& spec,
                                                    std::uint64_t run_seed) {
    std::vector<AgentRuntime> agents;
    agents.reserve(spec.agents.size());
    for (std::size_t idx = 0; idx < spec.agents.size(); ++idx) {
        const AgentSpec& a = spec.agents[idx];
        AgentRuntime rt;
        rt.id = static_cast<AgentId>(idx);
        rt.econ = a.econ;
        rt.rng = make_rng(run_seed, 1000 + idx);
        rt.memory.own_id = rt.id;
        rt.memory.targets = spec.targets;
        rt.unit = std::visit(
            [&](const auto& params) -> UnitState {
                using U = std::decay_t<decltype(params)>;
                if constexpr (std::is_same_v<U, ChpParams>)
                    return ChpUnit{params};
                else if constexpr (std::is_same_v<U, WindParams>)
                    return RenewableUnit{wind_profile(params, split_seed(run_seed, idx))};
                else if constexpr (std::is_same_v<U, SolarParams>)
                    return RenewableUnit{solar_profile(params, split_seed(run_seed, idx))};
                else if constexpr (std::is_same_v<U, HpParams>)
                    return HpUnit{params};
                else
                    return StorageUnit{params};
            },
            a.unit);
        agents.push_back(std::move(rt));
    }
    return agents;
}

inline NegotiationResult run_scenario(const ScenarioSpec& spec, std::uint64_t run_seed) {
    std::vector<AgentRuntime> agents = instantiate_agents(spec, run_seed);
    std::vector<AgentId> ids;
    for (const AgentRuntime& a : agents) ids.push_back(a.id);
    const Topology topology = Topology::complete(ids);
    if (spec.negotiation.mode == ExecutionMode::Concurrent)
        return run_concurrent(agents, topology, spec.negotiation);
    return run_rounds(agents, topology, spec.negotiation);
}

// ---------------------------------------------------------------------------
// Scenario files
// ---------------------------------------------------------------------------

namespace detail {

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string fmt_array(const Schedule& s) {
    std::string out = "[";
    for (std::size_t i = 0; i < kSlotCount; ++i) {
        if (i) out += ", ";
        out += fmt(s[i]);
    }
    return out + "]";
}

inline Schedule schedule_from(const std::vector<double>& values, const std::string& where) {
    if (values.size() != kSlotCount)
        throw ConfigError(where + ": expected exactly 96 values, got " +
                          std::to_string(values.size()));
    Schedule s;
    for (std::size_t i = 0; i < kSlotCount; ++i) {
        if (!std::isfinite(values[i])) throw ConfigError(where + ": non-finite value");
        s[i] = values[i];
    }
    return s;
}

}  // namespace detail

inline std::string scenario_to_text(const ScenarioSpec& spec) {
    std::ostringstream out;
    out << "[scenario]\n";
    out << "variant = \"" << spec.variant << "\"\n";
    out << "seed = " << spec.seed << "\n";
    out << "max_cycles = " << spec.negotiation.max_cycles << "\n";
    out << "n_iterations = " << spec.negotiation.n_iterations << "\n\n";
    out << "[targets]\n";
    out << "electric = " << detail::fmt_array(spec.targets.electric) << "\n";
    out << "heat = " << detail::fmt_array(spec.targets.heat) << "\n\n";
    for (const AgentSpec& a : spec.agents) {
        out << "[[agent]]\n";
        out << "name = \"" << a.name << "\"\n";
        std::visit(
            [&](const auto& u) {
                using U = std::decay_t<decltype(u)>;
                if constexpr (std::is_same_v<U, ChpParams>) {
                    out << "type = \"chp\"\n";
                    out << "rho = " << detail::fmt(u.rho) << "\n";
                    out << "eta = " << detail::fmt(u.eta) << "\n";
                    out << "hhv = " << detail::fmt(u.hhv) << "\n";
                    out << "m_dot_max = " << detail::fmt(u.m_dot_max) << "\n";
                    out << "p_reserved_max = " << detail::fmt(u.p_reserved_max) << "\n";
                } else if constexpr (std::is_same_v<U, WindParams>) {
                    out << "type = \"wind\"\n";
                    out << "air_density = " << detail::fmt(u.air_density) << "\n";
                    out << "rotor_area = " << detail::fmt(u.rotor_area) << "\n";
                    out << "power_coeff = " << detail::fmt(u.power_coeff) << "\n";
                    out << "wind_speed = " << detail::fmt(u.wind_speed) << "\n";
                    out << "noise_mean = " << detail::fmt(u.noise_mean) << "\n";
                    out << "noise_variance = " << detail::fmt(u.noise_variance) << "\n";
                } else if constexpr (std::is_same_v<U, SolarParams>) {
                    out << "type = \"solar\"\n";
                    out << "base_profile = " << detail::fmt_array(u.base_profile) << "\n";
                    out << "noise_std = " << detail::fmt(u.noise_std) << "\n";
                } else if constexpr (std::is_same_v<U, HpParams>) {
                    out << "type = \"hp\"\n";
                    out << "cop = " << detail::fmt(u.cop) << "\n";
                    out << "p_el_max = " << detail::fmt(u.p_el_max) << "\n";
                } else {
                    out << "type = \"storage\"\n";
                    out << "carrier = \"" << carrier_name(u.carrier) << "\"\n";
                    out << "capacity = " << detail::fmt(u.capacity) << "\n";
                    out << "p_ch_max = " << detail::fmt(u.p_ch_max) << "\n";
                    out << "p_dis_max = " << detail::fmt(u.p_dis_max) << "\n";
                    out << "eff_ch = " << detail::fmt(u.eff_ch) << "\n";
                    out << "eff_dis = " << detail::fmt(u.eff_dis) << "\n";
                    out << "soc_init = " << detail::fmt(u.soc_init) << "\n";
                }
            },
            a.unit);
        out << "gamma = " << detail::fmt(a.econ.gamma) << "\n";
        out << "delta = " << detail::fmt(a.econ.delta) << "\n";
        out << "theta = " << detail::fmt(a.econ.theta) << "\n";
        out << "p_P = " << detail::fmt(a.econ.p_P) << "\n";
        out << "p_H = " << detail::fmt(a.econ.p_H) << "\n";
        out << "p_e = " << detail::fmt(a.econ.p_e) << "\n";
        out << "market = " << (a.econ.market_prices ? "true" : "false") << "\n";
        if (a.econ.market_prices)
            out << "market_prices = " << detail::fmt_array(*a.econ.market_prices) << "\n";
        out << "\n";
    }
    return out.str();
}

inline ScenarioSpec scenario_from_text(const std::string& content) {
    ScenarioSpec spec;
    bool have_scenario = false, have_electric = false, have_heat = false;
    for (const config::Section& sec : config::parse(content)) {
        if (sec.name == "scenario") {
            have_scenario = true;
            spec.variant = sec.has("variant") ? sec.text("variant") : "custom";
            spec.seed = static_cast<std::uint64_t>(sec.number_or("seed", 0));
            spec.negotiation.max_cycles =
                static_cast<int>(sec.number_or("max_cycles", spec.negotiation.max_cycles));
            spec.negotiation.n_iterations =
                static_cast<int>(sec.number_or("n_iterations", spec.negotiation.n_iterations));
        } else if (sec.name == "targets") {
            if (sec.has("electric")) {
                spec.targets.electric =
                    detail::schedule_from(sec.array("electric"), "targets.electric");
                have_electric = true;
            }
            if (sec.has("heat")) {
                spec.targets.heat = detail::schedule_from(sec.array("heat"), "targets.heat");
                have_heat = true;
            }
        } else if (sec.name == "agent") {
            AgentSpec a;
            a.name = sec.has("name") ? sec.text("name")
                                     : "agent_" + std::to_string(spec.agents.size());
            const std::string type = sec.text("type");
            if (type == "chp") {
                ChpParams p;
                p.rho = sec.number("rho");
                p.eta = sec.number("eta");
                p.hhv = sec.number("hhv");
                p.m_dot_max = sec.number("m_dot_max");
                p.p_reserved_max = sec.number_or("p_reserved_max", 0.0);
                if (!p.valid()) throw ConfigError("agent." + a.name + ": invalid chp params");
                a.unit = p;
            } else if (type == "wind") {
                WindParams p;
                p.air_density = sec.number_or("air_density", 1.225);
                p.rotor_area = sec.number("rotor_area");
                p.power_coeff = sec.number("power_coeff");
                p.wind_speed = sec.number("wind_speed");
                p.noise_mean = sec.number_or("noise_mean", 3.7);
                p.noise_variance = sec.number_or("noise_variance", 0.5);
                if (!p.valid()) throw ConfigError("agent." + a.name + ": invalid wind params");
                a.unit = p;
            } else if (type == "solar") {
                SolarParams p;
                if (sec.has("base_profile"))
                    p.base_profile =
                        detail::schedule_from(sec.array("base_profile"), "agent.base_profile");
                else
                    p.base_profile = solar_base_profile() * sec.number("rating");
                p.noise_std = sec.number_or("noise_std", 0.0);
                if (!p.valid()) throw ConfigError("agent." + a.name + ": invalid solar params");
                a.unit = p;
            } else if (type == "hp") {
                HpParams p;
                p.cop = sec.number("cop");
                p.p_el_max = sec.number("p_el_max");
                if (!p.valid()) throw ConfigError("agent." + a.name + ": invalid hp params");
                a.unit = p;
            } else if (type == "storage") {
                StorageParams p;
                const std::string carrier = sec.text("carrier");
                if (carrier != "electric" && carrier != "heat")
                    throw ConfigError("agent." + a.name + ".carrier: unknown carrier");
                p.carrier = carrier == "electric" ? Carrier::Electric : Carrier::Heat;
                p.capacity = sec.number("capacity");
                p.p_ch_max = sec.number("p_ch_max");
                p.p_dis_max = sec.number("p_dis_max");
                p.eff_ch = sec.number("eff_ch");
                p.eff_dis = sec.number("eff_dis");
                p.soc_init = sec.number_or("soc_init", 0.5 * p.capacity);
                if (!p.valid())
                    throw ConfigError("agent." + a.name + ": invalid storage params");
                a.unit = p;
            } else {
                throw ConfigError("agent." + a.name + ".type: unknown unit type '" + type + "'");
            }
            a.econ.gamma = sec.number_or("gamma", preset::kGamma);
            a.econ.delta = sec.number_or("delta", preset::kDelta);
            a.econ.theta = sec.number_or("theta", 0.0);
            a.econ.p_P = sec.number_or("p_P", preset::kPenaltyHigh);
            a.econ.p_H = sec.number_or("p_H", preset::kPenaltyHigh);
            a.econ.p_e = sec.number_or("p_e", preset::kPenaltyExponent);
            if (sec.boolean_or("market", false)) {
                if (sec.has("market_prices"))
                    a.econ.market_prices =
                        detail::schedule_from(sec.array("market_prices"), "agent.market_prices");
                else
                    a.econ.market_prices = market_price_profile();
            }
            if (!a.econ.valid()) throw ConfigError("agent." + a.name + ": invalid econ params");
            spec.agents.push_back(std::move(a));
        } else {
            throw ConfigError("unknown section [" + sec.name + "]");
        }
    }
    if (!have_scenario) throw ConfigError("missing [scenario] section");
    if (!have_electric) throw ConfigError("targets.electric: missing");
    if (!have_heat) throw ConfigError("targets.heat: missing");
    if (spec.agents.empty()) throw ConfigError("no [[agent]] sections");
    return spec;
}

inline ScenarioSpec load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return scenario_from_text(buffer.str());
}

inline void save_scenario(const ScenarioSpec& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write scenario file '" + path + "'");
    out << scenario_to_text(spec);
}

}  // namespace mesched
