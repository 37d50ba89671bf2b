// Command-line front end for the multi-energy schedule negotiation library.
//
//   mesched run             single negotiation run, prints a summary line
//   mesched experiment      repeated runs with CSV/JSON output files
//   mesched oracle          brute-force optimum for a tiny built-in instance
//   mesched export-scenario write a scenario preset to a config file

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mesched/harness.hpp"
#include "mesched/scenarios.hpp"

namespace {

mesched::ScenarioSpec resolve_scenario(const std::string& scenario_file,
                                       const std::string& variant,
                                       const std::string& mode) {
    mesched::ScenarioSpec spec = scenario_file.empty()
                                     ? mesched::build_scenario(variant)
                                     : mesched::load_scenario(scenario_file);
    if (mode == "concurrent")
        spec.negotiation.mode = mesched::ExecutionMode::Concurrent;
    else
        spec.negotiation.mode = mesched::ExecutionMode::SimulatedRounds;
    return spec;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributed multi-energy schedule negotiation"};
    app.require_subcommand(1);

    std::string scenario_file;
    std::string variant = "GB";
    std::string mode = "rounds";
    std::string out_dir = "out";
    int runs = 50;
    std::uint64_t seed = 1;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--scenario", scenario_file, "Scenario config file (overrides --variant)");
        cmd->add_option("--variant", variant,
                        "Built-in scenario variant: GB, GBS-H, GBS-M, GBS-L, PES-H, PES-M, PES-L");
        cmd->add_option("--seed", seed, "Base random seed");
        cmd->add_option("--mode", mode, "Execution mode")
            ->check(CLI::IsMember({"rounds", "concurrent"}));
    };

    CLI::App* run_cmd = app.add_subcommand("run", "Run one negotiation and print the outcome");
    add_common(run_cmd);

    CLI::App* exp_cmd =
        app.add_subcommand("experiment", "Run a batch of negotiations and write result files");
    add_common(exp_cmd);
    exp_cmd->add_option("--runs", runs, "Number of runs");
    exp_cmd->add_option("--out-dir", out_dir, "Output directory");

    CLI::App* oracle_cmd = app.add_subcommand(
        "oracle", "Brute-force optimum of a tiny instance (2 generators + 1 storage, 4 slots)");

    CLI::App* export_cmd =
        app.add_subcommand("export-scenario", "Write a scenario preset to a config file");
    export_cmd->add_option("--variant", variant, "Scenario variant to export");
    std::string export_path = "scenario.cfg";
    export_cmd->add_option("--out", export_path, "Destination file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            const mesched::ScenarioSpec spec = resolve_scenario(scenario_file, variant, mode);
            std::vector<mesched::AgentRuntime> agents = mesched::instantiate_agents(spec, seed);
            std::vector<mesched::AgentId> ids;
            for (const auto& a : agents) ids.push_back(a.id);
            const mesched::Topology topology = mesched::Topology::complete(ids);
            const mesched::NegotiationResult neg =
                spec.negotiation.mode == mesched::ExecutionMode::Concurrent
                    ? mesched::run_concurrent(agents, topology, spec.negotiation)
                    : mesched::run_rounds(agents, topology, spec.negotiation);
            const mesched::RunResult r = mesched::evaluate_run(spec, agents, neg, seed);
            std::printf(
                "variant=%s seed=%llu fulfillment_P=%.2f%% fulfillment_H=%.2f%% "
                "combined=%.2f%% utility=%.4f cycles=%d messages=%zu converged=%s\n",
                spec.variant.c_str(), static_cast<unsigned long long>(seed),
                r.fulfillment_electric, r.fulfillment_heat, r.fulfillment_combined,
                r.global_utility, r.cycles, r.messages, r.converged ? "yes" : "no");
        } else if (exp_cmd->parsed()) {
            const mesched::ScenarioSpec spec = resolve_scenario(scenario_file, variant, mode);
            const mesched::ExperimentResult result =
                mesched::run_experiment(spec, runs, seed, out_dir);
            std::printf("variant=%s runs=%d mean_combined=%.2f%% out_dir=%s\n",
                        spec.variant.c_str(), runs, result.mean_combined(), out_dir.c_str());
        } else if (oracle_cmd->parsed()) {
            mesched::TinyScenario tiny;
            tiny.n_slots = 4;
            tiny.step = 0.25;
            mesched::ChpParams chp = mesched::preset::chp(1.0, 0.45, 0.40);
            tiny.units.push_back(mesched::ChpUnit{chp});
            mesched::Schedule profile;
            for (std::size_t i = 0; i < tiny.n_slots; ++i) profile[i] = 0.75;
            tiny.units.push_back(mesched::RenewableUnit{profile});
            mesched::StorageParams st =
                mesched::preset::storage(mesched::Carrier::Electric, 1.0, 0.95, 2.0);
            tiny.units.push_back(mesched::StorageUnit{st});
            for (std::size_t i = 0; i < tiny.n_slots; ++i) {
                tiny.targets.electric[i] = 1.5;
                tiny.targets.heat[i] = 0.5;
            }
            const mesched::OracleResult best = mesched::brute_force_oracle(tiny);
            std::printf("optimum_utility=%.6f\n", best.utility);
            for (std::size_t u = 0; u < best.selections.size(); ++u) {
                std::printf("unit %zu electric:", u);
                for (std::size_t i = 0; i < tiny.n_slots; ++i)
                    std::printf(" %.2f", best.selections[u].schedules.electric[i]);
                std::printf("  heat:");
                for (std::size_t i = 0; i < tiny.n_slots; ++i)
                    std::printf(" %.2f", best.selections[u].schedules.heat[i]);
                std::printf("\n");
            }
        } else if (export_cmd->parsed()) {
            const mesched::ScenarioSpec spec = mesched::build_scenario(variant);
            mesched::save_scenario(spec, export_path);
            std::printf("wrote %s (%zu agents)\n", export_path.c_str(), spec.agents.size());
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
