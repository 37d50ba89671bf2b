#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mesched/harness.hpp"

using namespace mesched;

TEST_CASE("fulfillment rate hand values", "[harness]") {
    const Schedule target = Schedule::constant(1.0);
    CHECK(fulfillment_rate(target, target) == 100.0);
    CHECK(fulfillment_rate(target, Schedule::constant(0.9)) == Catch::Approx(90.0));
    CHECK(fulfillment_rate(target, Schedule::constant(0.0)) == Catch::Approx(0.0));
    // Overshooting by more than the norm clamps at zero instead of going negative.
    CHECK(fulfillment_rate(target, Schedule::constant(3.0)) == 0.0);
    CHECK_THROWS_AS(fulfillment_rate(Schedule{}, target), MetricUndefined);
}

TEST_CASE("resource vector reflects CHP gas consumption only", "[harness]") {
    ChpParams p;
    p.rho = 0.45;
    p.eta = 0.40;
    p.hhv = 50e6;
    p.m_dot_max = 1.0;
    Schedule electric;
    electric[0] = 6.25;  // exactly 1 kg/h
    const ResourceVector f = resources_for(UnitState{ChpUnit{p}}, electric);
    CHECK(f.values[0] == Catch::Approx(1.0));
    CHECK(f.values[1] == 0.0);

    const ResourceVector none =
        resources_for(UnitState{RenewableUnit{Schedule::constant(1.0)}}, electric);
    CHECK(none.values[0] == 0.0);
}

TEST_CASE("single-unit oracle solves a feasible target exactly", "[harness]") {
    TinyScenario tiny;
    tiny.n_slots = 4;
    tiny.step = 0.25;
    RenewableUnit plant;
    for (std::size_t i = 0; i < tiny.n_slots; ++i) plant.profile[i] = 2.0;
    tiny.units.push_back(plant);
    for (std::size_t i = 0; i < tiny.n_slots; ++i) tiny.targets.electric[i] = 1.5;
    const OracleResult best = brute_force_oracle(tiny);
    CHECK(best.utility == Catch::Approx(0.0).margin(1e-12));
    for (std::size_t i = 0; i < tiny.n_slots; ++i)
        CHECK(best.selections[0].schedules.electric[i] == Catch::Approx(1.5));
}

TEST_CASE("oracle handles coupled carriers", "[harness]") {
    // One CHP with heat ratio 8/9: electric target 0.9, heat target 0.8 at one
    // slot is exactly reachable at p = 0.9.
    TinyScenario tiny;
    tiny.n_slots = 2;
    tiny.step = 0.1;
    ChpParams p;
    p.rho = 0.45;
    p.eta = 0.40;
    p.hhv = 50e6;
    p.m_dot_max = 2.0 * 1000.0 * 3600.0 / (0.45 * 50e6);  // 2 kW rating
    tiny.units.push_back(ChpUnit{p});
    tiny.targets.electric[0] = 0.9;
    tiny.targets.heat[0] = 0.8;
    tiny.targets.electric[1] = 0.0;
    const OracleResult best = brute_force_oracle(tiny);
    CHECK(best.utility == Catch::Approx(0.0).margin(1e-9));
    CHECK(best.selections[0].schedules.electric[0] == Catch::Approx(0.9));
    CHECK(best.selections[0].schedules.heat[0] == Catch::Approx(0.8));
    CHECK(best.selections[0].schedules.electric[1] == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("oracle respects storage state of charge", "[harness]") {
    // A storage with 0.25 kWh usable at perfect efficiency can sustain 1 kW
    // for exactly one 15-minute slot; a two-slot 1 kW target is half coverable.
    TinyScenario tiny;
    tiny.n_slots = 2;
    tiny.step = 0.5;
    StorageParams st;
    st.capacity = 0.25;
    st.p_ch_max = 1.0;
    st.p_dis_max = 1.0;
    st.eff_ch = 1.0;
    st.eff_dis = 1.0;
    st.carrier = Carrier::Electric;
    st.soc_init = 0.25;
    tiny.units.push_back(StorageUnit{st});
    tiny.targets.electric[0] = 1.0;
    tiny.targets.electric[1] = 1.0;
    const OracleResult best = brute_force_oracle(tiny);
    // Best case: full discharge in one slot, nothing left for the other.
    CHECK(best.utility == Catch::Approx(-1.0));
    const Schedule& s = best.selections[0].schedules.electric;
    CHECK(s[0] + s[1] == Catch::Approx(1.0));
    CHECK_NOTHROW(soc_trace(s, st, 1e-9));
}

TEST_CASE("oracle refuses oversized instances", "[harness]") {
    TinyScenario too_many_slots;
    too_many_slots.n_slots = 7;
    CHECK_THROWS_AS(brute_force_oracle(too_many_slots), OracleTooLarge);

    TinyScenario too_many_agents;
    too_many_agents.n_slots = 2;
    for (int k = 0; k < 4; ++k)
        too_many_agents.units.push_back(RenewableUnit{Schedule::constant(1.0)});
    CHECK_THROWS_AS(brute_force_oracle(too_many_agents), OracleTooLarge);

    TinyScenario too_fine;
    too_fine.n_slots = 6;
    too_fine.step = 1e-5;
    for (int k = 0; k < 3; ++k)
        too_fine.units.push_back(RenewableUnit{Schedule::constant(1.0)});
    CHECK_THROWS_AS(brute_force_oracle(too_fine), OracleTooLarge);
}

TEST_CASE("experiment emits the documented file set", "[harness]") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "mesched_experiment_test";
    fs::remove_all(dir);

    ScenarioSpec spec = build_scenario("GB");
    spec.negotiation.max_cycles = 30;
    const ExperimentResult result = run_experiment(spec, 2, 77, dir.string());
    REQUIRE(result.runs.size() == 2);

    CHECK(fs::exists(dir / "results.csv"));
    CHECK(fs::exists(dir / "summary.json"));
    for (int k = 0; k < 2; ++k) {
        CHECK(fs::exists(dir / ("convergence_" + std::to_string(k) + ".csv")));
        CHECK(fs::exists(dir / ("stacked_electric_" + std::to_string(k) + ".csv")));
        CHECK(fs::exists(dir / ("stacked_heat_" + std::to_string(k) + ".csv")));
    }

    std::ifstream results(dir / "results.csv");
    std::string header;
    std::getline(results, header);
    CHECK(header ==
          "run,seed,fulfillment_electric,fulfillment_heat,fulfillment_combined,"
          "global_utility,cycles,converged,messages");
    int rows = 0;
    for (std::string line; std::getline(results, line);)
        if (!line.empty()) ++rows;
    CHECK(rows == 2);

    // The stacked file has slot, target, and one column per unit type with 96 rows.
    std::ifstream stacked(dir / "stacked_electric_0.csv");
    std::getline(stacked, header);
    CHECK(header.rfind("slot,target", 0) == 0);
    CHECK(header.find("chp") != std::string::npos);
    CHECK(header.find("renewable") != std::string::npos);
    rows = 0;
    for (std::string line; std::getline(stacked, line);)
        if (!line.empty()) ++rows;
    CHECK(rows == static_cast<int>(kSlotCount));

    std::ifstream summary_file(dir / "summary.json");
    std::stringstream buffer;
    buffer << summary_file.rdbuf();
    const auto summary = nlohmann::json::parse(buffer.str());
    CHECK(summary["runs"] == 2);
    CHECK(summary["variant"] == "GB");
    CHECK(summary["mean_fulfillment_combined"].get<double>() ==
          Catch::Approx(result.mean_combined()));

    fs::remove_all(dir);
}

TEST_CASE("bundled data files match the embedded profiles", "[harness]") {
    auto read_csv = [](const std::string& path) {
        std::ifstream in(path);
        REQUIRE(in.good());
        std::string line;
        std::getline(in, line);  // header
        std::vector<double> values;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const std::size_t comma = line.find(',');
            REQUIRE(comma != std::string::npos);
            values.push_back(std::stod(line.substr(comma + 1)));
        }
        return values;
    };
    const std::vector<double> solar = read_csv(std::string(MESCHED_SOURCE_DIR) +
                                               "/data/solar_base_profile.csv");
    const std::vector<double> prices =
        read_csv(std::string(MESCHED_SOURCE_DIR) + "/data/market_prices.csv");
    REQUIRE(solar.size() == kSlotCount);
    REQUIRE(prices.size() == kSlotCount);
    for (std::size_t i = 0; i < kSlotCount; ++i) {
        CHECK(solar[i] == Catch::Approx(solar_base_profile()[i]).margin(1e-12));
        CHECK(prices[i] == Catch::Approx(market_price_profile()[i]).margin(1e-12));
    }
}
