#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ebus/defaults.hpp"
#include "ebus/experiments.hpp"
#include "helpers.hpp"

using namespace ebus;
using namespace ebus::experiments;

namespace {

milp::SolveLimits exact_limits() {
    milp::SolveLimits lim;
    lim.rel_gap_frac = 0.0;
    lim.max_seconds = 300.0;
    return lim;
}

// Combined tolerance for comparisons between gap-terminated solves.
double gap_tol(const CostReport& a, const CostReport& b) {
    return a.mip_gap_frac * std::abs(a.total_eur) + b.mip_gap_frac * std::abs(b.total_eur) +
           1e-6;
}

// A short loop trip returns the bus right at the discharge-window start, so a
// discharging session may begin there (session starts need bus movement at
// the depot). V2G happens only when the margin beats the round-trip losses
// plus battery wear.
ProblemInstance v2g_toy() {
    auto inst = test::tiny_instance();
    inst.buses[0].soc_end_frac = inst.buses[0].soc_initial_frac;  // 50 kWh anchor
    Trip loop;
    loop.id = "L1";
    loop.bus_id = "B1";
    loop.depart_depot_id = "d1";
    loop.arrive_depot_id = "d1";
    loop.depart_minute = 30;
    loop.arrive_minute = 60;
    loop.distance_km = 2.0;
    loop.avg_speed_kmh = 4.0;
    loop.consumption_rate_kwh_per_km = 1.0;  // 2 kWh round trip
    inst.trips = {loop};
    return inst;
}

ScenarioConfig v2g_scenario(double margin) {
    ScenarioConfig sc = defaults::scenario("pp_v2g_dc");
    sc.discharge_windows = {{60, 120}};
    sc.tariff_margin_frac = margin;
    return sc;
}

double discharged_minutes(const PipelineResult& r) {
    double total = 0.0;
    for (const auto& slots : r.schedule.bus)
        for (const auto& b : slots)
            if (b.kind == ActionKind::kDischarge) total += b.minutes;
    return total;
}

}  // namespace

TEST_CASE("generator is deterministic and hits the requested size") {
    GenSpec g;
    g.seed = 7;
    g.n_buses = 4;
    g.n_trips = 30;
    auto a = generate_instance(g);
    auto b = generate_instance(g);
    CHECK(a.content_hash() == b.content_hash());
    CHECK(a.buses.size() == 4);
    CHECK(a.trips.size() == 30);
    CHECK(validate_instance(a).ok());

    g.seed = 8;
    auto c = generate_instance(g);
    CHECK(c.content_hash() != a.content_hash());

    // speeds and energies track the target operating profile
    double speed_sum = 0.0, energy_sum = 0.0;
    int line_trips = 0;
    for (const auto& t : a.trips) {
        if (t.depart_depot_id == "marly" || t.arrive_depot_id == "marly") continue;
        speed_sum += t.avg_speed_kmh;
        energy_sum += t.consumption_rate_kwh_per_km * t.distance_km;
        ++line_trips;
    }
    REQUIRE(line_trips > 0);
    CHECK(speed_sum / line_trips == doctest::Approx(16.68).epsilon(0.2));
    CHECK(energy_sum / line_trips == doctest::Approx(17.71).epsilon(0.2));
}

TEST_CASE("case-study-scale generation works and unservable specs are refused") {
    GenSpec g;
    g.seed = 1;
    g.n_buses = 28;
    g.n_trips = 232;
    auto inst = generate_instance(g);
    CHECK(inst.buses.size() == 28);
    CHECK(inst.trips.size() == 232);
    CHECK(validate_instance(inst).ok());

    GenSpec bad;
    bad.seed = 1;
    bad.n_buses = 1;
    bad.n_trips = 80;  // one bus cannot run 78 line legs in a day
    CHECK_THROWS_AS(generate_instance(bad), GenerationError);
}

TEST_CASE("instance grid uses the size/efficiency/PV/ESS labeling") {
    auto grid = instance_grid(3);
    REQUIRE(grid.size() == 16);
    CHECK(grid[0].first == "28B-92E-1876.6PV-1228ESS");
    bool saw_down = false;
    for (const auto& [label, inst] : grid)
        if (label == "10B-82E-938.3PV-614ESS") {
            saw_down = true;
            CHECK(inst.buses.size() == 10);
            CHECK(inst.depots[0].pv_area_m2 == 938.3);
            CHECK(inst.depots[0].ess_capacity_kwh == 614.0);
            CHECK(inst.depots[0].chargers[0].charge_efficiency_frac == 0.82);
        }
    CHECK(saw_down);
}

TEST_CASE("oracle matches the solver on the tiny fixture per scenario") {
    auto inst = test::tiny_instance();
    auto solver = milp::make_solver();
    for (const char* name : {"basic", "pp_v2g_dc"}) {
        ScenarioConfig sc = defaults::scenario(name);
        sc.discharge_windows = {{60, 120}};
        auto tl = build_timeline(inst, sc);
        auto oracle = brute_force_oracle(inst, tl, sc, solver.get());
        REQUIRE(oracle.status == milp::SolveStatus::kOptimal);

        auto model = milp::build_model(inst, tl, sc);
        auto raw = solver->solve(model, exact_limits());
        REQUIRE(raw.status == milp::SolveStatus::kOptimal);
        CHECK(raw.objective_value == doctest::Approx(oracle.objective).epsilon(1e-4));
    }
}

TEST_CASE("oracle and solver agree an impossible duty is infeasible") {
    auto inst = test::tiny_trip_instance();
    inst.buses[0].soc_initial_frac = 0.10;  // at the floor, then a 10 kWh trip
    inst.buses[0].soc_end_frac = 0.10;
    for (auto& d : inst.depots) d.chargers.clear();  // nowhere to charge
    auto sc = test::scenario_basic();
    auto tl = build_timeline(inst, sc);
    auto solver = milp::make_solver();

    auto oracle = brute_force_oracle(inst, tl, sc, solver.get());
    CHECK(oracle.status == milp::SolveStatus::kInfeasible);
    auto raw = solver->solve(milp::build_model(inst, tl, sc), exact_limits());
    CHECK(raw.status == milp::SolveStatus::kInfeasible);
}

TEST_CASE("oracle refuses oversized enumeration") {
    GenSpec g;
    g.seed = 2;
    g.n_buses = 2;
    g.n_trips = 12;
    auto inst = generate_instance(g);
    auto sc = test::scenario_basic();
    auto tl = build_timeline(inst, sc);
    CHECK_THROWS_AS(brute_force_oracle(inst, tl, sc, nullptr, 20, 100), ParameterError);
}

TEST_CASE("discharging pays only above the loss-plus-wear threshold") {
    auto inst = v2g_toy();
    auto solver = milp::make_solver();

    for (bool literal : {true, false}) {
        auto low = v2g_scenario(0.75);
        low.paper_literal_mode = literal;
        auto r_low = run_pipeline(inst, low, exact_limits(), solver.get());
        REQUIRE(r_low.solved());
        CHECK(discharged_minutes(r_low) == 0.0);

        auto high = v2g_scenario(4.0);
        high.paper_literal_mode = literal;
        auto r_high = run_pipeline(inst, high, exact_limits(), solver.get());
        REQUIRE(r_high.solved());
        CHECK(discharged_minutes(r_high) > 0.0);
        CHECK(r_high.violations.empty());

        // oracle confirms both regimes
        auto tl = build_timeline(inst, low);
        auto o_low = brute_force_oracle(inst, tl, low, solver.get());
        CHECK(o_low.objective == doctest::Approx(r_low.raw.objective_value).epsilon(1e-4));
        auto tl2 = build_timeline(inst, high);
        auto o_high = brute_force_oracle(inst, tl2, high, solver.get());
        CHECK(o_high.objective == doctest::Approx(r_high.raw.objective_value).epsilon(1e-4));
    }
}

TEST_CASE("scenario batch emits the comparison table and nests costs") {
    auto inst = test::tiny_instance();
    inst.depots[0].pv_area_m2 = 100.0;
    inst.depots[0].ess_capacity_kwh = 50.0;
    inst.depots[0].ess_soc_min_frac = 0.2;
    inst.solar.irradiance_w_per_m2 = {{0, 60}, {400.0, 0.0}};

    std::vector<ScenarioConfig> scenarios = {defaults::scenario("basic"),
                                             defaults::scenario("pp_v2g_dc"),
                                             defaults::scenario("all")};
    auto results = run_scenarios(inst, scenarios, exact_limits());
    REQUIRE(results.size() == 3);
    for (const auto& r : results) {
        REQUIRE(r.solved());
        CHECK(r.violations.empty());
    }
    // feasible-set nesting: all <= pp_v2g_dc <= ex-post basic
    CHECK(results[2].cost.total_eur <=
          results[1].cost.total_eur + gap_tol(results[2].cost, results[1].cost));
    CHECK(results[1].cost.total_eur <=
          results[0].cost.total_eur + gap_tol(results[1].cost, results[0].cost));

    auto csv = scenario_table_csv(results);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
    CHECK(csv.find("basic") != std::string::npos);
    CHECK(csv.find("all") != std::string::npos);

    // empty scenario list: empty output
    CHECK(run_scenarios(inst, {}, exact_limits()).empty());
}

TEST_CASE("margin sweep is monotone and battery sweep responds to cheaper packs") {
    auto inst = v2g_toy();
    auto solver = milp::make_solver();

    ScenarioConfig base = v2g_scenario(1.0);
    auto rows = sweep_tariff_margin(inst, {0.5, 2.0, 4.0}, base, exact_limits(), solver.get());
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].cost.total_eur <= rows[0].cost.total_eur + gap_tol(rows[1].cost, rows[0].cost));
    CHECK(rows[2].cost.total_eur <= rows[1].cost.total_eur + gap_tol(rows[2].cost, rows[1].cost));
    auto csv = sweep_csv(rows, "margin");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

    // replacement cost 0 removes the wear penalty entirely
    auto byear = sweep_battery_cost(inst, {{2023, 128.47}, {2099, 0.0}}, v2g_scenario(2.0),
                                    exact_limits(), solver.get());
    REQUIRE(byear.size() == 2);
    CHECK(byear[1].cost.degradation_cost_eur == doctest::Approx(0.0));
    CHECK(byear[1].cost.total_eur <=
          byear[0].cost.total_eur + gap_tol(byear[1].cost, byear[0].cost));
}

TEST_CASE("projection years share the first point and decompose revenue") {
    auto inst = v2g_toy();
    auto tables = ProjectionTables::defaults();
    tables.years = {2025, 2050};
    auto rows = project_scenarios(inst, tables, v2g_scenario(1.0), exact_limits());
    REQUIRE(rows.size() == 6);

    double first_total = 0.0;
    bool first_set = false;
    for (const auto& r : rows) {
        if (r.year != 2025) continue;
        CHECK(r.margin_frac == doctest::Approx(1.10));
        CHECK(r.gc_share_frac == doctest::Approx(0.35 / 1.10));
        CHECK(r.energy_revenue_eur + r.gc_revenue_eur ==
              doctest::Approx(r.cost.discharging_revenue_eur).epsilon(1e-9));
        if (!first_set) {
            first_total = r.cost.total_eur;
            first_set = true;
        } else {
            CHECK(r.cost.total_eur == doctest::Approx(first_total).epsilon(1e-6));
        }
    }
    auto csv = projection_csv(rows);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
}
