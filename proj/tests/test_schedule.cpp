#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "ebus/defaults.hpp"
#include "ebus/experiments.hpp"
#include "helpers.hpp"

using namespace ebus;
using experiments::run_pipeline;

namespace {

milp::SolveLimits exact_limits() {
    milp::SolveLimits lim;
    lim.rel_gap_frac = 0.0;
    lim.max_seconds = 120.0;
    return lim;
}

// tiny_instance with PV and an ESS on the depot plus sun in the first slot
ProblemInstance tiny_pv_instance() {
    auto inst = test::tiny_instance();
    inst.depots[0].pv_area_m2 = 100.0;
    inst.depots[0].ess_capacity_kwh = 50.0;
    inst.depots[0].ess_soc_min_frac = 0.2;
    inst.solar.irradiance_w_per_m2 = {{0, 60}, {400.0, 0.0}};
    return inst;
}

ScenarioConfig all_no_windows() {
    ScenarioConfig sc = defaults::scenario("all");
    sc.discharge_windows.clear();
    return sc;
}

}  // namespace

TEST_CASE("basic solve decodes to a clean schedule with matching reports") {
    auto inst = test::tiny_instance();
    auto r = run_pipeline(inst, test::scenario_basic(), exact_limits());
    REQUIRE(r.solved());
    CHECK(r.violations.empty());

    // charge happens in slot 1 only (cheapest way to lift 30 kWh by event 3)
    CHECK(r.schedule.bus[0][0].kind == ActionKind::kCharge);
    CHECK(r.schedule.bus[0][0].minutes == doctest::Approx(100.0 / 3).epsilon(1e-6));
    CHECK(r.schedule.bus[0][1].kind == ActionKind::kIdle);
    CHECK(r.schedule.bus[0][2].kind == ActionKind::kIdle);
    CHECK(r.schedule.bus[0][2].soc_kwh == doctest::Approx(50.0));

    // basic-style cost report: total = charging + ex-post peak, no revenue
    CHECK(r.cost.discharging_revenue_eur == 0.0);
    CHECK(r.cost.degradation_cost_eur == 0.0);
    CHECK(r.cost.charging_cost_eur == doctest::Approx(3.0).epsilon(1e-6));
    // one 60 kW charger at 0.9 efficiency draws 54 kW -> level 2 of the toy ladder
    CHECK(r.cost.peak_kw == doctest::Approx(54.0));
    CHECK(r.cost.peak_level == 1);
    CHECK(r.cost.peak_power_cost_eur == doctest::Approx(8.0));
    CHECK(r.cost.total_eur == doctest::Approx(r.cost.charging_cost_eur + 8.0).epsilon(1e-9));

    // trip-free day: flows are trivial
    CHECK(r.flows.grid_import_kwh == doctest::Approx(30.0));
    CHECK(r.flows.pv_production_kwh == 0.0);
    CHECK(r.flows.v2g_export_kwh == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("no-activity instance pays the smallest ladder price ex post") {
    auto inst = test::tiny_instance();
    inst.buses[0].soc_end_frac = inst.buses[0].soc_initial_frac;  // nothing to do
    auto r = run_pipeline(inst, test::scenario_basic(), exact_limits());
    REQUIRE(r.solved());
    CHECK(r.cost.charging_cost_eur == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(r.cost.peak_level == 0);
    CHECK(r.cost.peak_power_cost_eur == doctest::Approx(5.0));  // toy ladder level 1
    CHECK(r.cost.total_eur == doctest::Approx(5.0).epsilon(1e-7));
}

TEST_CASE("all scenario uses PV and keeps every report identity") {
    auto inst = tiny_pv_instance();
    auto r = run_pipeline(inst, all_no_windows(), exact_limits());
    REQUIRE(r.solved());
    CHECK(r.violations.empty());

    // report total equals the solver objective when all groups are in it
    CHECK(r.cost.total_eur == doctest::Approx(r.raw.objective_value).epsilon(1e-6));

    // PV covers charging demand in the sunny slot at zero cost
    CHECK(r.flows.pv_to_bus_kwh > 1.0);
    CHECK(r.flows.pv_production_kwh == doctest::Approx(40.0));
    // accounting closes: production = used + stored + curtailed
    CHECK(r.flows.pv_production_kwh ==
          doctest::Approx(r.flows.pv_to_bus_kwh + r.flows.pv_to_ess_kwh +
                          r.flows.pv_curtailed_kwh)
              .epsilon(1e-6));
    // ESS daily balance telescopes
    CHECK(r.flows.ess_residual_kwh ==
          doctest::Approx(r.flows.pv_to_ess_kwh - r.flows.ess_to_bus_kwh -
                          r.flows.ess_to_grid_kwh)
              .epsilon(1e-6));

    // schedule CSV and flows CSV carry one row per pair
    auto csv = schedule_csv(r.schedule, inst, r.timeline);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 3);
    auto fcsv = flows_csv(r.schedule, inst, r.timeline);
    CHECK(std::count(fcsv.begin(), fcsv.end(), '\n') == 1 + 3);
    auto js = cost_report_json(r.cost, r.flows);
    CHECK(js.find("\"total_eur\"") != std::string::npos);
}

TEST_CASE("pv flows stay zero when the scenario disables them") {
    auto inst = tiny_pv_instance();
    auto r = run_pipeline(inst, test::scenario_basic(), exact_limits());
    REQUIRE(r.solved());
    CHECK(r.flows.pv_to_bus_kwh == 0.0);
    CHECK(r.flows.ess_to_grid_kwh == 0.0);
    CHECK(r.flows.pv_production_kwh == 0.0);  // not modeled in this scenario
}

TEST_CASE("decode rejects fractional binaries and maps actions faithfully") {
    auto inst = test::tiny_instance();
    ScenarioConfig sc = test::scenario_basic();
    auto tl = build_timeline(inst, sc);
    auto model = milp::build_model(inst, tl, sc);
    auto raw = milp::solve(model, exact_limits());
    REQUIRE(raw.has_values());

    auto s = decode(inst, tl, model, raw);
    CHECK(s.bus[0][0].depot == 0);
    CHECK(s.bus[0][0].charger == 0);

    raw.values["x(1,1,1,2)"] = 0.4;  // fractional beyond snap tolerance
    CHECK_THROWS_AS(decode(inst, tl, model, raw), DecodeError);
}

TEST_CASE("trip slots decode as trip actions, never charging") {
    auto inst = test::tiny_trip_instance();
    auto r = run_pipeline(inst, test::scenario_basic(), exact_limits());
    REQUIRE(r.solved());
    CHECK(r.violations.empty());
    CHECK(r.schedule.bus[0][1].kind == ActionKind::kTrip);
    CHECK(r.schedule.bus[0][1].trip == 0);
}

TEST_CASE("validator flags seeded single-variable perturbations") {
    auto inst = tiny_pv_instance();
    ScenarioConfig sc = all_no_windows();
    auto r = run_pipeline(inst, sc, exact_limits());
    REQUIRE(r.solved());
    REQUIRE(r.violations.empty());

    SUBCASE("purchase balance") {
        auto s = r.schedule;
        s.depot[0][0].grid_buy_kwh += 1.0;
        CHECK(!validate_schedule(inst, r.timeline, sc, s).empty());
    }
    SUBCASE("SOC floor") {
        auto s = r.schedule;
        s.bus[0][1].soc_kwh = inst.buses[0].min_energy_kwh() - 1.0;
        CHECK(!validate_schedule(inst, r.timeline, sc, s).empty());
    }
    SUBCASE("connection below one minute") {
        auto s = r.schedule;
        s.bus[0][0].minutes = 0.5;
        CHECK(!validate_schedule(inst, r.timeline, sc, s).empty());
    }
    SUBCASE("ESS recursion") {
        auto s = r.schedule;
        s.depot[0][1].ess_level_kwh += 2.0;
        CHECK(!validate_schedule(inst, r.timeline, sc, s).empty());
    }
    SUBCASE("degradation mismatch") {
        auto s = r.schedule;
        s.degradation_eur[0][0] += 0.25;
        CHECK(!validate_schedule(inst, r.timeline, sc, s).empty());
    }
    SUBCASE("discharge with V2G disabled") {
        auto s = r.schedule;
        ScenarioConfig no_v2g = sc;
        no_v2g.enable_v2g = false;
        s.bus[0][2].kind = ActionKind::kDischarge;
        s.bus[0][2].depot = 0;
        s.bus[0][2].charger = 0;
        s.bus[0][2].minutes = 10.0;
        CHECK(!validate_schedule(inst, r.timeline, no_v2g, s).empty());
    }
    SUBCASE("paid peak level below the realized draw") {
        auto s = r.schedule;
        s.peak_level = 0;                       // toy ladder level 1 covers 50 kW
        s.depot[0][0].pv_to_bus_kwh = 0.0;      // stop PV from offsetting the draw
        s.depot[0][0].ess_to_bus_kwh = 0.0;
        s.depot[0][0].grid_buy_kwh = s.bus[0][0].minutes / 60.0 * 0.9 * 60.0;
        auto v = validate_schedule(inst, r.timeline, sc, s);
        bool peak_flagged = false;
        for (const auto& viol : v)
            if (viol.message.find("paid level") != std::string::npos) peak_flagged = true;
        CHECK(peak_flagged);
    }
}

TEST_CASE("charger hopping mid-session is a violation") {
    auto inst = test::tiny_instance();
    inst.depots[0].chargers.push_back({2, 0.9, 60.0, 0.9, 60.0});
    ScenarioConfig sc = test::scenario_basic();
    auto r = run_pipeline(inst, sc, exact_limits());
    REQUIRE(r.solved());
    auto s = r.schedule;
    // force a two-slot session that switches chargers
    for (int e : {0, 1}) {
        s.bus[0][e].kind = ActionKind::kCharge;
        s.bus[0][e].depot = 0;
        s.bus[0][e].charger = e;  // hop from charger 1 to charger 2
        s.bus[0][e].minutes = 30.0;
    }
    auto v = validate_schedule(inst, r.timeline, sc, s);
    bool hop = false;
    for (const auto& viol : v)
        if (viol.message.find("hops chargers") != std::string::npos) hop = true;
    CHECK(hop);
}

TEST_CASE("peak level lookup picks the least covering level") {
    auto ladder = defaults::peak_ladder();
    CHECK(peak_level_for(ladder, 600.0) == 5);
    CHECK(ladder.levels[peak_level_for(ladder, 600.0)].daily_price_eur ==
          doctest::Approx(81.12));
    CHECK(peak_level_for(ladder, 0.0) == 0);
    CHECK(peak_level_for(ladder, 100.1) == 1);
    CHECK(peak_level_for(ladder, 999.0) == 9);
}
