#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>

#include "ebus/milp.hpp"
#include "ebus/solver.hpp"
#include "helpers.hpp"

using namespace ebus;
using namespace ebus::milp;

namespace {

Model toy_model() {
    Model m;
    m.name = "toy";
    int w = m.add_continuous("wplus", 0.0, kInf);
    m.add_objective_term(w, 1.0);
    m.add_row("floor", Sense::kGe, 5.0, {{w, 1.0}});
    return m;
}

bool same_matrix(const Model& a, const Model& b) {
    if (a.num_vars() != b.num_vars() || a.num_rows() != b.num_rows()) return false;
    for (int v = 0; v < a.num_vars(); ++v) {
        const auto &x = a.var(v), &y = b.var(v);
        if (x.name != y.name || x.type != y.type) return false;
        if (std::abs(x.lb - y.lb) > 1e-12 || std::abs(x.ub - y.ub) > 1e-12) return false;
        if (std::abs(x.obj - y.obj) > 1e-12) return false;
    }
    for (int r = 0; r < a.num_rows(); ++r) {
        const auto &x = a.row(r), &y = b.row(r);
        if (x.name != y.name || x.sense != y.sense || std::abs(x.rhs - y.rhs) > 1e-12)
            return false;
        auto xt = x.terms, yt = y.terms;
        std::sort(xt.begin(), xt.end());
        std::sort(yt.begin(), yt.end());
        if (xt.size() != yt.size()) return false;
        for (size_t i = 0; i < xt.size(); ++i)
            if (xt[i].first != yt[i].first || std::abs(xt[i].second - yt[i].second) > 1e-12)
                return false;
    }
    return true;
}

}  // namespace

TEST_CASE("single-variable model exports and solves") {
    Model m = toy_model();
    auto dir = std::filesystem::temp_directory_path() / "ebus_export_toy";
    std::filesystem::create_directories(dir);
    export_model(m, dir / "toy");
    CHECK(std::filesystem::exists(dir / "toy.mps"));
    CHECK(std::filesystem::exists(dir / "toy.lp"));
    // short names: no sidecar needed
    CHECK(!std::filesystem::exists(dir / "toy.mps.names"));

    auto sol = solve(m, SolveLimits{});
    CHECK(sol.status == SolveStatus::kOptimal);
    CHECK(sol.objective_value == doctest::Approx(5.0));
    CHECK(sol.value("wplus") == doctest::Approx(5.0));
    std::filesystem::remove_all(dir);
}

TEST_CASE("MPS round-trips the full scheduling model coefficient-exactly") {
    auto inst = test::tiny_trip_instance();
    inst.depots[0].pv_area_m2 = 50.0;
    inst.depots[0].ess_capacity_kwh = 40.0;
    inst.depots[0].ess_soc_min_frac = 0.25;
    inst.solar.irradiance_w_per_m2 = {{0, 60, 120}, {100.0, 300.0, 0.0}};
    ScenarioConfig sc;
    sc.name = "all";
    sc.enable_peak_cost = sc.enable_v2g = sc.enable_degradation = sc.enable_pv_ess = true;
    sc.discharge_windows = {{120, 180}};
    auto tl = build_timeline(inst, sc);
    Model m = build_model(inst, tl, sc);

    auto dir = std::filesystem::temp_directory_path() / "ebus_export_rt";
    std::filesystem::create_directories(dir);
    export_mps(m, dir / "model.mps");
    // long names force deterministic mangling plus a sidecar
    CHECK(std::filesystem::exists(dir / "model.mps.names"));
    Model back = import_mps(dir / "model.mps");
    CHECK(same_matrix(m, back));
    std::filesystem::remove_all(dir);
}

TEST_CASE("binary families are exported as integer columns with unit bounds") {
    auto inst = test::tiny_instance();
    ScenarioConfig sc = test::scenario_basic();
    auto tl = build_timeline(inst, sc);
    Model m = build_model(inst, tl, sc);
    auto dir = std::filesystem::temp_directory_path() / "ebus_export_bin";
    std::filesystem::create_directories(dir);
    export_mps(m, dir / "model.mps");
    Model back = import_mps(dir / "model.mps");
    int x = back.lookup("x(1,1,1,1)");
    REQUIRE(x >= 0);
    CHECK(back.var(x).type == VarType::kBinary);
    CHECK(back.var(x).lb == 0.0);
    CHECK(back.var(x).ub == 1.0);
    std::filesystem::remove_all(dir);
}

TEST_CASE("infeasible model is reported as such") {
    Model m = toy_model();
    int w = m.lookup("wplus");
    m.set_bounds(w, 0.0, 1.0);  // conflicts with the >= 5 row
    auto sol = solve(m, SolveLimits{});
    CHECK(sol.status == SolveStatus::kInfeasible);
    CHECK(!sol.has_values());
}

TEST_CASE("returned objective matches a recomputation from the coefficients") {
    auto inst = test::tiny_instance();
    ScenarioConfig sc = test::scenario_basic();
    auto tl = build_timeline(inst, sc);
    Model m = build_model(inst, tl, sc);
    SolveLimits lim;
    lim.rel_gap_frac = 0.0;
    auto sol = solve(m, lim);
    REQUIRE(sol.status == SolveStatus::kOptimal);
    std::vector<double> x(m.num_vars());
    for (int v = 0; v < m.num_vars(); ++v) x[v] = sol.value(m.var(v).name);
    double recomputed = m.objective_value(x);
    CHECK(recomputed == doctest::Approx(sol.objective_value).epsilon(1e-6));
    CHECK(sol.best_bound <= sol.objective_value + 1e-6);

    // hand-derived optimum: the end-of-day level binds at the final event
    // (start of the last slot), so only slots 1 and 2 can lift the battery;
    // the whole 30 kWh goes into the cheaper first slot
    CHECK(sol.objective_value == doctest::Approx(30.0 * 0.10).epsilon(1e-6));
}

TEST_CASE("batched bound-fixing cases reuse one model") {
    Model m = toy_model();
    int w = m.lookup("wplus");
    auto solver = make_solver();
    std::vector<FixedCase> cases = {{"seven", {{w, 7.0}}}, {"nine", {{w, 9.0}}}};
    auto sols = solver->solve_cases(m, cases, SolveLimits{});
    REQUIRE(sols.size() == 2);
    CHECK(sols[0].objective_value == doctest::Approx(7.0));
    CHECK(sols[1].objective_value == doctest::Approx(9.0));
}

TEST_CASE("unknown solver selection names the configuration variable") {
    CHECK_THROWS_WITH_AS(make_solver("nope"), doctest::Contains("EBUS_SOLVER"), SolverEnvError);
}

TEST_CASE("canned highs solution output parses") {
    Model m = toy_model();
    std::string sol =
        "Model status\n"
        "Optimal\n"
        "\n"
        "# Primal solution values\n"
        "Feasible\n"
        "Objective 5\n"
        "# Columns 1\n"
        "wplus 5\n"
        "# Rows 1\n"
        "floor 5\n";
    std::string log =
        "  Primal bound      5\n"
        "  Dual bound        4.9\n"
        "  Gap               2 %\n";
    auto parsed = detail::parse_highs_solution(sol, log, m);
    CHECK(parsed.status == SolveStatus::kGapLimit);
    CHECK(parsed.objective_value == doctest::Approx(5.0));
    CHECK(parsed.best_bound == doctest::Approx(4.9));
    CHECK(parsed.achieved_gap_frac == doctest::Approx(0.02));
    CHECK(parsed.value("wplus") == doctest::Approx(5.0));

    auto clean = detail::parse_highs_solution(sol, "", m);
    CHECK(clean.status == SolveStatus::kOptimal);
}

TEST_CASE("canned cbc solution output parses") {
    Model m = toy_model();
    std::string sol =
        "Optimal - objective value 5.00000000\n"
        "      0 wplus                 5                       1\n";
    auto parsed = detail::parse_cbc_solution(sol, m);
    CHECK(parsed.status == SolveStatus::kOptimal);
    CHECK(parsed.objective_value == doctest::Approx(5.0));
    CHECK(parsed.value("wplus") == doctest::Approx(5.0));

    auto inf = detail::parse_cbc_solution("Infeasible - objective value 0\n", m);
    CHECK(inf.status == SolveStatus::kInfeasible);
}
