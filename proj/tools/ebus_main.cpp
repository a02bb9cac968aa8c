// Day-ahead charging/discharging scheduler for electric bus fleets.
//
// Subcommands: validate, build, solve, report, sweep, gen. Exit codes:
// 0 success, 2 input problem, 3 model infeasible/unbounded, 4 solver
// environment problem.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ebus/defaults.hpp"
#include "ebus/experiments.hpp"
#include "ebus/io.hpp"
#include "ebus/milp.hpp"

using namespace ebus;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitSolverEnv = 4;

struct InputArgs {
    std::string dir;
    std::string trips, tariff, solar, fleet, infra;

    void attach(CLI::App* cmd) {
        cmd->add_option("--dir", dir,
                        "Directory holding trips.csv, tariff.csv, solar.csv, fleet.json, "
                        "infrastructure.json");
        cmd->add_option("--trips", trips, "Trips CSV");
        cmd->add_option("--tariff", tariff, "Hourly tariff CSV");
        cmd->add_option("--solar", solar, "Hourly solar radiation CSV");
        cmd->add_option("--fleet", fleet, "Fleet JSON");
        cmd->add_option("--infra", infra, "Infrastructure JSON");
    }

    ProblemInstance load() const {
        if (!dir.empty()) return io::load_instance_dir(dir);
        if (trips.empty() || tariff.empty() || solar.empty() || fleet.empty() || infra.empty())
            throw InputError("provide --dir or all of --trips/--tariff/--solar/--fleet/--infra");
        io::RunConfig c;
        c.trips_csv = trips;
        c.tariff_csv = tariff;
        c.solar_csv = solar;
        c.fleet_json = fleet;
        c.infrastructure_json = infra;
        return io::parse_inputs(c);
    }
};

struct SolveArgs {
    double max_seconds = 14400.0;
    double gap = 0.01;
    std::string solver;

    void attach(CLI::App* cmd) {
        cmd->add_option("--max-seconds", max_seconds, "Solver wall-clock limit (default 4 h)");
        cmd->add_option("--gap", gap, "Relative MIP gap stopping criterion (default 0.01)");
        cmd->add_option("--solver", solver, "Solver adapter: scipy | highs | cbc | path");
    }
    milp::SolveLimits limits() const {
        milp::SolveLimits lim;
        lim.max_seconds = max_seconds;
        lim.rel_gap_frac = gap;
        return lim;
    }
};

ProblemInstance load_validated(const InputArgs& in) {
    ProblemInstance inst = in.load();
    auto report = validate_instance(inst);
    if (!report.ok())
        throw InputError("instance is not well-formed:\n" + report.to_string());
    return inst;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream os(path);
    if (!os) throw InputError("cannot write " + path.string());
    os << content;
}

void write_manifest(const fs::path& dir, const ProblemInstance& inst, const ScenarioConfig& sc,
                    const milp::SolveLimits& lim, const std::string& solver_id) {
    json doc;
    doc["instance_hash"] = strfmt("%016llx", static_cast<unsigned long long>(inst.content_hash()));
    doc["scenario"] = json::parse(io::scenario_json(sc));
    doc["limits"] = {{"max_seconds", lim.max_seconds}, {"rel_gap_frac", lim.rel_gap_frac}};
    doc["solver"] = solver_id;
    doc["timestamp_utc"] = []() {  // documented non-deterministic field
        char buf[32];
        time_t now = time(nullptr);
        strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", gmtime(&now));
        return std::string(buf);
    }();
    write_file(dir / "manifest.json", doc.dump(2) + "\n");
}

void write_solution(const fs::path& path, const milp::RawSolution& raw) {
    json doc;
    doc["status"] = milp::to_string(raw.status);
    doc["objective"] = raw.objective_value;
    doc["bound"] = raw.best_bound;
    doc["gap"] = raw.achieved_gap_frac;
    doc["seconds"] = raw.solve_seconds;
    json vals = json::object();
    for (const auto& [name, v] : raw.values) vals[name] = v;
    doc["values"] = std::move(vals);
    write_file(path, doc.dump() + "\n");
}

milp::RawSolution read_solution(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw InputError("cannot open " + path.string());
    json doc;
    is >> doc;
    milp::RawSolution raw;
    std::string status = doc.at("status");
    for (int s = 0; s <= static_cast<int>(milp::SolveStatus::kError); ++s)
        if (status == milp::to_string(static_cast<milp::SolveStatus>(s)))
            raw.status = static_cast<milp::SolveStatus>(s);
    raw.objective_value = doc.value("objective", 0.0);
    raw.best_bound = doc.value("bound", 0.0);
    raw.achieved_gap_frac = doc.value("gap", 0.0);
    raw.solve_seconds = doc.value("seconds", 0.0);
    for (const auto& [name, v] : doc.at("values").items())
        raw.values[name] = v.get<double>();
    return raw;
}

void write_reports(const fs::path& dir, const experiments::PipelineResult& r,
                   const ProblemInstance& inst) {
    write_file(dir / "schedule.csv", schedule_csv(r.schedule, inst, r.timeline));
    write_file(dir / "flows.csv", flows_csv(r.schedule, inst, r.timeline));
    write_file(dir / "costs.json", cost_report_json(r.cost, r.flows));
    write_file(dir / "timeline.csv", timeline_csv(r.timeline));
    if (!r.violations.empty()) {
        std::string out;
        for (const auto& v : r.violations) out += "[" + v.subject + "] " + v.message + "\n";
        write_file(dir / "violations.txt", out);
    }
}

int cmd_validate(const InputArgs& in) {
    ProblemInstance inst = in.load();
    auto report = validate_instance(inst);
    if (!report.ok()) {
        std::cerr << report.to_string();
        return kExitInput;
    }
    std::cout << strfmt("instance ok: %zu buses, %zu depots, %zu trips, hash %016llx\n",
                        inst.buses.size(), inst.depots.size(), inst.trips.size(),
                        static_cast<unsigned long long>(inst.content_hash()));
    return kExitOk;
}

int cmd_build(const InputArgs& in, const std::string& scenario_name, const std::string& out_dir) {
    ProblemInstance inst = load_validated(in);
    ScenarioConfig sc = io::load_scenario(scenario_name);
    auto tl = build_timeline(inst, sc);
    auto model = milp::build_model(inst, tl, sc);
    fs::create_directories(out_dir);
    milp::export_model(model, fs::path(out_dir) / "model");
    write_file(fs::path(out_dir) / "timeline.csv", timeline_csv(tl));
    std::cout << strfmt("wrote model.mps/model.lp: %d variables, %d constraints, %d events\n",
                        model.num_vars(), model.num_rows(), tl.num_events());
    return kExitOk;
}

int cmd_solve(const InputArgs& in, const std::string& scenario_name, const SolveArgs& sa,
              const std::string& out_dir) {
    ProblemInstance inst = load_validated(in);
    ScenarioConfig sc = io::load_scenario(scenario_name);
    auto solver = milp::make_solver(sa.solver);

    fs::create_directories(out_dir);
    io::write_instance(inst, fs::path(out_dir) / "inputs");
    write_file(fs::path(out_dir) / "inputs" / "scenario.json", io::scenario_json(sc));

    auto r = experiments::run_pipeline(inst, sc, sa.limits(), solver.get());
    write_manifest(out_dir, inst, sc, sa.limits(), solver->describe());
    if (!r.solved()) {
        std::cerr << "no solution: " << milp::to_string(r.raw.status) << ' ' << r.raw.detail
                  << '\n';
        return r.raw.status == milp::SolveStatus::kInfeasible ||
                       r.raw.status == milp::SolveStatus::kUnbounded
                   ? kExitInfeasible
                   : kExitSolverEnv;
    }
    write_solution(fs::path(out_dir) / "solution.json", r.raw);
    write_reports(out_dir, r, inst);
    if (!r.violations.empty()) {
        std::cerr << "solution failed independent validation; see violations.txt\n";
        return kExitSolverEnv;
    }
    std::cout << strfmt(
        "%s: total %.2f EUR (charging %.2f, revenue %.2f, degradation %.2f, peak %.2f) "
        "status %s gap %.4f in %.1f s\n",
        sc.name.c_str(), r.cost.total_eur, r.cost.charging_cost_eur,
        r.cost.discharging_revenue_eur, r.cost.degradation_cost_eur,
        r.cost.peak_power_cost_eur, milp::to_string(r.raw.status), r.raw.achieved_gap_frac,
        r.raw.solve_seconds);
    return kExitOk;
}

int cmd_report(const std::string& run_dir) {
    fs::path dir(run_dir);
    ProblemInstance inst = io::load_instance_dir(dir / "inputs");
    auto report = validate_instance(inst);
    if (!report.ok()) throw InputError("saved inputs fail validation:\n" + report.to_string());
    ScenarioConfig sc = io::load_scenario((dir / "inputs" / "scenario.json").string());
    auto raw = read_solution(dir / "solution.json");
    if (!raw.has_values()) throw InputError("solution.json carries no values");

    experiments::PipelineResult r;
    r.scenario = sc;
    r.timeline = build_timeline(inst, sc);
    auto model = milp::build_model(inst, r.timeline, sc);
    r.raw = raw;
    r.schedule = decode(inst, r.timeline, model, raw);
    r.violations = validate_schedule(inst, r.timeline, sc, r.schedule);
    r.cost = cost_report(r.schedule, inst, r.timeline, sc, raw);
    r.flows = energy_flow_report(r.schedule, inst, r.timeline, sc);
    write_reports(dir, r, inst);
    std::cout << strfmt("reports rebuilt: total %.2f EUR, %zu violations\n", r.cost.total_eur,
                        r.violations.size());
    return r.violations.empty() ? kExitOk : kExitSolverEnv;
}

int cmd_gen(uint64_t seed, int buses, int trips, double eff, double pv, double ess,
            const std::string& out_dir) {
    experiments::GenSpec g;
    g.seed = seed;
    g.n_buses = buses;
    g.n_trips = trips;
    g.charge_efficiency = eff;
    g.pv_area_m2 = pv;
    g.ess_capacity_kwh = ess;
    ProblemInstance inst = experiments::generate_instance(g);
    io::write_instance(inst, out_dir);
    std::cout << strfmt("generated %d buses / %d trips into %s (hash %016llx)\n", buses, trips,
                        out_dir.c_str(),
                        static_cast<unsigned long long>(inst.content_hash()));
    return kExitOk;
}

int cmd_sweep(const InputArgs& in, const std::string& kind, const SolveArgs& sa,
              const std::string& out_dir, double from, double to, double step,
              const std::string& scenario_name, bool covary) {
    ScenarioConfig base = io::load_scenario(scenario_name);
    auto solver = milp::make_solver(sa.solver);
    fs::create_directories(out_dir);

    if (kind == "battery-cost") {
        ProblemInstance inst = load_validated(in);
        auto rows = experiments::sweep_battery_cost(inst, defaults::battery_cost_by_year(), base,
                                                    sa.limits(), solver.get());
        write_file(fs::path(out_dir) / "battery_cost.csv", experiments::sweep_csv(rows, "year"));
        std::cout << "wrote battery_cost.csv (" << rows.size() << " rows)\n";
        return kExitOk;
    }
    if (kind == "tariff-margin") {
        ProblemInstance inst = load_validated(in);
        std::vector<double> margins;
        for (double m = from; m <= to + 1e-9; m += step) margins.push_back(m);
        auto rows =
            experiments::sweep_tariff_margin(inst, margins, base, sa.limits(), solver.get());
        write_file(fs::path(out_dir) / "tariff_margin.csv",
                   experiments::sweep_csv(rows, "margin"));
        std::cout << "wrote tariff_margin.csv (" << rows.size() << " rows)\n";
        return kExitOk;
    }
    if (kind == "projection") {
        ProblemInstance inst = load_validated(in);
        auto tables = experiments::ProjectionTables::defaults();
        tables.covary_battery_cost = covary;
        auto rows = experiments::project_scenarios(inst, tables, base, sa.limits(), solver.get());
        write_file(fs::path(out_dir) / "projection.csv", experiments::projection_csv(rows));
        std::cout << "wrote projection.csv (" << rows.size() << " rows)\n";
        return kExitOk;
    }
    if (kind == "grid") {
        // predefined instance-variation grid; inputs are generated, not loaded
        auto grid = experiments::instance_grid(1);
        std::vector<experiments::PipelineResult> results;
        std::string csv;
        for (const auto& [label, inst] : grid) {
            auto r = experiments::run_pipeline(inst, base, sa.limits(), solver.get());
            auto table = experiments::scenario_table_csv({r});
            if (csv.empty()) csv = "label," + table.substr(0, table.find('\n') + 1);
            csv += label + "," + table.substr(table.find('\n') + 1);
            std::cout << label << ": total " << strfmt("%.2f", r.cost.total_eur) << "\n";
        }
        write_file(fs::path(out_dir) / "grid.csv", csv);
        return kExitOk;
    }
    throw InputError("unknown sweep kind: " + kind +
                     " (expected battery-cost | tariff-margin | projection | grid)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Electric bus fleet day-ahead charging scheduler"};
    app.require_subcommand(1);

    InputArgs in;
    SolveArgs sa;
    std::string scenario = "basic";
    std::string out_dir = "run";
    std::string run_dir;
    std::string sweep_kind;
    double from = 0.40, to = 1.10, step = 0.05;
    bool covary = false;
    uint64_t seed = 1;
    int buses = 8, trips = 60;
    double eff = 0.92, pv = 0.0, ess = -1.0;

    auto* validate = app.add_subcommand("validate", "Check an instance against its invariants");
    in.attach(validate);

    auto* build = app.add_subcommand("build", "Write the MILP as MPS/LP without solving");
    in.attach(build);
    build->add_option("--scenario", scenario, "basic | pp_v2g_dc | all | scenario JSON path");
    build->add_option("--out", out_dir, "Output directory");

    auto* solve = app.add_subcommand("solve", "Full pipeline: build, solve, decode, report");
    in.attach(solve);
    sa.attach(solve);
    solve->add_option("--scenario", scenario, "basic | pp_v2g_dc | all | scenario JSON path");
    solve->add_option("--out", out_dir, "Run directory for all outputs");

    auto* report = app.add_subcommand("report", "Re-derive reports from a saved run directory");
    report->add_option("--run", run_dir, "Run directory written by solve")->required();

    auto* sweep = app.add_subcommand("sweep", "Sensitivity sweeps and scenario grids");
    in.attach(sweep);
    sa.attach(sweep);
    sweep->add_option("kind", sweep_kind, "battery-cost | tariff-margin | projection | grid")
        ->required();
    sweep->add_option("--scenario", scenario, "Base scenario (default all for sweeps)");
    sweep->add_option("--out", out_dir, "Output directory");
    sweep->add_option("--from", from, "First margin (tariff-margin)");
    sweep->add_option("--to", to, "Last margin (tariff-margin)");
    sweep->add_option("--step", step, "Margin step (tariff-margin)");
    sweep->add_flag("--covary-battery-cost", covary,
                    "Projections also apply the per-year battery cost");

    auto* gen = app.add_subcommand("gen", "Generate a synthetic instance");
    gen->add_option("--seed", seed, "RNG seed");
    gen->add_option("--buses", buses, "Fleet size");
    gen->add_option("--trips", trips, "Total trips including depot deadheads");
    gen->add_option("--efficiency", eff, "Charger efficiency");
    gen->add_option("--pv", pv, "PV area m2 at the overnight depot (0 = default)");
    gen->add_option("--ess", ess, "ESS capacity kWh (negative = default)");
    gen->add_option("--out", out_dir, "Directory for the five input files")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(in);
        if (build->parsed()) return cmd_build(in, scenario, out_dir);
        if (solve->parsed()) return cmd_solve(in, scenario, sa, out_dir);
        if (report->parsed()) return cmd_report(run_dir);
        if (gen->parsed()) return cmd_gen(seed, buses, trips, eff, pv, ess, out_dir);
        if (sweep->parsed()) {
            if (!sweep->count("--scenario")) scenario = "all";
            return cmd_sweep(in, sweep_kind, sa, out_dir, from, to, step, scenario, covary);
        }
    } catch (const SolverEnvError& e) {
        std::cerr << "solver environment error: " << e.what() << '\n';
        return kExitSolverEnv;
    } catch (const experiments::GenerationError& e) {
        std::cerr << "generation error: " << e.what() << '\n';
        return kExitInput;
    } catch (const DecodeError& e) {
        std::cerr << "decode error: " << e.what() << '\n';
        return kExitSolverEnv;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitOk;
}
