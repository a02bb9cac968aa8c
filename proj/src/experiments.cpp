#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "ebus/defaults.hpp"
#include "ebus/experiments.hpp"
#include "ebus/milp.hpp"

namespace ebus::experiments {

namespace {

milp::Solver* ensure(milp::Solver* solver, std::unique_ptr<milp::Solver>& owned) {
    if (solver) return solver;
    owned = milp::make_solver();
    return owned.get();
}

double v2g_revenue(const PipelineResult& r) {
    double rev = 0.0;
    for (size_t j = 0; j < r.schedule.depot.size(); ++j)
        for (size_t e = 0; e < r.schedule.depot[j].size(); ++e)
            rev += r.timeline.sell_price[e] * (r.schedule.depot[j][e].grid_sell_kwh -
                                               r.schedule.depot[j][e].ess_to_grid_kwh);
    return rev;
}

}  // namespace

PipelineResult run_pipeline(const ProblemInstance& inst, const ScenarioConfig& sc,
                            const milp::SolveLimits& limits, milp::Solver* solver) {
    auto report = validate_instance(inst);
    if (!report.ok()) throw InputError("instance is not well-formed:\n" + report.to_string());

    PipelineResult out;
    out.scenario = sc;
    out.timeline = build_timeline(inst, sc);
    milp::Model model = milp::build_model(inst, out.timeline, sc);

    std::unique_ptr<milp::Solver> owned;
    out.raw = ensure(solver, owned)->solve(model, limits);
    if (out.raw.has_values()) {
        out.schedule = decode(inst, out.timeline, model, out.raw);
        out.violations = validate_schedule(inst, out.timeline, sc, out.schedule);
        out.cost = cost_report(out.schedule, inst, out.timeline, sc, out.raw);
        out.flows = energy_flow_report(out.schedule, inst, out.timeline, sc);
    }
    return out;
}

std::vector<PipelineResult> run_scenarios(const ProblemInstance& inst,
                                          const std::vector<ScenarioConfig>& scenarios,
                                          const milp::SolveLimits& limits,
                                          milp::Solver* solver) {
    std::unique_ptr<milp::Solver> owned;
    milp::Solver* s = ensure(solver, owned);
    std::vector<PipelineResult> out;
    for (const auto& sc : scenarios) {
        try {
            out.push_back(run_pipeline(inst, sc, limits, s));
        } catch (const std::exception& ex) {
            PipelineResult failed;
            failed.scenario = sc;
            failed.raw.detail = ex.what();
            out.push_back(std::move(failed));
        }
    }
    return out;
}

std::string scenario_table_csv(const std::vector<PipelineResult>& results) {
    std::ostringstream os;
    os << "scenario,total_eur,charging_eur,discharging_revenue_eur,degradation_eur,"
          "peak_power_eur,peak_kw,mip_gap,cpu_seconds,status\n";
    for (const auto& r : results) {
        const CostReport& c = r.cost;
        os << r.scenario.name << ',' << strfmt("%.2f", c.total_eur) << ','
           << strfmt("%.2f", c.charging_cost_eur) << ','
           << strfmt("%.2f", c.discharging_revenue_eur) << ','
           << strfmt("%.2f", c.degradation_cost_eur) << ','
           << strfmt("%.2f", c.peak_power_cost_eur) << ',' << strfmt("%.1f", c.peak_kw) << ','
           << strfmt("%.4f", c.mip_gap_frac) << ',' << strfmt("%.1f", c.solve_seconds) << ','
           << (r.solved() ? c.solver_status : "error: " + r.raw.detail) << '\n';
    }
    return os.str();
}

std::vector<SweepRow> sweep_battery_cost(const ProblemInstance& inst,
                                         const std::vector<std::pair<int, double>>& cost_by_year,
                                         const ScenarioConfig& base,
                                         const milp::SolveLimits& limits, milp::Solver* solver) {
    std::unique_ptr<milp::Solver> owned;
    milp::Solver* s = ensure(solver, owned);
    std::vector<SweepRow> rows;
    for (const auto& [year, cost] : cost_by_year) {
        ProblemInstance variant = inst;
        for (auto& bus : variant.buses) {
            bus.replacement_cost_eur_per_kwh = cost;
            bus.lifetime_throughput_kwh = 0.0;  // keep the cycle-based default
        }
        PipelineResult r = run_pipeline(variant, base, limits, s);
        SweepRow row;
        row.label = strfmt("%d", year);
        row.parameter = cost;
        row.cost = r.cost;
        row.flows = r.flows;
        row.v2g_revenue_eur = v2g_revenue(r);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<SweepRow> sweep_tariff_margin(const ProblemInstance& inst,
                                          const std::vector<double>& margins,
                                          const ScenarioConfig& base,
                                          const milp::SolveLimits& limits,
                                          milp::Solver* solver) {
    std::unique_ptr<milp::Solver> owned;
    milp::Solver* s = ensure(solver, owned);
    std::vector<SweepRow> rows;
    for (double m : margins) {
        ScenarioConfig sc = base;
        sc.tariff_margin_frac = m;
        PipelineResult r = run_pipeline(inst, sc, limits, s);
        SweepRow row;
        row.label = strfmt("%.2f", m);
        row.parameter = m;
        row.cost = r.cost;
        row.flows = r.flows;
        row.v2g_revenue_eur = v2g_revenue(r);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows, const std::string& parameter_name) {
    std::ostringstream os;
    os << parameter_name
       << ",total_eur,charging_eur,discharging_revenue_eur,degradation_eur,peak_power_eur,"
          "v2g_revenue_eur,pv_to_bus_kwh,ess_to_bus_kwh,ess_to_grid_kwh,v2g_export_kwh,"
          "grid_import_kwh,mip_gap,cpu_seconds\n";
    for (const auto& r : rows)
        os << r.label << ',' << strfmt("%.2f", r.cost.total_eur) << ','
           << strfmt("%.2f", r.cost.charging_cost_eur) << ','
           << strfmt("%.2f", r.cost.discharging_revenue_eur) << ','
           << strfmt("%.2f", r.cost.degradation_cost_eur) << ','
           << strfmt("%.2f", r.cost.peak_power_cost_eur) << ','
           << strfmt("%.2f", r.v2g_revenue_eur) << ',' << strfmt("%.1f", r.flows.pv_to_bus_kwh)
           << ',' << strfmt("%.1f", r.flows.ess_to_bus_kwh) << ','
           << strfmt("%.1f", r.flows.ess_to_grid_kwh) << ','
           << strfmt("%.1f", r.flows.v2g_export_kwh) << ','
           << strfmt("%.1f", r.flows.grid_import_kwh) << ','
           << strfmt("%.4f", r.cost.mip_gap_frac) << ',' << strfmt("%.1f", r.cost.solve_seconds)
           << '\n';
    return os.str();
}

ProjectionTables ProjectionTables::defaults() {
    ProjectionTables t;
    t.years = {2025, 2030, 2035, 2040, 2045, 2050};
    auto fill = [&](const std::string& name, std::vector<double> energy,
                    std::vector<double> total) {
        for (size_t i = 0; i < t.years.size(); ++i)
            t.margins[name][t.years[i]] = {energy[i], total[i]};
    };
    fill("positive", {0.75, 0.80, 0.85, 0.90, 0.95, 1.00},
         {1.10, 1.00, 0.90, 0.90, 0.95, 1.00});
    fill("conservative", {0.75, 0.70, 0.65, 0.60, 0.55, 0.50},
         {1.10, 0.90, 0.70, 0.60, 0.55, 0.50});
    fill("pessimistic", {0.75, 0.60, 0.50, 0.45, 0.40, 0.40},
         {1.10, 0.75, 0.55, 0.45, 0.40, 0.40});
    return t;
}

std::vector<ProjectionRow> project_scenarios(const ProblemInstance& inst,
                                             const ProjectionTables& tables,
                                             const ScenarioConfig& base,
                                             const milp::SolveLimits& limits,
                                             milp::Solver* solver) {
    std::unique_ptr<milp::Solver> owned;
    milp::Solver* s = ensure(solver, owned);
    std::vector<ProjectionRow> rows;
    for (const auto& [name, by_year] : tables.margins) {
        for (int year : tables.years) {
            auto it = by_year.find(year);
            if (it == by_year.end())
                throw ParameterError(strfmt("projection %s has no margin for year %d",
                                            name.c_str(), year));
            ProblemInstance variant = inst;
            if (tables.covary_battery_cost) {
                double cost = variant.buses.empty()
                                  ? 0.0
                                  : variant.buses.front().replacement_cost_eur_per_kwh;
                for (const auto& [y, c] : defaults::battery_cost_by_year())
                    if (y <= year) cost = c;
                for (auto& bus : variant.buses) {
                    bus.replacement_cost_eur_per_kwh = cost;
                    bus.lifetime_throughput_kwh = 0.0;
                }
            }
            ScenarioConfig sc = base;
            sc.tariff_margin_frac = it->second.total_frac;
            PipelineResult r = run_pipeline(variant, sc, limits, s);

            ProjectionRow row;
            row.year = year;
            row.projection = name;
            row.margin_frac = it->second.total_frac;
            row.gc_share_frac =
                it->second.total_frac > 0.0
                    ? (it->second.total_frac - it->second.energy_frac) / it->second.total_frac
                    : 0.0;
            row.cost = r.cost;
            row.v2g_revenue_eur = v2g_revenue(r);
            row.gc_revenue_eur = r.cost.discharging_revenue_eur * row.gc_share_frac;
            row.energy_revenue_eur = r.cost.discharging_revenue_eur - row.gc_revenue_eur;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::string projection_csv(const std::vector<ProjectionRow>& rows) {
    std::ostringstream os;
    os << "year,projection,margin,total_eur,discharging_revenue_eur,energy_revenue_eur,"
          "gc_revenue_eur,v2g_revenue_eur,degradation_eur,mip_gap,cpu_seconds\n";
    for (const auto& r : rows)
        os << r.year << ',' << r.projection << ',' << strfmt("%.2f", r.margin_frac) << ','
           << strfmt("%.2f", r.cost.total_eur) << ','
           << strfmt("%.2f", r.cost.discharging_revenue_eur) << ','
           << strfmt("%.2f", r.energy_revenue_eur) << ',' << strfmt("%.2f", r.gc_revenue_eur)
           << ',' << strfmt("%.2f", r.v2g_revenue_eur) << ','
           << strfmt("%.2f", r.cost.degradation_cost_eur) << ','
           << strfmt("%.4f", r.cost.mip_gap_frac) << ',' << strfmt("%.1f", r.cost.solve_seconds)
           << '\n';
    return os.str();
}

}  // namespace ebus::experiments
