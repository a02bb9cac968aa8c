#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ebus/schedule.hpp"

namespace ebus {

CostReport cost_report(const Schedule& s, const ProblemInstance& inst, const EventTimeline& tl,
                       const ScenarioConfig& sc, const milp::RawSolution& raw) {
    CostReport r;
    r.scenario = sc.name;
    r.mip_gap_frac = raw.achieved_gap_frac;
    r.solve_seconds = raw.solve_seconds;
    r.solver_status = milp::to_string(raw.status);

    const int E = tl.num_events();
    for (int j = 0; j < static_cast<int>(inst.depots.size()); ++j)
        for (int e = 0; e < E; ++e) {
            r.charging_cost_eur += tl.buy_price[e] * s.depot[j][e].grid_buy_kwh;
            if (sc.enable_v2g || sc.enable_pv_ess)
                r.discharging_revenue_eur += tl.sell_price[e] * s.depot[j][e].grid_sell_kwh;
        }
    for (const auto& per_bus : s.degradation_eur)
        for (double d : per_bus) r.degradation_cost_eur += d;

    for (int e = 0; e < E; ++e) r.peak_kw = std::max(r.peak_kw, grid_draw_kw(s, inst, tl, e));
    if (sc.enable_peak_cost && s.peak_level >= 0) {
        r.peak_level = s.peak_level;
    } else {
        // ex-post demand charge from the realized maximum draw
        r.peak_level = peak_level_for(inst.peak_ladder, r.peak_kw);
    }
    if (r.peak_level >= 0 && r.peak_level < static_cast<int>(inst.peak_ladder.levels.size()))
        r.peak_power_cost_eur = inst.peak_ladder.levels[r.peak_level].daily_price_eur;

    // scrub LP-tolerance noise so zero groups print as zero
    for (double* v : {&r.charging_cost_eur, &r.discharging_revenue_eur,
                      &r.degradation_cost_eur, &r.peak_kw})
        if (std::abs(*v) < 1e-9) *v = 0.0;
    r.total_eur = r.charging_cost_eur - r.discharging_revenue_eur + r.degradation_cost_eur +
                  r.peak_power_cost_eur;
    return r;
}

EnergyFlowReport energy_flow_report(const Schedule& s, const ProblemInstance& inst,
                                    const EventTimeline& tl, const ScenarioConfig& sc) {
    EnergyFlowReport f;
    const int E = tl.num_events();
    for (int j = 0; j < static_cast<int>(inst.depots.size()); ++j) {
        for (int e = 0; e < E; ++e) {
            const DepotSlot& d = s.depot[j][e];
            f.grid_import_kwh += d.grid_buy_kwh;
            f.grid_export_kwh += d.grid_sell_kwh;
            f.pv_to_bus_kwh += d.pv_to_bus_kwh;
            f.pv_to_ess_kwh += d.pv_to_ess_kwh;
            f.ess_to_bus_kwh += d.ess_to_bus_kwh;
            f.ess_to_grid_kwh += d.ess_to_grid_kwh;
            if (sc.enable_pv_ess) f.pv_production_kwh += tl.pv_yield[j][e];
        }
        if (inst.depots[j].ess_capacity_kwh > 0.0)
            f.ess_residual_kwh +=
                s.depot[j][E - 1].ess_level_kwh - s.depot[j][0].ess_level_kwh;
    }
    f.v2g_export_kwh = f.grid_export_kwh - f.ess_to_grid_kwh;
    f.pv_curtailed_kwh = f.pv_production_kwh - f.pv_to_bus_kwh - f.pv_to_ess_kwh;
    for (double* v : {&f.grid_import_kwh, &f.grid_export_kwh, &f.pv_to_bus_kwh,
                      &f.pv_to_ess_kwh, &f.ess_to_bus_kwh, &f.ess_to_grid_kwh,
                      &f.v2g_export_kwh, &f.ess_residual_kwh, &f.pv_curtailed_kwh})
        if (std::abs(*v) < 1e-9) *v = 0.0;
    return f;
}

std::string schedule_csv(const Schedule& s, const ProblemInstance& inst,
                         const EventTimeline& tl) {
    std::ostringstream os;
    os << "bus_id,event,minute,slot_minutes,action,trip_id,depot_id,charger,connected_minutes,"
          "soc_kwh,degradation_eur\n";
    for (size_t k = 0; k < s.bus.size(); ++k)
        for (size_t e = 0; e < s.bus[k].size(); ++e) {
            const BusSlot& b = s.bus[k][e];
            const char* action = b.kind == ActionKind::kIdle       ? "idle"
                                 : b.kind == ActionKind::kTrip     ? "trip"
                                 : b.kind == ActionKind::kCharge   ? "charge"
                                                                   : "discharge";
            os << inst.buses[k].id << ',' << tl.events[e].index << ','
               << tl.events[e].start_minute << ',' << tl.events[e].slot_minutes << ',' << action
               << ',' << (b.trip >= 0 ? inst.trips[b.trip].id : "") << ','
               << (b.depot >= 0 ? inst.depots[b.depot].id : "") << ','
               << (b.charger >= 0 ? strfmt("%d", b.charger + 1) : "") << ','
               << format_double(b.minutes) << ',' << format_double(b.soc_kwh) << ','
               << format_double(s.degradation_eur[k][e]) << '\n';
        }
    return os.str();
}

std::string flows_csv(const Schedule& s, const ProblemInstance& inst, const EventTimeline& tl) {
    std::ostringstream os;
    os << "depot_id,event,minute,slot_minutes,grid_buy_kwh,grid_sell_kwh,pv_to_bus_kwh,"
          "pv_to_ess_kwh,ess_to_bus_kwh,ess_to_grid_kwh,ess_level_kwh,pv_yield_kwh\n";
    for (size_t j = 0; j < s.depot.size(); ++j)
        for (size_t e = 0; e < s.depot[j].size(); ++e) {
            const DepotSlot& d = s.depot[j][e];
            os << inst.depots[j].id << ',' << tl.events[e].index << ','
               << tl.events[e].start_minute << ',' << tl.events[e].slot_minutes << ','
               << format_double(d.grid_buy_kwh) << ',' << format_double(d.grid_sell_kwh) << ','
               << format_double(d.pv_to_bus_kwh) << ',' << format_double(d.pv_to_ess_kwh) << ','
               << format_double(d.ess_to_bus_kwh) << ',' << format_double(d.ess_to_grid_kwh)
               << ',' << format_double(d.ess_level_kwh) << ','
               << format_double(tl.pv_yield[j][e]) << '\n';
        }
    return os.str();
}

std::string cost_report_json(const CostReport& c, const EnergyFlowReport& f) {
    nlohmann::json doc;
    doc["scenario"] = c.scenario;
    doc["costs"] = {
        {"total_eur", c.total_eur},
        {"charging_eur", c.charging_cost_eur},
        {"discharging_revenue_eur", c.discharging_revenue_eur},
        {"degradation_eur", c.degradation_cost_eur},
        {"peak_power_eur", c.peak_power_cost_eur},
    };
    doc["peak"] = {
        {"max_draw_kw", c.peak_kw},
        {"level", c.peak_level + 1},
    };
    doc["solver"] = {
        {"status", c.solver_status},
        {"mip_gap", c.mip_gap_frac},
        {"seconds", c.solve_seconds},
    };
    doc["flows_kwh"] = {
        {"grid_import", f.grid_import_kwh},
        {"grid_export", f.grid_export_kwh},
        {"pv_production", f.pv_production_kwh},
        {"pv_to_bus", f.pv_to_bus_kwh},
        {"pv_to_ess", f.pv_to_ess_kwh},
        {"ess_to_bus", f.ess_to_bus_kwh},
        {"ess_to_grid", f.ess_to_grid_kwh},
        {"v2g_export", f.v2g_export_kwh},
        {"ess_residual", f.ess_residual_kwh},
        {"pv_curtailed", f.pv_curtailed_kwh},
    };
    return doc.dump(2) + "\n";
}

}  // namespace ebus
