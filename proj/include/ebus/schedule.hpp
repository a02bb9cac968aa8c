#ifndef EBUS_SCHEDULE_HPP
#define EBUS_SCHEDULE_HPP

#include <string>
#include <vector>

#include "ebus/model.hpp"
#include "ebus/solver.hpp"
#include "ebus/timeline.hpp"

namespace ebus {

enum class ActionKind { kIdle, kTrip, kCharge, kDischarge };

struct BusSlot {
    ActionKind kind = ActionKind::kIdle;
    int trip = -1;        // trip index while serving
    int depot = -1;       // depot index while connected
    int charger = -1;     // 0-based charger index while connected
    double minutes = 0.0; // connection duration inside the slot
    double soc_kwh = 0.0; // battery energy at the event (start of slot)
};

struct DepotSlot {
    double grid_buy_kwh = 0.0;    // w+
    double grid_sell_kwh = 0.0;   // w-
    double pv_to_bus_kwh = 0.0;   // mu
    double pv_to_ess_kwh = 0.0;   // pi
    double ess_to_bus_kwh = 0.0;  // z
    double ess_to_grid_kwh = 0.0; // m_anc
    double ess_level_kwh = 0.0;   // H at the event
};

// Operational decoding of a solver solution; mirrors the variable values.
struct Schedule {
    std::vector<std::vector<BusSlot>> bus;              // [k][e]
    std::vector<std::vector<DepotSlot>> depot;          // [j][e]
    std::vector<std::vector<double>> degradation_eur;   // [k][e]
    int peak_level = -1;  // 0-based ladder index, -1 when peak cost was not modeled
};

struct DecodeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Schedule decode(const ProblemInstance& instance, const EventTimeline& timeline,
                const milp::Model& model, const milp::RawSolution& raw);

// Independent feasibility check: re-derives every enabled constraint family
// arithmetically from the schedule (not from the model's rows). Tolerance is
// 1e-6 absolute on energies; logical exclusions are exact.
std::vector<Violation> validate_schedule(const ProblemInstance& instance,
                                         const EventTimeline& timeline,
                                         const ScenarioConfig& scenario,
                                         const Schedule& schedule);

struct CostReport {
    double total_eur = 0.0;
    double charging_cost_eur = 0.0;
    double discharging_revenue_eur = 0.0;
    double degradation_cost_eur = 0.0;
    double peak_power_cost_eur = 0.0;
    double peak_kw = 0.0;    // maximum countable grid draw over the day
    int peak_level = -1;     // 0-based ladder index paid for (chosen or ex post)
    double mip_gap_frac = 0.0;
    double solve_seconds = 0.0;
    std::string scenario;
    std::string solver_status;
};

struct EnergyFlowReport {
    double grid_import_kwh = 0.0;
    double grid_export_kwh = 0.0;
    double pv_production_kwh = 0.0;
    double pv_to_bus_kwh = 0.0;
    double pv_to_ess_kwh = 0.0;
    double ess_to_bus_kwh = 0.0;
    double ess_to_grid_kwh = 0.0;
    double v2g_export_kwh = 0.0;
    double ess_residual_kwh = 0.0;   // end-of-day level minus start
    double pv_curtailed_kwh = 0.0;   // yield neither used nor stored
};

// Recomputes all four cost groups from the schedule; scenarios without peak
// cost in the objective get the ex-post peak charge from the ladder.
CostReport cost_report(const Schedule& schedule, const ProblemInstance& instance,
                       const EventTimeline& timeline, const ScenarioConfig& scenario,
                       const milp::RawSolution& raw);

EnergyFlowReport energy_flow_report(const Schedule& schedule, const ProblemInstance& instance,
                                    const EventTimeline& timeline,
                                    const ScenarioConfig& scenario);

// Countable grid draw (kW) during slot e per the peak-power accounting:
// full-slot charger power net of PV/ESS contributions.
double grid_draw_kw(const Schedule& schedule, const ProblemInstance& instance,
                    const EventTimeline& timeline, int e);
// Least ladder level covering the draw; ladder.levels.size()-1 if it exceeds
// the top level.
int peak_level_for(const PeakLadder& ladder, double draw_kw);

std::string schedule_csv(const Schedule& s, const ProblemInstance& inst,
                         const EventTimeline& tl);
std::string flows_csv(const Schedule& s, const ProblemInstance& inst, const EventTimeline& tl);
std::string cost_report_json(const CostReport& c, const EnergyFlowReport& f);

}  // namespace ebus

#endif
