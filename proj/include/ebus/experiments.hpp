#ifndef EBUS_EXPERIMENTS_HPP
#define EBUS_EXPERIMENTS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ebus/schedule.hpp"
#include "ebus/solver.hpp"

namespace ebus::experiments {

// One full validate -> timeline -> build -> solve -> decode -> report run.
struct PipelineResult {
    ScenarioConfig scenario;
    EventTimeline timeline;
    milp::RawSolution raw;
    Schedule schedule;           // empty when the solve produced no values
    CostReport cost;
    EnergyFlowReport flows;
    std::vector<Violation> violations;

    bool solved() const { return raw.has_values(); }
};

PipelineResult run_pipeline(const ProblemInstance& instance, const ScenarioConfig& scenario,
                            const milp::SolveLimits& limits, milp::Solver* solver = nullptr);

// Scenario comparison in the usual results-table layout. Solver errors are
// propagated per scenario without aborting the batch.
std::vector<PipelineResult> run_scenarios(const ProblemInstance& instance,
                                          const std::vector<ScenarioConfig>& scenarios,
                                          const milp::SolveLimits& limits,
                                          milp::Solver* solver = nullptr);
std::string scenario_table_csv(const std::vector<PipelineResult>& results);

// Sweeps ---------------------------------------------------------------------

struct SweepRow {
    std::string label;
    double parameter = 0.0;
    CostReport cost;
    EnergyFlowReport flows;
    double v2g_revenue_eur = 0.0;
};

// Battery replacement cost sweep on the given base scenario.
std::vector<SweepRow> sweep_battery_cost(const ProblemInstance& instance,
                                         const std::vector<std::pair<int, double>>& cost_by_year,
                                         const ScenarioConfig& base,
                                         const milp::SolveLimits& limits,
                                         milp::Solver* solver = nullptr);

std::vector<SweepRow> sweep_tariff_margin(const ProblemInstance& instance,
                                          const std::vector<double>& margins,
                                          const ScenarioConfig& base,
                                          const milp::SolveLimits& limits,
                                          milp::Solver* solver = nullptr);

std::string sweep_csv(const std::vector<SweepRow>& rows, const std::string& parameter_name);

// Multi-decade revenue-margin projections ------------------------------------

struct ProjectionTables {
    struct Point {
        double energy_frac = 0.0;  // energy-only share of the wholesale price
        double total_frac = 0.0;   // energy + green-certificate share
    };
    std::vector<int> years;
    std::map<std::string, std::map<int, Point>> margins;  // by projection scenario name
    bool covary_battery_cost = false;  // also apply the per-year replacement cost

    static ProjectionTables defaults();
};

struct ProjectionRow {
    int year = 0;
    std::string projection;
    double margin_frac = 0.0;
    double gc_share_frac = 0.0;  // green-certificate part of the margin
    CostReport cost;
    double v2g_revenue_eur = 0.0;
    double energy_revenue_eur = 0.0;  // revenue attributable to the energy share
    double gc_revenue_eur = 0.0;
};

std::vector<ProjectionRow> project_scenarios(const ProblemInstance& instance,
                                             const ProjectionTables& tables,
                                             const ScenarioConfig& base,
                                             const milp::SolveLimits& limits,
                                             milp::Solver* solver = nullptr);
std::string projection_csv(const std::vector<ProjectionRow>& rows);

// Synthetic instances ---------------------------------------------------------

struct GenSpec {
    uint64_t seed = 1;
    int n_buses = 8;
    int n_trips = 60;  // total, including the two depot deadheads per bus
    double charge_efficiency = 0.92;
    double pv_area_m2 = 0.0;          // 0 = bundled default
    double ess_capacity_kwh = -1.0;   // <0 = bundled default
    int depot_chargers = 3;
    int terminal_chargers = 2;
};

struct GenerationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Deterministic round-trip service on one line: overnight depot, two
// terminals, per-trip speeds drawn around 16.68 km/h and per-trip energy
// around 17.71 kWh.
ProblemInstance generate_instance(const GenSpec& spec);

// Instance-variation grid in the B/E/PV/ESS labeling convention.
std::vector<std::pair<std::string, ProblemInstance>> instance_grid(uint64_t seed);

// Enumeration oracle ----------------------------------------------------------

struct OracleResult {
    milp::SolveStatus status = milp::SolveStatus::kError;
    double objective = 0.0;
    std::unordered_map<std::string, double> values;
    int assignments_tried = 0;
    int lp_solves = 0;
};

// Ground truth for tiny instances: enumerates all assignments of the free
// binary variables that satisfy the purely logical constraints and solves the
// residual continuous problem for each through the same solver backend.
// Refuses when the free x/y count exceeds max_free_binaries or the assignment
// count exceeds max_cases.
OracleResult brute_force_oracle(const ProblemInstance& instance, const EventTimeline& timeline,
                                const ScenarioConfig& scenario, milp::Solver* solver = nullptr,
                                int max_free_binaries = 20, int max_cases = 20000);

}  // namespace ebus::experiments

#endif
