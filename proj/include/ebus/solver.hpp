#ifndef EBUS_SOLVER_HPP
#define EBUS_SOLVER_HPP

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ebus/milp.hpp"

namespace ebus::milp {

// Model exchange files -------------------------------------------------------

// Fixed-format MPS. Names longer than 8 characters are mangled to C#######/
// R####### deterministically; the mapping is written to <path>.names so names
// round-trip losslessly.
void export_mps(const Model& model, const std::filesystem::path& path);
// CPLEX-style LP text. Names are sanitized (parentheses/commas -> underscores).
void export_lp(const Model& model, const std::filesystem::path& path);
// Reads an MPS file written by export_mps (consults the sidecar if present).
Model import_mps(const std::filesystem::path& path);

void export_model(const Model& model, const std::filesystem::path& basename_no_ext);

// Solving --------------------------------------------------------------------

enum class SolveStatus { kOptimal, kGapLimit, kTimeLimit, kInfeasible, kUnbounded, kError };

const char* to_string(SolveStatus s);

struct SolveLimits {
    double max_seconds = 14400.0;  // 4 h
    double rel_gap_frac = 0.01;
    std::optional<int> threads;  // adapters may ignore it
};

struct RawSolution {
    SolveStatus status = SolveStatus::kError;
    double objective_value = 0.0;
    double best_bound = 0.0;
    double achieved_gap_frac = 0.0;
    double solve_seconds = 0.0;
    std::unordered_map<std::string, double> values;  // variable name -> value
    std::string detail;                              // solver message, if any

    bool has_values() const { return !values.empty(); }
    double value(const std::string& name) const {
        auto it = values.find(name);
        return it == values.end() ? 0.0 : it->second;
    }
};

// A named set of variable fixings applied on top of a base model (used to
// batch many closely related solves, e.g. the enumeration oracle's residual
// LPs, through one solver invocation).
struct FixedCase {
    std::string name;
    std::vector<std::pair<int, double>> fixes;  // (variable id, value)
};

class Solver {
  public:
    virtual ~Solver() = default;
    virtual std::string describe() const = 0;
    virtual RawSolution solve(const Model& model, const SolveLimits& limits) = 0;
    virtual std::vector<RawSolution> solve_cases(const Model& model,
                                                 const std::vector<FixedCase>& cases,
                                                 const SolveLimits& limits);
};

// Selects the solver adapter from EBUS_SOLVER: "scipy" (bundled driver via
// python3 + scipy's HiGHS, the default), "highs" or "cbc" (command-line
// binaries), or an explicit path to one of those binaries. Throws
// SolverEnvError naming EBUS_SOLVER when nothing usable is found.
std::unique_ptr<Solver> make_solver(const std::string& selection = "");

// Convenience: solve with the default adapter.
RawSolution solve(const Model& model, const SolveLimits& limits);

// Readback integrality: binaries within 1e-6 of an integer snap; callers must
// treat larger deviations as errors.
constexpr double kIntegralitySnapTol = 1e-6;

namespace detail {
// Solution-file parsers for the command-line adapters (exposed so they can be
// tested against canned solver output).
RawSolution parse_highs_solution(const std::string& sol_text, const std::string& log_text,
                                 const Model& model);
RawSolution parse_cbc_solution(const std::string& sol_text, const Model& model);
}  // namespace detail

}  // namespace ebus::milp

#endif
