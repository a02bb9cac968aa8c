#ifndef EBUS_MILP_HPP
#define EBUS_MILP_HPP

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ebus/model.hpp"
#include "ebus/timeline.hpp"

namespace ebus::milp {

enum class VarType { kContinuous, kBinary };
enum class Sense { kLe, kGe, kEq };

constexpr double kInf = std::numeric_limits<double>::infinity();

struct VarDef {
    std::string name;
    VarType type = VarType::kContinuous;
    double lb = 0.0;
    double ub = kInf;
    double obj = 0.0;
};

struct RowDef {
    std::string name;
    Sense sense = Sense::kLe;
    double rhs = 0.0;
    std::vector<std::pair<int, double>> terms;  // (variable id, coefficient)
};

// Solver-agnostic linear model. Variables are addressed by stable names that
// encode their indices, e.g. x(j,k,n,e) with 1-based indices.
class Model {
  public:
    int add_var(const std::string& name, VarType type, double lb, double ub);
    int add_binary(const std::string& name) { return add_var(name, VarType::kBinary, 0.0, 1.0); }
    int add_continuous(const std::string& name, double lb = 0.0, double ub = kInf) {
        return add_var(name, VarType::kContinuous, lb, ub);
    }
    void fix(int var, double value) {
        vars_[var].lb = value;
        vars_[var].ub = value;
    }
    void set_bounds(int var, double lb, double ub) {
        vars_[var].lb = lb;
        vars_[var].ub = ub;
    }
    void add_objective_term(int var, double coef) { vars_[var].obj += coef; }
    int add_row(const std::string& name, Sense sense, double rhs,
                std::vector<std::pair<int, double>> terms);

    int lookup(const std::string& name) const;  // -1 if absent
    int num_vars() const { return static_cast<int>(vars_.size()); }
    int num_rows() const { return static_cast<int>(rows_.size()); }
    const VarDef& var(int i) const { return vars_[i]; }
    const RowDef& row(int i) const { return rows_[i]; }
    const std::vector<VarDef>& vars() const { return vars_; }
    const std::vector<RowDef>& rows() const { return rows_; }

    int count_rows_with_prefix(const std::string& prefix) const;
    double objective_value(std::span<const double> x) const;
    // Signed violation of a row under x (0 when satisfied).
    double row_violation(const RowDef& row, std::span<const double> x) const;

    std::string name = "ebus";
    uint64_t instance_hash = 0;
    std::string scenario_name;

  private:
    std::vector<VarDef> vars_;
    std::vector<RowDef> rows_;
    std::unordered_map<std::string, int> index_;
};

// Stable variable-name helpers (1-based indices in names).
std::string var_x(int j, int k, int n, int e);
std::string var_y(int j, int k, int n, int e);
std::string var_dchar(int j, int k, int n, int e);
std::string var_ddis(int j, int k, int n, int e);
std::string var_lchar(int k, int e);
std::string var_ldis(int k, int e);
std::string var_vchar(int k, int e);
std::string var_vdis(int k, int e);
std::string var_achar(int k, int e);
std::string var_adis(int k, int e);
std::string var_upeak(int l);
std::string var_soc(int k, int e);
std::string var_wbuy(int j, int e);
std::string var_wsell(int j, int e);
std::string var_deg(int k, int e);
std::string var_mu(int j, int e);
std::string var_z(int j, int e);
std::string var_pi(int j, int e);
std::string var_ess(int j, int e);
std::string var_manc(int j, int e);

// Builds the complete day-ahead scheduling MILP for one scenario. Constraint
// rows are named c<family>(indices) so per-family counts can be audited.
Model build_model(const ProblemInstance& instance, const EventTimeline& timeline,
                  const ScenarioConfig& scenario);

}  // namespace ebus::milp

#endif
