#include "ebus/milp.hpp"

#include <cmath>

namespace ebus::milp {

int Model::add_var(const std::string& name, VarType type, double lb, double ub) {
    auto [it, inserted] = index_.emplace(name, static_cast<int>(vars_.size()));
    if (!inserted) throw StructuralError("duplicate variable name: " + name);
    vars_.push_back({name, type, lb, ub, 0.0});
    return it->second;
}

int Model::add_row(const std::string& name, Sense sense, double rhs,
                   std::vector<std::pair<int, double>> terms) {
    for (const auto& [v, c] : terms) {
        (void)c;
        if (v < 0 || v >= num_vars())
            throw StructuralError("row " + name + " references unregistered variable");
    }
    rows_.push_back({name, sense, rhs, std::move(terms)});
    return static_cast<int>(rows_.size()) - 1;
}

int Model::lookup(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
}

int Model::count_rows_with_prefix(const std::string& prefix) const {
    int n = 0;
    for (const auto& r : rows_)
        if (r.name.rfind(prefix, 0) == 0) ++n;
    return n;
}

double Model::objective_value(std::span<const double> x) const {
    double v = 0.0;
    for (size_t i = 0; i < vars_.size(); ++i) v += vars_[i].obj * x[i];
    return v;
}

double Model::row_violation(const RowDef& row, std::span<const double> x) const {
    double lhs = 0.0;
    for (const auto& [v, c] : row.terms) lhs += c * x[v];
    switch (row.sense) {
        case Sense::kLe: return std::max(0.0, lhs - row.rhs);
        case Sense::kGe: return std::max(0.0, row.rhs - lhs);
        case Sense::kEq: return std::abs(lhs - row.rhs);
    }
    return 0.0;
}

std::string var_x(int j, int k, int n, int e) { return strfmt("x(%d,%d,%d,%d)", j, k, n, e); }
std::string var_y(int j, int k, int n, int e) { return strfmt("y(%d,%d,%d,%d)", j, k, n, e); }
std::string var_dchar(int j, int k, int n, int e) { return strfmt("dc(%d,%d,%d,%d)", j, k, n, e); }
std::string var_ddis(int j, int k, int n, int e) { return strfmt("dd(%d,%d,%d,%d)", j, k, n, e); }
std::string var_lchar(int k, int e) { return strfmt("lc(%d,%d)", k, e); }
std::string var_ldis(int k, int e) { return strfmt("ld(%d,%d)", k, e); }
std::string var_vchar(int k, int e) { return strfmt("vc(%d,%d)", k, e); }
std::string var_vdis(int k, int e) { return strfmt("vd(%d,%d)", k, e); }
std::string var_achar(int k, int e) { return strfmt("ac(%d,%d)", k, e); }
std::string var_adis(int k, int e) { return strfmt("ad(%d,%d)", k, e); }
std::string var_upeak(int l) { return strfmt("u(%d)", l); }
std::string var_soc(int k, int e) { return strfmt("soc(%d,%d)", k, e); }
std::string var_wbuy(int j, int e) { return strfmt("wp(%d,%d)", j, e); }
std::string var_wsell(int j, int e) { return strfmt("wm(%d,%d)", j, e); }
std::string var_deg(int k, int e) { return strfmt("deg(%d,%d)", k, e); }
std::string var_mu(int j, int e) { return strfmt("mu(%d,%d)", j, e); }
std::string var_z(int j, int e) { return strfmt("z(%d,%d)", j, e); }
std::string var_pi(int j, int e) { return strfmt("pi(%d,%d)", j, e); }
std::string var_ess(int j, int e) { return strfmt("ess(%d,%d)", j, e); }
std::string var_manc(int j, int e) { return strfmt("manc(%d,%d)", j, e); }

}  // namespace ebus::milp
