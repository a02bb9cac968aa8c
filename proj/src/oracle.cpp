#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>

#include "ebus/experiments.hpp"
#include "ebus/milp.hpp"

namespace ebus::experiments {

namespace {

using milp::Model;
using milp::VarType;

// Free binaries are enumerated as per-(bus,event) activity choices: idle, or
// one of the available charge/discharge assignments. The session indicators
// (v, lambda, a) are functions of the chosen pattern and are derived, not
// enumerated; the peak level choice multiplies the enumeration by |L|.
struct SlotChoice {
    int k, e;
    std::vector<int> charge_vars;     // free x ids
    std::vector<int> discharge_vars;  // free y ids
    int options() const {
        return 1 + static_cast<int>(charge_vars.size() + discharge_vars.size());
    }
};

struct NameInfo {
    char kind = 0;  // 'x','y','u','v','V','l','L','a','A' (upper = discharge side)
    int k = -1, e = -1;
};

NameInfo classify(const std::string& name) {
    NameInfo info;
    auto open = name.find('(');
    if (open == std::string::npos) return info;
    std::string p = name.substr(0, open);
    auto idx = [&](int pos) {
        size_t at = open + 1;
        for (int i = 0; i < pos; ++i) at = name.find(',', at) + 1;
        return std::atoi(name.c_str() + at);
    };
    if (p == "x" || p == "y") {
        info.kind = p[0];
        info.k = idx(1) - 1;
        info.e = idx(3) - 1;
    } else if (p == "u") {
        info.kind = 'u';
    } else if (p == "vc" || p == "vd" || p == "lc" || p == "ld" || p == "ac" || p == "ad") {
        info.kind = p == "vc" ? 'v' : p == "vd" ? 'V' : p == "lc" ? 'l' : p == "ld" ? 'L'
                    : p == "ac" ? 'a' : 'A';
        info.k = idx(0) - 1;
        info.e = idx(1) - 1;
    }
    return info;
}

}  // namespace

OracleResult brute_force_oracle(const ProblemInstance& inst, const EventTimeline& tl,
                                const ScenarioConfig& sc, milp::Solver* solver,
                                int max_free_binaries, int max_cases) {
    Model model = milp::build_model(inst, tl, sc);
    const int E = tl.num_events();
    const int K = static_cast<int>(inst.buses.size());

    // catalogue free binaries
    std::map<std::pair<int, int>, SlotChoice> slots;
    std::vector<int> peak_vars;
    struct Derived {
        char kind;
        int id, k, e;
    };
    std::vector<Derived> derived;
    int free_xy = 0;
    for (int v = 0; v < model.num_vars(); ++v) {
        const auto& d = model.var(v);
        if (d.type != VarType::kBinary || d.lb == d.ub) continue;
        NameInfo info = classify(d.name);
        switch (info.kind) {
            case 'x':
                slots[{info.k, info.e}].k = info.k;
                slots[{info.k, info.e}].e = info.e;
                slots[{info.k, info.e}].charge_vars.push_back(v);
                ++free_xy;
                break;
            case 'y':
                slots[{info.k, info.e}].k = info.k;
                slots[{info.k, info.e}].e = info.e;
                slots[{info.k, info.e}].discharge_vars.push_back(v);
                ++free_xy;
                break;
            case 'u':
                peak_vars.push_back(v);
                break;
            case 'v': case 'V': case 'l': case 'L': case 'a': case 'A':
                derived.push_back({info.kind, v, info.k, info.e});
                break;
            default:
                throw ParameterError("oracle cannot handle free binary " + d.name);
        }
    }
    if (free_xy > max_free_binaries)
        throw ParameterError(strfmt(
            "oracle refused: %d free assignment binaries exceed the limit of %d", free_xy,
            max_free_binaries));

    std::vector<SlotChoice> choice_list;
    for (auto& [key, slot] : slots) choice_list.push_back(slot);
    double combos = peak_vars.empty() ? 1.0 : static_cast<double>(peak_vars.size());
    for (const auto& s : choice_list) combos *= s.options();
    if (combos > static_cast<double>(max_cases) * 50.0)
        throw ParameterError(strfmt("oracle refused: %.0f raw assignments to enumerate", combos));

    // rows whose support is entirely binary can be checked without an LP
    std::vector<const milp::RowDef*> logic_rows;
    for (int r = 0; r < model.num_rows(); ++r) {
        bool all_binary = true;
        for (const auto& [v, c] : model.row(r).terms)
            if (model.var(v).type != VarType::kBinary) {
                all_binary = false;
                break;
            }
        if (all_binary && !model.row(r).terms.empty()) logic_rows.push_back(&model.row(r));
    }

    // assignment buffer over all variables; continuous vars stay 0 (unused by
    // logic rows), fixed binaries take their bound
    std::vector<double> assign(model.num_vars(), 0.0);
    for (int v = 0; v < model.num_vars(); ++v)
        if (model.var(v).type == VarType::kBinary && model.var(v).lb == model.var(v).ub)
            assign[v] = model.var(v).lb;

    // charging[k][e] / discharging[k][e] for the current assignment
    std::vector<std::vector<char>> charging(K, std::vector<char>(E, 0));
    std::vector<std::vector<char>> discharging(K, std::vector<char>(E, 0));

    OracleResult result;
    std::vector<milp::FixedCase> cases;
    auto push_case = [&]() {
        // derive session indicators from the pattern
        for (const auto& d : derived) {
            bool now_c = charging[d.k][d.e];
            bool now_d = discharging[d.k][d.e];
            bool prev_c = d.e > 0 && charging[d.k][d.e - 1];
            bool prev_d = d.e > 0 && discharging[d.k][d.e - 1];
            bool next_c = d.e + 1 < E && charging[d.k][d.e + 1];
            bool next_d = d.e + 1 < E && discharging[d.k][d.e + 1];
            double val = 0.0;
            switch (d.kind) {
                case 'v': val = now_c && prev_c; break;
                case 'V': val = now_d && prev_d; break;
                case 'l': val = now_c && !prev_c; break;
                case 'L': val = now_d && !prev_d; break;
                case 'a': val = d.e + 1 == E ? 1.0 : (now_c && !next_c); break;
                case 'A': val = d.e + 1 == E ? 1.0 : (now_d && !next_d); break;
            }
            assign[d.id] = val;
        }
        for (const auto* row : logic_rows)
            if (model.row_violation(*row, assign) > 1e-9) return;

        milp::FixedCase c;
        c.name = strfmt("a%zu", cases.size());
        for (const auto& s : choice_list) {
            for (int v : s.charge_vars) c.fixes.push_back({v, assign[v]});
            for (int v : s.discharge_vars) c.fixes.push_back({v, assign[v]});
        }
        for (int v : peak_vars) c.fixes.push_back({v, assign[v]});
        for (const auto& d : derived) c.fixes.push_back({d.id, assign[d.id]});
        cases.push_back(std::move(c));
    };

    // depth-first over slots, then over the peak level
    std::function<void(size_t)> walk = [&](size_t depth) {
        if (static_cast<int>(cases.size()) > max_cases)
            throw ParameterError("oracle refused: logically feasible assignments exceed max_cases");
        if (depth == choice_list.size()) {
            ++result.assignments_tried;
            if (peak_vars.empty()) {
                push_case();
            } else {
                for (int lv : peak_vars) {
                    for (int other : peak_vars) assign[other] = 0.0;
                    assign[lv] = 1.0;
                    push_case();
                }
                for (int other : peak_vars) assign[other] = 0.0;
            }
            return;
        }
        const SlotChoice& s = choice_list[depth];
        // idle
        charging[s.k][s.e] = 0;
        discharging[s.k][s.e] = 0;
        walk(depth + 1);
        for (int v : s.charge_vars) {
            assign[v] = 1.0;
            charging[s.k][s.e] = 1;
            walk(depth + 1);
            charging[s.k][s.e] = 0;
            assign[v] = 0.0;
        }
        for (int v : s.discharge_vars) {
            assign[v] = 1.0;
            discharging[s.k][s.e] = 1;
            walk(depth + 1);
            discharging[s.k][s.e] = 0;
            assign[v] = 0.0;
        }
    };
    walk(0);

    if (cases.empty()) {
        result.status = milp::SolveStatus::kInfeasible;
        return result;
    }

    std::unique_ptr<milp::Solver> owned;
    if (!solver) {
        owned = milp::make_solver();
        solver = owned.get();
    }
    milp::SolveLimits lp_limits;
    lp_limits.max_seconds = 120.0;
    lp_limits.rel_gap_frac = 0.0;
    auto solutions = solver->solve_cases(model, cases, lp_limits);
    result.lp_solves = static_cast<int>(solutions.size());

    bool found = false;
    for (const auto& sol : solutions) {
        if (sol.status != milp::SolveStatus::kOptimal &&
            sol.status != milp::SolveStatus::kGapLimit)
            continue;
        if (!found || sol.objective_value < result.objective) {
            found = true;
            result.objective = sol.objective_value;
            result.values = sol.values;
        }
    }
    result.status = found ? milp::SolveStatus::kOptimal : milp::SolveStatus::kInfeasible;
    return result;
}

}  // namespace ebus::experiments
