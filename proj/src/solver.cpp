#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ebus/solver.hpp"

namespace ebus::milp {

using nlohmann::json;

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::kOptimal: return "optimal";
        case SolveStatus::kGapLimit: return "gap_limit";
        case SolveStatus::kTimeLimit: return "time_limit";
        case SolveStatus::kInfeasible: return "infeasible";
        case SolveStatus::kUnbounded: return "unbounded";
        case SolveStatus::kError: return "error";
    }
    return "error";
}

std::vector<RawSolution> Solver::solve_cases(const Model& model,
                                             const std::vector<FixedCase>& cases,
                                             const SolveLimits& limits) {
    std::vector<RawSolution> out;
    for (const auto& c : cases) {
        Model copy = model;  // bounds-only variations
        for (const auto& [v, val] : c.fixes) copy.fix(v, val);
        out.push_back(solve(copy, limits));
    }
    return out;
}

namespace {

namespace fs = std::filesystem;

struct Workdir {
    fs::path dir;
    bool keep = false;
    explicit Workdir(const std::string& tag) {
        keep = std::getenv("EBUS_KEEP_SOLVER_FILES") != nullptr;
        std::string tmpl = (fs::temp_directory_path() / ("ebus_" + tag + "_XXXXXX")).string();
        std::vector<char> buf(tmpl.begin(), tmpl.end());
        buf.push_back('\0');
        if (!mkdtemp(buf.data())) throw SolverEnvError("cannot create solver working directory");
        dir = buf.data();
    }
    ~Workdir() {
        if (!keep) {
            std::error_code ec;
            fs::remove_all(dir, ec);
        }
    }
};

int run_command(const std::string& cmd) { return std::system(cmd.c_str()); }

bool command_available(const std::string& name) {
    return run_command("command -v " + name + " >/dev/null 2>&1") == 0;
}

void snap_binaries(const Model& m, RawSolution& sol) {
    for (int v = 0; v < m.num_vars(); ++v) {
        if (m.var(v).type != VarType::kBinary) continue;
        auto it = sol.values.find(m.var(v).name);
        if (it == sol.values.end()) continue;
        double r = std::round(it->second);
        if (std::abs(it->second - r) <= kIntegralitySnapTol) it->second = r;
    }
}

// Driver solving a JSON model description with scipy's HiGHS front end.
// Materialized into the working directory at each invocation so the binary is
// self-contained.
const char* kScipyDriver = R"PY(
import json, sys, time

import numpy as np
from scipy import sparse
from scipy.optimize import Bounds, LinearConstraint, milp

INF = np.inf


def as_bound(v, default):
    return default if v is None else float(v)


def main(model_path, out_path):
    with open(model_path) as f:
        m = json.load(f)

    n = len(m["obj"])
    obj = np.asarray(m["obj"], dtype=float)
    lb = np.array([as_bound(v, -INF) for v in m["lb"]], dtype=float)
    ub = np.array([as_bound(v, INF) for v in m["ub"]], dtype=float)
    integrality = np.asarray(m["int"], dtype=np.uint8)

    nrows = len(m["row_lo"])
    row_lo = np.array([as_bound(v, -INF) for v in m["row_lo"]], dtype=float)
    row_hi = np.array([as_bound(v, INF) for v in m["row_hi"]], dtype=float)
    ai = np.asarray(m["ai"], dtype=np.int64)
    aj = np.asarray(m["aj"], dtype=np.int64)
    av = np.asarray(m["av"], dtype=float)
    A = sparse.csc_matrix((av, (ai, aj)), shape=(nrows, n))

    opts = {"presolve": True, "disp": False}
    lim = m.get("limits", {})
    if lim.get("time_limit"):
        opts["time_limit"] = float(lim["time_limit"])
    if lim.get("mip_rel_gap") is not None:
        opts["mip_rel_gap"] = float(lim["mip_rel_gap"])

    cases = m.get("cases") or [{"name": "base", "fix": []}]
    results = []
    for case in cases:
        clb, cub = lb.copy(), ub.copy()
        for idx, val in case.get("fix", []):
            clb[idx] = val
            cub[idx] = val
        t0 = time.time()
        cons = [LinearConstraint(A, row_lo, row_hi)] if nrows else []
        res = milp(obj, constraints=cons, integrality=integrality,
                   bounds=Bounds(clb, cub), options=opts)
        dt = time.time() - t0

        gap = getattr(res, "mip_gap", None)
        bound = getattr(res, "mip_dual_bound", None)
        if res.status == 0:
            status = "gap_limit" if (gap is not None and gap > 1e-9) else "optimal"
        elif res.status == 1:
            status = "time_limit"
        elif res.status == 2:
            status = "infeasible"
        elif res.status == 3:
            status = "unbounded"
        else:
            status = "error"

        out = {
            "name": case.get("name", "base"),
            "status": status,
            "seconds": dt,
            "message": str(res.message),
        }
        if res.x is not None:
            out["objective"] = float(res.fun)
            out["bound"] = float(bound) if bound is not None else float(res.fun)
            out["gap"] = float(gap) if gap is not None else 0.0
            out["x"] = [float(v) for v in res.x]
        results.append(out)

    with open(out_path, "w") as f:
        json.dump({"results": results}, f)


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
)PY";

class ScipySolver : public Solver {
  public:
    explicit ScipySolver(std::string python) : python_(std::move(python)) {}
    std::string describe() const override { return "scipy-highs (" + python_ + ")"; }

    RawSolution solve(const Model& model, const SolveLimits& limits) override {
        return solve_cases(model, {{"base", {}}}, limits).front();
    }

    std::vector<RawSolution> solve_cases(const Model& model, const std::vector<FixedCase>& cases,
                                         const SolveLimits& limits) override {
        Workdir wd("scipy");
        std::ofstream(wd.dir / "driver.py") << kScipyDriver;
        write_model_json(model, cases, limits, wd.dir / "model.json");

        std::string cmd = python_ + " " + (wd.dir / "driver.py").string() + " " +
                          (wd.dir / "model.json").string() + " " +
                          (wd.dir / "result.json").string() + " > " +
                          (wd.dir / "driver.log").string() + " 2>&1";
        int rc = run_command(cmd);
        if (rc != 0 || !fs::exists(wd.dir / "result.json")) {
            std::ifstream log(wd.dir / "driver.log");
            std::stringstream ss;
            ss << log.rdbuf();
            throw SolverEnvError(
                "scipy solver driver failed (set EBUS_SOLVER/EBUS_PYTHON to configure a "
                "solver): " +
                ss.str().substr(0, 500));
        }

        json doc;
        std::ifstream(wd.dir / "result.json") >> doc;
        std::vector<RawSolution> out;
        for (const auto& r : doc["results"]) {
            RawSolution s;
            std::string status = r["status"];
            s.status = status == "optimal"     ? SolveStatus::kOptimal
                       : status == "gap_limit" ? SolveStatus::kGapLimit
                       : status == "time_limit" ? SolveStatus::kTimeLimit
                       : status == "infeasible" ? SolveStatus::kInfeasible
                       : status == "unbounded"  ? SolveStatus::kUnbounded
                                                : SolveStatus::kError;
            s.solve_seconds = r.value("seconds", 0.0);
            s.detail = r.value("message", "");
            if (r.contains("x")) {
                s.objective_value = r["objective"];
                s.best_bound = r["bound"];
                s.achieved_gap_frac = r["gap"];
                const auto& x = r["x"];
                for (int v = 0; v < model.num_vars(); ++v)
                    s.values[model.var(v).name] = x[v].get<double>();
                snap_binaries(model, s);
            }
            out.push_back(std::move(s));
        }
        return out;
    }

  private:
    static void write_model_json(const Model& m, const std::vector<FixedCase>& cases,
                                 const SolveLimits& limits, const fs::path& path) {
        json doc;
        json lb = json::array(), ub = json::array(), integ = json::array(), obj = json::array();
        for (int v = 0; v < m.num_vars(); ++v) {
            const VarDef& d = m.var(v);
            lb.push_back(std::isinf(d.lb) ? json(nullptr) : json(d.lb));
            ub.push_back(std::isinf(d.ub) ? json(nullptr) : json(d.ub));
            integ.push_back(d.type == VarType::kBinary ? 1 : 0);
            obj.push_back(d.obj);
        }
        doc["obj"] = std::move(obj);
        doc["lb"] = std::move(lb);
        doc["ub"] = std::move(ub);
        doc["int"] = std::move(integ);

        json rlo = json::array(), rhi = json::array();
        std::vector<long> ai;
        std::vector<long> aj;
        std::vector<double> av;
        for (int r = 0; r < m.num_rows(); ++r) {
            const RowDef& row = m.row(r);
            switch (row.sense) {
                case Sense::kLe:
                    rlo.push_back(nullptr);
                    rhi.push_back(row.rhs);
                    break;
                case Sense::kGe:
                    rlo.push_back(row.rhs);
                    rhi.push_back(nullptr);
                    break;
                case Sense::kEq:
                    rlo.push_back(row.rhs);
                    rhi.push_back(row.rhs);
                    break;
            }
            for (const auto& [v, c] : row.terms) {
                ai.push_back(r);
                aj.push_back(v);
                av.push_back(c);
            }
        }
        doc["row_lo"] = std::move(rlo);
        doc["row_hi"] = std::move(rhi);
        doc["ai"] = ai;
        doc["aj"] = aj;
        doc["av"] = av;
        doc["limits"] = {{"time_limit", limits.max_seconds}, {"mip_rel_gap", limits.rel_gap_frac}};

        json jcases = json::array();
        for (const auto& c : cases) {
            json fixes = json::array();
            for (const auto& [v, val] : c.fixes) fixes.push_back({v, val});
            jcases.push_back({{"name", c.name}, {"fix", std::move(fixes)}});
        }
        doc["cases"] = std::move(jcases);

        std::ofstream os(path);
        os << doc;
    }

    std::string python_;
};

// Restores canonical names for solutions reported with mangled MPS names.
std::unordered_map<std::string, std::string> mps_name_map(const Model& m) {
    std::unordered_map<std::string, std::string> out;
    bool mangle = false;
    for (const auto& v : m.vars())
        if (v.name.size() > 8) mangle = true;
    for (const auto& r : m.rows())
        if (r.name.size() > 8) mangle = true;
    for (int v = 0; v < m.num_vars(); ++v)
        out[mangle ? strfmt("C%07d", v) : m.var(v).name] = m.var(v).name;
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

// Shared scaffolding for command-line solvers working off MPS files.
class CliSolver : public Solver {
  public:
    explicit CliSolver(std::string binary) : binary_(std::move(binary)) {}

    RawSolution solve(const Model& model, const SolveLimits& limits) override {
        Workdir wd(tag());
        fs::path mps = wd.dir / "model.mps";
        export_mps(model, mps);
        std::string cmd = command(mps, wd.dir, limits) + " > " + (wd.dir / "solver.log").string() +
                          " 2>&1";
        run_command(cmd);
        RawSolution s = parse(wd.dir, model);
        snap_binaries(model, s);
        return s;
    }

  protected:
    virtual std::string tag() const = 0;
    virtual std::string command(const fs::path& mps, const fs::path& dir,
                                const SolveLimits& limits) const = 0;
    virtual RawSolution parse(const fs::path& dir, const Model& model) const = 0;

    std::string binary_;
};

class HighsCliSolver : public CliSolver {
  public:
    using CliSolver::CliSolver;
    std::string describe() const override { return "highs (" + binary_ + ")"; }

  protected:
    std::string tag() const override { return "highs"; }

    std::string command(const fs::path& mps, const fs::path& dir,
                        const SolveLimits& limits) const override {
        std::ofstream opts(dir / "highs.opt");
        opts << "time_limit = " << limits.max_seconds << '\n'
             << "mip_rel_gap = " << limits.rel_gap_frac << '\n';
        return binary_ + " --options_file " + (dir / "highs.opt").string() + " --solution_file " +
               (dir / "highs.sol").string() + " " + mps.string();
    }

    RawSolution parse(const fs::path& dir, const Model& model) const override {
        if (!fs::exists(dir / "highs.sol")) {
            RawSolution s;
            s.detail = "no solution file produced";
            return s;
        }
        return detail::parse_highs_solution(slurp(dir / "highs.sol"), slurp(dir / "solver.log"),
                                            model);
    }
};

class CbcCliSolver : public CliSolver {
  public:
    using CliSolver::CliSolver;
    std::string describe() const override { return "cbc (" + binary_ + ")"; }

  protected:
    std::string tag() const override { return "cbc"; }

    std::string command(const fs::path& mps, const fs::path& dir,
                        const SolveLimits& limits) const override {
        return binary_ + " " + mps.string() +
               strfmt(" -seconds %.0f -ratioGap %g", limits.max_seconds, limits.rel_gap_frac) +
               " -solve -printingOptions all -solution " + (dir / "cbc.sol").string();
    }

    RawSolution parse(const fs::path& dir, const Model& model) const override {
        if (!fs::exists(dir / "cbc.sol")) {
            RawSolution s;
            s.detail = "no solution file produced";
            return s;
        }
        return detail::parse_cbc_solution(slurp(dir / "cbc.sol"), model);
    }
};

}  // namespace

namespace detail {

RawSolution parse_highs_solution(const std::string& sol_text, const std::string& log_text,
                                 const Model& model) {
    RawSolution s;
    auto names = mps_name_map(model);
    std::istringstream sol(sol_text);
    std::string line;
    bool in_cols = false;
    int cols_left = 0;
    while (std::getline(sol, line)) {
        if (line.rfind("Model status", 0) == 0) {
            std::getline(sol, line);
            if (line.find("Optimal") != std::string::npos) s.status = SolveStatus::kOptimal;
            else if (line.find("Infeasible") != std::string::npos)
                s.status = SolveStatus::kInfeasible;
            else if (line.find("Unbounded") != std::string::npos)
                s.status = SolveStatus::kUnbounded;
            else if (line.find("Time limit") != std::string::npos)
                s.status = SolveStatus::kTimeLimit;
            s.detail = line;
        } else if (line.rfind("Objective", 0) == 0) {
            s.objective_value = std::strtod(line.c_str() + 9, nullptr);
            s.best_bound = s.objective_value;
        } else if (line.rfind("# Columns", 0) == 0) {
            cols_left = std::atoi(line.c_str() + 9);
            in_cols = cols_left > 0;
        } else if (in_cols) {
            std::istringstream ls(line);
            std::string name;
            double value;
            if (ls >> name >> value) {
                auto it = names.find(name);
                s.values[it == names.end() ? name : it->second] = value;
            }
            if (--cols_left == 0) in_cols = false;
        }
    }
    // A gap-terminated run reports Optimal in the solution file; the achieved
    // gap and bound only appear in the log.
    std::istringstream log(log_text);
    while (std::getline(log, line)) {
        auto grab = [&](const char* key) -> std::optional<double> {
            if (line.rfind(key, 0) != 0) return std::nullopt;
            return std::strtod(line.c_str() + std::string(key).size(), nullptr);
        };
        if (auto v = grab("  Primal bound")) s.objective_value = *v;
        if (auto v = grab("  Dual bound")) s.best_bound = *v;
        if (line.rfind("  Gap", 0) == 0)
            s.achieved_gap_frac = std::strtod(line.c_str() + 5, nullptr) / 100.0;
    }
    if (s.status == SolveStatus::kOptimal && s.achieved_gap_frac > 1e-9)
        s.status = SolveStatus::kGapLimit;
    return s;
}

RawSolution parse_cbc_solution(const std::string& sol_text, const Model& model) {
    RawSolution s;
    auto names = mps_name_map(model);
    std::istringstream sol(sol_text);
    std::string header;
    std::getline(sol, header);
    s.detail = header;
    if (header.find("Optimal") != std::string::npos) s.status = SolveStatus::kOptimal;
    else if (header.find("Infeasible") != std::string::npos) s.status = SolveStatus::kInfeasible;
    else if (header.find("Unbounded") != std::string::npos) s.status = SolveStatus::kUnbounded;
    else if (header.find("Stopped") != std::string::npos) s.status = SolveStatus::kTimeLimit;
    auto pos = header.find("objective value");
    if (pos != std::string::npos)
        s.objective_value = std::strtod(header.c_str() + pos + 15, nullptr);
    s.best_bound = s.objective_value;
    std::string line;
    while (std::getline(sol, line)) {
        std::istringstream ls(line);
        int idx;
        std::string name;
        double value;
        if (ls >> idx >> name >> value) {
            auto it = names.find(name);
            s.values[it == names.end() ? name : it->second] = value;
        }
    }
    return s;
}

}  // namespace detail

std::unique_ptr<Solver> make_solver(const std::string& selection) {
    std::string sel = selection;
    if (sel.empty()) {
        const char* env = std::getenv("EBUS_SOLVER");
        sel = env ? env : "auto";
    }
    const char* py_env = std::getenv("EBUS_PYTHON");
    std::string python = py_env ? py_env : "python3";

    if (sel == "scipy") return std::make_unique<ScipySolver>(python);
    if (sel == "highs") return std::make_unique<HighsCliSolver>("highs");
    if (sel == "cbc") return std::make_unique<CbcCliSolver>("cbc");
    if (sel.find('/') != std::string::npos) {
        // explicit binary path; classify by basename
        std::string base = fs::path(sel).filename().string();
        if (base.find("highs") != std::string::npos)
            return std::make_unique<HighsCliSolver>(sel);
        if (base.find("cbc") != std::string::npos) return std::make_unique<CbcCliSolver>(sel);
        throw SolverEnvError("EBUS_SOLVER path not recognized (expected highs or cbc): " + sel);
    }
    if (sel == "auto") {
        if (command_available(python)) return std::make_unique<ScipySolver>(python);
        if (command_available("highs")) return std::make_unique<HighsCliSolver>("highs");
        if (command_available("cbc")) return std::make_unique<CbcCliSolver>("cbc");
        throw SolverEnvError(
            "no MIP solver available: install python3+scipy or set EBUS_SOLVER to a highs/cbc "
            "binary");
    }
    throw SolverEnvError("unknown EBUS_SOLVER selection: " + sel);
}

RawSolution solve(const Model& model, const SolveLimits& limits) {
    return make_solver()->solve(model, limits);
}

}  // namespace ebus::milp
