#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "ebus/solver.hpp"

namespace ebus::milp {

namespace {

bool needs_mangling(const Model& m) {
    for (const auto& v : m.vars())
        if (v.name.size() > 8) return true;
    for (const auto& r : m.rows())
        if (r.name.size() > 8) return true;
    return false;
}

std::string num(double v) {
    if (v == std::floor(v) && std::abs(v) < 1e15) return strfmt("%.1f", v);
    return format_double(v);  // shortest representation that round-trips
}

// One "field 3/4 (+ 5/6)" data line in fixed MPS positions.
void mps_data_line(std::ostream& os, const std::string& f2, const std::string& f3,
                   const std::string& f4) {
    os << "    " << f2;
    for (size_t i = f2.size(); i < 10; ++i) os << ' ';
    os << f3;
    for (size_t i = f3.size(); i < 10; ++i) os << ' ';
    os << f4 << '\n';
}

}  // namespace

void export_mps(const Model& m, const std::filesystem::path& path) {
    const bool mangle = needs_mangling(m);
    auto col_name = [&](int i) {
        return mangle ? strfmt("C%07d", i) : m.var(i).name;
    };
    auto row_name = [&](int i) {
        return mangle ? strfmt("R%07d", i) : m.row(i).name;
    };

    std::ofstream os(path);
    if (!os) throw InputError("cannot write " + path.string());
    os << "NAME          " << m.name << '\n';
    os << "ROWS\n";
    os << " N  COST\n";
    for (int r = 0; r < m.num_rows(); ++r) {
        char s = m.row(r).sense == Sense::kLe ? 'L' : m.row(r).sense == Sense::kGe ? 'G' : 'E';
        os << ' ' << s << "  " << row_name(r) << '\n';
    }

    // column-major coefficient lists
    std::vector<std::vector<std::pair<int, double>>> cols(m.num_vars());
    for (int r = 0; r < m.num_rows(); ++r)
        for (const auto& [v, c] : m.row(r).terms) cols[v].push_back({r, c});

    os << "COLUMNS\n";
    bool in_int = false;
    int marker = 0;
    for (int v = 0; v < m.num_vars(); ++v) {
        bool want_int = m.var(v).type == VarType::kBinary;
        if (want_int != in_int) {
            os << "    MARKER" << strfmt("%04d", marker++)
               << "          'MARKER'                 " << (want_int ? "'INTORG'" : "'INTEND'")
               << '\n';
            in_int = want_int;
        }
        if (m.var(v).obj != 0.0) mps_data_line(os, col_name(v), "COST", num(m.var(v).obj));
        for (const auto& [r, c] : cols[v]) mps_data_line(os, col_name(v), row_name(r), num(c));
        if (m.var(v).obj == 0.0 && cols[v].empty())
            mps_data_line(os, col_name(v), "COST", "0.0");  // keep unused columns declared
    }
    if (in_int)
        os << "    MARKER" << strfmt("%04d", marker++)
           << "          'MARKER'                 'INTEND'\n";

    os << "RHS\n";
    for (int r = 0; r < m.num_rows(); ++r)
        if (m.row(r).rhs != 0.0) mps_data_line(os, "RHS", row_name(r), num(m.row(r).rhs));

    os << "BOUNDS\n";
    auto bound_line = [&](const char* type, int v, const std::string& val) {
        os << ' ' << type << ' ';
        std::string cn = col_name(v);
        os << "BND       " << cn;
        for (size_t i = cn.size(); i < 10; ++i) os << ' ';
        os << val << '\n';
    };
    for (int v = 0; v < m.num_vars(); ++v) {
        const VarDef& d = m.var(v);
        if (d.lb == d.ub) {
            bound_line("FX", v, num(d.lb));
            continue;
        }
        if (d.type == VarType::kBinary && d.lb == 0.0 && d.ub == 1.0) {
            bound_line("BV", v, "");
            continue;
        }
        if (d.lb != 0.0) bound_line("LO", v, num(d.lb));
        if (d.ub != kInf) bound_line("UP", v, num(d.ub));
    }
    os << "ENDATA\n";

    if (mangle) {
        std::ofstream side(path.string() + ".names");
        for (int v = 0; v < m.num_vars(); ++v)
            side << "col\t" << col_name(v) << '\t' << m.var(v).name << '\n';
        for (int r = 0; r < m.num_rows(); ++r)
            side << "row\t" << row_name(r) << '\t' << m.row(r).name << '\n';
    }
}

void export_lp(const Model& m, const std::filesystem::path& path) {
    auto clean = [](std::string s) {
        for (char& c : s)
            if (c == '(' || c == ',' || c == ')') c = '_';
        return s;
    };
    std::ofstream os(path);
    if (!os) throw InputError("cannot write " + path.string());
    os << "\\ " << m.name << "  scenario=" << m.scenario_name
       << "  instance=" << strfmt("%016llx", static_cast<unsigned long long>(m.instance_hash))
       << '\n';
    os << "Minimize\n obj:";
    int on_line = 0;
    for (int v = 0; v < m.num_vars(); ++v) {
        if (m.var(v).obj == 0.0) continue;
        double c = m.var(v).obj;
        os << (c < 0 ? " - " : " + ") << num(std::abs(c)) << ' ' << clean(m.var(v).name);
        if (++on_line % 6 == 0) os << "\n    ";
    }
    if (on_line == 0) os << " 0 " << clean(m.var(0).name);
    os << "\nSubject To\n";
    for (int r = 0; r < m.num_rows(); ++r) {
        const RowDef& row = m.row(r);
        os << ' ' << clean(row.name) << ':';
        if (row.terms.empty()) os << " 0 " << clean(m.var(0).name);
        int n = 0;
        for (const auto& [v, c] : row.terms) {
            os << (c < 0 ? " - " : " + ") << num(std::abs(c)) << ' ' << clean(m.var(v).name);
            if (++n % 6 == 0) os << "\n    ";
        }
        os << (row.sense == Sense::kLe ? " <= " : row.sense == Sense::kGe ? " >= " : " = ")
           << num(row.rhs) << '\n';
    }
    os << "Bounds\n";
    for (int v = 0; v < m.num_vars(); ++v) {
        const VarDef& d = m.var(v);
        if (d.lb == d.ub) {
            os << ' ' << clean(d.name) << " = " << num(d.lb) << '\n';
        } else if (d.ub == kInf) {
            if (d.lb != 0.0) os << ' ' << clean(d.name) << " >= " << num(d.lb) << '\n';
        } else {
            os << ' ' << num(d.lb) << " <= " << clean(d.name) << " <= " << num(d.ub) << '\n';
        }
    }
    os << "Binaries\n";
    int n = 0;
    for (int v = 0; v < m.num_vars(); ++v)
        if (m.var(v).type == VarType::kBinary && m.var(v).lb != m.var(v).ub) {
            os << ' ' << clean(m.var(v).name);
            if (++n % 8 == 0) os << '\n';
        }
    os << "\nEnd\n";
}

void export_model(const Model& m, const std::filesystem::path& base) {
    export_mps(m, base.string() + ".mps");
    export_lp(m, base.string() + ".lp");
}

Model import_mps(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw InputError("cannot read " + path.string());

    std::map<std::string, std::string> restore;  // mangled -> original
    {
        std::ifstream side(path.string() + ".names");
        std::string kind, mangled, original;
        while (side >> kind >> mangled && std::getline(side, original)) {
            size_t p = original.find('\t');
            restore[mangled] = p == std::string::npos ? original : original.substr(p + 1);
        }
    }
    auto name_of = [&](const std::string& s) {
        auto it = restore.find(s);
        return it == restore.end() ? s : it->second;
    };

    Model m;
    struct RowInfo {
        Sense sense;
        double rhs = 0.0;
        std::vector<std::pair<int, double>> terms;
    };
    std::vector<std::string> row_names;
    std::vector<RowInfo> rows;
    std::map<std::string, int> row_index;
    std::map<std::string, int> col_index;
    std::vector<std::pair<double, double>> explicit_bounds;  // tracked separately
    std::vector<bool> saw_bound;

    enum Section { kNone, kRows, kCols, kRhs, kBounds } sec = kNone;
    bool in_int = false;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '*') continue;
        if (line[0] != ' ') {
            std::istringstream hs(line);
            std::string head;
            hs >> head;
            if (head == "NAME") {
                hs >> m.name;
                sec = kNone;
            } else if (head == "ROWS") sec = kRows;
            else if (head == "COLUMNS") sec = kCols;
            else if (head == "RHS") sec = kRhs;
            else if (head == "RANGES") sec = kNone;
            else if (head == "BOUNDS") sec = kBounds;
            else if (head == "ENDATA") break;
            continue;
        }
        std::istringstream ls(line);
        if (sec == kRows) {
            std::string s, name;
            ls >> s >> name;
            if (s == "N") continue;  // objective row
            Sense sense = s == "L" ? Sense::kLe : s == "G" ? Sense::kGe : Sense::kEq;
            row_index[name] = static_cast<int>(rows.size());
            rows.push_back({sense, 0.0, {}});
            row_names.push_back(name);
        } else if (sec == kCols) {
            std::string col, f3, f4;
            ls >> col >> f3 >> f4;
            if (f3 == "'MARKER'") {
                in_int = f4 == "'INTORG'";
                continue;
            }
            if (!col_index.count(col)) {
                col_index[col] = m.add_var(name_of(col),
                                           in_int ? VarType::kBinary : VarType::kContinuous,
                                           in_int ? 0.0 : 0.0, in_int ? 1.0 : kInf);
                explicit_bounds.push_back({0.0, kInf});
                saw_bound.push_back(false);
            }
            int v = col_index[col];
            auto apply = [&](const std::string& rname, const std::string& val) {
                double c = std::strtod(val.c_str(), nullptr);
                if (rname == "COST") {
                    m.add_objective_term(v, c);
                } else {
                    auto it = row_index.find(rname);
                    if (it == row_index.end())
                        throw InputError("MPS references unknown row " + rname);
                    if (c != 0.0) rows[it->second].terms.push_back({v, c});
                }
            };
            if (!f3.empty() && !f4.empty()) apply(f3, f4);
            std::string f5, f6;
            if (ls >> f5 >> f6) apply(f5, f6);
        } else if (sec == kRhs) {
            std::string rhsname, rname, val;
            ls >> rhsname >> rname >> val;
            auto it = row_index.find(rname);
            if (it != row_index.end()) rows[it->second].rhs = std::strtod(val.c_str(), nullptr);
        } else if (sec == kBounds) {
            std::string btype, bnd, col, val;
            ls >> btype >> bnd >> col;
            ls >> val;
            auto it = col_index.find(col);
            if (it == col_index.end()) continue;
            int v = it->second;
            double d = std::strtod(val.c_str(), nullptr);
            auto& [lb, ub] = explicit_bounds[v];
            if (!saw_bound[v] && m.var(v).type == VarType::kBinary) { lb = 0.0; ub = 1.0; }
            if (btype == "FX") lb = ub = d;
            else if (btype == "BV") { lb = 0.0; ub = 1.0; }
            else if (btype == "LO") lb = d;
            else if (btype == "UP") ub = d;
            else if (btype == "PL") ub = kInf;
            else if (btype == "MI") lb = -kInf;
            m.set_bounds(v, lb, ub);
            saw_bound[v] = true;
        }
    }
    for (size_t r = 0; r < rows.size(); ++r)
        m.add_row(name_of(row_names[r]), rows[r].sense, rows[r].rhs, std::move(rows[r].terms));
    return m;
}

}  // namespace ebus::milp
