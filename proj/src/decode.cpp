#include <cmath>

#include "ebus/schedule.hpp"

namespace ebus {

namespace {

// Parses up to 4 comma-separated 1-based indices between parentheses.
int parse_indices(const std::string& name, int out[4]) {
    size_t open = name.find('(');
    if (open == std::string::npos || name.back() != ')') return 0;
    int count = 0;
    size_t pos = open + 1;
    while (pos < name.size() - 1 && count < 4) {
        out[count++] = std::atoi(name.c_str() + pos);
        size_t comma = name.find(',', pos);
        if (comma == std::string::npos || comma >= name.size() - 1) break;
        pos = comma + 1;
    }
    return count;
}

}  // namespace

Schedule decode(const ProblemInstance& inst, const EventTimeline& tl, const milp::Model& model,
                const milp::RawSolution& raw) {
    if (!raw.has_values()) throw DecodeError("solution carries no variable values");
    const int K = static_cast<int>(inst.buses.size());
    const int J = static_cast<int>(inst.depots.size());
    const int E = tl.num_events();

    Schedule s;
    s.bus.assign(K, std::vector<BusSlot>(E));
    s.depot.assign(J, std::vector<DepotSlot>(E));
    s.degradation_eur.assign(K, std::vector<double>(E, 0.0));

    for (int k = 0; k < K; ++k)
        for (int e = 0; e < E; ++e)
            if (tl.serving_trip[k][e] >= 0) {
                s.bus[k][e].kind = ActionKind::kTrip;
                s.bus[k][e].trip = tl.serving_trip[k][e];
            }

    // Fractional binaries beyond the snap tolerance are decode errors.
    for (int v = 0; v < model.num_vars(); ++v) {
        if (model.var(v).type != milp::VarType::kBinary) continue;
        auto it = raw.values.find(model.var(v).name);
        if (it == raw.values.end())
            throw DecodeError("solution is missing variable " + model.var(v).name);
        if (std::abs(it->second - std::round(it->second)) > milp::kIntegralitySnapTol)
            throw DecodeError(strfmt("variable %s has fractional value %.9f",
                                     model.var(v).name.c_str(), it->second));
    }

    for (const auto& [name, value] : raw.values) {
        int idx[4] = {0, 0, 0, 0};
        int n = parse_indices(name, idx);
        if (n == 0) continue;
        auto prefix = name.substr(0, name.find('('));

        if (prefix == "x" || prefix == "y") {
            if (value < 0.5) continue;
            int j = idx[0] - 1, k = idx[1] - 1, charger = idx[2] - 1, e = idx[3] - 1;
            BusSlot& slot = s.bus[k][e];
            if (slot.kind != ActionKind::kIdle)
                throw DecodeError("bus " + inst.buses[k].id +
                                  strfmt(" has conflicting activity at event %d", e + 1));
            slot.kind = prefix == "x" ? ActionKind::kCharge : ActionKind::kDischarge;
            slot.depot = j;
            slot.charger = charger;
        } else if (prefix == "dc" || prefix == "dd") {
            if (value <= 0.0) continue;
            int k = idx[1] - 1, e = idx[3] - 1;
            s.bus[k][e].minutes += value;  // one assignment per slot; sums are single terms
        } else if (prefix == "soc") {
            s.bus[idx[0] - 1][idx[1] - 1].soc_kwh = value;
        } else if (prefix == "deg") {
            s.degradation_eur[idx[0] - 1][idx[1] - 1] = value;
        } else if (prefix == "wp") {
            s.depot[idx[0] - 1][idx[1] - 1].grid_buy_kwh = value;
        } else if (prefix == "wm") {
            s.depot[idx[0] - 1][idx[1] - 1].grid_sell_kwh = value;
        } else if (prefix == "mu") {
            s.depot[idx[0] - 1][idx[1] - 1].pv_to_bus_kwh = value;
        } else if (prefix == "pi") {
            s.depot[idx[0] - 1][idx[1] - 1].pv_to_ess_kwh = value;
        } else if (prefix == "z") {
            s.depot[idx[0] - 1][idx[1] - 1].ess_to_bus_kwh = value;
        } else if (prefix == "manc") {
            s.depot[idx[0] - 1][idx[1] - 1].ess_to_grid_kwh = value;
        } else if (prefix == "ess") {
            s.depot[idx[0] - 1][idx[1] - 1].ess_level_kwh = value;
        } else if (prefix == "u") {
            if (value > 0.5) s.peak_level = idx[0] - 1;
        }
    }
    return s;
}

double grid_draw_kw(const Schedule& s, const ProblemInstance& inst, const EventTimeline& tl,
                    int e) {
    double draw = 0.0;
    for (size_t k = 0; k < s.bus.size(); ++k) {
        const BusSlot& b = s.bus[k][e];
        if (b.kind == ActionKind::kCharge) {
            const auto& c = inst.depots[b.depot].chargers[b.charger];
            draw += c.charge_efficiency_frac * c.charge_power_kw;
        }
    }
    double dt = tl.events[e].slot_minutes;
    for (size_t j = 0; j < s.depot.size(); ++j)
        draw -= 60.0 * (s.depot[j][e].pv_to_bus_kwh + s.depot[j][e].ess_to_bus_kwh) / dt;
    return draw;
}

int peak_level_for(const PeakLadder& ladder, double draw_kw) {
    for (size_t l = 0; l < ladder.levels.size(); ++l)
        if (ladder.levels[l].power_kw >= draw_kw - 1e-9) return static_cast<int>(l);
    return static_cast<int>(ladder.levels.size()) - 1;
}

}  // namespace ebus
