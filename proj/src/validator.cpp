#include <cmath>

#include "ebus/energy.hpp"
#include "ebus/schedule.hpp"

// Re-derivation of every enabled constraint family from the decoded schedule.
// Deliberately shares no code with the model builder: quantities are
// recomputed here from the schedule's actions and the instance parameters.

namespace ebus {

namespace {

constexpr double kTol = 1e-6;

struct Checker {
    const ProblemInstance& inst;
    const EventTimeline& tl;
    const ScenarioConfig& sc;
    const Schedule& s;
    std::vector<Violation> out;

    int K, J, E;

    void flag(const std::string& subject, const std::string& msg) {
        out.push_back({false, subject, msg});
    }

    const ChargerSpec& charger(const BusSlot& b) const {
        return inst.depots[b.depot].chargers[b.charger];
    }
    double slot_min(int e) const { return tl.events[e].slot_minutes; }

    bool connected(const BusSlot& b) const {
        return b.kind == ActionKind::kCharge || b.kind == ActionKind::kDischarge;
    }
    // battery-side energy charged in the slot
    double charged_kwh(const BusSlot& b) const {
        if (b.kind != ActionKind::kCharge) return 0.0;
        const auto& c = charger(b);
        return b.minutes / 60.0 * c.charge_efficiency_frac * c.charge_power_kw;
    }
    // battery-side energy discharged in the slot
    double discharged_battery_kwh(const BusSlot& b) const {
        if (b.kind != ActionKind::kDischarge) return 0.0;
        const auto& c = charger(b);
        return b.minutes / 60.0 * c.discharge_power_kw / c.discharge_efficiency_frac;
    }
    // energy credited as sold (mode dependent)
    double sold_kwh(const BusSlot& b) const {
        if (b.kind != ActionKind::kDischarge) return 0.0;
        const auto& c = charger(b);
        double grid_side = b.minutes / 60.0 * c.discharge_power_kw;
        return sc.paper_literal_mode ? grid_side / c.discharge_efficiency_frac : grid_side;
    }
    double trip_drain_kwh(int k, int e) const {
        int i = tl.serving_trip[k][e];
        if (i < 0) return 0.0;
        const Trip& t = inst.trips[i];
        return energy::trip_consumption_rate(t) * energy::trip_speed_kmh(t) * slot_min(e) / 60.0;
    }
    // session-start flags derived from the action pattern (charging at e but
    // not during the previous slot)
    bool starts(ActionKind kind, int k, int e) const {
        if (s.bus[k][e].kind != kind) return false;
        return e == 0 || s.bus[k][e - 1].kind != kind;
    }

    void check_actions();
    void check_capacity();
    void check_soc();
    void check_depot_balance();
    void check_ess();
    void check_degradation();
    void check_sessions();
    void check_peak();
};

void Checker::check_actions() {
    for (int k = 0; k < K; ++k) {
        const std::string bus_id = "bus " + inst.buses[k].id;
        for (int e = 0; e < E; ++e) {
            const BusSlot& b = s.bus[k][e];
            int trip = tl.serving_trip[k][e];
            if (trip >= 0 && b.kind != ActionKind::kTrip)
                flag(bus_id, strfmt("event %d: must be serving trip %s", e + 1,
                                    inst.trips[trip].id.c_str()));
            if (trip < 0 && b.kind == ActionKind::kTrip)
                flag(bus_id, strfmt("event %d: marked on a trip but none is scheduled", e + 1));
            if (connected(b)) {
                if (tl.parked_depot[k][e] != b.depot)
                    flag(bus_id, strfmt("event %d: connected at depot %d but parked at %d",
                                        e + 1, b.depot + 1, tl.parked_depot[k][e] + 1));
                else if (b.charger < 0 ||
                         b.charger >= static_cast<int>(inst.depots[b.depot].chargers.size()))
                    flag(bus_id, strfmt("event %d: charger index out of range", e + 1));
                if (b.minutes < 1.0 - kTol || b.minutes > slot_min(e) + kTol)
                    flag(bus_id, strfmt("event %d: connection of %.6f min outside [1, %d]", e + 1,
                                        b.minutes, tl.events[e].slot_minutes));
            } else if (b.minutes > kTol) {
                flag(bus_id, strfmt("event %d: idle slot reports %.6f connected minutes", e + 1,
                                    b.minutes));
            }
            if (b.kind == ActionKind::kDischarge) {
                if (!sc.enable_v2g)
                    flag(bus_id, strfmt("event %d: discharging while V2G is disabled", e + 1));
                else if (!tl.in_discharge_window(e, sc.discharge_windows))
                    flag(bus_id, strfmt("event %d: discharging outside the allowed windows", e + 1));
            }
        }
    }
}

void Checker::check_capacity() {
    for (int j = 0; j < J; ++j) {
        int N = static_cast<int>(inst.depots[j].chargers.size());
        for (int e = 0; e < E; ++e) {
            std::vector<int> users(N, 0);
            int active = 0;
            for (int k = 0; k < K; ++k) {
                const BusSlot& b = s.bus[k][e];
                if (connected(b) && b.depot == j) {
                    ++active;
                    if (b.charger >= 0 && b.charger < N) ++users[b.charger];
                }
            }
            for (int n = 0; n < N; ++n)
                if (users[n] > 1)
                    flag(strfmt("depot %s charger %d", inst.depots[j].id.c_str(), n + 1),
                         strfmt("event %d: %d buses on one charger", e + 1, users[n]));
            if (active > N)
                flag("depot " + inst.depots[j].id,
                     strfmt("event %d: %d buses active but only %d chargers", e + 1, active, N));
        }
    }
}

void Checker::check_soc() {
    for (int k = 0; k < K; ++k) {
        const BusSpec& bus = inst.buses[k];
        const std::string subj = "bus " + bus.id;
        if (std::abs(s.bus[k][0].soc_kwh - bus.initial_energy_kwh()) > kTol)
            flag(subj, strfmt("initial energy %.6f differs from %.6f", s.bus[k][0].soc_kwh,
                              bus.initial_energy_kwh()));
        if (s.bus[k][E - 1].soc_kwh < bus.end_energy_kwh() - kTol)
            flag(subj, strfmt("end-of-day energy %.6f below required %.6f",
                              s.bus[k][E - 1].soc_kwh, bus.end_energy_kwh()));
        for (int e = 0; e < E; ++e) {
            double soc = s.bus[k][e].soc_kwh;
            if (soc < bus.min_energy_kwh() - kTol || soc > bus.max_energy_kwh() + kTol)
                flag(subj, strfmt("event %d: energy %.6f outside [%.3f, %.3f]", e + 1, soc,
                                  bus.min_energy_kwh(), bus.max_energy_kwh()));
            if (e + 1 < E) {
                double expect = soc - trip_drain_kwh(k, e) + charged_kwh(s.bus[k][e]) -
                                discharged_battery_kwh(s.bus[k][e]);
                if (std::abs(expect - s.bus[k][e + 1].soc_kwh) > kTol)
                    flag(subj, strfmt("event %d: energy recursion off by %.8f", e + 1,
                                      s.bus[k][e + 1].soc_kwh - expect));
            }
        }
    }
}

void Checker::check_depot_balance() {
    for (int j = 0; j < J; ++j) {
        const std::string subj = "depot " + inst.depots[j].id;
        for (int e = 0; e < E; ++e) {
            const DepotSlot& d = s.depot[j][e];
            double charged = 0.0, sold = 0.0;
            for (int k = 0; k < K; ++k)
                if (connected(s.bus[k][e]) && s.bus[k][e].depot == j) {
                    charged += charged_kwh(s.bus[k][e]);
                    sold += sold_kwh(s.bus[k][e]);
                }
            if (std::abs(charged - (d.grid_buy_kwh + d.pv_to_bus_kwh + d.ess_to_bus_kwh)) > kTol)
                flag(subj, strfmt("event %d: purchase balance off by %.8f", e + 1,
                                  charged - d.grid_buy_kwh - d.pv_to_bus_kwh - d.ess_to_bus_kwh));
            if (std::abs(sold + d.ess_to_grid_kwh - d.grid_sell_kwh) > kTol)
                flag(subj, strfmt("event %d: sale balance off by %.8f", e + 1,
                                  sold + d.ess_to_grid_kwh - d.grid_sell_kwh));
            for (double v : {d.grid_buy_kwh, d.grid_sell_kwh, d.pv_to_bus_kwh, d.pv_to_ess_kwh,
                             d.ess_to_bus_kwh, d.ess_to_grid_kwh})
                if (v < -kTol) flag(subj, strfmt("event %d: negative energy flow", e + 1));

            if (!sc.enable_pv_ess &&
                (d.pv_to_bus_kwh > kTol || d.pv_to_ess_kwh > kTol || d.ess_to_bus_kwh > kTol ||
                 d.ess_to_grid_kwh > kTol))
                flag(subj, strfmt("event %d: PV/ESS flows present but disabled", e + 1));
            if (sc.enable_pv_ess) {
                double q = tl.pv_yield[j][e];
                if (d.pv_to_bus_kwh > q + kTol)
                    flag(subj, strfmt("event %d: PV-to-bus exceeds yield", e + 1));
                if (d.pv_to_bus_kwh + d.pv_to_ess_kwh > q + kTol)
                    flag(subj, strfmt("event %d: PV use plus storage exceeds yield", e + 1));
                if (d.pv_to_bus_kwh > charged + kTol)
                    flag(subj, strfmt("event %d: PV-to-bus exceeds charging demand", e + 1));
                if (tl.sun[e] && d.ess_to_bus_kwh > kTol)
                    flag(subj, strfmt("event %d: ESS feeds buses while the sun is up", e + 1));
                if (!tl.sun[e] && d.ess_to_bus_kwh > charged + kTol)
                    flag(subj, strfmt("event %d: ESS-to-bus exceeds charging demand", e + 1));
            }
        }
    }
}

void Checker::check_ess() {
    if (!sc.enable_pv_ess) return;
    for (int j = 0; j < J; ++j) {
        const DepotSpec& depot = inst.depots[j];
        const std::string subj = "depot " + depot.id;
        double cap = depot.ess_capacity_kwh;
        if (cap <= 0.0) {
            for (int e = 0; e < E; ++e) {
                const DepotSlot& d = s.depot[j][e];
                if (d.pv_to_ess_kwh > kTol || d.ess_to_bus_kwh > kTol || d.ess_to_grid_kwh > kTol)
                    flag(subj, strfmt("event %d: ESS flows at a depot without storage", e + 1));
            }
            continue;
        }
        double floor = depot.ess_soc_min_frac * cap;
        if (std::abs(s.depot[j][0].ess_level_kwh - floor) > kTol)
            flag(subj, "initial ESS level differs from its floor");
        if (s.depot[j][E - 1].ess_level_kwh < floor - kTol)
            flag(subj, "final ESS level below its floor");
        if (s.depot[j][E - 1].ess_to_grid_kwh > kTol)
            flag(subj, "ESS exports during the final slot");
        for (int e = 0; e < E; ++e) {
            const DepotSlot& d = s.depot[j][e];
            if (d.ess_level_kwh < floor - kTol || d.ess_level_kwh > cap + kTol)
                flag(subj, strfmt("event %d: ESS level %.6f outside [%.3f, %.3f]", e + 1,
                                  d.ess_level_kwh, floor, cap));
            if (d.ess_to_grid_kwh > cap + kTol)
                flag(subj, strfmt("event %d: ESS export exceeds capacity", e + 1));
            if (e + 1 < E) {
                double in = tl.sun[e] ? d.pv_to_ess_kwh : 0.0;
                double draw = tl.sun[e] ? 0.0 : d.ess_to_bus_kwh;
                double expect = d.ess_level_kwh + in - draw - d.ess_to_grid_kwh;
                if (std::abs(expect - s.depot[j][e + 1].ess_level_kwh) > kTol)
                    flag(subj, strfmt("event %d: ESS recursion off by %.8f", e + 1,
                                      s.depot[j][e + 1].ess_level_kwh - expect));
            }
        }
    }
}

void Checker::check_degradation() {
    for (int k = 0; k < K; ++k) {
        const std::string subj = "bus " + inst.buses[k].id;
        double coeff = energy::degradation_coefficient(inst.buses[k]);
        for (int e = 0; e < E; ++e) {
            double expect = 0.0;
            if (sc.enable_degradation) {
                const BusSlot& b = s.bus[k][e];
                if (b.kind == ActionKind::kDischarge) {
                    expect = sc.paper_literal_mode
                                 ? coeff * charger(b).discharge_power_kw * slot_min(e) / 60.0
                                 : coeff * discharged_battery_kwh(b);
                }
            }
            if (std::abs(s.degradation_eur[k][e] - expect) > kTol)
                flag(subj, strfmt("event %d: degradation cost %.8f, expected %.8f", e + 1,
                                  s.degradation_eur[k][e], expect));
        }
    }
}

void Checker::check_sessions() {
    for (int k = 0; k < K; ++k) {
        const std::string subj = "bus " + inst.buses[k].id;
        for (auto kind : {ActionKind::kCharge, ActionKind::kDischarge}) {
            const char* what = kind == ActionKind::kCharge ? "charging" : "discharging";
            int overnight_starts = 0;
            for (int e = 0; e < E; ++e) {
                if (!starts(kind, k, e)) continue;

                // minimum commitment: V_e consecutive connected slots with at
                // least tau_m total minutes
                int V = tl.min_slots[e];
                double total_min = 0.0;
                int connected_slots = 0;
                for (int e2 = e; e2 < std::min(E, e + V); ++e2)
                    if (s.bus[k][e2].kind == kind) {
                        ++connected_slots;
                        total_min += s.bus[k][e2].minutes;
                    }
                if (connected_slots < V)
                    flag(subj, strfmt("event %d: %s session covers %d of %d required slots",
                                      e + 1, what, connected_slots, V));
                if (total_min < sc.min_session_minutes - kTol)
                    flag(subj, strfmt("event %d: %s session lasts %.4f of %d required minutes",
                                      e + 1, what, total_min, sc.min_session_minutes));

                // a start needs an arrival/departure at the depot
                int j = s.bus[k][e].depot;
                if (j >= 0 && !tl.movement[j][e])
                    flag(subj, strfmt("event %d: %s starts without bus movement at the depot",
                                      e + 1, what));

                if (kind == ActionKind::kCharge && e + 1 >= tl.last_return_event[k])
                    ++overnight_starts;
            }
            if (kind == ActionKind::kCharge && sc.single_overnight_connection &&
                overnight_starts > 1)
                flag(subj, strfmt("%d charging connections after the last trip", overnight_starts));

            // same charger for the whole session
            for (int e = 0; e + 1 < E; ++e) {
                const BusSlot& a = s.bus[k][e];
                const BusSlot& b = s.bus[k][e + 1];
                if (a.kind == kind && b.kind == kind &&
                    (a.depot != b.depot || a.charger != b.charger))
                    flag(subj, strfmt("event %d: %s hops chargers mid-session", e + 1, what));
            }
        }
    }
}

void Checker::check_peak() {
    double cap = inst.peak_ladder.hard_cap_kw;
    for (int e = 0; e < E; ++e) {
        // hard cap applies to charger power net of V2G feed-in
        double power = 0.0;
        for (int k = 0; k < K; ++k) {
            const BusSlot& b = s.bus[k][e];
            if (b.kind == ActionKind::kCharge)
                power += charger(b).charge_efficiency_frac * charger(b).charge_power_kw;
            if (b.kind == ActionKind::kDischarge)
                power -= charger(b).discharge_power_kw / charger(b).discharge_efficiency_frac;
        }
        if (power > cap + kTol)
            flag("grid", strfmt("event %d: net power %.3f exceeds the %.0f kW cap", e + 1, power,
                                cap));
        if (sc.enable_peak_cost) {
            if (s.peak_level < 0 ||
                s.peak_level >= static_cast<int>(inst.peak_ladder.levels.size())) {
                flag("grid", "no peak level selected");
            } else {
                double draw = grid_draw_kw(s, inst, tl, e);
                double level_kw = inst.peak_ladder.levels[s.peak_level].power_kw;
                if (draw > level_kw + kTol)
                    flag("grid", strfmt("event %d: draw %.3f exceeds the paid level %.0f kW",
                                        e + 1, draw, level_kw));
            }
        }
    }
}

}  // namespace

std::vector<Violation> validate_schedule(const ProblemInstance& inst, const EventTimeline& tl,
                                         const ScenarioConfig& sc, const Schedule& s) {
    Checker c{inst, tl, sc, s, {},
              static_cast<int>(inst.buses.size()), static_cast<int>(inst.depots.size()),
              tl.num_events()};
    c.check_actions();
    c.check_capacity();
    c.check_soc();
    c.check_depot_balance();
    c.check_ess();
    c.check_degradation();
    c.check_sessions();
    c.check_peak();
    return std::move(c.out);
}

}  // namespace ebus
