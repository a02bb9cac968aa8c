#include "ebus/timeline.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "ebus/energy.hpp"

namespace ebus {

int EventTimeline::event_at_minute(int minute) const {
    auto it = std::lower_bound(events.begin(), events.end(), minute,
                               [](const Event& ev, int m) { return ev.start_minute < m; });
    if (it == events.end() || it->start_minute != minute) return -1;
    return static_cast<int>(it - events.begin());
}

bool EventTimeline::in_discharge_window(int e, const std::vector<DischargeWindow>& windows) const {
    if (windows.empty()) return true;  // no restriction configured
    int lo = events[e].start_minute;
    int hi = lo + events[e].slot_minutes;
    for (const auto& w : windows)
        if (w.start_minute <= lo && hi <= w.end_minute) return true;
    return false;
}

void compute_presence(const ProblemInstance& inst, EventTimeline& tl) {
    const int K = static_cast<int>(inst.buses.size());
    const int J = static_cast<int>(inst.depots.size());
    const int E = tl.num_events();
    tl.parked_depot.assign(K, std::vector<int>(E, -1));
    tl.serving_trip.assign(K, std::vector<int>(E, -1));
    tl.movement.assign(J, std::vector<bool>(E, false));
    tl.last_return_event.assign(K, 1);

    for (int k = 0; k < K; ++k) {
        auto chain = inst.trips_of_bus(k);
        int home = inst.home_depot(k);

        // Stay intervals: [minute_from, minute_to) at a depot.
        struct Stay { int from, to, depot; };
        std::vector<Stay> stays;
        int cursor = 0;
        int cursor_depot = home;
        for (int i : chain) {
            const Trip& t = inst.trips[i];
            stays.push_back({cursor, t.depart_minute, cursor_depot});
            cursor = t.arrive_minute;
            cursor_depot = inst.depot_index(t.arrive_depot_id);
        }
        stays.push_back({cursor, tl.horizon_minutes, cursor_depot});

        for (int e = 0; e < E; ++e) {
            int lo = tl.events[e].start_minute;
            int hi = lo + tl.events[e].slot_minutes;
            for (const auto& s : stays) {
                if (s.depot >= 0 && s.from <= lo && hi <= s.to && s.from < s.to) {
                    tl.parked_depot[k][e] = s.depot;
                    break;
                }
            }
            for (int i : chain) {
                const Trip& t = inst.trips[i];
                if (t.depart_minute <= lo && hi <= t.arrive_minute) {
                    tl.serving_trip[k][e] = i;
                    tl.parked_depot[k][e] = -1;
                    break;
                }
            }
        }

        // Arrivals/departures mark movement at the depot. The initial location
        // counts as an arrival at event 1 so parked buses may start charging
        // at the beginning of the day.
        if (home >= 0) tl.movement[home][0] = true;
        for (int i : chain) {
            const Trip& t = inst.trips[i];
            int ed = tl.event_at_minute(t.depart_minute);
            if (ed >= 0) {
                int j = inst.depot_index(t.depart_depot_id);
                if (j >= 0) tl.movement[j][ed] = true;
            }
            int ea = tl.event_at_minute(t.arrive_minute);
            if (ea >= 0) {
                int j = inst.depot_index(t.arrive_depot_id);
                if (j >= 0) tl.movement[j][ea] = true;
            }
        }

        if (!chain.empty()) {
            int ea = tl.event_at_minute(inst.trips[chain.back()].arrive_minute);
            // An arrival exactly at the horizon has no event of its own; the
            // bus is back only for the (empty) remainder of the day.
            tl.last_return_event[k] = ea >= 0 ? ea + 1 : tl.final_event;
        }
    }
}

std::vector<int> compute_min_slots(const EventTimeline& tl, int tau_minutes,
                                   std::vector<bool>* capped_out) {
    if (tau_minutes <= 0) throw ParameterError("compute_min_slots: tau_m must be > 0 minutes");
    const int E = tl.num_events();
    std::vector<int> v(E, 1);
    std::vector<bool> capped(E, false);
    for (int e = 0; e < E; ++e) {
        int total = 0;
        int q = 0;
        while (e + q < E && total < tau_minutes) {
            total += tl.events[e + q].slot_minutes;
            ++q;
        }
        v[e] = std::max(q, 1);
        capped[e] = total < tau_minutes;  // horizon ran out before tau_m was met
    }
    if (capped_out) *capped_out = capped;
    return v;
}

EventTimeline build_timeline(const ProblemInstance& inst, const ScenarioConfig& scenario) {
    EventTimeline tl;
    tl.horizon_minutes = inst.horizon_minutes;

    // Breakpoint union. Minute 0 always starts the first slot.
    std::map<int, unsigned> marks;
    marks[0] |= 0;
    for (int m : inst.tariff.purchase_price_eur_per_kwh.start_minute)
        if (m < inst.horizon_minutes) marks[m] |= kEventPriceChange;
    for (int m : inst.solar.irradiance_w_per_m2.start_minute)
        if (m < inst.horizon_minutes) marks[m] |= kEventSolarChange;
    for (const auto& t : inst.trips) {
        if (t.depart_minute < 0 || t.arrive_minute > inst.horizon_minutes)
            throw StructuralError("trip " + t.id + " lies outside the scheduling horizon");
        marks[t.depart_minute] |= kEventBusDeparture;
        if (t.arrive_minute < inst.horizon_minutes) marks[t.arrive_minute] |= kEventBusArrival;
    }
    // Discharge-window edges are breakpoints too, so window containment is
    // decidable per slot (registered whenever windows are configured).
    for (const auto& w : scenario.discharge_windows) {
        if (w.start_minute < inst.horizon_minutes && w.start_minute >= 0)
            marks[w.start_minute] |= kEventPriceChange;
        if (w.end_minute < inst.horizon_minutes && w.end_minute >= 0)
            marks[w.end_minute] |= kEventPriceChange;
    }

    int idx = 0;
    for (auto it = marks.begin(); it != marks.end(); ++it) {
        Event ev;
        ev.index = ++idx;
        ev.start_minute = it->first;
        auto next = std::next(it);
        int end = next == marks.end() ? inst.horizon_minutes : next->first;
        ev.slot_minutes = end - ev.start_minute;
        ev.kind_flags = it->second;
        tl.events.push_back(ev);
    }
    if (!tl.events.empty()) tl.events.back().kind_flags |= kEventHorizonEnd;
    tl.final_event = static_cast<int>(tl.events.size());

    compute_presence(inst, tl);
    tl.min_slots = compute_min_slots(tl, scenario.min_session_minutes, &tl.min_slots_capped);

    const int E = tl.num_events();
    const int J = static_cast<int>(inst.depots.size());
    double margin = scenario.tariff_margin_frac.value_or(inst.tariff.sell_margin_frac);
    tl.buy_price.resize(E);
    tl.sell_price.resize(E);
    tl.irradiance.resize(E);
    tl.sun.resize(E);
    tl.pv_yield.assign(J, std::vector<double>(E, 0.0));
    for (int e = 0; e < E; ++e) {
        int m = tl.events[e].start_minute;
        tl.buy_price[e] = inst.tariff.purchase_price_eur_per_kwh.at(m);
        tl.sell_price[e] = energy::sell_price(tl.buy_price[e], margin);
        tl.irradiance[e] = inst.solar.irradiance_w_per_m2.at(m);
        tl.sun[e] = tl.irradiance[e] > scenario.sun_threshold_w_per_m2;
        for (int j = 0; j < J; ++j)
            tl.pv_yield[j][e] = energy::solar_yield(tl.irradiance[e], inst.depots[j].pv_area_m2,
                                                    tl.events[e].slot_minutes);
    }
    return tl;
}

std::string timeline_csv(const EventTimeline& tl) {
    std::ostringstream os;
    os << "event,minute,slot_minutes,kinds\n";
    for (const auto& ev : tl.events) {
        std::string kinds;
        auto add = [&](unsigned bit, const char* name) {
            if (ev.kind_flags & bit) {
                if (!kinds.empty()) kinds += '+';
                kinds += name;
            }
        };
        add(kEventBusArrival, "arrival");
        add(kEventBusDeparture, "departure");
        add(kEventPriceChange, "price");
        add(kEventSolarChange, "solar");
        add(kEventHorizonEnd, "horizon_end");
        os << ev.index << ',' << ev.start_minute << ',' << ev.slot_minutes << ',' << kinds << '\n';
    }
    return os.str();
}

}  // namespace ebus
