#include "ebus/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace ebus {

int ProblemInstance::bus_index(const std::string& id) const {
    for (size_t k = 0; k < buses.size(); ++k)
        if (buses[k].id == id) return static_cast<int>(k);
    return -1;
}

int ProblemInstance::depot_index(const std::string& id) const {
    for (size_t j = 0; j < depots.size(); ++j)
        if (depots[j].id == id) return static_cast<int>(j);
    return -1;
}

std::vector<int> ProblemInstance::trips_of_bus(int k) const {
    std::vector<int> out;
    if (k < 0 || k >= static_cast<int>(buses.size())) return out;
    const std::string& id = buses[k].id;
    for (size_t i = 0; i < trips.size(); ++i)
        if (trips[i].bus_id == id) out.push_back(static_cast<int>(i));
    std::sort(out.begin(), out.end(), [&](int a, int b) {
        return trips[a].depart_minute < trips[b].depart_minute;
    });
    return out;
}

int ProblemInstance::home_depot(int k) const {
    if (k < 0 || k >= static_cast<int>(buses.size())) return -1;
    if (!buses[k].home_depot_id.empty()) return depot_index(buses[k].home_depot_id);
    auto tr = trips_of_bus(k);
    if (!tr.empty()) return depot_index(trips[tr.front()].depart_depot_id);
    for (size_t j = 0; j < depots.size(); ++j)
        if (depots[j].is_overnight_depot) return static_cast<int>(j);
    return depots.empty() ? -1 : 0;
}

uint64_t ProblemInstance::content_hash() const {
    std::ostringstream os;
    auto num = [&](double v) { os << format_double(v) << '|'; };
    for (const auto& b : buses) {
        os << b.id << '|' << b.home_depot_id << '|';
        num(b.battery_capacity_kwh);
        num(b.soc_min_frac);
        num(b.soc_max_frac);
        num(b.soc_initial_frac);
        num(b.soc_end_frac);
        num(b.cycle_life);
        num(b.replacement_cost_eur_per_kwh);
        num(b.lifetime_throughput_kwh);
    }
    for (const auto& d : depots) {
        os << d.id << '|' << d.is_overnight_depot << '|';
        num(d.ess_capacity_kwh);
        num(d.ess_soc_min_frac);
        num(d.pv_area_m2);
        for (const auto& c : d.chargers) {
            os << c.charger_index << '|';
            num(c.charge_efficiency_frac);
            num(c.charge_power_kw);
            num(c.discharge_efficiency_frac);
            num(c.discharge_power_kw);
        }
    }
    for (const auto& t : trips) {
        os << t.id << '|' << t.bus_id << '|' << t.depart_depot_id << '|' << t.arrive_depot_id
           << '|' << t.depart_minute << '|' << t.arrive_minute << '|';
        num(t.distance_km);
        num(t.avg_speed_kmh);
        num(t.consumption_rate_kwh_per_km);
    }
    for (size_t i = 0; i < tariff.purchase_price_eur_per_kwh.start_minute.size(); ++i) {
        os << tariff.purchase_price_eur_per_kwh.start_minute[i] << '|';
        num(tariff.purchase_price_eur_per_kwh.value[i]);
    }
    num(tariff.sell_margin_frac);
    for (size_t i = 0; i < solar.irradiance_w_per_m2.start_minute.size(); ++i) {
        os << solar.irradiance_w_per_m2.start_minute[i] << '|';
        num(solar.irradiance_w_per_m2.value[i]);
    }
    for (const auto& l : peak_ladder.levels) {
        num(l.power_kw);
        num(l.daily_price_eur);
    }
    num(peak_ladder.hard_cap_kw);
    os << horizon_minutes;
    return fnv1a(os.str());
}

std::string ValidationReport::to_string() const {
    std::ostringstream os;
    for (const auto& v : violations)
        os << (v.structural ? "structural" : "invariant") << " [" << v.subject << "] "
           << v.message << '\n';
    return os.str();
}

namespace {

void check_profile(const StepProfile& p, const char* what, int horizon, bool positive,
                   std::vector<Violation>& out) {
    if (p.start_minute.size() != p.value.size()) {
        out.push_back({true, what, "segment starts and values differ in length"});
        return;
    }
    if (p.start_minute.empty()) {
        out.push_back({true, what, "profile has no segments"});
        return;
    }
    if (p.start_minute.front() != 0)
        out.push_back({false, what, "first segment must start at minute 0"});
    for (size_t i = 1; i < p.start_minute.size(); ++i)
        if (p.start_minute[i] <= p.start_minute[i - 1])
            out.push_back({false, what, "segment starts must be strictly increasing"});
    if (!p.start_minute.empty() && p.start_minute.back() >= horizon)
        out.push_back({false, what, "segment starts at or beyond the horizon"});
    for (double v : p.value) {
        if (positive && v <= 0.0)
            out.push_back({false, what, strfmt("value %s must be > 0", format_double(v).c_str())});
        if (!positive && v < 0.0)
            out.push_back({false, what, strfmt("value %s must be >= 0", format_double(v).c_str())});
    }
}

}  // namespace

ValidationReport validate_instance(const ProblemInstance& inst) {
    ValidationReport rep;
    auto& out = rep.violations;

    std::set<std::string> bus_ids, depot_ids, trip_ids;
    for (const auto& b : inst.buses) {
        std::string subj = "bus " + b.id;
        if (b.id.empty()) out.push_back({true, "bus", "empty bus id"});
        if (!bus_ids.insert(b.id).second) out.push_back({true, subj, "duplicate bus id"});
        if (b.battery_capacity_kwh <= 0.0)
            out.push_back({false, subj, "battery_capacity_kwh must be > 0"});
        if (!(0.0 <= b.soc_min_frac && b.soc_min_frac < b.soc_max_frac && b.soc_max_frac <= 1.0))
            out.push_back({false, subj, "requires 0 <= soc_min < soc_max <= 1"});
        if (!(b.soc_min_frac <= b.soc_initial_frac && b.soc_initial_frac <= b.soc_max_frac))
            out.push_back({false, subj, "soc_initial_frac outside [soc_min, soc_max]"});
        if (!(b.soc_min_frac <= b.soc_end_frac && b.soc_end_frac <= b.soc_max_frac))
            out.push_back({false, subj, "soc_end_frac outside [soc_min, soc_max]"});
        if (b.throughput_kwh() <= 0.0)
            out.push_back({false, subj, "lifetime throughput must be > 0 (set cycle_life or lifetime_throughput_kwh)"});
        if (!b.home_depot_id.empty() && inst.depot_index(b.home_depot_id) < 0)
            out.push_back({true, subj, "home_depot_id references unknown depot " + b.home_depot_id});
    }

    for (const auto& d : inst.depots) {
        std::string subj = "depot " + d.id;
        if (d.id.empty()) out.push_back({true, "depot", "empty depot id"});
        if (!depot_ids.insert(d.id).second) out.push_back({true, subj, "duplicate depot id"});
        if (!(0.0 <= d.ess_soc_min_frac && d.ess_soc_min_frac <= 1.0))
            out.push_back({false, subj, "ess_soc_min_frac outside [0,1]"});
        if (d.ess_capacity_kwh < 0.0) out.push_back({false, subj, "ess_capacity_kwh must be >= 0"});
        if (d.pv_area_m2 < 0.0) out.push_back({false, subj, "pv_area_m2 must be >= 0"});
        std::set<int> seen_n;
        for (const auto& c : d.chargers) {
            std::string csubj = strfmt("depot %s charger %d", d.id.c_str(), c.charger_index);
            if (!seen_n.insert(c.charger_index).second)
                out.push_back({true, csubj, "duplicate charger index"});
            if (!(c.charge_efficiency_frac > 0.0 && c.charge_efficiency_frac <= 1.0))
                out.push_back({false, csubj, "charge efficiency outside (0,1]"});
            if (!(c.discharge_efficiency_frac > 0.0 && c.discharge_efficiency_frac <= 1.0))
                out.push_back({false, csubj, "discharge efficiency outside (0,1]"});
            if (c.charge_power_kw <= 0.0) out.push_back({false, csubj, "charge power must be > 0"});
            if (c.discharge_power_kw <= 0.0)
                out.push_back({false, csubj, "discharge power must be > 0"});
        }
    }

    for (const auto& t : inst.trips) {
        std::string subj = "trip " + t.id;
        if (t.id.empty()) out.push_back({true, "trip", "empty trip id"});
        if (!trip_ids.insert(t.id).second) out.push_back({true, subj, "duplicate trip id"});
        if (inst.bus_index(t.bus_id) < 0)
            out.push_back({true, subj, "references unknown bus " + t.bus_id});
        if (inst.depot_index(t.depart_depot_id) < 0)
            out.push_back({true, subj, "references unknown depot " + t.depart_depot_id});
        if (inst.depot_index(t.arrive_depot_id) < 0)
            out.push_back({true, subj, "references unknown depot " + t.arrive_depot_id});
        if (t.arrive_minute <= t.depart_minute)
            out.push_back({false, subj, "arrive_minute must be after depart_minute"});
        if (t.distance_km < 0.0) out.push_back({false, subj, "distance_km must be >= 0"});
        if (t.consumption_rate_kwh_per_km < 0.0)
            out.push_back({false, subj, "consumption rate must be >= 0"});
        // Declared average speed must match distance/duration within 5%, unless the
        // consumption rate is given explicitly (then the speed is informational only).
        if (t.avg_speed_kmh > 0.0 && t.arrive_minute > t.depart_minute &&
            t.consumption_rate_kwh_per_km == 0.0) {
            double implied = t.implied_speed_kmh();
            if (implied > 0.0 && std::abs(t.avg_speed_kmh - implied) > 0.05 * implied)
                out.push_back({false, subj,
                               strfmt("avg_speed_kmh %s inconsistent with distance/duration (%s km/h)",
                                      format_double(t.avg_speed_kmh).c_str(),
                                      format_double(implied).c_str())});
        }
        if (t.avg_speed_kmh == 0.0 && t.consumption_rate_kwh_per_km == 0.0 && t.distance_km > 0.0 &&
            t.duration_minutes() <= 0)
            out.push_back({false, subj, "cannot derive speed: non-positive duration"});
    }

    // Per-bus trip chains: time-ordered, non-overlapping, arrive depot of each
    // trip equals the depart depot of the next.
    for (size_t k = 0; k < inst.buses.size(); ++k) {
        auto chain = inst.trips_of_bus(static_cast<int>(k));
        for (size_t c = 0; c + 1 < chain.size(); ++c) {
            const Trip& a = inst.trips[chain[c]];
            const Trip& b = inst.trips[chain[c + 1]];
            std::string subj = "bus " + inst.buses[k].id;
            if (a.arrive_minute > b.depart_minute)
                out.push_back({false, subj,
                               strfmt("trips %s and %s overlap in time", a.id.c_str(), b.id.c_str())});
            if (a.arrive_depot_id != b.depart_depot_id)
                out.push_back({false, subj,
                               strfmt("trip %s arrives at %s but trip %s departs from %s",
                                      a.id.c_str(), a.arrive_depot_id.c_str(), b.id.c_str(),
                                      b.depart_depot_id.c_str())});
        }
        if (!chain.empty() && !inst.buses[k].home_depot_id.empty() &&
            inst.buses[k].home_depot_id != inst.trips[chain.front()].depart_depot_id)
            out.push_back({false, "bus " + inst.buses[k].id,
                           "home_depot_id differs from first trip's departure depot"});
    }

    check_profile(inst.tariff.purchase_price_eur_per_kwh, "tariff", inst.horizon_minutes, true, out);
    if (inst.tariff.sell_margin_frac < 0.0)
        out.push_back({false, "tariff", "sell_margin_frac must be >= 0"});
    check_profile(inst.solar.irradiance_w_per_m2, "solar", inst.horizon_minutes, false, out);

    const auto& ladder = inst.peak_ladder;
    for (size_t l = 1; l < ladder.levels.size(); ++l) {
        if (ladder.levels[l].power_kw <= ladder.levels[l - 1].power_kw)
            out.push_back({false, "peak_ladder", "level powers must be strictly increasing"});
        if (ladder.levels[l].daily_price_eur < ladder.levels[l - 1].daily_price_eur)
            out.push_back({false, "peak_ladder", "level prices must be non-decreasing"});
    }
    if (!ladder.levels.empty() && ladder.levels.back().power_kw > ladder.hard_cap_kw)
        out.push_back({false, "peak_ladder", "largest level exceeds hard_cap_kw"});

    if (inst.horizon_minutes <= 0)
        out.push_back({false, "instance", "horizon_minutes must be > 0"});

    return rep;
}

}  // namespace ebus
