#ifndef EBUS_TESTS_HELPERS_HPP
#define EBUS_TESTS_HELPERS_HPP

#include "ebus/model.hpp"

namespace ebus::test {

// 100 kWh pack, SOC band [10%, 90%], start 20%, end-of-day 50%.
inline BusSpec small_bus(const std::string& id = "B1") {
    BusSpec b;
    b.id = id;
    b.battery_capacity_kwh = 100.0;
    b.soc_min_frac = 0.10;
    b.soc_max_frac = 0.90;
    b.soc_initial_frac = 0.20;
    b.soc_end_frac = 0.50;
    b.cycle_life = 1000.0;
    b.replacement_cost_eur_per_kwh = 100.0;
    return b;
}

inline DepotSpec small_depot(const std::string& id, int chargers, double power_kw = 60.0,
                             double eff = 0.9) {
    DepotSpec d;
    d.id = id;
    d.is_overnight_depot = true;
    for (int n = 1; n <= chargers; ++n) d.chargers.push_back({n, eff, power_kw, eff, power_kw});
    return d;
}

inline PeakLadder small_ladder() {
    PeakLadder l;
    l.levels = {{50.0, 5.0}, {100.0, 8.0}, {200.0, 12.0}};
    l.hard_cap_kw = 200.0;
    return l;
}

// One bus parked at a single-charger depot for a 3-slot, 3-hour day with
// prices 0.10 / 0.20 / 0.05. The bus must lift its battery from 20 to 50 kWh.
inline ProblemInstance tiny_instance() {
    ProblemInstance inst;
    inst.horizon_minutes = 180;
    inst.buses = {small_bus()};
    inst.depots = {small_depot("d1", 1)};
    inst.tariff.purchase_price_eur_per_kwh = {{0, 60, 120}, {0.10, 0.20, 0.05}};
    inst.tariff.sell_margin_frac = 0.75;
    inst.solar.irradiance_w_per_m2 = StepProfile::constant(0.0);
    inst.peak_ladder = small_ladder();
    return inst;
}

// Two depots and one trip from d1 to d2 over the middle slot.
inline ProblemInstance tiny_trip_instance() {
    ProblemInstance inst = tiny_instance();
    inst.depots.push_back(small_depot("d2", 1));
    Trip t;
    t.id = "T1";
    t.bus_id = "B1";
    t.depart_depot_id = "d1";
    t.arrive_depot_id = "d2";
    t.depart_minute = 60;
    t.arrive_minute = 120;
    t.distance_km = 10.0;
    t.avg_speed_kmh = 10.0;
    t.consumption_rate_kwh_per_km = 1.0;  // 10 kWh for the trip
    inst.trips.push_back(t);
    return inst;
}

inline ScenarioConfig scenario_basic() {
    ScenarioConfig sc;
    sc.name = "basic";
    return sc;
}

}  // namespace ebus::test

#endif
