#include "ebus/defaults.hpp"

namespace ebus::defaults {

const std::vector<double>& hourly_price_eur_per_kwh() {
    static const std::vector<double> v = {
        0.0877, 0.0827, 0.0776, 0.0752, 0.0780, 0.0890, 0.1050, 0.1144,
        0.1116, 0.1015, 0.0919, 0.0855, 0.0771, 0.0724, 0.0762, 0.0843,
        0.0897, 0.1193, 0.1356, 0.1345, 0.1224, 0.1118, 0.1036, 0.0961,
    };
    return v;
}

const std::vector<double>& hourly_solar_w_per_m2() {
    static const std::vector<double> v = {
        0.00,   0.00,   0.00,   0.00,   0.26,   10.20,  53.27,  113.66,
        173.29, 226.68, 267.26, 255.47, 241.97, 249.12, 247.96, 227.26,
        177.09, 129.41, 81.24,  27.62,  0.83,   0.00,   0.00,   0.00,
    };
    return v;
}

TariffProfile tariff() {
    TariffProfile t;
    t.purchase_price_eur_per_kwh = StepProfile::hourly(hourly_price_eur_per_kwh());
    t.sell_margin_frac = kSellMarginBase;
    return t;
}

SolarProfile solar() {
    SolarProfile s;
    s.irradiance_w_per_m2 = StepProfile::hourly(hourly_solar_w_per_m2());
    return s;
}

PeakLadder peak_ladder() {
    PeakLadder l;
    l.levels = {
        {100.0, 13.52},  {200.0, 27.04},  {300.0, 40.56},  {400.0, 54.08},
        {500.0, 67.60},  {600.0, 81.12},  {700.0, 94.64},  {800.0, 108.16},
        {900.0, 121.68}, {1000.0, 135.21},
    };
    l.hard_cap_kw = 1000.0;
    return l;
}

BusSpec bus(const std::string& id) {
    BusSpec b;
    b.id = id;
    b.battery_capacity_kwh = kBatteryCapacityKwh;
    b.soc_min_frac = 0.25;
    b.soc_max_frac = 0.85;
    b.soc_initial_frac = 0.50;
    b.soc_end_frac = 0.50;
    b.cycle_life = kCycleLife;
    b.replacement_cost_eur_per_kwh = kReplacementCost2023;
    b.lifetime_throughput_kwh = 0.0;  // default: cycle_life * capacity
    return b;
}

DepotSpec overnight_depot(const std::string& id) {
    DepotSpec d;
    d.id = id;
    d.is_overnight_depot = true;
    d.ess_capacity_kwh = kEssCapacityKwh;
    d.ess_soc_min_frac = kEssSocMinFrac;
    d.pv_area_m2 = kPvAreaM2;
    for (int n = 1; n <= 3; ++n) d.chargers.push_back({n, 0.92, 150.0, 0.92, 120.0});
    return d;
}

DepotSpec terminal(const std::string& id) {
    DepotSpec d;
    d.id = id;
    for (int n = 1; n <= 2; ++n) d.chargers.push_back({n, 0.92, 300.0, 0.92, 240.0});
    return d;
}

std::vector<DischargeWindow> discharge_windows() {
    return {{7 * 60, 10 * 60}, {18 * 60, 21 * 60}};
}

ScenarioConfig scenario(const std::string& name) {
    ScenarioConfig s;
    s.name = name;
    s.min_session_minutes = kMinSessionMinutes;
    if (name == "basic") {
        return s;
    }
    if (name == "pp_v2g_dc") {
        s.enable_peak_cost = true;
        s.enable_v2g = true;
        s.enable_degradation = true;
        s.discharge_windows = discharge_windows();
        return s;
    }
    if (name == "all") {
        s.enable_peak_cost = true;
        s.enable_v2g = true;
        s.enable_degradation = true;
        s.enable_pv_ess = true;
        s.discharge_windows = discharge_windows();
        return s;
    }
    throw ParameterError("unknown scenario preset: " + name +
                         " (expected basic | pp_v2g_dc | all)");
}

const std::vector<std::pair<int, double>>& battery_cost_by_year() {
    static const std::vector<std::pair<int, double>> v = {
        {2023, 128.47}, {2035, 119.90}, {2040, 101.20}, {2045, 88.00}, {2050, 78.10},
    };
    return v;
}

}  // namespace ebus::defaults
