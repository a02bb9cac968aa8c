#ifndef EBUS_MODEL_HPP
#define EBUS_MODEL_HPP

#include <optional>
#include <string>
#include <vector>

#include "ebus/util.hpp"

namespace ebus {

// All times are minutes from midnight; the horizon is [0, horizon_minutes).
// Energies are kWh, powers kW, prices EUR.

struct BusSpec {
    std::string id;
    double battery_capacity_kwh = 0.0;
    double soc_min_frac = 0.0;
    double soc_max_frac = 1.0;
    double soc_initial_frac = 0.0;
    double soc_end_frac = 0.0;
    double cycle_life = 0.0;
    double replacement_cost_eur_per_kwh = 0.0;
    // Total battery-side energy throughput over the pack's life. 0 means
    // "use the default" cycle_life * battery_capacity_kwh.
    double lifetime_throughput_kwh = 0.0;
    // Parking location for the time before the first trip (and all day for
    // buses without trips). Empty = derive from the first trip / overnight depot.
    std::string home_depot_id;

    double throughput_kwh() const {
        return lifetime_throughput_kwh > 0.0 ? lifetime_throughput_kwh
                                             : cycle_life * battery_capacity_kwh;
    }
    double min_energy_kwh() const { return soc_min_frac * battery_capacity_kwh; }
    double max_energy_kwh() const { return soc_max_frac * battery_capacity_kwh; }
    double initial_energy_kwh() const { return soc_initial_frac * battery_capacity_kwh; }
    double end_energy_kwh() const { return soc_end_frac * battery_capacity_kwh; }
};

struct ChargerSpec {
    int charger_index = 1;  // n, 1-based within its depot
    double charge_efficiency_frac = 1.0;
    double charge_power_kw = 0.0;
    double discharge_efficiency_frac = 1.0;
    double discharge_power_kw = 0.0;
};

struct DepotSpec {
    std::string id;
    std::vector<ChargerSpec> chargers;
    double ess_capacity_kwh = 0.0;  // 0 = no ESS
    double ess_soc_min_frac = 0.0;
    double pv_area_m2 = 0.0;  // 0 = no PV
    bool is_overnight_depot = false;
};

struct Trip {
    std::string id;
    std::string bus_id;
    std::string depart_depot_id;
    std::string arrive_depot_id;
    int depart_minute = 0;
    int arrive_minute = 0;
    double distance_km = 0.0;
    double avg_speed_kmh = 0.0;              // 0 = derive from distance/duration
    double consumption_rate_kwh_per_km = 0.0;  // 0 = derive from speed (energy model)

    int duration_minutes() const { return arrive_minute - depart_minute; }
    double implied_speed_kmh() const {
        int d = duration_minutes();
        return d > 0 ? distance_km / (d / 60.0) : 0.0;
    }
};

// Piecewise-constant profile over the day: segment i covers
// [start_minute[i], start_minute[i+1]), the last segment extends to the horizon.
struct StepProfile {
    std::vector<int> start_minute;  // ascending, first must be 0
    std::vector<double> value;

    double at(int minute) const {
        double v = value.empty() ? 0.0 : value.front();
        for (size_t i = 0; i < start_minute.size(); ++i) {
            if (start_minute[i] <= minute) v = value[i];
            else break;
        }
        return v;
    }
    static StepProfile constant(double v) { return StepProfile{{0}, {v}}; }
    static StepProfile hourly(const std::vector<double>& by_hour) {
        StepProfile p;
        for (size_t h = 0; h < by_hour.size(); ++h) {
            p.start_minute.push_back(static_cast<int>(h) * 60);
            p.value.push_back(by_hour[h]);
        }
        return p;
    }
};

struct TariffProfile {
    StepProfile purchase_price_eur_per_kwh;
    double sell_margin_frac = 0.75;
};

struct SolarProfile {
    StepProfile irradiance_w_per_m2;
};

struct PeakLevel {
    double power_kw = 0.0;
    double daily_price_eur = 0.0;
};

struct PeakLadder {
    std::vector<PeakLevel> levels;  // strictly increasing power
    double hard_cap_kw = 0.0;
};

struct DischargeWindow {
    int start_minute = 0;
    int end_minute = 0;  // [start, end)
};

struct ScenarioConfig {
    std::string name = "custom";
    bool enable_peak_cost = false;
    bool enable_v2g = false;
    bool enable_degradation = false;
    bool enable_pv_ess = false;
    int min_session_minutes = 5;  // tau_m
    std::vector<DischargeWindow> discharge_windows;
    std::optional<double> tariff_margin_frac;  // overrides TariffProfile
    bool single_overnight_connection = true;
    // Reproduce the printed equations exactly (sold energy battery-side,
    // degradation on full-slot power); off = physically consistent accounting.
    bool paper_literal_mode = true;
    double sun_threshold_w_per_m2 = 0.0;  // theta_e = 1 iff irradiance > threshold
};

struct ProblemInstance {
    std::vector<BusSpec> buses;
    std::vector<DepotSpec> depots;
    std::vector<Trip> trips;
    TariffProfile tariff;
    SolarProfile solar;
    PeakLadder peak_ladder;
    int horizon_minutes = 1440;

    int bus_index(const std::string& id) const;    // -1 if unknown
    int depot_index(const std::string& id) const;  // -1 if unknown
    // Trips of bus k, ordered by departure time.
    std::vector<int> trips_of_bus(int k) const;
    // Depot where bus k parks before its first trip (see BusSpec::home_depot_id).
    int home_depot(int k) const;
    uint64_t content_hash() const;
};

struct Violation {
    bool structural = false;  // dangling reference etc., as opposed to a value breach
    std::string subject;      // e.g. "trip T12", "bus EB03"
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
    std::string to_string() const;
};

ValidationReport validate_instance(const ProblemInstance& instance);

}  // namespace ebus

#endif
