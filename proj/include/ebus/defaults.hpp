#ifndef EBUS_DEFAULTS_HPP
#define EBUS_DEFAULTS_HPP

#include "ebus/model.hpp"

// Bundled Brussels case-study parameter set: eCitaro fleet characteristics,
// Marly depot / line-terminal charger park, 2023 average hourly day-ahead
// prices and solar radiation, and the medium-voltage peak power ladder.
namespace ebus::defaults {

// 24 hourly purchase prices, EUR/kWh.
const std::vector<double>& hourly_price_eur_per_kwh();
// 24 hourly solar radiation values, W/m2.
const std::vector<double>& hourly_solar_w_per_m2();

TariffProfile tariff();
SolarProfile solar();
PeakLadder peak_ladder();  // 10 levels, 100..1000 kW, cap 1000 kW

BusSpec bus(const std::string& id);  // 491 kWh pack, SOC 25-85%, start/end 50%

// Depots: "marly" (3x150 kW, PV 1876.6 m2, ESS 1228 kWh @ 20% floor, overnight),
// "westland" and "hopital" terminals (2x300 kW each).
DepotSpec overnight_depot(const std::string& id = "marly");
DepotSpec terminal(const std::string& id);

// Scenario presets. Names accepted: "basic", "pp_v2g_dc", "all".
ScenarioConfig scenario(const std::string& name);
// Peak-hour discharge windows 07:00-10:00 and 18:00-21:00.
std::vector<DischargeWindow> discharge_windows();

constexpr double kSellMarginBase = 0.75;
constexpr double kBatteryCapacityKwh = 491.0;
constexpr double kReplacementCost2023 = 128.47;
constexpr double kCycleLife = 4000.0;
constexpr int kMinSessionMinutes = 5;
constexpr double kPvAreaM2 = 1876.6;
constexpr double kEssCapacityKwh = 1228.0;
constexpr double kEssSocMinFrac = 0.20;

// Projected battery replacement cost, EUR/kWh, by year.
const std::vector<std::pair<int, double>>& battery_cost_by_year();

}  // namespace ebus::defaults

#endif
