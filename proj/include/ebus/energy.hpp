#ifndef EBUS_ENERGY_HPP
#define EBUS_ENERGY_HPP

#include "ebus/model.hpp"

namespace ebus::energy {

// Per-km consumption of an articulated electric bus as a function of average
// trip speed in m/s (quadratic fit, clamped at zero).
double consumption_rate(double avg_speed_m_per_s);

inline double kmh_to_ms(double kmh) { return kmh / 3.6; }

// Effective consumption rate for a trip: explicit file value wins, otherwise
// derived from the trip's average speed (declared or implied).
double trip_consumption_rate(const Trip& trip);
double trip_speed_kmh(const Trip& trip);

// PV energy available over a slot, kWh.
double solar_yield(double irradiance_w_per_m2, double pv_area_m2, double slot_minutes);

// Selling price as a fraction of the purchase price.
double sell_price(double purchase_price_eur_per_kwh, double margin_frac);

// Battery wear cost per kWh discharged: R * C_bat / lifetime throughput.
double degradation_coefficient(const BusSpec& bus);

}  // namespace ebus::energy

#endif
