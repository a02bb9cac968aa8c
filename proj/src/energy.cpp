#include "ebus/energy.hpp"

#include <algorithm>

namespace ebus::energy {

double consumption_rate(double v) {
    if (v <= 0.0) throw ParameterError("consumption_rate: speed must be > 0 m/s");
    double rate = 0.01005 * v * v - 0.3113 * v + 3.484;
    return std::max(rate, 0.0);
}

double trip_speed_kmh(const Trip& trip) {
    if (trip.avg_speed_kmh > 0.0) return trip.avg_speed_kmh;
    return trip.implied_speed_kmh();
}

double trip_consumption_rate(const Trip& trip) {
    if (trip.consumption_rate_kwh_per_km > 0.0) return trip.consumption_rate_kwh_per_km;
    double v = trip_speed_kmh(trip);
    if (v <= 0.0)
        throw ParameterError("trip " + trip.id + ": no consumption rate and no usable speed");
    return consumption_rate(kmh_to_ms(v));
}

double solar_yield(double irradiance_w_per_m2, double pv_area_m2, double slot_minutes) {
    return irradiance_w_per_m2 * pv_area_m2 * (slot_minutes / 60.0) / 1000.0;
}

double sell_price(double purchase_price_eur_per_kwh, double margin_frac) {
    if (margin_frac < 0.0) throw ParameterError("sell_price: margin must be >= 0");
    return margin_frac * purchase_price_eur_per_kwh;
}

double degradation_coefficient(const BusSpec& bus) {
    double f = bus.throughput_kwh();
    if (f <= 0.0) throw ParameterError("degradation_coefficient: lifetime throughput must be > 0");
    return bus.replacement_cost_eur_per_kwh * bus.battery_capacity_kwh / f;
}

}  // namespace ebus::energy
