#include <algorithm>
#include <cmath>
#include <random>

#include "ebus/defaults.hpp"
#include "ebus/energy.hpp"
#include "ebus/experiments.hpp"

namespace ebus::experiments {

namespace {

int round_to(int value, int grid) { return (value + grid / 2) / grid * grid; }

}  // namespace

ProblemInstance generate_instance(const GenSpec& spec) {
    if (spec.n_buses <= 0 || spec.n_trips <= 0)
        throw GenerationError("bus and trip counts must be positive");
    if (spec.n_trips < 2 * spec.n_buses)
        throw GenerationError(
            strfmt("%d trips cannot cover %d buses (each needs its two depot deadheads)",
                   spec.n_trips, spec.n_buses));

    std::mt19937_64 rng(spec.seed);
    auto pick = [&](int lo, int hi) {  // inclusive, uniform
        return lo + static_cast<int>(rng() % static_cast<uint64_t>(hi - lo + 1));
    };

    ProblemInstance inst;
    inst.tariff = defaults::tariff();
    inst.solar = defaults::solar();
    inst.peak_ladder = defaults::peak_ladder();

    DepotSpec depot = defaults::overnight_depot("marly");
    if (spec.pv_area_m2 > 0.0) depot.pv_area_m2 = spec.pv_area_m2;
    if (spec.ess_capacity_kwh >= 0.0) depot.ess_capacity_kwh = spec.ess_capacity_kwh;
    depot.chargers.clear();
    for (int n = 1; n <= spec.depot_chargers; ++n)
        depot.chargers.push_back({n, spec.charge_efficiency, 150.0, spec.charge_efficiency, 120.0});
    DepotSpec west = defaults::terminal("westland");
    DepotSpec hopital = defaults::terminal("hopital");
    for (DepotSpec* t : {&west, &hopital}) {
        t->chargers.clear();
        for (int n = 1; n <= spec.terminal_chargers; ++n)
            t->chargers.push_back(
                {n, spec.charge_efficiency, 300.0, spec.charge_efficiency, 240.0});
    }
    inst.depots = {depot, west, hopital};

    // Line legs per bus: total trips = sum(line legs) + 2 deadheads per bus.
    // Legs are kept even so each bus ends its duty back at the depot-side
    // terminal before the return deadhead.
    int line_legs = spec.n_trips - 2 * spec.n_buses;
    std::vector<int> legs(spec.n_buses, 0);
    for (int k = 0; line_legs >= 2; ++k) {
        legs[k % spec.n_buses] += 2;
        line_legs -= 2;
    }
    if (line_legs == 1) legs[0] += 1;  // odd remainder: one bus ends at the far terminal

    int trip_no = 0;
    auto add_trip = [&](int k, const std::string& from, const std::string& to, int dep,
                        double dist_km, double speed_target_kmh) {
        Trip t;
        t.id = strfmt("T%03d", ++trip_no);
        t.bus_id = strfmt("EB%02d", k + 1);
        t.depart_depot_id = from;
        t.arrive_depot_id = to;
        t.depart_minute = dep;
        int dur = round_to(static_cast<int>(std::lround(dist_km / speed_target_kmh * 60.0)), 5);
        dur = std::max(dur, 10);
        t.arrive_minute = dep + dur;
        t.distance_km = dist_km;
        t.avg_speed_kmh = dist_km / (dur / 60.0);
        t.consumption_rate_kwh_per_km =
            energy::consumption_rate(energy::kmh_to_ms(t.avg_speed_kmh));
        inst.trips.push_back(t);
        return t.arrive_minute;
    };

    for (int k = 0; k < spec.n_buses; ++k) {
        BusSpec bus = defaults::bus(strfmt("EB%02d", k + 1));
        bus.home_depot_id = "marly";
        inst.buses.push_back(bus);

        // staggered pull-out, 5-minute grid
        int t = 5 * 60 + 5 * (k % 24);
        t = add_trip(k, "marly", "hopital", t, 2.5, 15.0);
        std::string at = "hopital";
        for (int leg = 0; leg < legs[k]; ++leg) {
            t += pick(2, 5) * 5;  // layover 10..25 min
            double dist = 7.84 + 0.25 * pick(-4, 4);       // ~6.8..8.8 km
            double speed = 16.68 + 0.6 * pick(-3, 3);      // ~14.9..18.5 km/h
            std::string next = at == "hopital" ? "westland" : "hopital";
            t = add_trip(k, at, next, t, dist, speed);
            at = next;
        }
        t += pick(1, 3) * 5;
        double home_dist = at == "hopital" ? 2.5 : 9.5;
        t = add_trip(k, at, "marly", t, home_dist, 15.0);
        if (t >= inst.horizon_minutes)
            throw GenerationError(strfmt("bus EB%02d's duty runs past the horizon (%d legs)",
                                         k + 1, legs[k]));
    }

    // Rough serviceability guard: daily trip energy must fit in the usable SOC
    // band plus what the bus could charge during its own layovers.
    for (int k = 0; k < spec.n_buses; ++k) {
        auto chain = inst.trips_of_bus(k);
        double need = 0.0;
        int layover_min = 0;
        for (size_t c = 0; c < chain.size(); ++c) {
            const Trip& t = inst.trips[chain[c]];
            need += t.consumption_rate_kwh_per_km * t.distance_km;
            if (c + 1 < chain.size())
                layover_min += inst.trips[chain[c + 1]].depart_minute - t.arrive_minute;
        }
        const BusSpec& b = inst.buses[k];
        double band = b.initial_energy_kwh() - b.min_energy_kwh();
        double best_rate = 300.0 * spec.charge_efficiency / 60.0;  // kWh per layover minute
        if (need > band + layover_min * best_rate)
            throw GenerationError(
                strfmt("bus EB%02d cannot serve its trips: needs %.1f kWh, band %.1f kWh plus "
                       "%d layover minutes",
                       k + 1, need, band, layover_min));
    }

    auto report = validate_instance(inst);
    if (!report.ok())
        throw GenerationError("generated instance fails validation:\n" + report.to_string());
    return inst;
}

std::vector<std::pair<std::string, ProblemInstance>> instance_grid(uint64_t seed) {
    std::vector<std::pair<std::string, ProblemInstance>> out;
    for (int buses : {28, 10})
        for (double eff : {0.92, 0.82})
            for (double pv : {1876.6, 938.3})
                for (double ess : {1228.0, 614.0}) {
                    GenSpec g;
                    g.seed = seed;
                    g.n_buses = buses;
                    g.n_trips = buses == 28 ? 232 : 84;
                    g.charge_efficiency = eff;
                    g.pv_area_m2 = pv;
                    g.ess_capacity_kwh = ess;
                    std::string label = strfmt("%dB-%dE-%gPV-%gESS", buses,
                                               static_cast<int>(eff * 100), pv, ess);
                    out.push_back({label, generate_instance(g)});
                }
    return out;
}

}  // namespace ebus::experiments
