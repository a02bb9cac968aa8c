#ifndef EBUS_TIMELINE_HPP
#define EBUS_TIMELINE_HPP

#include <string>
#include <vector>

#include "ebus/model.hpp"

namespace ebus {

enum EventKind : unsigned {
    kEventBusArrival = 1u << 0,
    kEventBusDeparture = 1u << 1,
    kEventPriceChange = 1u << 2,
    kEventSolarChange = 1u << 3,
    kEventHorizonEnd = 1u << 4,
};

struct Event {
    int index = 0;         // 1-based, matching the model's event indexing
    int start_minute = 0;  // T_e
    int slot_minutes = 0;  // length of [T_e, T_{e+1}); last slot runs to the horizon
    unsigned kind_flags = 0;
};

// Event list plus every derived indicator parameter the MILP consumes.
// Internally everything is 0-based on (bus k, depot j, trip i, event e);
// Event::index and the per-bus last-return indices stay 1-based.
struct EventTimeline {
    std::vector<Event> events;
    int horizon_minutes = 0;

    // parked_depot[k][e] = depot the bus sits at during slot e, -1 if none.
    // serving_trip[k][e] = trip the bus serves during slot e, -1 if none.
    // At most one of the two is set (exclusivity).
    std::vector<std::vector<int>> parked_depot;
    std::vector<std::vector<int>> serving_trip;
    // movement[j][e]: some bus arrives at or departs from depot j at T_e (M).
    std::vector<std::vector<bool>> movement;
    std::vector<bool> sun;              // theta per event
    std::vector<int> min_slots;         // V per event
    std::vector<bool> min_slots_capped; // V hit the end of the horizon
    std::vector<int> last_return_event; // per bus, 1-based (epsilon_g)
    int final_event = 0;                // |E|, 1-based (epsilon_f)

    // Per-event economic/solar parameters.
    std::vector<double> buy_price;              // rho+ per event
    std::vector<double> sell_price;             // rho- per event (margin applied)
    std::vector<double> irradiance;             // W/m2 per event
    std::vector<std::vector<double>> pv_yield;  // Q [j][e], kWh

    int num_events() const { return static_cast<int>(events.size()); }
    int event_at_minute(int minute) const;  // 0-based position, -1 if no event starts there
    bool in_discharge_window(int e, const std::vector<DischargeWindow>& windows) const;
};

// Places one event at every trip departure/arrival, tariff breakpoint, solar
// breakpoint, discharge-window edge and the horizon start; computes presence,
// movement, sun flags, minimum-slot counts and per-event prices/yields.
EventTimeline build_timeline(const ProblemInstance& instance,
                             const ScenarioConfig& scenario = ScenarioConfig{});

// V_e: smallest q >= 1 such that the q slots starting at e sum to at least
// tau_m minutes; capped (and flagged) near the end of the horizon.
std::vector<int> compute_min_slots(const EventTimeline& timeline, int tau_minutes,
                                   std::vector<bool>* capped = nullptr);

// Fills parked/serving/movement/last-return from the instance given the event
// grid (exposed separately for testing; build_timeline calls it).
void compute_presence(const ProblemInstance& instance, EventTimeline& timeline);

std::string timeline_csv(const EventTimeline& timeline);

}  // namespace ebus

#endif
