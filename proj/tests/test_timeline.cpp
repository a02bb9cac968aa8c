#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ebus/defaults.hpp"
#include "ebus/timeline.hpp"
#include "helpers.hpp"

using namespace ebus;

namespace {

ProblemInstance hourly_day_instance() {
    ProblemInstance inst;
    inst.buses = {test::small_bus()};
    inst.depots = {test::small_depot("d1", 1)};
    inst.tariff = defaults::tariff();
    inst.solar = defaults::solar();
    inst.peak_ladder = defaults::peak_ladder();
    return inst;
}

}  // namespace

TEST_CASE("hourly profiles with no trips give one event per hour") {
    auto tl = build_timeline(hourly_day_instance());
    REQUIRE(tl.num_events() == 24);
    for (int e = 0; e < 24; ++e) {
        CHECK(tl.events[e].start_minute == e * 60);
        CHECK(tl.events[e].slot_minutes == 60);
    }
    CHECK(tl.final_event == 24);
    CHECK((tl.events[23].kind_flags & kEventHorizonEnd) != 0);
    // a price change with no bus movement still creates its event
    CHECK((tl.events[5].kind_flags & kEventPriceChange) != 0);
    CHECK((tl.events[5].kind_flags & (kEventBusArrival | kEventBusDeparture)) == 0);
}

TEST_CASE("trip minutes become events on top of the hourly grid") {
    auto inst = hourly_day_instance();
    inst.depots.push_back(test::small_depot("d2", 1));
    Trip t;
    t.id = "T1";
    t.bus_id = "B1";
    t.depart_depot_id = "d1";
    t.arrive_depot_id = "d2";
    t.depart_minute = 8 * 60 + 7;
    t.arrive_minute = 8 * 60 + 49;
    t.distance_km = 7.84;
    t.consumption_rate_kwh_per_km = 2.26;
    inst.trips = {t};

    auto tl = build_timeline(inst);
    CHECK(tl.num_events() == 26);  // 24 hourly + 08:07 + 08:49
    int dep = tl.event_at_minute(487);
    int arr = tl.event_at_minute(529);
    REQUIRE(dep >= 0);
    REQUIRE(arr >= 0);
    CHECK((tl.events[dep].kind_flags & kEventBusDeparture) != 0);
    CHECK((tl.events[arr].kind_flags & kEventBusArrival) != 0);
    CHECK(tl.events[dep].slot_minutes == 42);

    // serving exactly the slot between departure and arrival
    CHECK(tl.serving_trip[0][dep] == 0);
    CHECK(tl.serving_trip[0][arr] == -1);
    CHECK(tl.parked_depot[0][dep] == -1);
    CHECK(tl.parked_depot[0][arr] == 1);
    CHECK(tl.parked_depot[0][dep - 1] == 0);

    // movement at the departure depot and the arrival depot
    CHECK(tl.movement[0][dep]);
    CHECK(tl.movement[1][arr]);
    CHECK(tl.last_return_event[0] == arr + 1);

    // monotone refinement: adding a trip only adds events
    auto before = build_timeline(hourly_day_instance());
    for (const auto& ev : before.events) CHECK(tl.event_at_minute(ev.start_minute) >= 0);

    // exclusivity everywhere
    for (int e = 0; e < tl.num_events(); ++e)
        CHECK((tl.parked_depot[0][e] >= 0) + (tl.serving_trip[0][e] >= 0) <= 1);
}

TEST_CASE("trips outside the horizon are structural errors") {
    auto inst = hourly_day_instance();
    inst.depots.push_back(test::small_depot("d2", 1));
    Trip t;
    t.id = "T9";
    t.bus_id = "B1";
    t.depart_depot_id = "d1";
    t.arrive_depot_id = "d2";
    t.depart_minute = 23 * 60;
    t.arrive_minute = 25 * 60;
    t.distance_km = 5.0;
    t.consumption_rate_kwh_per_km = 1.0;
    inst.trips = {t};
    CHECK_THROWS_AS(build_timeline(inst), StructuralError);
}

TEST_CASE("slots tile the horizon exactly") {
    for (const ProblemInstance& inst :
         {hourly_day_instance(), test::tiny_instance(), test::tiny_trip_instance()}) {
        auto tl = build_timeline(inst);
        int total = 0;
        for (const auto& ev : tl.events) {
            CHECK(ev.slot_minutes >= 1);
            total += ev.slot_minutes;
        }
        CHECK(total == inst.horizon_minutes);
    }
}

TEST_CASE("min-slot counts follow the prefix sums") {
    // slots of 10/10/10 with tau 5: one slot is enough everywhere
    auto inst = test::tiny_instance();
    inst.horizon_minutes = 30;
    inst.tariff.purchase_price_eur_per_kwh = {{0, 10, 20}, {0.1, 0.2, 0.3}};
    ScenarioConfig sc;
    sc.min_session_minutes = 5;
    auto tl = build_timeline(inst, sc);
    REQUIRE(tl.num_events() == 3);
    CHECK(tl.min_slots == std::vector<int>{1, 1, 1});

    // slots of 2/2/10
    inst.horizon_minutes = 14;
    inst.tariff.purchase_price_eur_per_kwh = {{0, 2, 4}, {0.1, 0.2, 0.3}};
    tl = build_timeline(inst, sc);
    REQUIRE(tl.num_events() == 3);
    CHECK(tl.min_slots == std::vector<int>{3, 2, 1});
    CHECK(!tl.min_slots_capped[0]);

    // tau larger than the remaining horizon: capped and flagged
    sc.min_session_minutes = 15;
    tl = build_timeline(inst, sc);
    CHECK(tl.min_slots == std::vector<int>{3, 2, 1});
    CHECK(tl.min_slots_capped[0]);
    CHECK(tl.min_slots_capped[2]);

    CHECK_THROWS_AS(compute_min_slots(tl, 0), ParameterError);
}

TEST_CASE("parked bus is present all day with movement only at the start") {
    auto inst = test::tiny_instance();
    auto tl = build_timeline(inst);
    REQUIRE(tl.num_events() == 3);
    for (int e = 0; e < 3; ++e) {
        CHECK(tl.parked_depot[0][e] == 0);
        CHECK(tl.serving_trip[0][e] == -1);
    }
    CHECK(tl.movement[0][0]);  // initial location counts as an arrival
    CHECK(!tl.movement[0][1]);
    CHECK(!tl.movement[0][2]);
    CHECK(tl.last_return_event[0] == 1);
}

TEST_CASE("sun flag follows the irradiance threshold") {
    auto inst = hourly_day_instance();
    ScenarioConfig sc;
    auto tl = build_timeline(inst, sc);
    CHECK(!tl.sun[3]);  // dark at 03:00
    CHECK(tl.sun[4]);   // 0.26 W/m2 counts as sun under the default threshold
    CHECK(tl.sun[12]);
    sc.sun_threshold_w_per_m2 = 5.0;
    tl = build_timeline(inst, sc);
    CHECK(!tl.sun[4]);
    CHECK(tl.sun[5]);
}

TEST_CASE("discharge window edges become events and containment is exact") {
    auto inst = test::tiny_instance();
    ScenarioConfig sc;
    sc.discharge_windows = {{90, 150}};
    auto tl = build_timeline(inst, sc);
    // 0, 60, 90, 120, 150
    REQUIRE(tl.num_events() == 5);
    CHECK(tl.event_at_minute(90) >= 0);
    CHECK(tl.event_at_minute(150) >= 0);
    CHECK(!tl.in_discharge_window(1, sc.discharge_windows));  // [60,90)
    CHECK(tl.in_discharge_window(2, sc.discharge_windows));   // [90,120)
    CHECK(tl.in_discharge_window(3, sc.discharge_windows));   // [120,150)
    CHECK(!tl.in_discharge_window(4, sc.discharge_windows));  // [150,180)
}

TEST_CASE("per-event prices and yields line up with the profiles") {
    auto inst = hourly_day_instance();
    inst.depots[0].pv_area_m2 = 1876.6;
    ScenarioConfig sc;
    sc.tariff_margin_frac = 0.75;
    auto tl = build_timeline(inst, sc);
    CHECK(tl.buy_price[18] == doctest::Approx(0.1356));
    CHECK(tl.sell_price[18] == doctest::Approx(0.1017));
    CHECK(tl.pv_yield[0][10] == doctest::Approx(501.54).epsilon(1e-3));
}
