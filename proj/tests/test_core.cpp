#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "ebus/defaults.hpp"
#include "ebus/energy.hpp"
#include "ebus/io.hpp"
#include "helpers.hpp"

using namespace ebus;

TEST_CASE("well-formed tiny instance validates cleanly") {
    auto rep = validate_instance(test::tiny_instance());
    CHECK(rep.ok());
    // identical inputs give identical reports
    auto rep2 = validate_instance(test::tiny_instance());
    CHECK(rep.violations.size() == rep2.violations.size());
}

TEST_CASE("trip with reversed times is flagged by name") {
    auto inst = test::tiny_trip_instance();
    inst.trips[0].arrive_minute = 30;  // before departure
    auto rep = validate_instance(inst);
    REQUIRE(!rep.ok());
    bool named = false;
    for (const auto& v : rep.violations)
        if (v.subject.find("T1") != std::string::npos) named = true;
    CHECK(named);
}

TEST_CASE("case-study SOC band passes") {
    BusSpec b = defaults::bus("EB01");
    CHECK(b.soc_min_frac == 0.25);
    CHECK(b.soc_max_frac == 0.85);
    CHECK(b.soc_initial_frac == 0.50);
    ProblemInstance inst = test::tiny_instance();
    inst.buses = {b};
    for (const auto& v : validate_instance(inst).violations)
        CHECK(v.subject.find("EB01") == std::string::npos);
}

TEST_CASE("dangling bus reference is a structural violation") {
    auto inst = test::tiny_trip_instance();
    inst.trips[0].bus_id = "nope";
    auto rep = validate_instance(inst);
    REQUIRE(!rep.ok());
    bool structural = false;
    for (const auto& v : rep.violations)
        if (v.structural) structural = true;
    CHECK(structural);
}

TEST_CASE("speed/distance mismatch beyond 5% is flagged unless rate is explicit") {
    auto inst = test::tiny_trip_instance();
    inst.trips[0].consumption_rate_kwh_per_km = 0.0;
    inst.trips[0].avg_speed_kmh = 10.0;  // implied speed is 10 km/h
    CHECK(validate_instance(inst).ok());
    inst.trips[0].avg_speed_kmh = 12.0;
    CHECK(!validate_instance(inst).ok());
    inst.trips[0].consumption_rate_kwh_per_km = 1.0;  // explicit rate, speed informational
    CHECK(validate_instance(inst).ok());
}

TEST_CASE("serialization round-trips an instance") {
    namespace fs = std::filesystem;
    auto dir = fs::temp_directory_path() / "ebus_roundtrip_test";
    fs::remove_all(dir);

    ProblemInstance inst;
    inst.buses = {defaults::bus("EB01"), defaults::bus("EB02")};
    inst.buses[1].home_depot_id = "marly";
    inst.buses[1].lifetime_throughput_kwh = 123456.5;
    inst.depots = {defaults::overnight_depot(), defaults::terminal("westland"),
                   defaults::terminal("hopital")};
    inst.tariff = defaults::tariff();
    inst.solar = defaults::solar();
    inst.peak_ladder = defaults::peak_ladder();
    Trip t;
    t.id = "T1";
    t.bus_id = "EB01";
    t.depart_depot_id = "marly";
    t.arrive_depot_id = "hopital";
    t.depart_minute = 8 * 60 + 7;
    t.arrive_minute = 8 * 60 + 49;
    t.distance_km = 7.84;
    t.avg_speed_kmh = 11.2;
    t.consumption_rate_kwh_per_km = 2.2581;
    inst.trips = {t};

    io::write_instance(inst, dir);
    ProblemInstance back = io::load_instance_dir(dir);
    CHECK(back.content_hash() == inst.content_hash());
    CHECK(back.trips[0].depart_minute == t.depart_minute);
    CHECK(back.buses[1].lifetime_throughput_kwh == 123456.5);
    fs::remove_all(dir);
}

TEST_CASE("consumption model matches the published fit") {
    CHECK(energy::consumption_rate(4.63) == doctest::Approx(2.2581).epsilon(1e-3));
    // convex with an interior minimum
    CHECK(energy::consumption_rate(15.0) < energy::consumption_rate(5.0));
    CHECK(energy::consumption_rate(15.0) < energy::consumption_rate(25.0));
    CHECK(energy::consumption_rate(4.63) == energy::consumption_rate(4.63));
    CHECK_THROWS_AS(energy::consumption_rate(0.0), ParameterError);
    // 4.63 m/s over ~7.84 km is about one trip's worth of energy
    CHECK(energy::consumption_rate(4.63) * 7.84 == doctest::Approx(17.71).epsilon(0.01));
}

TEST_CASE("solar yield arithmetic and linearity") {
    CHECK(energy::solar_yield(267.26, 1876.6, 60.0) == doctest::Approx(501.54).epsilon(1e-3));
    CHECK(energy::solar_yield(0.0, 1876.6, 60.0) == 0.0);
    double full = energy::solar_yield(200.0, 1876.6, 45.0);
    CHECK(energy::solar_yield(200.0, 938.3, 45.0) == doctest::Approx(full / 2).epsilon(1e-12));
    CHECK(energy::solar_yield(100.0, 1876.6, 30.0) ==
          doctest::Approx(energy::solar_yield(100.0, 1876.6, 60.0) / 2).epsilon(1e-12));
}

TEST_CASE("sell price is a straight margin") {
    CHECK(energy::sell_price(0.1356, 0.75) == doctest::Approx(0.1017).epsilon(1e-9));
    CHECK(energy::sell_price(0.42, 1.0) == 0.42);
    CHECK(energy::sell_price(0.1, 1.10) == doctest::Approx(0.11).epsilon(1e-12));
    CHECK_THROWS_AS(energy::sell_price(0.1, -0.1), ParameterError);
}

TEST_CASE("degradation coefficient from pack parameters") {
    BusSpec b = defaults::bus("EB01");
    // default throughput: cycles * capacity
    CHECK(b.throughput_kwh() == doctest::Approx(1964000.0));
    CHECK(energy::degradation_coefficient(b) == doctest::Approx(0.032118).epsilon(1e-4));
    b.replacement_cost_eur_per_kwh = 0.0;
    CHECK(energy::degradation_coefficient(b) == 0.0);
    b.replacement_cost_eur_per_kwh = 78.10;
    CHECK(energy::degradation_coefficient(b) == doctest::Approx(0.019525).epsilon(1e-4));
    b.cycle_life = 0.0;
    CHECK_THROWS_AS(energy::degradation_coefficient(b), ParameterError);
}

TEST_CASE("bundled tables reproduce the published values") {
    const auto& price = defaults::hourly_price_eur_per_kwh();
    const auto& sun = defaults::hourly_solar_w_per_m2();
    REQUIRE(price.size() == 24);
    REQUIRE(sun.size() == 24);
    CHECK(strfmt("%.4f", price[0]) == "0.0877");
    CHECK(strfmt("%.4f", price[13]) == "0.0724");
    CHECK(strfmt("%.4f", price[18]) == "0.1356");
    CHECK(strfmt("%.2f", sun[10]) == "267.26");
    CHECK(strfmt("%.2f", sun[4]) == "0.26");

    auto ladder = defaults::peak_ladder();
    REQUIRE(ladder.levels.size() == 10);
    CHECK(ladder.levels[9].power_kw == 1000.0);
    CHECK(strfmt("%.2f", ladder.levels[9].daily_price_eur) == "135.21");
    CHECK(strfmt("%.2f", ladder.levels[5].daily_price_eur) == "81.12");
    CHECK(ladder.hard_cap_kw == 1000.0);
}

TEST_CASE("scenario presets match the scenario table") {
    auto basic = defaults::scenario("basic");
    CHECK(!basic.enable_peak_cost);
    CHECK(!basic.enable_v2g);
    CHECK(!basic.enable_degradation);
    CHECK(!basic.enable_pv_ess);

    auto pp = defaults::scenario("pp_v2g_dc");
    CHECK(pp.enable_peak_cost);
    CHECK(pp.enable_v2g);
    CHECK(pp.enable_degradation);
    CHECK(!pp.enable_pv_ess);
    REQUIRE(pp.discharge_windows.size() == 2);
    CHECK(pp.discharge_windows[0].start_minute == 7 * 60);
    CHECK(pp.discharge_windows[1].end_minute == 21 * 60);

    auto all = defaults::scenario("all");
    CHECK(all.enable_pv_ess);
    CHECK(all.min_session_minutes == 5);
    CHECK_THROWS_AS(defaults::scenario("nope"), ParameterError);
}
