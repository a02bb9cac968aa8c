#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ebus/defaults.hpp"
#include "ebus/io.hpp"

namespace ebus::io {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CsvReader {
    fs::path path;
    std::ifstream is;
    std::string line;
    int lineno = 0;
    std::vector<std::string> header;

    explicit CsvReader(const fs::path& p) : path(p), is(p) {
        if (!is) throw InputError("cannot open " + p.string());
        if (!next_row(header)) throw InputError(p.string() + ": empty file (header expected)");
    }

    [[noreturn]] void fail(int column, const std::string& msg) const {
        throw InputError(strfmt("%s:%d:%d: %s", path.string().c_str(), lineno, column + 1,
                                msg.c_str()));
    }

    bool next_row(std::vector<std::string>& out) {
        while (std::getline(is, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            out.clear();
            std::stringstream ss(line);
            std::string field;
            while (std::getline(ss, field, ',')) out.push_back(field);
            if (!line.empty() && line.back() == ',') out.push_back("");
            return true;
        }
        return false;
    }

    int column(const std::string& name) const {
        for (size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    }
    int require_column(const std::string& name) {
        int c = column(name);
        if (c < 0)
            throw InputError(path.string() + ": missing required column '" + name + "'");
        return c;
    }

    std::string get(const std::vector<std::string>& row, int col) const {
        return col >= 0 && col < static_cast<int>(row.size()) ? row[col] : "";
    }
    double get_double(const std::vector<std::string>& row, int col) {
        std::string s = get(row, col);
        char* end = nullptr;
        double v = std::strtod(s.c_str(), &end);
        if (s.empty() || end == s.c_str() || *end != '\0')
            fail(col, "expected a number, got '" + s + "'");
        return v;
    }
    int get_int(const std::vector<std::string>& row, int col) {
        double v = get_double(row, col);
        if (v != static_cast<int>(v)) fail(col, "expected an integer");
        return static_cast<int>(v);
    }
};

StepProfile read_hourly_profile(const fs::path& path, const std::string& value_column) {
    CsvReader csv(path);
    int hour_col = csv.require_column("hour");
    int val_col = csv.require_column(value_column);
    StepProfile p;
    std::vector<std::string> row;
    int last_hour = -1;
    while (csv.next_row(row)) {
        int hour = csv.get_int(row, hour_col);
        if (hour <= last_hour) csv.fail(hour_col, "hours must be strictly increasing");
        last_hour = hour;
        p.start_minute.push_back(hour * 60);
        p.value.push_back(csv.get_double(row, val_col));
    }
    if (p.start_minute.empty()) throw InputError(path.string() + ": no data rows");
    return p;
}

json load_json(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw InputError("cannot open " + path.string());
    try {
        json doc;
        is >> doc;
        return doc;
    } catch (const json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

}  // namespace

int parse_hhmm(const std::string& text, const std::string& where) {
    int h = 0, m = 0;
    if (std::sscanf(text.c_str(), "%d:%d", &h, &m) != 2) {
        if (text.size() == 4 && std::sscanf(text.c_str(), "%4d", &h) == 1) {
            m = h % 100;
            h = h / 100;
        } else {
            throw InputError(where + ": cannot parse time '" + text + "' (expected HH:MM)");
        }
    }
    if (h < 0 || m < 0 || m >= 60)
        throw InputError(where + ": time '" + text + "' out of range");
    return h * 60 + m;
}

ProblemInstance parse_inputs(const RunConfig& config) {
    ProblemInstance inst;

    inst.tariff.purchase_price_eur_per_kwh =
        read_hourly_profile(config.tariff_csv, "eur_per_kwh");
    inst.solar.irradiance_w_per_m2 = read_hourly_profile(config.solar_csv, "w_per_m2");

    // fleet
    json fleet = load_json(config.fleet_json);
    for (const auto& jb : fleet.at("buses")) {
        BusSpec b;
        b.id = jb.at("id");
        b.battery_capacity_kwh = jb.at("battery_capacity_kwh");
        b.soc_min_frac = jb.at("soc_min_frac");
        b.soc_max_frac = jb.at("soc_max_frac");
        b.soc_initial_frac = jb.at("soc_initial_frac");
        b.soc_end_frac = jb.at("soc_end_frac");
        b.cycle_life = jb.at("cycle_life");
        b.replacement_cost_eur_per_kwh = jb.at("replacement_cost_eur_per_kwh");
        b.lifetime_throughput_kwh = jb.value("lifetime_throughput_kwh", 0.0);
        b.home_depot_id = jb.value("home_depot_id", "");
        inst.buses.push_back(std::move(b));
    }

    // infrastructure
    json infra = load_json(config.infrastructure_json);
    for (const auto& jd : infra.at("depots")) {
        DepotSpec d;
        d.id = jd.at("id");
        d.is_overnight_depot = jd.value("is_overnight_depot", false);
        d.ess_capacity_kwh = jd.value("ess_capacity_kwh", 0.0);
        d.ess_soc_min_frac = jd.value("ess_soc_min_frac", 0.0);
        d.pv_area_m2 = jd.value("pv_area_m2", 0.0);
        int n = 0;
        for (const auto& jc : jd.at("chargers")) {
            ChargerSpec c;
            c.charger_index = jc.value("charger_index", n + 1);
            c.charge_efficiency_frac = jc.at("charge_efficiency_frac");
            c.charge_power_kw = jc.at("charge_power_kw");
            c.discharge_efficiency_frac = jc.at("discharge_efficiency_frac");
            c.discharge_power_kw = jc.at("discharge_power_kw");
            d.chargers.push_back(c);
            ++n;
        }
        inst.depots.push_back(std::move(d));
    }
    if (infra.contains("peak_ladder")) {
        const auto& jl = infra["peak_ladder"];
        inst.peak_ladder.hard_cap_kw = jl.at("hard_cap_kw");
        for (const auto& lv : jl.at("levels"))
            inst.peak_ladder.levels.push_back(
                {lv.at("power_kw"), lv.at("daily_price_eur")});
    } else {
        inst.peak_ladder = defaults::peak_ladder();
    }
    inst.tariff.sell_margin_frac = infra.value("sell_margin_frac", defaults::kSellMarginBase);
    inst.horizon_minutes = infra.value("horizon_minutes", 1440);

    // trips
    CsvReader csv(config.trips_csv);
    int c_id = csv.require_column("trip_id");
    int c_bus = csv.require_column("bus_id");
    int c_from = csv.require_column("from_depot");
    int c_to = csv.require_column("to_depot");
    int c_dep = csv.require_column("dep_hhmm");
    int c_arr = csv.require_column("arr_hhmm");
    int c_dist = csv.require_column("distance_km");
    int c_speed = csv.column("speed_kmh");
    int c_rate = csv.column("kwh_per_km");
    std::vector<std::string> row;
    while (csv.next_row(row)) {
        Trip t;
        t.id = csv.get(row, c_id);
        t.bus_id = csv.get(row, c_bus);
        t.depart_depot_id = csv.get(row, c_from);
        t.arrive_depot_id = csv.get(row, c_to);
        std::string where = strfmt("%s:%d", config.trips_csv.string().c_str(), csv.lineno);
        t.depart_minute = parse_hhmm(csv.get(row, c_dep), where);
        t.arrive_minute = parse_hhmm(csv.get(row, c_arr), where);
        t.distance_km = csv.get_double(row, c_dist);
        if (c_speed >= 0 && !csv.get(row, c_speed).empty())
            t.avg_speed_kmh = csv.get_double(row, c_speed);
        if (c_rate >= 0 && !csv.get(row, c_rate).empty())
            t.consumption_rate_kwh_per_km = csv.get_double(row, c_rate);
        if (t.avg_speed_kmh == 0.0 && t.consumption_rate_kwh_per_km == 0.0 &&
            t.arrive_minute <= t.depart_minute)
            throw InputError(where + ": trip needs speed_kmh or kwh_per_km (or a valid duration)");
        inst.trips.push_back(std::move(t));
    }
    return inst;
}

ProblemInstance load_instance_dir(const fs::path& dir) {
    RunConfig c;
    c.trips_csv = dir / "trips.csv";
    c.tariff_csv = dir / "tariff.csv";
    c.solar_csv = dir / "solar.csv";
    c.fleet_json = dir / "fleet.json";
    c.infrastructure_json = dir / "infrastructure.json";
    return parse_inputs(c);
}

void write_instance(const ProblemInstance& inst, const fs::path& dir) {
    fs::create_directories(dir);

    auto write_profile = [&](const StepProfile& p, const fs::path& path,
                             const std::string& value_column) {
        std::ofstream os(path);
        os << "hour," << value_column << '\n';
        for (size_t i = 0; i < p.start_minute.size(); ++i) {
            if (p.start_minute[i] % 60 != 0)
                throw InputError(path.string() + ": profile is not hour-aligned");
            os << p.start_minute[i] / 60 << ',' << format_double(p.value[i]) << '\n';
        }
    };
    write_profile(inst.tariff.purchase_price_eur_per_kwh, dir / "tariff.csv", "eur_per_kwh");
    write_profile(inst.solar.irradiance_w_per_m2, dir / "solar.csv", "w_per_m2");

    {
        std::ofstream os(dir / "trips.csv");
        os << "trip_id,bus_id,from_depot,to_depot,dep_hhmm,arr_hhmm,distance_km,speed_kmh,"
              "kwh_per_km\n";
        for (const auto& t : inst.trips) {
            os << t.id << ',' << t.bus_id << ',' << t.depart_depot_id << ',' << t.arrive_depot_id
               << ',' << minute_to_hhmm(t.depart_minute) << ',' << minute_to_hhmm(t.arrive_minute)
               << ',' << format_double(t.distance_km) << ','
               << (t.avg_speed_kmh > 0 ? format_double(t.avg_speed_kmh) : "") << ','
               << (t.consumption_rate_kwh_per_km > 0
                       ? format_double(t.consumption_rate_kwh_per_km)
                       : "")
               << '\n';
        }
    }

    json fleet;
    for (const auto& b : inst.buses) {
        json jb = {
            {"id", b.id},
            {"battery_capacity_kwh", b.battery_capacity_kwh},
            {"soc_min_frac", b.soc_min_frac},
            {"soc_max_frac", b.soc_max_frac},
            {"soc_initial_frac", b.soc_initial_frac},
            {"soc_end_frac", b.soc_end_frac},
            {"cycle_life", b.cycle_life},
            {"replacement_cost_eur_per_kwh", b.replacement_cost_eur_per_kwh},
        };
        if (b.lifetime_throughput_kwh > 0.0)
            jb["lifetime_throughput_kwh"] = b.lifetime_throughput_kwh;
        if (!b.home_depot_id.empty()) jb["home_depot_id"] = b.home_depot_id;
        fleet["buses"].push_back(std::move(jb));
    }
    std::ofstream(dir / "fleet.json") << fleet.dump(2) << '\n';

    json infra;
    for (const auto& d : inst.depots) {
        json jd = {
            {"id", d.id},
            {"is_overnight_depot", d.is_overnight_depot},
            {"ess_capacity_kwh", d.ess_capacity_kwh},
            {"ess_soc_min_frac", d.ess_soc_min_frac},
            {"pv_area_m2", d.pv_area_m2},
        };
        for (const auto& c : d.chargers)
            jd["chargers"].push_back({
                {"charger_index", c.charger_index},
                {"charge_efficiency_frac", c.charge_efficiency_frac},
                {"charge_power_kw", c.charge_power_kw},
                {"discharge_efficiency_frac", c.discharge_efficiency_frac},
                {"discharge_power_kw", c.discharge_power_kw},
            });
        infra["depots"].push_back(std::move(jd));
    }
    json levels = json::array();
    for (const auto& l : inst.peak_ladder.levels)
        levels.push_back({{"power_kw", l.power_kw}, {"daily_price_eur", l.daily_price_eur}});
    infra["peak_ladder"] = {{"hard_cap_kw", inst.peak_ladder.hard_cap_kw},
                            {"levels", std::move(levels)}};
    infra["sell_margin_frac"] = inst.tariff.sell_margin_frac;
    infra["horizon_minutes"] = inst.horizon_minutes;
    std::ofstream(dir / "infrastructure.json") << infra.dump(2) << '\n';
}

ScenarioConfig load_scenario(const std::string& name_or_path) {
    if (name_or_path == "basic" || name_or_path == "pp_v2g_dc" || name_or_path == "all")
        return defaults::scenario(name_or_path);
    json doc = load_json(name_or_path);
    ScenarioConfig sc;
    sc.name = doc.value("name", "custom");
    sc.enable_peak_cost = doc.value("enable_peak_cost", false);
    sc.enable_v2g = doc.value("enable_v2g", false);
    sc.enable_degradation = doc.value("enable_degradation", false);
    sc.enable_pv_ess = doc.value("enable_pv_ess", false);
    sc.min_session_minutes = doc.value("min_session_minutes", defaults::kMinSessionMinutes);
    sc.single_overnight_connection = doc.value("single_overnight_connection", true);
    sc.paper_literal_mode = doc.value("paper_literal_mode", true);
    sc.sun_threshold_w_per_m2 = doc.value("sun_threshold_w_per_m2", 0.0);
    if (doc.contains("tariff_margin_frac"))
        sc.tariff_margin_frac = doc["tariff_margin_frac"].get<double>();
    if (doc.contains("discharge_windows"))
        for (const auto& w : doc["discharge_windows"])
            sc.discharge_windows.push_back({w.at(0), w.at(1)});
    return sc;
}

std::string scenario_json(const ScenarioConfig& sc) {
    json doc = {
        {"name", sc.name},
        {"enable_peak_cost", sc.enable_peak_cost},
        {"enable_v2g", sc.enable_v2g},
        {"enable_degradation", sc.enable_degradation},
        {"enable_pv_ess", sc.enable_pv_ess},
        {"min_session_minutes", sc.min_session_minutes},
        {"single_overnight_connection", sc.single_overnight_connection},
        {"paper_literal_mode", sc.paper_literal_mode},
        {"sun_threshold_w_per_m2", sc.sun_threshold_w_per_m2},
    };
    if (sc.tariff_margin_frac) doc["tariff_margin_frac"] = *sc.tariff_margin_frac;
    json windows = json::array();
    for (const auto& w : sc.discharge_windows)
        windows.push_back(json::array({w.start_minute, w.end_minute}));
    doc["discharge_windows"] = std::move(windows);
    return doc.dump(2) + "\n";
}

}  // namespace ebus::io
