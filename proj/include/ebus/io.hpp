#ifndef EBUS_IO_HPP
#define EBUS_IO_HPP

#include <filesystem>
#include <string>

#include "ebus/model.hpp"
#include "ebus/solver.hpp"

namespace ebus::io {

struct RunConfig {
    std::filesystem::path trips_csv;
    std::filesystem::path tariff_csv;
    std::filesystem::path solar_csv;
    std::filesystem::path fleet_json;
    std::filesystem::path infrastructure_json;
    std::string scenario = "basic";  // preset name or path to a scenario JSON
    milp::SolveLimits limits;
    std::filesystem::path output_dir = "run";
    std::string solver;  // EBUS_SOLVER-style selection, empty = auto
};

// CSV schemas:
//   trips: trip_id,bus_id,from_depot,to_depot,dep_hhmm,arr_hhmm,distance_km[,speed_kmh][,kwh_per_km]
//   tariff: hour,eur_per_kwh
//   solar: hour,w_per_m2
// Fleet and infrastructure are JSON documents (see write_instance for the shape).
ProblemInstance parse_inputs(const RunConfig& config);

// Same five files loaded from one directory (trips.csv, tariff.csv, solar.csv,
// fleet.json, infrastructure.json).
ProblemInstance load_instance_dir(const std::filesystem::path& dir);

// Serializes an instance to the five input files. Profiles must be
// hour-aligned (the bundled datasets and generated instances are).
void write_instance(const ProblemInstance& instance, const std::filesystem::path& dir);

// "basic" | "pp_v2g_dc" | "all" or a path to a scenario JSON file.
ScenarioConfig load_scenario(const std::string& name_or_path);
std::string scenario_json(const ScenarioConfig& scenario);

int parse_hhmm(const std::string& text, const std::string& where);

}  // namespace ebus::io

#endif
