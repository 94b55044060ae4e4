#pragma once

// JSON run configuration.
//
// Flat document keyed by RawConfig field names. Every frequency entry
// (omega1, omega2, kappa, detuning_value) must declare its unit in the
// "units" block:
//   "hz_times_2pi"  value is an ordinary frequency in Hz, multiplied by 2 pi
//   "rad_per_s"     value is already angular
//   "omega1"        (detuning_value only) value is a multiple of omega1
//
//   {
//     "pump_wavelength": 1064e-9, "cavity_length": 0.025,
//     "omega1": 947e3, "omega2": 947e3, "kappa": 215e3,
//     "Q1": 6700, "Q2": 6700, "m1": 145e-12, "m2": 145e-12,
//     "pump_power": 2e-3, "probe_power": 2e-9, "coulomb_lambda": 8e35,
//     "detuning_mode": "effective", "detuning_value": 1,
//     "units": {"omega1": "hz_times_2pi", "omega2": "hz_times_2pi",
//               "kappa": "hz_times_2pi", "detuning_value": "omega1"}
//   }

#include "omsim/model.hpp"
#include "omsim/steady_state.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace omsim {

using json = nlohmann::json;

struct RunConfig {
    RawConfig raw;
    std::optional<Branch> branch;
    std::optional<double> metric_scale;
    double transparency_threshold = 0.1;
};

/// Reads and parses a config file. Throws Error(ConfigError).
json load_config_file(const std::string& path);

/// Applies "key=value". Keys are RawConfig fields, units.<field>, branch,
/// metric_scale or transparency_threshold; anything else is rejected.
void apply_override(json& doc, std::string_view assignment);

/// Converts a document (after overrides) into SI / angular units.
RunConfig parse_run_config(const json& doc);

/// Converts a value given in the document's declared unit for `field`
/// (omega1 must already be known for the "omega1" unit).
double to_angular(const json& doc, const std::string& field, double value, double omega1);

/// Document for a RawConfig with every frequency in rad/s.
json to_json(const RawConfig& raw);

bool is_frequency_field(std::string_view field);

} // namespace omsim
