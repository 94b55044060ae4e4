#include "omsim/config.hpp"

#include "omsim/errors.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace omsim {

namespace {

constexpr std::array<std::string_view, 14> raw_fields = {
    "pump_wavelength", "cavity_length", "omega1",         "omega2",
    "Q1",              "Q2",            "m1",             "m2",
    "kappa",           "pump_power",    "probe_power",    "coulomb_lambda",
    "detuning_mode",   "detuning_value"};

constexpr std::array<std::string_view, 5> option_fields = {
    "branch", "metric_scale", "transparency_threshold", "units", "sweep"};

constexpr std::array<std::string_view, 4> frequency_fields = {"omega1", "omega2", "kappa",
                                                              "detuning_value"};

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& arr, std::string_view key) {
    return std::find(arr.begin(), arr.end(), key) != arr.end();
}

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

double number_field(const json& doc, const char* name) {
    auto it = doc.find(name);
    if (it == doc.end()) config_error(std::string("missing key '") + name + "'");
    if (!it->is_number()) config_error(std::string("key '") + name + "' must be a number");
    return it->get<double>();
}

json parse_scalar(std::string_view text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty() && text.front() == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec == std::errc() && ptr == last) return value;
    return std::string(text);
}

} // namespace

bool is_frequency_field(std::string_view field) { return contains(frequency_fields, field); }

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) config_error("cannot open config file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        config_error("cannot parse '" + path + "': " + e.what());
    }
}

void apply_override(json& doc, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        config_error("override '" + std::string(assignment) + "' is not key=value");
    }
    const std::string key(assignment.substr(0, eq));
    const json value = parse_scalar(assignment.substr(eq + 1));

    if (key.rfind("units.", 0) == 0) {
        const std::string field = key.substr(6);
        if (!is_frequency_field(field)) config_error("unknown override key '" + key + "'");
        if (!value.is_string()) config_error("unit for '" + field + "' must be a name");
        doc["units"][field] = value;
        return;
    }
    if (!contains(raw_fields, key) && !contains(option_fields, key)) {
        config_error("unknown override key '" + key + "'");
    }
    if (key == "units" || key == "sweep") config_error("'" + key + "' cannot be overridden as a whole");
    doc[key] = value;
}

double to_angular(const json& doc, const std::string& field, double value, double omega1) {
    auto units = doc.find("units");
    if (units == doc.end() || !units->is_object() || !units->contains(field)) {
        config_error("frequency '" + field + "' has no entry in the units block");
    }
    const auto& unit = (*units)[field];
    if (!unit.is_string()) config_error("unit for '" + field + "' must be a string");
    const auto name = unit.get<std::string>();
    if (name == "rad_per_s") return value;
    if (name == "hz_times_2pi") return 2.0 * constants::pi * value;
    if (name == "omega1" && field == "detuning_value") return value * omega1;
    config_error("unit '" + name + "' is not valid for '" + field + "'");
}

RunConfig parse_run_config(const json& doc) {
    if (!doc.is_object()) config_error("config must be a JSON object");
    for (const auto& [key, _] : doc.items()) {
        if (!contains(raw_fields, key) && !contains(option_fields, key)) {
            config_error("unknown config key '" + key + "'");
        }
    }
    if (auto units = doc.find("units"); units != doc.end()) {
        if (!units->is_object()) config_error("'units' must be an object");
        for (const auto& [key, _] : units->items()) {
            if (!is_frequency_field(key)) config_error("units block names unknown field '" + key + "'");
        }
    }

    RunConfig out;
    RawConfig& r = out.raw;
    r.pump_wavelength = number_field(doc, "pump_wavelength");
    r.cavity_length = number_field(doc, "cavity_length");
    r.omega1 = to_angular(doc, "omega1", number_field(doc, "omega1"), 0.0);
    r.omega2 = to_angular(doc, "omega2", number_field(doc, "omega2"), r.omega1);
    r.Q1 = number_field(doc, "Q1");
    r.Q2 = number_field(doc, "Q2");
    r.m1 = number_field(doc, "m1");
    r.m2 = number_field(doc, "m2");
    r.kappa = to_angular(doc, "kappa", number_field(doc, "kappa"), r.omega1);
    r.pump_power = number_field(doc, "pump_power");
    r.probe_power = number_field(doc, "probe_power");
    r.coulomb_lambda = number_field(doc, "coulomb_lambda");
    r.detuning_value = to_angular(doc, "detuning_value", number_field(doc, "detuning_value"), r.omega1);

    const auto mode = doc.value("detuning_mode", std::string("effective"));
    if (mode == "effective") {
        r.detuning_mode = DetuningMode::EffectiveDelta;
    } else if (mode == "bare") {
        r.detuning_mode = DetuningMode::BareDeltaA;
    } else {
        config_error("detuning_mode must be 'effective' or 'bare'");
    }

    if (auto it = doc.find("branch"); it != doc.end() && !it->is_null()) {
        if (!it->is_string()) config_error("branch must be low, middle or high");
        const auto name = it->get<std::string>();
        if (name != "auto") {
            out.branch = branch_from_string(name);
            if (!out.branch) config_error("branch must be low, middle, high or auto");
        }
    }
    if (auto it = doc.find("metric_scale"); it != doc.end() && !it->is_null()) {
        if (!it->is_number()) config_error("metric_scale must be a number");
        out.metric_scale = it->get<double>();
    }
    if (doc.contains("transparency_threshold")) {
        out.transparency_threshold = number_field(doc, "transparency_threshold");
    }
    return out;
}

json to_json(const RawConfig& r) {
    json doc = {
        {"pump_wavelength", r.pump_wavelength},
        {"cavity_length", r.cavity_length},
        {"omega1", r.omega1},
        {"omega2", r.omega2},
        {"Q1", r.Q1},
        {"Q2", r.Q2},
        {"m1", r.m1},
        {"m2", r.m2},
        {"kappa", r.kappa},
        {"pump_power", r.pump_power},
        {"probe_power", r.probe_power},
        {"coulomb_lambda", r.coulomb_lambda},
        {"detuning_mode", to_string(r.detuning_mode)},
        {"detuning_value", r.detuning_value},
    };
    doc["units"] = {{"omega1", "rad_per_s"},
                    {"omega2", "rad_per_s"},
                    {"kappa", "rad_per_s"},
                    {"detuning_value", "rad_per_s"}};
    return doc;
}

} // namespace omsim
