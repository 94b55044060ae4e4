#include "catch2/catch_amalgamated.hpp"

#include "omsim/config.hpp"
#include "omsim/errors.hpp"

#include "support.hpp"

#include <cmath>
#include <functional>

using namespace omsim;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return ErrorCode::InvalidArgument;
}

json lab_units_doc() {
    return json::parse(R"({
        "pump_wavelength": 1.064e-6, "cavity_length": 0.025,
        "omega1": 947e3, "omega2": 947e3, "Q1": 6700, "Q2": 6700,
        "m1": 145e-12, "m2": 145e-12, "kappa": 215e3,
        "pump_power": 2e-3, "probe_power": 2e-9, "coulomb_lambda": 8e35,
        "detuning_mode": "effective", "detuning_value": 1.0,
        "units": {"omega1": "hz_times_2pi", "omega2": "hz_times_2pi",
                  "kappa": "hz_times_2pi", "detuning_value": "omega1"}
    })");
}

} // namespace

TEST_CASE("lab units convert to the built-in parameters", "[config]") {
    const auto cfg = parse_run_config(lab_units_doc());
    const auto ref = reference_config();
    CHECK(cfg.raw.omega1 == Catch::Approx(ref.omega1).epsilon(1e-15));
    CHECK(cfg.raw.kappa == Catch::Approx(ref.kappa).epsilon(1e-15));
    CHECK(cfg.raw.detuning_value == Catch::Approx(ref.omega1).epsilon(1e-15));
    CHECK_FALSE(cfg.branch);
}

TEST_CASE("serialized config round-trips", "[config]") {
    const auto raw = reference_config();
    CHECK(parse_run_config(to_json(raw)).raw == raw);
}

TEST_CASE("frequencies without a unit are rejected", "[config]") {
    auto doc = lab_units_doc();
    doc["units"].erase("kappa");
    CHECK(code_of([&] { parse_run_config(doc); }) == ErrorCode::ConfigError);
    doc = lab_units_doc();
    doc["units"]["kappa"] = "omega1";
    CHECK(code_of([&] { parse_run_config(doc); }) == ErrorCode::ConfigError);
}

TEST_CASE("unknown keys are rejected", "[config]") {
    auto doc = lab_units_doc();
    doc["mass"] = 1.0;
    CHECK(code_of([&] { parse_run_config(doc); }) == ErrorCode::ConfigError);
    doc = lab_units_doc();
    CHECK(code_of([&] { apply_override(doc, "colour=red"); }) == ErrorCode::ConfigError);
    CHECK(code_of([&] { apply_override(doc, "units={}"); }) == ErrorCode::ConfigError);
    CHECK(code_of([&] { apply_override(doc, "pump_power"); }) == ErrorCode::ConfigError);
}

TEST_CASE("overrides replace single fields", "[config]") {
    auto doc = lab_units_doc();
    apply_override(doc, "coulomb_lambda=0");
    apply_override(doc, "detuning_value=-1");
    apply_override(doc, "branch=high");
    apply_override(doc, "units.kappa=rad_per_s");
    const auto cfg = parse_run_config(doc);
    CHECK(cfg.raw.coulomb_lambda == 0.0);
    CHECK(cfg.raw.detuning_value == Catch::Approx(-reference_config().omega1).epsilon(1e-15));
    CHECK(cfg.branch == Branch::HighPower);
    CHECK(cfg.raw.kappa == 215e3);
}

TEST_CASE("bad enumerations and files", "[config]") {
    auto doc = lab_units_doc();
    doc["detuning_mode"] = "sideways";
    CHECK(code_of([&] { parse_run_config(doc); }) == ErrorCode::ConfigError);
    doc = lab_units_doc();
    doc["branch"] = "upper";
    CHECK(code_of([&] { parse_run_config(doc); }) == ErrorCode::ConfigError);
    CHECK(code_of([] { load_config_file("/nonexistent/omsim.json"); }) == ErrorCode::ConfigError);
}
