#include "omsim/model.hpp"

#include "omsim/errors.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace omsim {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonPositiveParameter: return "NonPositiveParameter";
    case ErrorCode::CoulombOverstrong: return "CoulombOverstrong";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::AmbiguousBranch: return "AmbiguousBranch";
    case ErrorCode::PolePassage: return "PolePassage";
    case ErrorCode::SingularA: return "SingularA";
    case ErrorCode::SingularDenominator: return "SingularDenominator";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::NoTransparencyWindow: return "NoTransparencyWindow";
    case ErrorCode::StepFailure: return "StepFailure";
    case ErrorCode::Divergence: return "Divergence";
    case ErrorCode::InsufficientSpan: return "InsufficientSpan";
    }
    return "Unknown";
}

bool is_physics_error(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::BudgetExceeded:
    case ErrorCode::ShapeMismatch:
        return false;
    default:
        return true;
    }
}

std::string to_string(DetuningMode mode) {
    return mode == DetuningMode::EffectiveDelta ? "effective" : "bare";
}

std::string to_string(ViolationKind kind) {
    switch (kind) {
    case ViolationKind::NonPositiveParameter: return "NonPositiveParameter";
    case ViolationKind::NegativeCoupling: return "NegativeCoupling";
    case ViolationKind::NonFinite: return "NonFinite";
    case ViolationKind::CoulombOverstrong: return "CoulombOverstrong";
    case ViolationKind::WeakProbeViolated: return "WeakProbeViolated";
    }
    return "Unknown";
}

bool ValidationReport::contains(ViolationKind kind, const std::string& name) const {
    for (const auto& v : violations) {
        if (v.kind == kind && (name.empty() || v.name == name)) return true;
    }
    return false;
}

namespace {

std::vector<std::pair<const char*, double>> positive_fields(const RawConfig& c) {
    return {
        {"pump_wavelength", c.pump_wavelength},
        {"cavity_length", c.cavity_length},
        {"omega1", c.omega1},
        {"omega2", c.omega2},
        {"Q1", c.Q1},
        {"Q2", c.Q2},
        {"m1", c.m1},
        {"m2", c.m2},
        {"kappa", c.kappa},
        {"pump_power", c.pump_power},
        {"probe_power", c.probe_power},
    };
}

ModelParams derive(const RawConfig& cfg) {
    using namespace constants;
    ModelParams p;
    p.raw = cfg;
    p.omega_a = 2.0 * pi * speed_of_light / cfg.pump_wavelength;
    p.omega_l = p.omega_a;
    p.g = p.omega_a / cfg.cavity_length;
    p.gamma1 = cfg.omega1 / cfg.Q1;
    p.gamma2 = cfg.omega2 / cfg.Q2;
    p.eps_l = std::sqrt(2.0 * cfg.kappa * cfg.pump_power / (hbar * p.omega_l));
    // omega_s differs from omega_l by ~1e6 rad/s out of 1e15.
    p.eps_s = std::sqrt(2.0 * cfg.kappa * cfg.probe_power / (hbar * p.omega_l));
    p.coulomb_stiffness = hbar * cfg.coulomb_lambda;
    p.effective_stiffness = cfg.m1 * cfg.omega1 * cfg.omega1 -
        p.coulomb_stiffness * p.coulomb_stiffness / (cfg.m2 * cfg.omega2 * cfg.omega2);
    return p;
}

} // namespace

ModelParams build_params(const RawConfig& cfg) {
    for (const auto& [name, value] : positive_fields(cfg)) {
        if (!(value > 0.0) || !std::isfinite(value)) {
            std::ostringstream os;
            os << name << " must be positive and finite (got " << value << ")";
            throw Error(ErrorCode::NonPositiveParameter, os.str());
        }
    }
    if (!(cfg.coulomb_lambda >= 0.0) || !std::isfinite(cfg.coulomb_lambda)) {
        throw Error(ErrorCode::NonPositiveParameter, "coulomb_lambda must be >= 0 and finite");
    }
    if (!std::isfinite(cfg.detuning_value)) {
        throw Error(ErrorCode::NonPositiveParameter, "detuning_value must be finite");
    }
    ModelParams p = derive(cfg);
    if (!(p.effective_stiffness > 0.0)) {
        std::ostringstream os;
        os << "effective stiffness " << p.effective_stiffness
           << " N/m <= 0; coulomb_lambda must stay below " << coulomb_threshold(p);
        throw Error(ErrorCode::CoulombOverstrong, os.str());
    }
    return p;
}

double coulomb_threshold(const ModelParams& p) {
    const auto& r = p.raw;
    return std::sqrt(r.m1 * r.m2 * r.omega1 * r.omega1 * r.omega2 * r.omega2) / constants::hbar;
}

ValidationReport validate(const ModelParams& p, const ValidateOptions& opts) {
    ValidationReport report;
    auto add = [&](ViolationKind kind, std::string name, std::string message) {
        report.violations.push_back({kind, std::move(name), std::move(message)});
    };

    for (const auto& [name, value] : positive_fields(p.raw)) {
        if (!std::isfinite(value)) {
            add(ViolationKind::NonFinite, name, std::string(name) + " is not finite");
        } else if (!(value > 0.0)) {
            add(ViolationKind::NonPositiveParameter, name, std::string(name) + " must be > 0");
        }
    }
    if (!(p.raw.coulomb_lambda >= 0.0)) {
        add(ViolationKind::NegativeCoupling, "coulomb_lambda", "coulomb_lambda must be >= 0");
    }
    const std::pair<const char*, double> derived[] = {
        {"g", p.g}, {"gamma1", p.gamma1}, {"gamma2", p.gamma2}};
    for (const auto& [name, value] : derived) {
        if (!(value > 0.0)) {
            add(ViolationKind::NonPositiveParameter, name, std::string(name) + " must be > 0");
        }
    }
    if (!(p.effective_stiffness > 0.0)) {
        add(ViolationKind::CoulombOverstrong, "effective_stiffness",
            "two-resonator spring system has no stable equilibrium");
    }
    if (opts.oracle_requested && !(p.eps_s <= opts.weak_probe_ratio * p.eps_l)) {
        add(ViolationKind::WeakProbeViolated, "eps_s",
            "probe amplitude is not small against the pump; first-order sidebands no longer apply");
    }
    return report;
}

void require_usable(const ModelParams& p) {
    const auto& r = p.raw;
    const bool ok = r.m1 > 0.0 && r.m2 > 0.0 && r.omega1 > 0.0 && r.omega2 > 0.0 &&
        r.kappa > 0.0 && p.gamma1 >= 0.0 && p.gamma2 >= 0.0 && p.g >= 0.0 &&
        p.eps_l >= 0.0 && p.eps_s >= 0.0 && p.effective_stiffness > 0.0 &&
        std::isfinite(p.g) && std::isfinite(p.eps_l) && std::isfinite(p.coulomb_stiffness);
    if (!ok) {
        throw Error(ErrorCode::InvalidParams, "model parameters fail basic physical checks");
    }
}

RawConfig reference_config() {
    using constants::pi;
    RawConfig c;
    c.pump_wavelength = 1064e-9;
    c.cavity_length = 25e-3;
    c.omega1 = 2.0 * pi * 947e3;
    c.omega2 = 2.0 * pi * 947e3;
    c.Q1 = 6700.0;
    c.Q2 = 6700.0;
    c.m1 = 145e-12;
    c.m2 = 145e-12;
    c.kappa = 2.0 * pi * 215e3;
    c.pump_power = 2e-3;
    c.probe_power = 2e-9; // eps_s = 1e-3 eps_l
    c.coulomb_lambda = 8e35;
    c.detuning_mode = DetuningMode::EffectiveDelta;
    c.detuning_value = c.omega1;
    return c;
}

} // namespace omsim
