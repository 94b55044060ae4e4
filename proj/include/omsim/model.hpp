#pragma once

// Physical parameters of the driven cavity with a Coulomb-coupled pair of
// nanoresonators. Every downstream module reads its constants from
// ModelParams; nothing re-derives them.

#include <string>
#include <vector>

namespace omsim {

namespace constants {
inline constexpr double hbar = 1.054571817e-34;     // J s
inline constexpr double speed_of_light = 2.99792458e8; // m/s
inline constexpr double pi = 3.14159265358979323846;
} // namespace constants

enum class DetuningMode {
    EffectiveDelta, // detuning_value is the effective detuning (pump vs shifted cavity)
    BareDeltaA,     // detuning_value is the bare pump-cavity detuning
};

/// Raw inputs. Frequencies are angular (rad/s); unit conversion happens at
/// config ingestion.
struct RawConfig {
    double pump_wavelength = 0.0; // m
    double cavity_length = 0.0;   // m
    double omega1 = 0.0;          // rad/s
    double omega2 = 0.0;          // rad/s
    double Q1 = 0.0;
    double Q2 = 0.0;
    double m1 = 0.0;              // kg
    double m2 = 0.0;              // kg
    double kappa = 0.0;           // cavity amplitude decay, rad/s
    double pump_power = 0.0;      // W
    double probe_power = 0.0;     // W
    double coulomb_lambda = 0.0;  // rad s^-1 m^-2
    DetuningMode detuning_mode = DetuningMode::EffectiveDelta;
    double detuning_value = 0.0;  // rad/s

    bool operator==(const RawConfig&) const = default;
};

/// Raw inputs plus every derived constant.
///
/// Fields are public so that tests can dial in analytic limits (g = 0,
/// eps_l = 0) that no physical RawConfig produces.
struct ModelParams {
    RawConfig raw;

    double omega_a = 0.0;  // optical angular frequency 2 pi c / lambda_l
    double omega_l = 0.0;  // pump frequency, taken equal to omega_a
    double g = 0.0;        // optomechanical coupling omega_a / d, rad s^-1 m^-1
    double gamma1 = 0.0;   // omega1 / Q1
    double gamma2 = 0.0;   // omega2 / Q2
    double eps_l = 0.0;    // pump drive amplitude sqrt(2 kappa P_l / (hbar omega_l))
    double eps_s = 0.0;    // probe drive amplitude, same convention
    double coulomb_stiffness = 0.0;   // hbar * lambda, N/m
    double effective_stiffness = 0.0; // m1 w1^2 - (hbar lambda)^2 / (m2 w2^2), N/m

    bool operator==(const ModelParams&) const = default;
};

enum class ViolationKind {
    NonPositiveParameter,
    NegativeCoupling,
    NonFinite,
    CoulombOverstrong,
    WeakProbeViolated,
};

struct Violation {
    ViolationKind kind;
    std::string name;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    bool contains(ViolationKind kind, const std::string& name = {}) const;
};

/// Derives every constant from the raw inputs.
/// Throws Error(NonPositiveParameter) or Error(CoulombOverstrong).
ModelParams build_params(const RawConfig& cfg);

struct ValidateOptions {
    bool oracle_requested = false; // also require eps_s << eps_l
    double weak_probe_ratio = 1e-2;
};

/// Lists every violated invariant; never throws, never mutates.
ValidationReport validate(const ModelParams& p, const ValidateOptions& opts = {});

/// Coulomb coupling at which the effective stiffness reaches zero.
double coulomb_threshold(const ModelParams& p);

/// Throws Error(InvalidParams) unless the parameters can be fed to the
/// solvers. Looser than validate(): g = 0 and eps_l = 0 are allowed.
void require_usable(const ModelParams& p);

/// Reference parameter set with a double transparency window: 1064 nm pump,
/// 25 mm cavity, 947 kHz resonators with Q = 6700 and 145 ng, 215 kHz
/// cavity decay, 2 mW pump, lambda = 8e35, effective detuning = +omega1.
RawConfig reference_config();

std::string to_string(DetuningMode mode);
std::string to_string(ViolationKind kind);

} // namespace omsim
