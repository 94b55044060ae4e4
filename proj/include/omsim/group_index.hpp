#pragma once

// Dispersion slopes, transparency points and the group-velocity metric.
//
// The group index is only known up to a proportionality constant, so the
// primary output is the unnormalized metric Im[d eps_R / d delta] in seconds.
// Negative metric means anomalous dispersion (fast light), positive means
// normal dispersion (slow light).

#include "omsim/model.hpp"
#include "omsim/response.hpp"
#include "omsim/steady_state.hpp"

#include <optional>
#include <string>
#include <vector>

namespace omsim {

enum class Regime { Fast, Slow };

std::string to_string(Regime r);
inline Regime regime_from_slope(double slope) { return slope < 0.0 ? Regime::Fast : Regime::Slow; }

/// Central difference of Im[eps_R] with one Richardson step (h, h/2).
/// h defaults to 1e-6 omega1. Throws Error(StepTooLarge) when the two
/// step sizes disagree by more than 1e-4 relative.
double dispersion_slope(const ModelParams& p, const SteadyState& s, double delta,
                        std::optional<double> h = std::nullopt);

struct TransparencyPoint {
    double delta = 0.0;      // rad/s
    double absorption = 0.0; // Re[eps_R]
    double slope = 0.0;      // Im[d eps_R / d delta], s
    Regime regime = Regime::Fast;
};

struct TransparencyReport {
    std::vector<TransparencyPoint> points; // ascending in delta

    std::size_t size() const { return points.size(); }
    /// Lowest / highest point when at least two were found.
    std::optional<TransparencyPoint> minus() const;
    std::optional<TransparencyPoint> plus() const;
    std::optional<double> gap() const;
};

struct TransparencyOptions {
    // Window in units of omega1. The default matches the spectra axes; a
    // window reaching delta < 0 also picks up the mirrored features at -omega1.
    double window_start = 0.9;
    double window_stop = 1.1;
    std::size_t coarse_points = 4001;
    double threshold = 0.1;
};

/// Locates the zero-absorption minima of Re[eps_R] in the window and
/// classifies each by the sign of its dispersion slope.
/// Throws Error(NoTransparencyWindow) if no minimum is below the threshold.
TransparencyReport find_transparency_points(const ModelParams& p, const SteadyState& s,
                                            const TransparencyOptions& opts = {});

enum class Mode { Minus, Plus };

struct GroupMetricPoint {
    double pump_power = 0.0; // W
    Mode mode = Mode::Minus;
    double delta_eval = 0.0; // rad/s
    double metric = 0.0;     // s
    std::optional<double> ng_scaled;
    std::optional<std::string> error;
};

struct GroupMetricOptions {
    TransparencyOptions transparency;
    std::optional<double> scale; // ng_scaled = 1 + scale * metric
};

/// Both branches (omega_minus, omega_plus) at the current steady state.
/// Errors are captured per entry.
std::vector<GroupMetricPoint> evaluate_group_metric(const ModelParams& p, const SteadyState& s,
                                                    const GroupMetricOptions& opts = {});

/// Rebuilds the steady state at effective detuning `detuning` for every pump
/// power, relocates omega_minus / omega_plus and evaluates the metric at
/// each. Two entries per power, in power order.
std::vector<GroupMetricPoint> group_metric_sweep(const ModelParams& p, double detuning,
                                                 const std::vector<double>& powers,
                                                 const GroupMetricOptions& opts = {},
                                                 unsigned workers = 1);

} // namespace omsim
