#pragma once

// Independent check of the analytic probe response: integrate the nonlinear
// mean-value equations in time and read the upper sideband off the cavity
// field by demodulation. Nothing here calls into response.hpp.
//
//   q1' = p1 / m1
//   p1' = -m1 w1^2 q1 - hbar lambda q2 + hbar g |a|^2 - gamma1 p1
//   q2' = p2 / m2
//   p2' = -m2 w2^2 q2 - hbar lambda q1 - gamma2 p2
//   a'  = -(kappa + i (Delta_a - g q1)) a + eps_l + eps_s exp(-i delta t)

#include "omsim/model.hpp"

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace omsim {

struct MeanState {
    double q1 = 0.0, p1 = 0.0, q2 = 0.0, p2 = 0.0;
    std::complex<double> a{};
};

struct IntegratorStats {
    std::size_t steps = 0;
    std::size_t rejected = 0;
    std::size_t rhs_evaluations = 0;
    double rtol = 0.0;
    std::vector<double> atol; // q1, p1, q2, p2, Re a, Im a
};

struct Trajectory {
    std::vector<double> t;
    std::vector<double> q1, p1, q2, p2;
    std::vector<std::complex<double>> a;
    double eps_s = 0.0; // probe amplitude used to drive the run
    double delta = 0.0; // probe detuning
    IntegratorStats meta;

    std::size_t size() const { return t.size(); }
    void push(double time, const MeanState& s);
};

struct IntegrationOptions {
    double rtol = 1e-10;
    double record_from = 0.0;             // first recorded time
    std::optional<double> sample_dt;      // uniform sampling via dense output; else accepted steps
    std::size_t stride = 1;               // keep every stride-th recorded sample
    std::optional<MeanState> initial;     // default: analytic steady state at the given Delta
    double divergence_factor = 1e6;
    std::size_t max_steps = 50'000'000;
};

/// Integrates the mean-value equations from t = 0 to t_end. The bare detuning
/// is set to Delta + g q1s so that the effective detuning matches the direct
/// steady state. Throws Error(StepFailure) or Error(Divergence).
Trajectory integrate_mean_dynamics(const ModelParams& p, double effective_detuning, double eps_s,
                                   double delta, double t_end, const IntegrationOptions& opts = {});

struct DemodResult {
    double delta = 0.0;
    std::complex<double> a_plus_est{};
    std::complex<double> a_minus_est{}; // reported only
    std::complex<double> residual_dc{};
    double window_start = 0.0;
    double window_stop = 0.0;
};

struct DemodOptions {
    std::size_t n_periods = 20;
    double transient_cut = 0.0;
    std::size_t samples_per_period = 4096;
};

/// Fourier components of a(t) - a_s at exp(-i delta t) and exp(+i delta t)
/// over the last n_periods complete beat periods of the trajectory, divided
/// by the probe amplitude (by 1 when the probe is off).
/// Throws Error(InsufficientSpan) if those periods start before the cut.
DemodResult demodulate(const Trajectory& traj, std::complex<double> a_s_analytic, double delta,
                       const DemodOptions& opts = {});

struct OracleRow {
    double delta = 0.0;
    std::complex<double> analytic{};
    std::complex<double> oracle{};
    double rel_error = 0.0;
    DemodResult demod;
    IntegratorStats stats;
    std::optional<std::string> error;
};

struct ValidationTable {
    std::vector<OracleRow> rows;
    double max_rel_error = 0.0;
    double tolerance = 1e-3;
    bool pass = false;
};

struct CrossValidateOptions {
    std::optional<double> eps_s;  // default: p.eps_s
    std::size_t n_periods = 20;
    std::optional<double> transient_cut; // default: 5 / min(gamma1, gamma2)
    double tolerance = 1e-3;
    double rtol = 1e-10;
    unsigned workers = 1;
};

/// Analytic upper-sideband amplitude supplied by the caller, so the oracle
/// module stays independent of the formula it checks.
using AnalyticAPlus =
    std::function<std::complex<double>(const ModelParams&, double effective_detuning, double delta)>;

ValidationTable cross_validate(const ModelParams& p, double effective_detuning,
                               const std::vector<double>& deltas, AnalyticAPlus analytic,
                               const CrossValidateOptions& opts = {});

/// omega1 - 2 kappa, omega1 - kappa/2, omega1, omega1 + kappa/2, omega1 + 2 kappa
std::vector<double> default_oracle_deltas(const ModelParams& p);

} // namespace omsim
