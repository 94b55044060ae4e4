#pragma once

// Weak-probe response of the cavity field at the upper sideband and the
// reflected-field quadratures eps_R = 2 kappa a_plus.

#include "omsim/model.hpp"
#include "omsim/steady_state.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace omsim {

using cplx = std::complex<double>;

/// Mechanical response denominator seen by resonator 1, including the
/// Coulomb-coupled second resonator.
cplx chi_A(const ModelParams& p, double delta);

/// Correction from the lower optical sideband feeding back through the mirror.
cplx factor_B(const ModelParams& p, const SteadyState& s, double delta);

/// kappa + i(Delta - delta) - i hbar g^2 |a_s|^2 / (A B)
cplx a_plus_denominator(const ModelParams& p, const SteadyState& s, double delta);

cplx a_plus(const ModelParams& p, const SteadyState& s, double delta);

/// Reflected field at the probe frequency, eps_R = 2 kappa a_plus.
cplx epsilon_R(const ModelParams& p, const SteadyState& s, double delta);

/// eps_out+ = eps_R - 1
cplx epsilon_out_plus(const ModelParams& p, const SteadyState& s, double delta);

/// Analytic d eps_R / d delta.
cplx epsilon_R_derivative(const ModelParams& p, const SteadyState& s, double delta);

struct ResponsePoint {
    double delta = 0.0;
    cplx a_plus{};
    cplx eps_R{};
    std::optional<std::string> error;

    double absorption() const { return eps_R.real(); }
    double dispersion() const { return eps_R.imag(); }
};

/// Probe detunings given in units of omega1.
struct DeltaGrid {
    double start = 0.9;
    double stop = 1.1;
    std::size_t count = 4001;

    std::vector<double> materialize(double omega1) const;
};

struct Spectrum {
    std::uint64_t params_hash = 0;
    std::vector<ResponsePoint> points;
};

/// Evaluates one point, capturing any error in the point itself.
ResponsePoint evaluate_point(const ModelParams& p, const SteadyState& s, double delta);

/// Point-wise epsilon_R on a strictly increasing grid. Results are in grid
/// order regardless of the worker count.
Spectrum spectrum(const ModelParams& p, const SteadyState& s, const std::vector<double>& deltas,
                  unsigned workers = 1);
Spectrum spectrum(const ModelParams& p, const SteadyState& s, const DeltaGrid& grid,
                  unsigned workers = 1);

/// FNV-1a over the numeric content of (params, steady state).
std::uint64_t params_hash(const ModelParams& p, const SteadyState& s);

} // namespace omsim
