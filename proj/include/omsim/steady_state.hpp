#pragma once

#include "omsim/model.hpp"

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace omsim {

enum class Branch { LowPower, Middle, HighPower };

std::string to_string(Branch b);
std::optional<Branch> branch_from_string(const std::string& s);

/// Static mean values with the probe off.
struct SteadyState {
    double q1s = 0.0; // m
    double q2s = 0.0; // m
    double p1s = 0.0; // always 0
    double p2s = 0.0; // always 0
    std::complex<double> a_s{};
    double n_cav = 0.0;            // |a_s|^2
    double effective_detuning = 0.0; // rad/s
    Branch branch = Branch::LowPower;
    // Static slope-test stability. Dynamical stability of the linearized
    // five-variable system is not analysed.
    bool stable = true;
    bool dynamical_stability_checked = false;
};

/// Steady state at a prescribed effective detuning; closed form, no root finding.
SteadyState solve_direct(const ModelParams& p, double effective_detuning);

/// Every steady state at a prescribed bare detuning Delta_a, i.e. all
/// non-negative roots of n = eps_l^2 / ((Delta_a - (hbar g^2 / D) n)^2 + kappa^2).
/// One or three entries, ascending in n_cav.
std::vector<SteadyState> solve_selfconsistent(const ModelParams& p, double bare_detuning);

/// Picks a solution from solve_selfconsistent. Without an explicit branch the
/// result must be unique; otherwise throws Error(AmbiguousBranch).
SteadyState select_branch(const std::vector<SteadyState>& states, std::optional<Branch> branch);

/// Solves according to p.raw.detuning_mode / detuning_value.
SteadyState solve_configured(const ModelParams& p, std::optional<Branch> branch = std::nullopt);

/// Largest normalized right-hand side of the mean-value equations at s with
/// the probe off. Each equation is divided by the magnitude of its largest term.
double steady_residual(const ModelParams& p, const SteadyState& s);

namespace detail {
/// Real roots of y^3 + b y^2 + c y + d, ascending, polished by Newton.
std::vector<double> real_cubic_roots(double b, double c, double d);
} // namespace detail

} // namespace omsim
