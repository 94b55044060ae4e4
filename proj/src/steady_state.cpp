#include "omsim/steady_state.hpp"

#include "omsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace omsim {

std::string to_string(Branch b) {
    switch (b) {
    case Branch::LowPower: return "low";
    case Branch::Middle: return "middle";
    case Branch::HighPower: return "high";
    }
    return "low";
}

std::optional<Branch> branch_from_string(const std::string& s) {
    if (s == "low") return Branch::LowPower;
    if (s == "middle") return Branch::Middle;
    if (s == "high") return Branch::HighPower;
    return std::nullopt;
}

namespace detail {

namespace {

double cubic_value(double y, double b, double c, double d) { return ((y + b) * y + c) * y + d; }

double polish(double y, double b, double c, double d) {
    for (int iter = 0; iter < 60; ++iter) {
        const double f = cubic_value(y, b, c, d);
        const double df = (3.0 * y + 2.0 * b) * y + c;
        if (f == 0.0 || df == 0.0) break;
        const double step = f / df;
        const double next = y - step;
        if (std::abs(cubic_value(next, b, c, d)) >= std::abs(f)) break;
        y = next;
        if (std::abs(step) <= 1e-16 * std::abs(y)) break;
    }
    return y;
}

} // namespace

std::vector<double> real_cubic_roots(double b, double c, double d) {
    const double shift = b / 3.0;
    const double p = c - b * b / 3.0;
    const double q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    const double disc = q * q / 4.0 + p * p * p / 27.0;

    std::vector<double> roots;
    if (disc < 0.0) {
        const double r = 2.0 * std::sqrt(-p / 3.0);
        const double arg = std::clamp(3.0 * q / (p * r), -1.0, 1.0);
        const double phi = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k) {
            roots.push_back(r * std::cos(phi - 2.0 * constants::pi * k / 3.0) - shift);
        }
    } else {
        // Stable Cardano: pick the cube root that avoids cancellation.
        const double sq = std::sqrt(disc);
        const double u = std::cbrt(-q / 2.0 - std::copysign(sq, q));
        const double t = (u == 0.0) ? 0.0 : u - p / (3.0 * u);
        roots.push_back(t - shift);
    }
    for (auto& y : roots) y = polish(y, b, c, d);
    std::sort(roots.begin(), roots.end());
    return roots;
}

} // namespace detail

namespace {

SteadyState state_from_intensity(const ModelParams& p, double bare_detuning, double n_cav) {
    SteadyState s;
    s.n_cav = n_cav;
    s.q1s = constants::hbar * p.g * n_cav / p.effective_stiffness;
    s.q2s = -p.coulomb_stiffness * s.q1s / (p.raw.m2 * p.raw.omega2 * p.raw.omega2);
    s.effective_detuning = bare_detuning - p.g * s.q1s;
    s.a_s = p.eps_l / std::complex<double>(p.raw.kappa, s.effective_detuning);
    return s;
}

} // namespace

SteadyState solve_direct(const ModelParams& p, double effective_detuning) {
    require_usable(p);
    if (!std::isfinite(effective_detuning)) {
        throw Error(ErrorCode::InvalidParams, "effective detuning must be finite");
    }
    const double kappa = p.raw.kappa;
    SteadyState s;
    s.effective_detuning = effective_detuning;
    s.a_s = p.eps_l / std::complex<double>(kappa, effective_detuning);
    s.n_cav = p.eps_l * p.eps_l / (effective_detuning * effective_detuning + kappa * kappa);
    s.q1s = constants::hbar * p.g * s.n_cav / p.effective_stiffness;
    s.q2s = -p.coulomb_stiffness * s.q1s / (p.raw.m2 * p.raw.omega2 * p.raw.omega2);
    s.branch = Branch::LowPower;
    s.stable = true;
    return s;
}

std::vector<SteadyState> solve_selfconsistent(const ModelParams& p, double bare_detuning) {
    require_usable(p);
    if (!std::isfinite(bare_detuning)) {
        throw Error(ErrorCode::InvalidParams, "bare detuning must be finite");
    }
    const double kappa = p.raw.kappa;
    const double eps2 = p.eps_l * p.eps_l;
    // Frequency shift per intracavity photon.
    const double shift_per_photon = constants::hbar * p.g * p.g / p.effective_stiffness;

    if (shift_per_photon == 0.0 || eps2 == 0.0) {
        auto s = state_from_intensity(p, bare_detuning,
                                      eps2 / (bare_detuning * bare_detuning + kappa * kappa));
        return {s};
    }

    // In y = K n / kappa: y ((a - y)^2 + 1) = P with a = Delta_a / kappa.
    const double a = bare_detuning / kappa;
    const double pump = shift_per_photon * eps2 / (kappa * kappa * kappa);
    const double b = -2.0 * a, c = a * a + 1.0, d = -pump;

    std::vector<SteadyState> out;
    for (double y : detail::real_cubic_roots(b, c, d)) {
        const double f = ((y + b) * y + c) * y + d;
        const double scale = std::max({std::abs(y * y * y), std::abs(b * y * y), std::abs(c * y),
                                       std::abs(d)});
        if (std::abs(f) > 1e-12 * scale) {
            std::ostringstream os;
            os << "cubic root polishing stalled at relative residual " << std::abs(f) / scale;
            throw Error(ErrorCode::NoConvergence, os.str());
        }
        if (y < 0.0) continue; // every physical root is positive when eps_l > 0
        auto s = state_from_intensity(p, bare_detuning, kappa * y / shift_per_photon);
        s.stable = (3.0 * y - 4.0 * a) * y + c > 0.0;
        out.push_back(s);
    }
    if (out.empty()) {
        throw Error(ErrorCode::NoConvergence, "no non-negative steady-state intensity found");
    }
    if (out.size() == 3) {
        out[0].branch = Branch::LowPower;
        out[1].branch = Branch::Middle;
        out[2].branch = Branch::HighPower;
    } else {
        for (auto& s : out) s.branch = Branch::LowPower;
    }
    return out;
}

SteadyState select_branch(const std::vector<SteadyState>& states, std::optional<Branch> branch) {
    if (states.empty()) throw Error(ErrorCode::NoConvergence, "no steady state available");
    if (!branch) {
        if (states.size() > 1) {
            throw Error(ErrorCode::AmbiguousBranch,
                        "bistable steady state; set branch to low, middle or high");
        }
        return states.front();
    }
    if (states.size() == 1) {
        if (*branch == Branch::LowPower) return states.front();
        throw Error(ErrorCode::InvalidParams,
                    "branch " + to_string(*branch) + " requested but the steady state is unique");
    }
    for (const auto& s : states) {
        if (s.branch == *branch) return s;
    }
    throw Error(ErrorCode::InvalidParams, "requested branch not present");
}

SteadyState solve_configured(const ModelParams& p, std::optional<Branch> branch) {
    if (p.raw.detuning_mode == DetuningMode::EffectiveDelta) {
        return solve_direct(p, p.raw.detuning_value);
    }
    return select_branch(solve_selfconsistent(p, p.raw.detuning_value), branch);
}

double steady_residual(const ModelParams& p, const SteadyState& s) {
    const auto& r = p.raw;
    auto ratio = [](double num, double scale) { return scale == 0.0 ? 0.0 : num / scale; };

    const double v1 = s.p1s / r.m1;
    const double v2 = s.p2s / r.m2;
    const double res_q1 = ratio(std::abs(v1), std::max(std::abs(v1), r.omega1 * std::abs(s.q1s)));
    const double res_q2 = ratio(std::abs(v2), std::max(std::abs(v2), r.omega2 * std::abs(s.q2s)));

    const double intensity = std::norm(s.a_s);
    const double spring1 = -r.m1 * r.omega1 * r.omega1 * s.q1s;
    const double cross1 = -p.coulomb_stiffness * s.q2s;
    const double pressure = constants::hbar * p.g * intensity;
    const double damp1 = -p.gamma1 * s.p1s;
    const double res_p1 = ratio(std::abs(spring1 + cross1 + pressure + damp1),
                                std::max({std::abs(spring1), std::abs(cross1), std::abs(pressure),
                                          std::abs(damp1)}));

    const double spring2 = -r.m2 * r.omega2 * r.omega2 * s.q2s;
    const double cross2 = -p.coulomb_stiffness * s.q1s;
    const double damp2 = -p.gamma2 * s.p2s;
    const double res_p2 = ratio(std::abs(spring2 + cross2 + damp2),
                                std::max({std::abs(spring2), std::abs(cross2), std::abs(damp2)}));

    const double bare = s.effective_detuning + p.g * s.q1s;
    const std::complex<double> rate(r.kappa, bare - p.g * s.q1s);
    const std::complex<double> decay = -rate * s.a_s;
    const double res_a = ratio(std::abs(decay + p.eps_l), std::max(std::abs(decay), p.eps_l));

    return std::max({res_q1, res_q2, res_p1, res_p2, res_a});
}

} // namespace omsim
