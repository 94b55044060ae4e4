#include "omsim/response.hpp"

#include "omsim/errors.hpp"
#include "omsim/parallel.hpp"

#include <bit>
#include <cmath>
#include <sstream>

namespace omsim {

namespace {

constexpr cplx I{0.0, 1.0};

// omega2^2 - delta^2 - i delta gamma2
cplx second_mode_denominator(const ModelParams& p, double delta) {
    const double w2 = p.raw.omega2;
    const cplx w(w2 * w2 - delta * delta, -delta * p.gamma2);
    if (std::abs(w) <= 1e-30 * w2 * w2) {
        std::ostringstream os;
        os << "probe detuning " << delta << " rad/s sits on the undamped second-mode pole";
        throw Error(ErrorCode::PolePassage, os.str());
    }
    return w;
}

double optomechanical_strength(const ModelParams& p, const SteadyState& s) {
    return constants::hbar * p.g * p.g * s.n_cav;
}

// A * B = A + i C / (kappa - i (Delta + delta))
cplx dressed_mechanics(const ModelParams& p, const SteadyState& s, double delta, const cplx& a) {
    const cplx lower(p.raw.kappa, -(s.effective_detuning + delta));
    return a + I * optomechanical_strength(p, s) / lower;
}

void require_regular_A(const ModelParams& p, const cplx& a) {
    if (std::abs(a) < 1e-30 * p.raw.m1 * p.raw.omega1 * p.raw.omega1) {
        throw Error(ErrorCode::SingularA, "mechanical response denominator vanishes");
    }
}

} // namespace

cplx chi_A(const ModelParams& p, double delta) {
    const auto& r = p.raw;
    const cplx first = r.m1 * cplx(r.omega1 * r.omega1 - delta * delta, -delta * p.gamma1);
    // Separate quotient: the two terms nearly cancel at the hybridized modes.
    const cplx second =
        p.coulomb_stiffness * p.coulomb_stiffness / (r.m2 * second_mode_denominator(p, delta));
    return first - second;
}

cplx factor_B(const ModelParams& p, const SteadyState& s, double delta) {
    const cplx a = chi_A(p, delta);
    require_regular_A(p, a);
    const cplx lower(p.raw.kappa, -(s.effective_detuning + delta));
    return 1.0 + I * optomechanical_strength(p, s) / (a * lower);
}

cplx a_plus_denominator(const ModelParams& p, const SteadyState& s, double delta) {
    const cplx a = chi_A(p, delta);
    const cplx b = factor_B(p, s, delta);
    return cplx(p.raw.kappa, s.effective_detuning - delta) -
           I * optomechanical_strength(p, s) / (a * b);
}

cplx a_plus(const ModelParams& p, const SteadyState& s, double delta) {
    const cplx den = a_plus_denominator(p, s, delta);
    if (!(std::abs(den) > 1e-30 * p.raw.kappa) || !std::isfinite(std::abs(den))) {
        std::ostringstream os;
        os << "a_plus denominator " << den << " at delta = " << delta << " rad/s";
        throw Error(ErrorCode::SingularDenominator, os.str());
    }
    return 1.0 / den;
}

cplx epsilon_R(const ModelParams& p, const SteadyState& s, double delta) {
    return 2.0 * p.raw.kappa * a_plus(p, s, delta);
}

cplx epsilon_out_plus(const ModelParams& p, const SteadyState& s, double delta) {
    return epsilon_R(p, s, delta) - 1.0;
}

cplx epsilon_R_derivative(const ModelParams& p, const SteadyState& s, double delta) {
    const auto& r = p.raw;
    const cplx w = second_mode_denominator(p, delta);
    const cplx a = chi_A(p, delta);
    require_regular_A(p, a);
    const cplx da = r.m1 * cplx(-2.0 * delta, -p.gamma1) +
                    p.coulomb_stiffness * p.coulomb_stiffness * cplx(-2.0 * delta, -p.gamma2) /
                        (r.m2 * w * w);
    const double strength = optomechanical_strength(p, s);
    const cplx lower(r.kappa, -(s.effective_detuning + delta));
    const cplx ab = dressed_mechanics(p, s, delta, a);
    const cplx dab = da - strength / (lower * lower);
    const cplx den = cplx(r.kappa, s.effective_detuning - delta) - I * strength / ab;
    const cplx dden = -I + I * strength * dab / (ab * ab);
    return -2.0 * r.kappa * dden / (den * den);
}

std::vector<double> DeltaGrid::materialize(double omega1) const {
    if (count == 0 || !std::isfinite(start) || !std::isfinite(stop)) {
        throw Error(ErrorCode::InvalidArgument, "delta grid needs count >= 1 and finite bounds");
    }
    if (count > 1 && !(stop > start)) {
        throw Error(ErrorCode::InvalidArgument, "delta grid must be strictly increasing");
    }
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = start * omega1;
        return out;
    }
    const double span = stop - start;
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = omega1 * (start + span * static_cast<double>(i) / static_cast<double>(count - 1));
    }
    return out;
}

ResponsePoint evaluate_point(const ModelParams& p, const SteadyState& s, double delta) {
    ResponsePoint pt;
    pt.delta = delta;
    try {
        pt.a_plus = a_plus(p, s, delta);
        pt.eps_R = 2.0 * p.raw.kappa * pt.a_plus;
    } catch (const Error& e) {
        const double nan = std::nan("");
        pt.a_plus = {nan, nan};
        pt.eps_R = {nan, nan};
        pt.error = e.what();
    }
    return pt;
}

Spectrum spectrum(const ModelParams& p, const SteadyState& s, const std::vector<double>& deltas,
                  unsigned workers) {
    require_usable(p);
    for (std::size_t i = 1; i < deltas.size(); ++i) {
        if (!(deltas[i] > deltas[i - 1])) {
            throw Error(ErrorCode::InvalidArgument, "delta grid must be strictly increasing");
        }
    }
    Spectrum out;
    out.params_hash = params_hash(p, s);
    out.points.resize(deltas.size());
    detail::parallel_for(deltas.size(), workers,
                         [&](std::size_t i) { out.points[i] = evaluate_point(p, s, deltas[i]); });
    return out;
}

Spectrum spectrum(const ModelParams& p, const SteadyState& s, const DeltaGrid& grid,
                  unsigned workers) {
    return spectrum(p, s, grid.materialize(p.raw.omega1), workers);
}

std::uint64_t params_hash(const ModelParams& p, const SteadyState& s) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&](double v) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        for (int k = 0; k < 8; ++k) {
            h ^= (bits >> (8 * k)) & 0xffU;
            h *= 1099511628211ULL;
        }
    };
    const auto& r = p.raw;
    for (double v : {r.pump_wavelength, r.cavity_length, r.omega1, r.omega2, r.Q1, r.Q2, r.m1,
                     r.m2, r.kappa, r.pump_power, r.probe_power, r.coulomb_lambda,
                     r.detuning_value, p.omega_a, p.omega_l, p.g, p.gamma1, p.gamma2, p.eps_l,
                     p.eps_s, p.coulomb_stiffness, p.effective_stiffness}) {
        mix(v);
    }
    mix(r.detuning_mode == DetuningMode::EffectiveDelta ? 0.0 : 1.0);
    for (double v : {s.q1s, s.q2s, s.p1s, s.p2s, s.a_s.real(), s.a_s.imag(), s.n_cav,
                     s.effective_detuning}) {
        mix(v);
    }
    return h;
}

} // namespace omsim
