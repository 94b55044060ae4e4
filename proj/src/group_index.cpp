#include "omsim/group_index.hpp"

#include "omsim/errors.hpp"
#include "omsim/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace omsim {

std::string to_string(Regime r) { return r == Regime::Fast ? "fast" : "slow"; }

double dispersion_slope(const ModelParams& p, const SteadyState& s, double delta,
                        std::optional<double> h) {
    const double step = h.value_or(1e-6 * p.raw.omega1);
    if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "finite-difference step must be > 0");

    auto central = [&](double hh) {
        return (epsilon_R(p, s, delta + hh) - epsilon_R(p, s, delta - hh)).imag() / (2.0 * hh);
    };
    const double coarse = central(step);
    const double fine = central(0.5 * step);
    const double extrapolated = (4.0 * fine - coarse) / 3.0;

    const double noise_floor = 1e-10 * 2.0 / p.raw.kappa;
    if (std::abs(coarse - fine) > 1e-4 * std::abs(extrapolated) + noise_floor) {
        std::ostringstream os;
        os << "slope at delta = " << delta << " changes from " << coarse << " to " << fine
           << " when halving h = " << step;
        throw Error(ErrorCode::StepTooLarge, os.str());
    }
    return extrapolated;
}

std::optional<TransparencyPoint> TransparencyReport::minus() const {
    if (points.size() < 2) return std::nullopt;
    return points.front();
}

std::optional<TransparencyPoint> TransparencyReport::plus() const {
    if (points.size() < 2) return std::nullopt;
    return points.back();
}

std::optional<double> TransparencyReport::gap() const {
    if (points.size() < 2) return std::nullopt;
    return points.back().delta - points.front().delta;
}

namespace {

double absorption_slope(const ModelParams& p, const SteadyState& s, double delta) {
    return epsilon_R_derivative(p, s, delta).real();
}

// Bisection on d Re[eps_R] / d delta inside a bracket around a grid minimum.
double refine_minimum(const ModelParams& p, const SteadyState& s, double lo, double hi,
                      double grid_guess) {
    double d_lo = absorption_slope(p, s, lo);
    double d_hi = absorption_slope(p, s, hi);
    if (!(d_lo < 0.0 && d_hi > 0.0)) return grid_guess;

    const double tol = 1e-12 * 2.0 / p.raw.kappa;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double d_mid = absorption_slope(p, s, mid);
        if (std::abs(d_mid) < tol) return mid;
        if (d_mid < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double robust_slope(const ModelParams& p, const SteadyState& s, double delta) {
    double h = 1e-6 * p.raw.omega1;
    for (int attempt = 0;; ++attempt) {
        try {
            return dispersion_slope(p, s, delta, h);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::StepTooLarge || attempt == 3) throw;
            h *= 0.1;
        }
    }
}

} // namespace

TransparencyReport find_transparency_points(const ModelParams& p, const SteadyState& s,
                                            const TransparencyOptions& opts) {
    require_usable(p);
    const std::size_t count = std::max<std::size_t>(opts.coarse_points, 2000);
    const DeltaGrid grid{opts.window_start, opts.window_stop, count};
    const auto deltas = grid.materialize(p.raw.omega1);

    std::vector<double> re(deltas.size());
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        const auto pt = evaluate_point(p, s, deltas[i]);
        re[i] = pt.error ? std::nan("") : pt.absorption();
    }

    TransparencyReport report;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < re.size(); ++i) {
        if (!(re[i] < re[i - 1] && re[i] < re[i + 1])) continue;
        best = std::min(best, re[i]);
        const double delta = refine_minimum(p, s, deltas[i - 1], deltas[i + 1], deltas[i]);
        const double absorption = epsilon_R(p, s, delta).real();
        if (!(absorption < opts.threshold)) continue;
        const double slope = robust_slope(p, s, delta);
        report.points.push_back({delta, absorption, slope, regime_from_slope(slope)});
    }
    if (report.points.empty()) {
        std::ostringstream os;
        os << "no absorption minimum below " << opts.threshold << " in delta/omega1 in ["
           << opts.window_start << ", " << opts.window_stop << "]";
        if (std::isfinite(best)) os << " (deepest local minimum " << best << ")";
        throw Error(ErrorCode::NoTransparencyWindow, os.str());
    }
    return report;
}

std::vector<GroupMetricPoint> evaluate_group_metric(const ModelParams& p, const SteadyState& s,
                                                    const GroupMetricOptions& opts) {
    std::vector<GroupMetricPoint> out(2);
    out[0].mode = Mode::Minus;
    out[1].mode = Mode::Plus;
    for (auto& g : out) g.pump_power = p.raw.pump_power;

    auto fail = [&](const std::string& msg) {
        for (auto& g : out) {
            g.delta_eval = g.metric = std::nan("");
            g.error = msg;
        }
        return out;
    };

    TransparencyReport report;
    try {
        report = find_transparency_points(p, s, opts.transparency);
    } catch (const Error& e) {
        return fail(e.what());
    }
    if (report.size() < 2) {
        std::ostringstream os;
        os << "found " << report.size() << " transparency point(s); need two";
        return fail(os.str());
    }
    const TransparencyPoint picked[2] = {*report.minus(), *report.plus()};
    for (int k = 0; k < 2; ++k) {
        out[k].delta_eval = picked[k].delta;
        out[k].metric = picked[k].slope;
        if (opts.scale) out[k].ng_scaled = 1.0 + *opts.scale * picked[k].slope;
    }
    return out;
}

std::vector<GroupMetricPoint> group_metric_sweep(const ModelParams& p, double detuning,
                                                 const std::vector<double>& powers,
                                                 const GroupMetricOptions& opts,
                                                 unsigned workers) {
    for (std::size_t i = 0; i < powers.size(); ++i) {
        if (!(powers[i] > 0.0) || (i > 0 && !(powers[i] > powers[i - 1]))) {
            throw Error(ErrorCode::InvalidArgument, "pump powers must be positive and ascending");
        }
    }
    std::vector<GroupMetricPoint> out(2 * powers.size());
    detail::parallel_for(powers.size(), workers, [&](std::size_t i) {
        // Only the pump amplitude depends on the power.
        ModelParams q = p;
        q.raw.pump_power = powers[i];
        q.eps_l = std::sqrt(2.0 * q.raw.kappa * powers[i] / (constants::hbar * q.omega_l));
        std::vector<GroupMetricPoint> pair;
        try {
            pair = evaluate_group_metric(q, solve_direct(q, detuning), opts);
        } catch (const Error& e) {
            pair.resize(2);
            pair[0].mode = Mode::Minus;
            pair[1].mode = Mode::Plus;
            for (auto& g : pair) {
                g.pump_power = powers[i];
                g.delta_eval = g.metric = std::nan("");
                g.error = e.what();
            }
        }
        out[2 * i] = pair[0];
        out[2 * i + 1] = pair[1];
    });
    return out;
}

} // namespace omsim
