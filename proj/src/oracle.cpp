#include "omsim/oracle.hpp"

#include "omsim/errors.hpp"
#include "omsim/parallel.hpp"
#include "omsim/steady_state.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace omsim {

void Trajectory::push(double time, const MeanState& s) {
    t.push_back(time);
    q1.push_back(s.q1);
    p1.push_back(s.p1);
    q2.push_back(s.q2);
    p2.push_back(s.p2);
    a.push_back(s.a);
}

namespace {

using Vec = std::array<double, 6>; // q1, p1, q2, p2, Re a, Im a

Vec pack(const MeanState& s) { return {s.q1, s.p1, s.q2, s.p2, s.a.real(), s.a.imag()}; }
MeanState unpack(const Vec& y) { return {y[0], y[1], y[2], y[3], {y[4], y[5]}}; }

struct MeanDynamics {
    double m1, m2, k1, k2; // masses and bare spring constants
    double coulomb, pressure_per_photon;
    double gamma1, gamma2;
    double kappa, bare_detuning, g;
    double eps_l, eps_s, delta;

    void operator()(double t, const Vec& y, Vec& dy) const {
        const double intensity = y[4] * y[4] + y[5] * y[5];
        dy[0] = y[1] / m1;
        dy[1] = -k1 * y[0] - coulomb * y[2] + pressure_per_photon * intensity - gamma1 * y[1];
        dy[2] = y[3] / m2;
        dy[3] = -k2 * y[2] - coulomb * y[0] - gamma2 * y[3];
        // -(kappa + i w) a with w = Delta_a - g q1
        const double w = bare_detuning - g * y[0];
        const double phase = delta * t;
        dy[4] = -kappa * y[4] + w * y[5] + eps_l + eps_s * std::cos(phase);
        dy[5] = -kappa * y[5] - w * y[4] - eps_s * std::sin(phase);
    }
};

// Dormand-Prince 5(4) tableau with Hairer's continuous extension.
namespace dp {
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
} // namespace dp

struct DenseStep {
    Vec r1, r2, r3, r4, r5;

    Vec at(double theta) const {
        const double one_minus = 1.0 - theta;
        Vec y;
        for (std::size_t i = 0; i < y.size(); ++i) {
            y[i] = r1[i] + theta * (r2[i] + one_minus * (r3[i] + theta * (r4[i] + one_minus * r5[i])));
        }
        return y;
    }
};

} // namespace

Trajectory integrate_mean_dynamics(const ModelParams& p, double effective_detuning, double eps_s,
                                   double delta, double t_end, const IntegrationOptions& opts) {
    require_usable(p);
    if (!(eps_s >= 0.0) || !(t_end > 0.0) || !(opts.rtol > 0.0) || opts.stride == 0 ||
        (opts.sample_dt && !(*opts.sample_dt > 0.0))) {
        throw Error(ErrorCode::InvalidArgument, "invalid integration request");
    }
    const auto& r = p.raw;
    const SteadyState steady = solve_direct(p, effective_detuning);
    const MeanState init = opts.initial.value_or(
        MeanState{steady.q1s, steady.p1s, steady.q2s, steady.p2s, steady.a_s});

    const MeanDynamics rhs{r.m1,
                           r.m2,
                           r.m1 * r.omega1 * r.omega1,
                           r.m2 * r.omega2 * r.omega2,
                           p.coulomb_stiffness,
                           constants::hbar * p.g,
                           p.gamma1,
                           p.gamma2,
                           r.kappa,
                           effective_detuning + p.g * steady.q1s,
                           p.g,
                           p.eps_l,
                           eps_s,
                           delta};

    double q_scale = std::max({std::abs(steady.q1s), std::abs(steady.q2s), std::abs(init.q1),
                               std::abs(init.q2)});
    if (q_scale == 0.0) q_scale = 1e-15;
    double a_scale = std::max({std::abs(steady.a_s), std::abs(init.a), p.eps_l / r.kappa,
                               eps_s / r.kappa});
    if (a_scale == 0.0) a_scale = 1.0;
    const Vec scale{q_scale,
                    std::max(r.m1 * r.omega1 * q_scale, std::abs(init.p1)),
                    q_scale,
                    std::max(r.m2 * r.omega2 * q_scale, std::abs(init.p2)),
                    a_scale,
                    a_scale};

    Trajectory traj;
    traj.eps_s = eps_s;
    traj.delta = delta;
    traj.meta.rtol = opts.rtol;
    for (double sc : scale) traj.meta.atol.push_back(opts.rtol * sc);

    std::size_t recorded = 0;
    auto record = [&](double time, const Vec& y) {
        if (recorded++ % opts.stride == 0) traj.push(time, unpack(y));
    };

    std::size_t n_samples = 0, next_sample = 0;
    double sample_dt = 0.0;
    if (opts.sample_dt) {
        sample_dt = *opts.sample_dt;
        const double span = t_end - opts.record_from;
        if (span >= 0.0) {
            n_samples = static_cast<std::size_t>(std::floor(span / sample_dt * (1.0 + 1e-12))) + 1;
        }
        traj.t.reserve(n_samples / opts.stride + 1);
    }
    auto sample_time = [&](std::size_t k) {
        return std::min(opts.record_from + static_cast<double>(k) * sample_dt, t_end);
    };

    Vec y = pack(init);
    double t = 0.0;
    if (!opts.sample_dt && opts.record_from <= 0.0) record(t, y);
    while (opts.sample_dt && next_sample < n_samples && sample_time(next_sample) <= 0.0) {
        record(sample_time(next_sample++), y);
    }

    const double fastest = std::max({r.omega1, r.omega2, r.kappa + std::abs(rhs.bare_detuning),
                                     std::abs(delta), 1.0 / t_end});
    double h = 0.01 / fastest;

    Vec k1, k2, k3, k4, k5, k6, k7, tmp, y_new;
    rhs(t, y, k1);
    traj.meta.rhs_evaluations = 1;

    auto stage = [&](std::initializer_list<std::pair<double, const Vec*>> terms) {
        for (std::size_t i = 0; i < tmp.size(); ++i) {
            double acc = 0.0;
            for (const auto& [coef, k] : terms) acc += coef * (*k)[i];
            tmp[i] = y[i] + h * acc;
        }
        return tmp;
    };

    while (t < t_end) {
        if (traj.meta.steps + traj.meta.rejected >= opts.max_steps) {
            throw Error(ErrorCode::StepFailure, "step budget exhausted before t_end");
        }
        const bool last = t + h >= t_end;
        if (last) h = t_end - t;

        using namespace dp;
        rhs(t + c2 * h, stage({{a21, &k1}}), k2);
        rhs(t + c3 * h, stage({{a31, &k1}, {a32, &k2}}), k3);
        rhs(t + c4 * h, stage({{a41, &k1}, {a42, &k2}, {a43, &k3}}), k4);
        rhs(t + c5 * h, stage({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}), k5);
        rhs(t + h, stage({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}), k6);
        y_new = stage({{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
        rhs(t + h, y_new, k7);
        traj.meta.rhs_evaluations += 6;

        double err = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double e =
                h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double tol =
                traj.meta.atol[i] + opts.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
            err = std::max(err, std::abs(e) / tol);
        }
        if (!std::isfinite(err)) {
            throw Error(ErrorCode::Divergence, "non-finite state during integration");
        }

        if (err <= 1.0) {
            const double t_new = last ? t_end : t + h;
            if (opts.sample_dt) {
                DenseStep dense;
                for (std::size_t i = 0; i < y.size(); ++i) {
                    dense.r1[i] = y[i];
                    dense.r2[i] = y_new[i] - y[i];
                    dense.r3[i] = h * k1[i] - dense.r2[i];
                    dense.r4[i] = dense.r2[i] - h * k7[i] - dense.r3[i];
                    dense.r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                       d6 * k6[i] + d7 * k7[i]);
                }
                while (next_sample < n_samples && sample_time(next_sample) <= t_new) {
                    const double ts = sample_time(next_sample++);
                    const double theta = std::clamp((ts - t) / h, 0.0, 1.0);
                    record(ts, dense.at(theta));
                }
            } else if (t_new >= opts.record_from) {
                record(t_new, y_new);
            }
            t = t_new;
            y = y_new;
            k1 = k7;
            ++traj.meta.steps;

            for (std::size_t i = 0; i < y.size(); ++i) {
                if (std::abs(y[i]) > opts.divergence_factor * scale[i]) {
                    std::ostringstream os;
                    os << "state component " << i << " exceeded " << opts.divergence_factor
                       << " x its steady scale at t = " << t << " s";
                    throw Error(ErrorCode::Divergence, os.str());
                }
            }
            const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            h *= factor;
        } else {
            ++traj.meta.rejected;
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
        }
        if (t < t_end && h <= 1e-14 * std::max(t, 1.0 / fastest)) {
            std::ostringstream os;
            os << "step size collapsed to " << h << " s at t = " << t << " s";
            throw Error(ErrorCode::StepFailure, os.str());
        }
    }
    return traj;
}

DemodResult demodulate(const Trajectory& traj, std::complex<double> a_s_analytic, double delta,
                       const DemodOptions& opts) {
    if (!(delta != 0.0) || opts.n_periods == 0 || opts.samples_per_period < 2) {
        throw Error(ErrorCode::InvalidArgument, "demodulation needs delta != 0 and n_periods >= 1");
    }
    if (traj.size() < 2) throw Error(ErrorCode::InsufficientSpan, "trajectory has fewer than two samples");

    const double period = 2.0 * constants::pi / std::abs(delta);
    const double stop = traj.t.back();
    const double span = static_cast<double>(opts.n_periods) * period;
    const double start = stop - span;
    const double slack = 1e-9 * period;
    if (start < traj.t.front() - slack || start < opts.transient_cut - slack) {
        std::ostringstream os;
        os << opts.n_periods << " beat periods need " << span << " s after t = "
           << std::max(traj.t.front(), opts.transient_cut) << " s; trajectory ends at " << stop;
        throw Error(ErrorCode::InsufficientSpan, os.str());
    }

    const std::size_t n = opts.n_periods * opts.samples_per_period;
    const double dt = span / static_cast<double>(n);
    const double norm = traj.eps_s > 0.0 ? traj.eps_s : 1.0;

    auto sample = [&](double time) {
        auto it = std::lower_bound(traj.t.begin(), traj.t.end(), time);
        if (it == traj.t.end()) return traj.a.back();
        const auto j = static_cast<std::size_t>(it - traj.t.begin());
        if (j == 0 || traj.t[j] == time) return traj.a[j];
        const double w = (time - traj.t[j - 1]) / (traj.t[j] - traj.t[j - 1]);
        return (1.0 - w) * traj.a[j - 1] + w * traj.a[j];
    };

    std::complex<double> upper{}, lower{}, dc{};
    for (std::size_t j = 0; j <= n; ++j) {
        const double time = (j == n) ? stop : start + static_cast<double>(j) * dt;
        const double weight = (j == 0 || j == n) ? 0.5 : 1.0;
        const auto value = sample(time);
        const auto fluct = value - a_s_analytic;
        const std::complex<double> rot(std::cos(delta * time), std::sin(delta * time));
        upper += weight * fluct * rot;
        lower += weight * fluct * std::conj(rot);
        dc += weight * value;
    }
    const double scale = dt / span;
    DemodResult out;
    out.delta = delta;
    out.a_plus_est = upper * scale / norm;
    out.a_minus_est = lower * scale / norm;
    out.residual_dc = dc * scale - a_s_analytic;
    out.window_start = start;
    out.window_stop = stop;
    return out;
}

std::vector<double> default_oracle_deltas(const ModelParams& p) {
    const double w1 = p.raw.omega1, k = p.raw.kappa;
    return {w1 - 2.0 * k, w1 - 0.5 * k, w1, w1 + 0.5 * k, w1 + 2.0 * k};
}

ValidationTable cross_validate(const ModelParams& p, double effective_detuning,
                               const std::vector<double>& deltas, AnalyticAPlus analytic,
                               const CrossValidateOptions& opts) {
    require_usable(p);
    const double eps_s = opts.eps_s.value_or(p.eps_s);
    if (!(eps_s > 0.0)) throw Error(ErrorCode::InvalidArgument, "oracle run needs a probe (eps_s > 0)");
    const double cut = opts.transient_cut.value_or(5.0 / std::min(p.gamma1, p.gamma2));
    const SteadyState steady = solve_direct(p, effective_detuning);

    ValidationTable table;
    table.tolerance = opts.tolerance;
    table.rows.resize(deltas.size());
    detail::parallel_for(deltas.size(), opts.workers, [&](std::size_t i) {
        OracleRow& row = table.rows[i];
        row.delta = deltas[i];
        try {
            if (deltas[i] == 0.0) throw Error(ErrorCode::InvalidArgument, "delta must be nonzero");
            const double period = 2.0 * constants::pi / std::abs(deltas[i]);
            IntegrationOptions io;
            io.rtol = opts.rtol;
            io.record_from = cut;
            io.sample_dt = period / 4096.0;
            const double t_end = cut + static_cast<double>(opts.n_periods) * period;
            const auto traj = integrate_mean_dynamics(p, effective_detuning, eps_s, deltas[i], t_end, io);
            DemodOptions dopt;
            dopt.n_periods = opts.n_periods;
            dopt.transient_cut = cut;
            row.demod = demodulate(traj, steady.a_s, deltas[i], dopt);
            row.stats = traj.meta;
            row.oracle = row.demod.a_plus_est;
            row.analytic = analytic(p, effective_detuning, deltas[i]);
            row.rel_error = std::abs(row.oracle - row.analytic) / std::abs(row.analytic);
        } catch (const Error& e) {
            row.error = e.what();
            row.rel_error = std::numeric_limits<double>::infinity();
        }
    });

    table.max_rel_error = 0.0;
    for (const auto& row : table.rows) {
        table.max_rel_error = std::max(table.max_rel_error,
                                       std::isnan(row.rel_error) ? INFINITY : row.rel_error);
    }
    table.pass = !table.rows.empty() && table.max_rel_error < opts.tolerance;
    return table;
}

} // namespace omsim
