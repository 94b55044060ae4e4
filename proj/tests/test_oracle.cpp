#include "catch2/catch_amalgamated.hpp"

#include "omsim/errors.hpp"
#include "omsim/oracle.hpp"
#include "omsim/response.hpp"

#include "support.hpp"

#include <cmath>

using namespace omsim;
using testsupport::cplx;
using testsupport::rel_err;

namespace {

cplx analytic(const ModelParams& p, double detuning, double delta) {
    return a_plus(p, solve_direct(p, detuning), delta);
}

} // namespace

TEST_CASE("demodulation recovers synthetic sidebands", "[oracle]") {
    const double delta = 3.0e6;
    const cplx as(2.0, -1.0), up(0.3, 0.1), down(-0.05, 0.02);
    Trajectory traj;
    traj.eps_s = 0.5;
    traj.delta = delta;
    const double period = 2.0 * constants::pi / delta;
    const int n = 30 * 4096;
    for (int i = 0; i <= n; ++i) {
        const double t = i * period / 4096;
        const cplx a = as + traj.eps_s * (up * std::polar(1.0, -delta * t) + down * std::polar(1.0, delta * t));
        traj.push(t, {0.0, 0.0, 0.0, 0.0, a});
    }
    const auto res = demodulate(traj, as, delta);
    CHECK(rel_err(res.a_plus_est, up) < 1e-10);
    CHECK(rel_err(res.a_minus_est, down) < 1e-9);
    CHECK(std::abs(res.residual_dc) < 1e-10);
    CHECK(res.window_stop - res.window_start == Catch::Approx(20 * period).epsilon(1e-12));

    DemodOptions opts;
    opts.transient_cut = 25 * period;
    CHECK_THROWS_AS(demodulate(traj, as, delta, opts), Error);

    Trajectory flat;
    flat.eps_s = 1.0;
    for (int i = 0; i <= n; ++i) flat.push(i * period / 4096, {0.0, 0.0, 0.0, 0.0, as});
    CHECK(std::abs(demodulate(flat, as, delta).a_plus_est) < 1e-14);
}

TEST_CASE("decoupled cavity follows the closed-form transient", "[oracle]") {
    auto p = testsupport::reference_params();
    p.g = 0.0;
    const double detuning = p.raw.omega1;
    const double delta = 0.97 * p.raw.omega1;
    const auto s = solve_direct(p, detuning);
    IntegrationOptions opts;
    opts.sample_dt = 1e-7;
    const auto traj = integrate_mean_dynamics(p, detuning, p.eps_s, delta, 2e-5, opts);
    REQUIRE(traj.size() > 100);
    const cplx I(0.0, 1.0);
    const cplx lor = p.eps_s / cplx(p.raw.kappa, detuning - delta);
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double t = traj.t[i];
        const cplx exact = s.a_s + lor * (std::exp(-I * delta * t) - std::exp(-cplx(p.raw.kappa, detuning) * t));
        worst = std::max(worst, std::abs(traj.a[i] - exact) / std::abs(s.a_s));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("steady state is a fixed point of the dynamics", "[oracle]") {
    const auto p = testsupport::reference_params();
    const auto s = solve_direct(p, p.raw.omega1);
    IntegrationOptions opts;
    opts.sample_dt = 1e-5;
    const auto traj = integrate_mean_dynamics(p, p.raw.omega1, 0.0, p.raw.omega1, 1e-3, opts);
    double drift_q = 0.0, drift_a = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        drift_q = std::max(drift_q, std::abs(traj.q1[i] - s.q1s) / std::abs(s.q1s));
        drift_a = std::max(drift_a, std::abs(traj.a[i] - s.a_s) / std::abs(s.a_s));
    }
    CHECK(drift_q < 1e-8);
    CHECK(drift_a < 1e-8);
}

TEST_CASE("free mirror energy decays at the mechanical damping rate", "[oracle]") {
    auto p = testsupport::reference_params_with(0.0);
    p.eps_l = 0.0;
    IntegrationOptions opts;
    opts.initial = MeanState{1e-12, 0.0, 0.0, 0.0, {0.0, 0.0}};
    opts.sample_dt = 1e-6;
    const double t_end = 1.0 / p.gamma1;
    const auto traj = integrate_mean_dynamics(p, p.raw.omega1, 0.0, p.raw.omega1, t_end, opts);
    const auto& r = p.raw;
    auto energy = [&](std::size_t i) {
        return traj.p1[i] * traj.p1[i] / (2.0 * r.m1) + 0.5 * r.m1 * r.omega1 * r.omega1 * traj.q1[i] * traj.q1[i];
    };
    const double ratio = energy(traj.size() - 1) / energy(0);
    CHECK(ratio == Catch::Approx(std::exp(-p.gamma1 * traj.t.back())).epsilon(0.01));
    for (std::size_t i = 0; i < traj.size(); ++i) CHECK(traj.a[i] == cplx(0.0, 0.0));
}

TEST_CASE("empty cavity field decays at kappa", "[oracle]") {
    auto p = testsupport::reference_params();
    p.eps_l = 0.0;
    IntegrationOptions opts;
    opts.initial = MeanState{0.0, 0.0, 0.0, 0.0, {1.0, 0.0}};
    opts.sample_dt = 1e-7;
    const double t_end = 5.0 / p.raw.kappa;
    const auto traj = integrate_mean_dynamics(p, p.raw.omega1, 0.0, p.raw.omega1, t_end, opts);
    const double rate = -std::log(std::abs(traj.a.back())) / traj.t.back();
    CHECK(rate == Catch::Approx(p.raw.kappa).epsilon(0.1));
}

TEST_CASE("probe-off demodulation gives no sideband", "[oracle]") {
    const auto p = testsupport::reference_params();
    const auto s = solve_direct(p, p.raw.omega1);
    const double delta = p.raw.omega1;
    const double period = 2.0 * constants::pi / delta;
    IntegrationOptions opts;
    opts.sample_dt = period / 256;
    const auto traj = integrate_mean_dynamics(p, p.raw.omega1, 0.0, delta, 40 * period, opts);
    const auto res = demodulate(traj, s.a_s, delta, {20, 0.0, 256});
    CHECK(std::abs(res.a_plus_est) < 1e-9 * std::abs(s.a_s));
}

TEST_CASE("oracle matches the closed form and the response is linear", "[oracle]") {
    const auto p = testsupport::reference_params();
    CrossValidateOptions opts;
    opts.workers = 4;
    const auto deltas = default_oracle_deltas(p);
    REQUIRE(deltas.size() == 5);
    const auto table = cross_validate(p, p.raw.omega1, deltas, analytic, opts);
    CHECK(table.pass);
    CHECK(table.max_rel_error < 1e-3);

    opts.eps_s = 0.5 * p.eps_s;
    const auto halved = cross_validate(p, p.raw.omega1, {deltas[1]}, analytic, opts);
    CHECK(rel_err(halved.rows[0].oracle, table.rows[1].oracle) < 1e-4);
}

TEST_CASE("oracle rejects a corrupted formula", "[oracle]") {
    const auto p = testsupport::reference_params();
    const AnalyticAPlus wrong = [](const ModelParams& q, double d, double delta) {
        const auto s = solve_direct(q, d);
        const cplx I(0.0, 1.0);
        const double c = constants::hbar * q.g * q.g * s.n_cav;
        return 1.0 / (cplx(q.raw.kappa, d - delta) + I * c / (chi_A(q, delta) * factor_B(q, s, delta)));
    };
    CrossValidateOptions opts;
    opts.workers = 4;
    const auto table = cross_validate(p, p.raw.omega1, default_oracle_deltas(p), wrong, opts);
    CHECK_FALSE(table.pass);
    CHECK(table.max_rel_error > 1e-2);
}
