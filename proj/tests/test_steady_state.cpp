#include "catch2/catch_amalgamated.hpp"

#include "omsim/errors.hpp"
#include "omsim/steady_state.hpp"

#include "support.hpp"

#include <cmath>
#include <random>

using namespace omsim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("direct steady state matches fixtures", "[steady]") {
    const auto p = testsupport::reference_params();
    const auto s = solve_direct(p, p.raw.omega1);
    CHECK_THAT(s.n_cav, WithinRel(777420749.31627222, 1e-13));
    CHECK_THAT(s.q1s, WithinRel(1.1312037395524943e-12, 1e-13));
    CHECK_THAT(s.q2s, WithinRel(-1.8589995429442603e-14, 1e-13));
    CHECK(s.p1s == 0.0);
    CHECK(s.branch == Branch::LowPower);
    CHECK(steady_residual(p, s) < 1e-10);
}

TEST_CASE("direct steady state limits", "[steady]") {
    auto p = testsupport::reference_params();
    const auto resonant = solve_direct(p, 0.0);
    CHECK_THAT(resonant.a_s.real(), WithinRel(p.eps_l / p.raw.kappa, 1e-15));
    CHECK(resonant.a_s.imag() == 0.0);

    p.eps_l = 0.0;
    const auto dark = solve_direct(p, p.raw.omega1);
    CHECK(dark.q1s == 0.0);
    CHECK(dark.q2s == 0.0);
    CHECK(steady_residual(p, dark) == 0.0);
}

TEST_CASE("mirror displacements have the Coulomb ratio", "[steady]") {
    const auto p = testsupport::reference_params();
    const auto s = solve_direct(p, -p.raw.omega1);
    const double ratio = -p.coulomb_stiffness / (p.raw.m2 * p.raw.omega2 * p.raw.omega2);
    CHECK_THAT(s.q2s / s.q1s, WithinRel(ratio, 1e-14));
}

TEST_CASE("cavity population increases with pump power", "[steady]") {
    double previous = 0.0;
    for (double power : {1e-4, 5e-4, 1e-3, 2e-3, 4e-3, 1e-2}) {
        auto raw = reference_config();
        raw.pump_power = power;
        const auto s = solve_direct(build_params(raw), raw.omega1);
        CHECK(s.n_cav > previous);
        previous = s.n_cav;
    }
}

TEST_CASE("corrupted state fails the residual check", "[steady]") {
    const auto p = testsupport::reference_params();
    auto s = solve_direct(p, p.raw.omega1);
    s.q1s *= 2.0;
    CHECK(steady_residual(p, s) > 1e-2);
}

TEST_CASE("self-consistent solve reproduces the direct solution", "[steady]") {
    const auto p = testsupport::reference_params();
    for (double detuning : {-p.raw.omega1, 0.0, 0.5 * p.raw.omega1, p.raw.omega1}) {
        const auto direct = solve_direct(p, detuning);
        const auto states = solve_selfconsistent(p, detuning + p.g * direct.q1s);
        bool found = false;
        for (const auto& s : states) {
            found = found || std::abs(s.n_cav - direct.n_cav) <= 1e-9 * direct.n_cav;
            CHECK(steady_residual(p, s) < 1e-10);
        }
        CHECK(found);
    }
}

TEST_CASE("decoupled cavity has a single linear solution", "[steady]") {
    auto p = testsupport::reference_params();
    p.g = 0.0;
    const double da = 1.3 * p.raw.omega1;
    const auto states = solve_selfconsistent(p, da);
    REQUIRE(states.size() == 1);
    const double expected = p.eps_l * p.eps_l / (da * da + p.raw.kappa * p.raw.kappa);
    CHECK_THAT(states[0].n_cav, WithinRel(expected, 1e-14));
    CHECK(states[0].effective_detuning == da);
}

TEST_CASE("weak drive leaves the detuning unshifted", "[steady]") {
    auto raw = reference_config();
    raw.pump_power = 1e-15;
    const auto p = build_params(raw);
    const auto states = solve_selfconsistent(p, p.raw.omega1);
    REQUIRE(states.size() == 1);
    CHECK_THAT(states[0].effective_detuning, WithinRel(p.raw.omega1, 1e-9));
    CHECK(states[0].n_cav < 1e-3);
}

TEST_CASE("bistable region yields three ordered branches", "[steady]") {
    auto raw = reference_config();
    raw.pump_power = 20e-3;
    const auto p = build_params(raw);
    const auto states = solve_selfconsistent(p, 2.0 * p.raw.omega1);
    REQUIRE(states.size() == 3);
    CHECK(states[0].branch == Branch::LowPower);
    CHECK(states[1].branch == Branch::Middle);
    CHECK(states[2].branch == Branch::HighPower);
    CHECK(states[0].n_cav < states[1].n_cav);
    CHECK(states[1].n_cav < states[2].n_cav);
    CHECK(states[0].stable);
    CHECK_FALSE(states[1].stable);
    CHECK(states[2].stable);
    for (const auto& s : states) CHECK(steady_residual(p, s) < 1e-10);

    try {
        select_branch(states, std::nullopt);
        FAIL("expected AmbiguousBranch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::AmbiguousBranch);
    }
    CHECK(select_branch(states, Branch::HighPower).n_cav == states[2].n_cav);
}

TEST_CASE("configured solve honours the detuning mode", "[steady]") {
    auto raw = reference_config();
    raw.detuning_mode = DetuningMode::BareDeltaA;
    raw.detuning_value = raw.omega1;
    const auto p = build_params(raw);
    const auto s = solve_configured(p);
    CHECK_THAT(s.effective_detuning + p.g * s.q1s, WithinRel(raw.omega1, 1e-12));
}

TEST_CASE("cubic helper finds every real root", "[steady]") {
    // (y - 1)(y - 2)(y - 3)
    const auto roots = detail::real_cubic_roots(-6.0, 11.0, -6.0);
    REQUIRE(roots.size() == 3);
    CHECK_THAT(roots[0], WithinAbs(1.0, 1e-13));
    CHECK_THAT(roots[1], WithinAbs(2.0, 1e-13));
    CHECK_THAT(roots[2], WithinAbs(3.0, 1e-13));

    // (y - 0.5)(y^2 + 1)
    const auto one = detail::real_cubic_roots(-0.5, 1.0, -0.5);
    REQUIRE(one.size() == 1);
    CHECK_THAT(one[0], WithinAbs(0.5, 1e-14));
}

TEST_CASE("roots agree with a brute-force sign scan", "[steady]") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> logp(std::log(1e-4), std::log(0.2));
    const auto base = testsupport::reference_params();
    std::uniform_real_distribution<double> det(-2.0 * base.raw.omega1, 2.0 * base.raw.omega1);
    for (int trial = 0; trial < 10; ++trial) {
        auto raw = reference_config();
        raw.pump_power = std::exp(logp(rng));
        const auto p = build_params(raw);
        const double da = det(rng);
        const double K = constants::hbar * p.g * p.g / p.effective_stiffness;
        const double e2 = p.eps_l * p.eps_l;
        const double k2 = p.raw.kappa * p.raw.kappa;
        auto f = [&](double x) { return x * ((da - K * x) * (da - K * x) + k2) - e2; };
        const double xmax = e2 / k2 * 1.000001;
        const int n = 200000;
        int changes = 0;
        double prev = f(0.0);
        for (int i = 1; i <= n; ++i) {
            const double cur = f(xmax * i / n);
            if ((prev < 0.0) != (cur < 0.0)) ++changes;
            prev = cur;
        }
        CHECK(static_cast<int>(solve_selfconsistent(p, da).size()) == changes);
    }
}
