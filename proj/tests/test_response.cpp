#include "catch2/catch_amalgamated.hpp"

#include "omsim/errors.hpp"
#include "omsim/response.hpp"
#include "omsim/steady_state.hpp"

#include "support.hpp"

#include <cmath>

using namespace omsim;
using testsupport::cplx;
using testsupport::rel_err;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("response factors match high-precision fixtures", "[response]") {
    const auto p = testsupport::reference_params();
    const auto s = solve_direct(p, p.raw.omega1);
    const double w1 = p.raw.omega1;
    CHECK(rel_err(chi_A(p, 1.001 * w1), cplx(678.76550431978655, -52.213426884868521)) < 1e-11);
    CHECK(rel_err(factor_B(p, s, w1), cplx(0.99958323328783327, -0.0036714239667152872)) < 1e-13);
    CHECK(rel_err(a_plus(p, s, w1), cplx(7.1676523096380103e-7, -8.3540978163683083e-11)) < 1e-12);
    CHECK(rel_err(a_plus(p, s, 0.995 * w1), cplx(9.9273481603561821e-8, -2.5546329318705961e-7)) <
          1e-12);
}

TEST_CASE("closed form agrees with the sideband linear system", "[response]") {
    for (double lambda : {0.0, 4e35, 8e35, 1.6e36}) {
        const auto p = testsupport::reference_params_with(lambda);
        for (double detuning : {p.raw.omega1, -p.raw.omega1, 0.3 * p.raw.omega1}) {
            const auto s = solve_direct(p, detuning);
            for (double x = 0.9; x <= 1.1; x += 0.0037) {
                const double delta = x * p.raw.omega1;
                CHECK(rel_err(a_plus(p, s, delta), testsupport::sideband_a_plus(p, s, delta)) < 1e-10);
            }
        }
    }
}

TEST_CASE("reflected field is 2 kappa times the upper sideband", "[response]") {
    const auto p = testsupport::reference_params();
    const auto s = solve_direct(p, p.raw.omega1);
    for (double x : {0.9, 0.99, 1.0, 1.004, 1.1}) {
        const double delta = x * p.raw.omega1;
        const cplx den = a_plus_denominator(p, s, delta);
        CHECK(rel_err(epsilon_R(p, s, delta) * den, cplx(2.0 * p.raw.kappa, 0.0)) < 1e-14);
        CHECK(epsilon_out_plus(p, s, delta) == epsilon_R(p, s, delta) - 1.0);
    }
}

TEST_CASE("decoupled cavity is a Lorentzian", "[response]") {
    auto p = testsupport::reference_params();
    p.g = 0.0;
    const auto s = solve_direct(p, p.raw.omega1);
    CHECK_THAT(epsilon_R(p, s, p.raw.omega1).real(), WithinAbs(2.0, 1e-14));
    CHECK_THAT(epsilon_R(p, s, p.raw.omega1).imag(), WithinAbs(0.0, 1e-14));
    const double delta = 1.05 * p.raw.omega1;
    const cplx lorentz = 1.0 / cplx(p.raw.kappa, p.raw.omega1 - delta);
    CHECK(rel_err(a_plus(p, s, delta), lorentz) < 1e-14);
}

TEST_CASE("analytic derivative matches a five-point stencil", "[response]") {
    const auto p = testsupport::reference_params();
    const auto s = solve_direct(p, p.raw.omega1);
    const double h = 1e-5 * p.raw.omega1;
    for (double x : {0.95, 0.99, 1.0, 1.02, 1.08}) {
        const double d = x * p.raw.omega1;
        const cplx stencil = (-epsilon_R(p, s, d + 2 * h) + 8.0 * epsilon_R(p, s, d + h) -
                              8.0 * epsilon_R(p, s, d - h) + epsilon_R(p, s, d - 2 * h)) /
                             (12.0 * h);
        CHECK(rel_err(epsilon_R_derivative(p, s, d), stencil) < 1e-6);
    }
}

TEST_CASE("spectrum grid and evaluation", "[response]") {
    const auto p = testsupport::reference_params();
    const auto s = solve_direct(p, p.raw.omega1);
    const DeltaGrid grid;
    const auto deltas = grid.materialize(p.raw.omega1);
    REQUIRE(deltas.size() == 4001);
    CHECK(deltas.front() == 0.9 * p.raw.omega1);
    CHECK(deltas.back() == 1.1 * p.raw.omega1);

    const auto serial = spectrum(p, s, grid, 1);
    const auto parallel = spectrum(p, s, grid, 4);
    REQUIRE(serial.points.size() == parallel.points.size());
    for (std::size_t i = 0; i < serial.points.size(); ++i) {
        CHECK(serial.points[i].eps_R == parallel.points[i].eps_R);
        CHECK_FALSE(serial.points[i].error);
    }
    CHECK(serial.params_hash == parallel.params_hash);

    CHECK_THROWS_AS(spectrum(p, s, std::vector<double>{2.0, 1.0}, 1), Error);
}

TEST_CASE("pole passage is captured per point", "[response]") {
    auto raw = reference_config();
    raw.Q2 = 1e300; // gamma2 effectively zero, so the second mode has a real pole
    auto p = build_params(raw);
    p.gamma2 = 0.0;
    const auto s = solve_direct(p, p.raw.omega1);
    const auto pt = evaluate_point(p, s, p.raw.omega2);
    REQUIRE(pt.error);
    CHECK(std::isnan(pt.eps_R.real()));
    CHECK(pt.error->find("PolePassage") != std::string::npos);
}
