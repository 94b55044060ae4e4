#pragma once

#include "omsim/model.hpp"
#include "omsim/steady_state.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>

#if defined(__unix__) || defined(__APPLE__)
#include <sys/wait.h>
#endif

namespace testsupport {

using cplx = std::complex<double>;

inline omsim::ModelParams reference_params() { return omsim::build_params(omsim::reference_config()); }

inline omsim::ModelParams reference_params_with(double lambda) {
    auto raw = omsim::reference_config();
    raw.coulomb_lambda = lambda;
    return omsim::build_params(raw);
}

inline double rel_err(cplx got, cplx want) { return std::abs(got - want) / std::abs(want); }

// Dense complex solve with partial pivoting.
template <std::size_t N>
std::array<cplx, N> solve_linear(std::array<std::array<cplx, N>, N> m, std::array<cplx, N> rhs) {
    for (std::size_t col = 0; col < N; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < N; ++r) {
            if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
        }
        std::swap(m[col], m[piv]);
        std::swap(rhs[col], rhs[piv]);
        for (std::size_t r = col + 1; r < N; ++r) {
            const cplx f = m[r][col] / m[col][col];
            for (std::size_t c = col; c < N; ++c) m[r][c] -= f * m[col][c];
            rhs[r] -= f * rhs[col];
        }
    }
    std::array<cplx, N> x{};
    for (std::size_t i = N; i-- > 0;) {
        cplx acc = rhs[i];
        for (std::size_t c = i + 1; c < N; ++c) acc -= m[i][c] * x[c];
        x[i] = acc / m[i][i];
    }
    return x;
}

// Upper sideband of the intracavity field per unit probe amplitude, from the
// first-order sideband equations written as a linear system. Unknowns are the
// mirror sidebands X1, X2 and the field sidebands a+, conj(a-).
inline cplx sideband_a_plus(const omsim::ModelParams& p, const omsim::SteadyState& s, double delta) {
    const auto& r = p.raw;
    const cplx I(0.0, 1.0);
    const double hl = p.coulomb_stiffness;
    const cplx as = s.a_s;
    const double D = s.effective_detuning;
    const double hg = omsim::constants::hbar * p.g;
    std::array<std::array<cplx, 4>, 4> m{};
    m[0] = {r.m1 * cplx(r.omega1 * r.omega1 - delta * delta, -p.gamma1 * delta), hl,
            -hg * std::conj(as), -hg * as};
    m[1] = {hl, r.m2 * cplx(r.omega2 * r.omega2 - delta * delta, -p.gamma2 * delta), 0.0, 0.0};
    m[2] = {-I * p.g * as, 0.0, cplx(r.kappa, D - delta), 0.0};
    m[3] = {I * p.g * std::conj(as), 0.0, 0.0, cplx(r.kappa, -(D + delta))};
    return solve_linear<4>(m, {0.0, 0.0, 1.0, 0.0})[2];
}

// Same equations with only the first mirror present.
inline cplx single_mode_a_plus(const omsim::ModelParams& p, const omsim::SteadyState& s, double delta) {
    const auto& r = p.raw;
    const cplx I(0.0, 1.0);
    const cplx as = s.a_s;
    const double D = s.effective_detuning;
    const double hg = omsim::constants::hbar * p.g;
    std::array<std::array<cplx, 3>, 3> m{};
    m[0] = {r.m1 * cplx(r.omega1 * r.omega1 - delta * delta, -p.gamma1 * delta), -hg * std::conj(as),
            -hg * as};
    m[1] = {-I * p.g * as, cplx(r.kappa, D - delta), 0.0};
    m[2] = {I * p.g * std::conj(as), 0.0, cplx(r.kappa, -(D + delta))};
    return solve_linear<3>(m, {0.0, 1.0, 0.0})[1];
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline int run_command(const std::string& cmd) {
    const int rc = std::system(cmd.c_str());
#ifdef WEXITSTATUS
    return WEXITSTATUS(rc);
#else
    return rc;
#endif
}

} // namespace testsupport
