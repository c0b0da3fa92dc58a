#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fbmcf/ground_state.hpp"
#include "fbmcf/radial_heat.hpp"

using namespace fbmcf;

namespace {

// First positive radial eigenvalue for n = 1, ell = 0: phi = cos(s r) with
// s tan(s) = -1, i.e. tan(s) = -1/s on (pi/2, pi).
double oracle_first_positive_mu_n1() {
    double lo = 1.5707963267948966 + 1e-9, hi = 3.141592653589793 - 1e-9;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (std::tan(mid) + 1.0 / mid < 0.0 ? lo : hi) = mid;
    }
    const double s = 0.5 * (lo + hi);
    return s * s;
}

}  // namespace

TEST_CASE("shooting residual vanishes on known eigenpairs") {
    const GroundState g1 = solve_lambda0(1);
    CHECK(std::abs(shoot_residual(1, 0, -g1.lambda0 * g1.lambda0)) < 1e-6);

    // phi(r) = r solves the ell = 1, mu = 0 problem in every dimension.
    for (int n : {1, 2, 3, 5}) CHECK(std::abs(shoot_residual(n, 1, 0.0)) < 1e-10);

    const double mu1 = oracle_first_positive_mu_n1();
    CHECK(mu1 == Catch::Approx(7.8309).epsilon(1e-4));
    CHECK(std::abs(shoot_residual(1, 0, mu1)) < 1e-4);

    CHECK_THROWS_AS(shoot_residual(0, 0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(shoot_residual(2, -1, 1.0), std::invalid_argument);
}

TEST_CASE("negative spectrum: exactly the ground state, only at ell = 0") {
    for (int n : {1, 2}) {
        const GroundState gs = solve_lambda0(n);
        const auto modes = find_eigenvalues(n, 0, -25.0, -1e-6);
        REQUIRE(modes.size() == 1);
        CHECK(std::abs(modes[0].mu + gs.lambda0 * gs.lambda0) < 1e-5);
        CHECK(std::abs(modes[0].boundary_residual) < 1e-6);

        for (int ell : {1, 2}) CHECK(find_eigenvalues(n, ell, -25.0, -1e-6).empty());
    }
}

TEST_CASE("null mode sits at ell = 1 only") {
    const auto modes = find_eigenvalues(1, 1, -0.5, 0.5);
    REQUIRE(modes.size() == 1);
    CHECK(std::abs(modes[0].mu) < 1e-8);
    // Regular branch ~ r: profile is linear.
    const auto& p = modes[0].profile;
    CHECK(p.back() == Catch::Approx(1.0).margin(1e-9));
    CHECK(p[p.size() / 2] == Catch::Approx(0.5).margin(1e-6));

    // ell = 0 and ell = 2 have no eigenvalue near zero.
    CHECK(find_eigenvalues(1, 0, -0.5, 0.5).empty());
    CHECK(find_eigenvalues(2, 2, -0.5, 0.5).empty());
    CHECK_THROWS_AS(find_eigenvalues(1, 0, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("eigenmode profile solves the radial equation") {
    // Interior second-order residual check of the stored profile, n = 2 ground mode.
    const auto modes = find_eigenvalues(2, 0, -25.0, -1e-6);
    REQUIRE(modes.size() == 1);
    const auto& p = modes[0].profile;
    const int N = static_cast<int>(p.size()) - 1;
    const double dr = 1.0 / N;
    for (int i = N / 5; i + 1 < N; ++i) {
        const double r = i * dr;
        const double d2 = (p[i + 1] - 2.0 * p[i] + p[i - 1]) / (dr * dr);
        const double d1 = (p[i + 1] - p[i - 1]) / (2.0 * dr);
        const double residual = d2 + d1 / r + modes[0].mu * p[i];
        CHECK(std::abs(residual) < 2e-3);
    }
    // Boundary condition of the stored profile.
    const double d1b = (3.0 * p[N] - 4.0 * p[N - 1] + p[N - 2]) / (2.0 * dr);
    CHECK(d1b == Catch::Approx(p[N]).epsilon(2e-4));
}

TEST_CASE("Rayleigh quotient of the shooting ground state reproduces mu0") {
    for (int n : {1, 2, 3}) {
        const GroundState gs = solve_lambda0(n);
        const auto modes = find_eigenvalues(n, 0, -25.0, -1e-6);
        REQUIRE(modes.size() == 1);
        const double rq = rayleigh_quotient(n, modes[0].profile);
        CHECK(std::abs(rq - gs.mu0) < 1e-3 * std::abs(gs.mu0));
    }
}

TEST_CASE("heat evolution tracks the ground eigenmode") {
    const GroundState gs = solve_lambda0(2);
    const double l02 = gs.lambda0 * gs.lambda0;
    const double dr = 1.0 / 50;
    auto init = [&](double r) { return phi0_eval(gs, gs.lambda0 * r).first; };
    const auto snaps =
        evolve_heat(2, init, dr, 0.9 * heat_max_dt(2, dr), 0.5, {0.1, 0.25, 0.5});
    REQUIRE(snaps.size() >= 3);
    for (const auto& s : snaps) {
        double worst = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            const double exact = std::exp(l02 * s.t) * init(i * s.dr);
            worst = std::max(worst, std::abs(s.values[i] - exact));
            scale = std::max(scale, std::abs(exact));
        }
        CHECK(worst / scale < 5e-3);  // O(dr^2) at dr = 1/50
    }
}

TEST_CASE("heat evolution edge cases") {
    auto zero = [](double) { return 0.0; };
    const auto snaps = evolve_heat(1, zero, 1.0 / 20, 1e-4, 0.1, {0.05});
    for (const auto& s : snaps)
        for (double v : s.values) CHECK(v == 0.0);

    CHECK_THROWS_AS(evolve_heat(2, zero, 1.0 / 20, 1.0, 0.1, {}), cfl_violation_error);
    auto bad = [](double) { return std::numeric_limits<double>::infinity(); };
    CHECK_THROWS_AS(evolve_heat(2, bad, 1.0 / 20, 1e-4, 0.1, {}), std::invalid_argument);
}

TEST_CASE("nonnegative smooth data stays nonnegative under the CFL step") {
    std::mt19937 rng(20240517);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    for (int n : {1, 2, 3}) {
        for (int trial = 0; trial < 5; ++trial) {
            double a1 = amp(rng), a2 = amp(rng), a3 = amp(rng);
            auto init = [&](double r) {
                const double v = a1 * std::cos(3.141592653589793 * r) +
                                 a2 * std::cos(2 * 3.141592653589793 * r) + a3 * r * r;
                return v + 1.0 + std::abs(a1) + std::abs(a2) + std::abs(a3);  // >= 1
            };
            const double dr = 1.0 / 40;
            const auto snaps = evolve_heat(n, init, dr, heat_max_dt(n, dr), 0.2, {0.1, 0.2});
            for (const auto& s : snaps)
                for (double v : s.values) CHECK(v >= 0.0);
        }
    }
}

TEST_CASE("long-time profile converges to the ground state shape") {
    // Liouville-type attractivity: constant data, normalized profile at t = 3.
    const GroundState gs = solve_lambda0(2);
    auto one = [](double) { return 1.0; };
    const double dr = 1.0 / 200;
    const auto snaps = evolve_heat(2, one, dr, heat_max_dt(2, dr), 3.0, {3.0});
    const auto& s = snaps.back();
    double worst = 0.0;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        const double model = phi0_eval(gs, gs.lambda0 * i * dr).first;
        worst = std::max(worst, std::abs(s.values[i] / s.values[0] - model));
    }
    CHECK(worst < 1e-3);
}

TEST_CASE("ground projection: self, linearity, and a quadrature oracle") {
    const GroundState g1 = solve_lambda0(1);
    const int N = 200;
    std::vector<double> v(N + 1), v2(N + 1), r(N + 1);
    for (int i = 0; i <= N; ++i) {
        const double x = static_cast<double>(i) / N;
        v[i] = phi0_eval(g1, g1.lambda0 * x).first;
        v2[i] = 2.0 * v[i];
        r[i] = x;
    }
    CHECK(project_ground(g1, v) == Catch::Approx(1.0).epsilon(1e-14));
    CHECK(project_ground(g1, v2) == Catch::Approx(2.0).epsilon(1e-14));

    // v(r) = r against the closed-form integrals for n = 1 (phi0 = cosh):
    //   num = int_0^1 r cosh(l r) dr = sinh(l)/l - (cosh(l) - 1)/l^2
    //   den = int_0^1 cosh^2(l r) dr = 1/2 + sinh(2l)/(4l)
    const double l = g1.lambda0;
    const double num = std::sinh(l) / l - (std::cosh(l) - 1.0) / (l * l);
    const double den = 0.5 + std::sinh(2.0 * l) / (4.0 * l);
    CHECK(project_ground(g1, r) == Catch::Approx(num / den).epsilon(1e-4));

    CHECK_THROWS_AS(project_ground(g1, std::vector<double>{1.0, 2.0}), std::invalid_argument);
}
