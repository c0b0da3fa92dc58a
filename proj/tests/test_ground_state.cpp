#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fbmcf/ground_state.hpp"

using namespace fbmcf;

namespace {

// Closed-form oracles for the dimensions where the series collapses:
// n = 1: phi0 = cosh(rho), lambda0 solves lambda tanh(lambda) = 1.
// n = 3: phi0 = sinh(rho)/rho, lambda0 solves lambda coth(lambda) = 2.
double oracle_lambda0_n1() {
    double lo = 1.0, hi = 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (mid * std::tanh(mid) < 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double oracle_lambda0_n3() {
    double lo = 1.0, hi = 3.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (mid / std::tanh(mid) < 2.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("ground state coefficients match the closed forms") {
    const auto b1 = ground_state_coefficients(1, 2);
    CHECK(b1[0] == 1.0);
    CHECK(b1[1] == Catch::Approx(0.5).epsilon(1e-15));        // cosh
    CHECK(b1[2] == Catch::Approx(1.0 / 24.0).epsilon(1e-15));

    const auto b3 = ground_state_coefficients(3, 2);
    CHECK(b3[1] == Catch::Approx(1.0 / 6.0).epsilon(1e-15));  // sinh(rho)/rho
    CHECK(b3[2] == Catch::Approx(1.0 / 120.0).epsilon(1e-15));

    const auto b2 = ground_state_coefficients(2, 1);
    CHECK(b2[1] == Catch::Approx(0.25).epsilon(1e-15));

    CHECK_THROWS_AS(ground_state_coefficients(0, 2), std::invalid_argument);
    CHECK_THROWS_AS(ground_state_coefficients(2, 0), std::invalid_argument);
}

TEST_CASE("coefficient recurrence and decay") {
    for (int n : {1, 2, 3, 5, 10}) {
        const auto b = ground_state_coefficients(n, 12);
        for (int j = 1; j <= 12; ++j) {
            CHECK(b[j] * 2.0 * j * (n + 2.0 * (j - 1)) ==
                  Catch::Approx(b[j - 1]).epsilon(1e-14));
            CHECK(b[j] > 0.0);
            CHECK(b[j] < b[j - 1]);
        }
    }
}

TEST_CASE("phi0 evaluation against cosh and sinh(rho)/rho") {
    const GroundState g1 = solve_lambda0(1);
    const auto [v1, d1] = phi0_eval(g1, 1.0);
    CHECK(v1 == Catch::Approx(std::cosh(1.0)).epsilon(1e-14));
    CHECK(d1 == Catch::Approx(std::sinh(1.0)).epsilon(1e-14));

    const auto [v0, d0] = phi0_eval(g1, 0.0);
    CHECK(v0 == 1.0);
    CHECK(d0 == 0.0);

    const GroundState g3 = solve_lambda0(3);
    const auto [v3, d3] = phi0_eval(g3, 2.0);
    CHECK(v3 == Catch::Approx(std::sinh(2.0) / 2.0).epsilon(1e-14));
    CHECK(d3 == Catch::Approx((2.0 * std::cosh(2.0) - std::sinh(2.0)) / 4.0).epsilon(1e-14));

    // Relative accuracy 1e-12 across [0, 5].
    for (int k = 0; k <= 500; ++k) {
        const double rho = 5.0 * k / 500.0;
        const double exact1 = std::cosh(rho);
        CHECK(std::abs(phi0_eval(g1, rho).first - exact1) <= 1e-12 * exact1);
        const double exact3 = rho > 0.0 ? std::sinh(rho) / rho : 1.0;
        CHECK(std::abs(phi0_eval(g3, rho).first - exact3) <= 1e-12 * exact3);
    }

    CHECK_THROWS_AS(phi0_eval(g1, -0.5), std::domain_error);
    CHECK_THROWS_AS(phi0_eval(g1, g1.rho_max + 1.0), std::domain_error);
}

TEST_CASE("ODE residual of the series stays below 1e-10 on (0, 5]") {
    for (int n : {1, 2, 3, 5}) {
        const GroundState gs = solve_lambda0(n);
        for (int k = 1; k <= 100; ++k) {
            const double rho = 5.0 * k / 100.0;
            const auto [phi, dphi] = phi0_eval(gs, rho);
            const double d2 = phi0_second_derivative(gs, rho);
            CHECK(std::abs(d2 + (n - 1) * dphi / rho - phi) < 1e-10);
        }
    }
}

TEST_CASE("boundary functional is the Robin mismatch and is monotone") {
    const GroundState g1 = solve_lambda0(1);
    CHECK(boundary_functional(g1, 1e-8) < 1e-15);

    const double l0 = oracle_lambda0_n1();
    CHECK(std::abs(boundary_functional(g1, l0) - 1.0) < 1e-9);

    // G(2) = 2 sinh 2 - cosh 2 + 1 for n = 1.
    const double g2 = 2.0 * std::sinh(2.0) - std::cosh(2.0) + 1.0;
    CHECK(boundary_functional(g1, 2.0) == Catch::Approx(g2).epsilon(1e-13));
    CHECK(boundary_functional(g1, 2.0) > 1.0);

    // Identity G(lambda) = lambda phi' - phi + 1 and strict monotonicity.
    for (int n : {1, 2, 3}) {
        const GroundState gs = solve_lambda0(n);
        double prev = 0.0;
        for (int k = 1; k <= 40; ++k) {
            const double lam = 0.1 * k;
            const auto [phi, dphi] = phi0_eval(gs, lam);
            const double g = boundary_functional(gs, lam);
            CHECK(g == Catch::Approx(lam * dphi - phi + 1.0).epsilon(1e-10).margin(1e-13));
            CHECK(g > prev);
            prev = g;
        }
    }
}

TEST_CASE("lambda0 agrees with the transcendental oracles") {
    const GroundState g1 = solve_lambda0(1);
    CHECK(std::abs(g1.lambda0 - oracle_lambda0_n1()) < 1e-9);
    CHECK(g1.mu0 == Catch::Approx(-g1.lambda0 * g1.lambda0));

    const GroundState g3 = solve_lambda0(3);
    CHECK(std::abs(g3.lambda0 - oracle_lambda0_n3()) < 1e-9);

    // lambda0 phi'(lambda0) = phi(lambda0)
    for (int n : {1, 2, 3, 7}) {
        const GroundState gs = solve_lambda0(n);
        const auto [phi, dphi] = phi0_eval(gs, gs.lambda0);
        CHECK(gs.lambda0 * dphi == Catch::Approx(phi).epsilon(1e-11));
    }
}

TEST_CASE("lambda0 is increasing in the dimension and exceeds 1") {
    double prev = 1.0;
    for (int n = 1; n <= 10; ++n) {
        const GroundState gs = solve_lambda0(n);
        CHECK(gs.lambda0 > prev);
        CHECK(gs.lambda0 > 1.0);
        prev = gs.lambda0;
    }
}

TEST_CASE("lambda0 is stable under tol refinement") {
    for (int n : {1, 2, 5}) {
        const double a = solve_lambda0(n, 1e-8).lambda0;
        const double b = solve_lambda0(n, 1e-13).lambda0;
        CHECK(std::abs(a - b) < 1e-8);
    }
    CHECK_THROWS_AS(solve_lambda0(2, 1e-30), no_convergence_error);
    CHECK_THROWS_AS(solve_lambda0(0, 1e-10), std::invalid_argument);
    CHECK_THROWS_AS(solve_lambda0(2, -1.0), std::invalid_argument);
}

TEST_CASE("phi ratios: values, limits, monotonicity") {
    const GroundState g1 = solve_lambda0(1);
    const GroundState g3 = solve_lambda0(3);

    CHECK(phi_ratios(g1, 0.0).first == 0.0);
    CHECK(phi_ratios(g1, 0.0).second == 1.0);
    CHECK(phi_ratios(g3, 0.0).second == Catch::Approx(1.0 / 3.0).epsilon(1e-15));

    CHECK(phi_ratios(g1, 8.0).first == Catch::Approx(std::tanh(8.0)).epsilon(1e-13));
    CHECK(phi_ratios(g3, 1.0).first ==
          Catch::Approx(1.0 / std::tanh(1.0) - 1.0).epsilon(1e-13));

    for (int n : {1, 2, 3, 5}) {
        const GroundState gs = solve_lambda0(n);
        double prev_phi = -1.0;
        double prev_phi2 = 2.0;
        for (int k = 0; k <= 100; ++k) {
            const double rho = 0.1 * k;
            const auto [Phi, Phi2] = phi_ratios(gs, rho);
            CHECK(Phi > prev_phi);
            CHECK(Phi < 1.0);
            if (k > 0) CHECK(Phi2 < prev_phi2);
            CHECK(Phi2 <= 1.0 / n + 1e-15);
            prev_phi = Phi;
            prev_phi2 = Phi2;
        }
        // Phi -> 1 with the algebraic tail 1 - a/rho - b/rho^2,
        // a = (n-1)/2, b = (n-1)(3-n)/8; exponential rate only for n = 1.
        const double phi10 = phi_ratios(gs, 10.0).first;
        if (n == 1) {
            CHECK(std::abs(phi10 - 1.0) < 1e-4);
        } else {
            const double a = (n - 1) / 2.0;
            const double b = (n - 1) * (3.0 - n) / 8.0;
            CHECK(std::abs(phi10 - (1.0 - a / 10.0 - b / 100.0)) < 2e-3);
        }
    }
}

TEST_CASE("Phi2 derivative identity matches finite differences") {
    const GroundState gs = solve_lambda0(2);
    const double h = 1e-6;
    for (double rho : {0.3, 0.9, 1.7, 3.1}) {
        const double fd =
            (phi_ratios(gs, rho + h).second - phi_ratios(gs, rho - h).second) / (2.0 * h);
        CHECK(phi_ratio2_derivative(gs, rho) == Catch::Approx(fd).epsilon(1e-6).margin(1e-9));
    }
    CHECK(phi_ratio2_derivative(gs, 0.0) == 0.0);
}
