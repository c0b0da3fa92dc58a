#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "fbmcf/errors.hpp"

namespace fbmcf {

// =============================================================================
// Ground state of the critical-Robin Laplacian on the unit n-ball.
//
// The radial ground state is the entire even function
//     phi0(rho) = sum_j b_j rho^(2j),   b_0 = 1,
//     b_j = b_{j-1} / (2j (n + 2(j-1))),
// which solves phi'' + (n-1)/rho phi' = phi. The principal frequency
// lambda0 > 1 is the unique root of
//     G(lambda) = sum_{j>=1} (2j-1) b_j lambda^(2j) = 1,
// equivalently lambda0 phi0'(lambda0) = phi0(lambda0), and the lowest
// eigenvalue is mu0 = -lambda0^2. For n = 1, phi0 = cosh; for n = 3,
// phi0 = sinh(rho)/rho.
// =============================================================================

/// Coefficients b_0..b_J of the even power series of phi0.
inline std::vector<double> ground_state_coefficients(int n, int J) {
    if (n < 1) throw std::invalid_argument("ground_state_coefficients: n must be >= 1");
    if (J < 1) throw std::invalid_argument("ground_state_coefficients: J must be >= 1");
    std::vector<double> b(static_cast<std::size_t>(J) + 1);
    b[0] = 1.0;
    for (int j = 1; j <= J; ++j) {
        b[j] = b[j - 1] / (2.0 * j * (n + 2.0 * (j - 1)));
    }
    return b;
}

struct GroundState {
    int n = 0;                   ///< ball dimension
    std::vector<double> coeffs;  ///< b_0..b_J, all positive, strictly decreasing
    int truncation = 0;          ///< J
    double lambda0 = 0.0;        ///< principal frequency, > 1
    double mu0 = 0.0;            ///< lowest eigenvalue, -lambda0^2
    double rho_max = 0.0;        ///< largest argument the truncation certifies
};

namespace detail {

/// Smallest J such that the next series term at rho_max is below
/// 1e-16 times the partial sum there. Coefficients decay factorially,
/// so this terminates quickly.
inline int certified_truncation(int n, double rho_max) {
    const double r2 = rho_max * rho_max;
    double b = 1.0;      // b_j
    double term = 1.0;   // b_j rho^(2j)
    double sum = 1.0;
    int j = 0;
    while (true) {
        ++j;
        b /= 2.0 * j * (n + 2.0 * (j - 1));
        term *= r2 / (2.0 * j * (n + 2.0 * (j - 1)));
        if (term <= 1e-16 * sum && j >= 2) return j;
        sum += term;
        if (j > 400) throw no_convergence_error("certified_truncation: series did not settle");
    }
}

}  // namespace detail

/// (phi0(rho), phi0'(rho)) by series summation. Valid for rho in [0, rho_max].
inline std::pair<double, double> phi0_eval(const GroundState& gs, double rho) {
    if (rho < 0.0) throw std::domain_error("phi0_eval: rho must be >= 0");
    if (rho > gs.rho_max)
        throw std::domain_error("phi0_eval: rho exceeds certified rho_max = " +
                                std::to_string(gs.rho_max));
    const double r2 = rho * rho;
    double value = 0.0;
    double deriv = 0.0;
    double pow2j = 1.0;  // rho^(2j)
    for (std::size_t j = 0; j < gs.coeffs.size(); ++j) {
        value += gs.coeffs[j] * pow2j;
        if (j >= 1) deriv += 2.0 * static_cast<double>(j) * gs.coeffs[j] * pow2j / (rho > 0.0 ? rho : 1.0);
        pow2j *= r2;
    }
    if (rho == 0.0) deriv = 0.0;  // odd function
    return {value, deriv};
}

/// phi0''(rho) summed directly from the series, sum 2j(2j-1) b_j rho^(2j-2).
/// Independent of the ODE identity, so the ODE residual can be checked with it.
inline double phi0_second_derivative(const GroundState& gs, double rho) {
    if (rho < 0.0) throw std::domain_error("phi0_second_derivative: rho must be >= 0");
    if (rho > gs.rho_max)
        throw std::domain_error("phi0_second_derivative: rho exceeds certified rho_max");
    const double r2 = rho * rho;
    double d2 = 0.0;
    double pow2jm2 = 1.0;  // rho^(2j-2)
    for (std::size_t j = 1; j < gs.coeffs.size(); ++j) {
        const double tj = 2.0 * static_cast<double>(j);
        d2 += tj * (tj - 1.0) * gs.coeffs[j] * pow2jm2;
        pow2jm2 *= r2;
    }
    return d2;
}

/// Boundary functional G(lambda) = sum_{j>=1} (2j-1) b_j lambda^(2j).
/// Strictly increasing, G(0+) = 0; G(lambda0) = 1.
inline double boundary_functional(const GroundState& gs, double lambda) {
    if (lambda <= 0.0) throw std::domain_error("boundary_functional: lambda must be > 0");
    const double l2 = lambda * lambda;
    double g = 0.0;
    double pow2j = l2;
    for (std::size_t j = 1; j < gs.coeffs.size(); ++j) {
        g += (2.0 * static_cast<double>(j) - 1.0) * gs.coeffs[j] * pow2j;
        pow2j *= l2;
    }
    return g;
}

/// Solve G(lambda0) = 1 by bracket growth, bisection, then Newton polish.
/// The returned GroundState carries the certified series and mu0 = -lambda0^2.
inline GroundState solve_lambda0(int n, double tol = 1e-12, double rho_max = 12.0) {
    if (n < 1) throw std::invalid_argument("solve_lambda0: n must be >= 1");
    if (tol <= 0.0) throw std::invalid_argument("solve_lambda0: tol must be > 0");

    GroundState gs;
    gs.n = n;
    gs.truncation = detail::certified_truncation(n, rho_max);
    gs.coeffs = ground_state_coefficients(n, gs.truncation);
    gs.rho_max = rho_max;

    // Bracket: G is monotone, so grow the upper end until G > 1.
    double lo = 1e-6;
    double hi = 2.0;
    int doublings = 0;
    while (boundary_functional(gs, hi) < 1.0) {
        hi *= 2.0;
        if (++doublings > 60 || hi > rho_max)
            throw no_convergence_error("solve_lambda0: bracket exceeded certified range");
    }
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (boundary_functional(gs, mid) < 1.0 ? lo : hi) = mid;
    }
    // Newton polish on G(lambda) - 1. G'(lambda) = sum (2j-1) 2j b_j lambda^(2j-1).
    double lambda = 0.5 * (lo + hi);
    bool converged = false;
    for (int it = 0; it < 50 && !converged; ++it) {
        const double g = boundary_functional(gs, lambda) - 1.0;
        if (std::abs(g) <= tol) {
            converged = true;
            break;
        }
        const double l2 = lambda * lambda;
        double gp = 0.0;
        double pow2jm1 = lambda;
        for (std::size_t j = 1; j < gs.coeffs.size(); ++j) {
            gp += (2.0 * static_cast<double>(j) - 1.0) * 2.0 * static_cast<double>(j) *
                  gs.coeffs[j] * pow2jm1;
            pow2jm1 *= l2;
        }
        const double next = lambda - g / gp;
        lambda = (next > lo && next < hi) ? next : 0.5 * (lo + hi);
    }
    if (!converged && std::abs(boundary_functional(gs, lambda) - 1.0) > tol)
        throw no_convergence_error("solve_lambda0: tol not reachable at this arithmetic");
    gs.lambda0 = lambda;
    gs.mu0 = -lambda * lambda;
    return gs;
}

/// Phi  = phi0'/phi0        (odd, increasing, -> 1 at infinity)
/// Phi2 = phi0'/(rho phi0)  (even, decreasing, Phi2(0) = 1/n, <= 1/n)
inline std::pair<double, double> phi_ratios(const GroundState& gs, double rho) {
    if (rho == 0.0) return {0.0, 1.0 / gs.n};
    const auto [phi, dphi] = phi0_eval(gs, rho);
    return {dphi / phi, dphi / (rho * phi)};
}

/// d/drho of Phi2, from the ODE identity Phi2' = (1 - n Phi2)/rho - rho Phi2^2.
inline double phi_ratio2_derivative(const GroundState& gs, double rho) {
    if (rho == 0.0) return 0.0;  // even function
    const double p2 = phi_ratios(gs, rho).second;
    return (1.0 - gs.n * p2) / rho - rho * p2 * p2;
}

}  // namespace fbmcf
