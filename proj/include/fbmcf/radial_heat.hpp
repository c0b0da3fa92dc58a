#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "fbmcf/errors.hpp"
#include "fbmcf/ground_state.hpp"

namespace fbmcf {

// =============================================================================
// Radial critical-Robin eigenproblem and heat equation on the unit n-ball.
//
//   -(phi_rr + (n-1)/r phi_r - l(l+n-2)/r^2 phi) = mu phi   on (0,1)
//   phi'(1) = phi(1)
//
// Eigenvalues are located by shooting from the regular branch phi ~ r^l and
// scanning the boundary residual phi'(1) - phi(1) for sign changes. The heat
// solver advances v_t = v_rr + (n-1)/r v_r with the same Robin closure by an
// explicit monotone stencil.
// =============================================================================

struct EigenMode {
    int n = 0;
    int ell = 0;                  ///< spherical-harmonic degree
    double mu = 0.0;
    std::vector<double> profile;  ///< sampled on r_i = i/(profile.size()-1), sup-normalized
    double boundary_residual = 0.0;
};

struct RadialHeatState {
    int n = 0;
    double dr = 0.0;
    std::vector<double> values;  ///< v(r_i, t), r_i = i*dr
    double t = 0.0;
};

namespace detail {

struct ShootResult {
    double phi1 = 0.0;       // phi(1), in the integration's running scale
    double dphi1 = 0.0;      // phi'(1), same scale
    std::vector<double> profile;
};

/// Integrate the radial equation from r = eps with a two-term series start
/// of the regular branch, fixed-step RK4 to r = 1. Values are renormalized
/// if they grow past 1e100 (the residual is used through its sign only in
/// that regime). The profile is sampled at n_profile+1 uniform nodes.
inline ShootResult shoot(int n, int ell, double mu, int steps = 2000, int n_profile = 0) {
    const double eps = 1e-4;
    // Regular branch: phi = r^l (1 + c1 r^2 + ...), c1 = -mu / (2(2l+n)).
    const double c1 = -mu / (2.0 * (2.0 * ell + n));
    double r = eps;
    double phi = std::pow(eps, ell) * (1.0 + c1 * eps * eps);
    double dphi = (ell > 0 ? ell * std::pow(eps, ell - 1) * (1.0 + c1 * eps * eps) : 0.0) +
                  std::pow(eps, ell) * 2.0 * c1 * eps;

    auto rhs = [n, ell, mu](double rr, double p, double dp, double& out_p, double& out_dp) {
        out_p = dp;
        out_dp = -(n - 1) / rr * dp + (static_cast<double>(ell) * (ell + n - 2)) / (rr * rr) * p -
                 mu * p;
    };

    ShootResult res;
    res.profile.assign(n_profile > 0 ? n_profile + 1 : 0, 0.0);
    const double h = (1.0 - eps) / steps;
    int next_sample = 0;
    // Sample nodes j/n_profile by linear interpolation at crossings.
    auto sample_through = [&](double r_prev, double p_prev, double rr, double p) {
        if (res.profile.empty()) return;
        while (next_sample <= n_profile) {
            const double node = static_cast<double>(next_sample) / n_profile;
            if (node > rr + 1e-13) break;
            const double w = (rr > r_prev) ? (node - r_prev) / (rr - r_prev) : 0.0;
            res.profile[next_sample] = p_prev + w * (p - p_prev);
            ++next_sample;
        }
    };
    if (!res.profile.empty()) {
        res.profile[0] = (ell == 0 ? 1.0 : 0.0);
        next_sample = 1;
        sample_through(0.0, res.profile[0], r, phi);
    }

    for (int i = 0; i < steps; ++i) {
        const double r_prev = r;
        const double p_prev = phi;
        double k1p, k1d, k2p, k2d, k3p, k3d, k4p, k4d;
        rhs(r, phi, dphi, k1p, k1d);
        rhs(r + 0.5 * h, phi + 0.5 * h * k1p, dphi + 0.5 * h * k1d, k2p, k2d);
        rhs(r + 0.5 * h, phi + 0.5 * h * k2p, dphi + 0.5 * h * k2d, k3p, k3d);
        rhs(r + h, phi + h * k3p, dphi + h * k3d, k4p, k4d);
        phi += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        dphi += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
        r += h;
        sample_through(r_prev, p_prev, r, phi);
        const double mag = std::max(std::abs(phi), std::abs(dphi));
        if (mag > 1e100) {
            phi /= mag;
            dphi /= mag;
            for (double& v : res.profile) v /= mag;
        }
    }
    res.phi1 = phi;
    res.dphi1 = dphi;
    return res;
}

}  // namespace detail

/// Boundary residual phi'(1) - phi(1) of the regular-branch shot.
/// Its sign changes in mu locate the eigenvalues.
inline double shoot_residual(int n, int ell, double mu, int steps = 2000) {
    if (n < 1) throw std::invalid_argument("shoot_residual: n must be >= 1");
    if (ell < 0) throw std::invalid_argument("shoot_residual: ell must be >= 0");
    const auto s = detail::shoot(n, ell, mu, steps);
    return s.dphi1 - s.phi1;
}

/// Scan [mu_min, mu_max] for sign changes of the shooting residual and refine
/// each by bisection. Midpoint probing flags cells that hide a root pair
/// (scan step too coarse); such pairs are refined and reported through
/// `coarse_step_warnings`. Modes are returned sorted by mu.
inline std::vector<EigenMode> find_eigenvalues(int n, int ell, double mu_min, double mu_max,
                                               double scan_step = 0.25,
                                               int* coarse_step_warnings = nullptr,
                                               double refine_tol = 1e-10) {
    if (!(mu_min < mu_max)) throw std::invalid_argument("find_eigenvalues: empty interval");
    if (!(scan_step > 0.0)) throw std::invalid_argument("find_eigenvalues: scan_step must be > 0");

    auto residual = [n, ell](double mu) { return shoot_residual(n, ell, mu); };

    std::vector<std::pair<double, double>> brackets;
    int warnings = 0;
    double a = mu_min;
    double fa = residual(a);
    while (a < mu_max) {
        const double b = std::min(a + scan_step, mu_max);
        const double fb = residual(b);
        if (fa == 0.0) brackets.emplace_back(a, a);
        if (fa * fb < 0.0) {
            brackets.emplace_back(a, b);
        } else if (fa * fb > 0.0) {
            // Same-sign endpoints can hide an even number of roots.
            const double m = 0.5 * (a + b);
            const double fm = residual(m);
            if (fm * fa < 0.0) {
                ++warnings;
                brackets.emplace_back(a, m);
                brackets.emplace_back(m, b);
            }
        }
        a = b;
        fa = fb;
    }
    if (coarse_step_warnings) *coarse_step_warnings = warnings;

    std::vector<EigenMode> modes;
    for (auto [lo, hi] : brackets) {
        double flo = residual(lo);
        if (lo == hi || flo == 0.0) {
            // landed exactly on a root
        } else {
            while (hi - lo > refine_tol) {
                const double mid = 0.5 * (lo + hi);
                const double fmid = residual(mid);
                if (fmid == 0.0) {
                    lo = hi = mid;
                    break;
                }
                (flo * fmid < 0.0 ? hi : lo) = mid;
                if (flo * fmid >= 0.0) flo = fmid;
            }
        }
        const double mu = 0.5 * (lo + hi);
        EigenMode mode;
        mode.n = n;
        mode.ell = ell;
        mode.mu = mu;
        const auto s = detail::shoot(n, ell, mu, 2000, 200);
        mode.profile = s.profile;
        double sup = 0.0;
        for (double v : mode.profile) sup = std::max(sup, std::abs(v));
        const double sign = (s.phi1 >= 0.0 ? 1.0 : -1.0);
        if (sup > 0.0)
            for (double& v : mode.profile) v *= sign / sup;
        mode.boundary_residual = (s.dphi1 - s.phi1) * sign / (sup > 0.0 ? sup : 1.0);
        modes.push_back(std::move(mode));
    }
    std::sort(modes.begin(), modes.end(),
              [](const EigenMode& x, const EigenMode& y) { return x.mu < y.mu; });
    return modes;
}

/// Stability (and positivity) limit of the explicit radial step; the axis
/// node, updated as v_t(0) = 2n (v_1 - v_0)/dr^2, is the binding one.
inline double heat_max_dt(int n, double dr) { return dr * dr / (2.0 * n); }

/// Advance v_t = v_rr + (n-1)/r v_r with v'(1) = v(1) (second-order one-sided
/// closure) and axis regularity, explicit stepping. Snapshots are recorded at
/// the first step reaching each requested time (actual time stored).
inline std::vector<RadialHeatState> evolve_heat(int n, const std::function<double(double)>& init,
                                                double dr, double dt, double t_end,
                                                const std::vector<double>& sample_times) {
    if (n < 1) throw std::invalid_argument("evolve_heat: n must be >= 1");
    if (!(dr > 0.0) || !(dt > 0.0)) throw std::invalid_argument("evolve_heat: dr, dt must be > 0");
    if (dt > heat_max_dt(n, dr) * (1.0 + 1e-12))
        throw cfl_violation_error("evolve_heat: dt exceeds stability limit " +
                                  std::to_string(heat_max_dt(n, dr)));

    const int N = static_cast<int>(std::lround(1.0 / dr));
    if (std::abs(N * dr - 1.0) > 1e-12)
        throw std::invalid_argument("evolve_heat: 1/dr must be an integer node count");

    std::vector<double> v(N + 1), vn(N + 1);
    for (int i = 0; i <= N; ++i) {
        v[i] = init(i * dr);
        if (!std::isfinite(v[i])) throw std::invalid_argument("evolve_heat: init not finite");
    }
    // Start from data satisfying the discrete Robin closure.
    v[N] = (4.0 * v[N - 1] - v[N - 2]) / (3.0 - 2.0 * dr);

    std::vector<double> times = sample_times;
    std::sort(times.begin(), times.end());
    std::vector<RadialHeatState> out;
    auto snapshot = [&](double t) {
        out.push_back(RadialHeatState{n, dr, v, t});
    };

    double t = 0.0;
    std::size_t next = 0;
    while (next < times.size() && times[next] <= 0.0) {
        snapshot(t);
        ++next;
    }
    const double inv_dr2 = 1.0 / (dr * dr);
    while (t < t_end - 1e-15) {
        const double step = std::min(dt, t_end - t);
        vn[0] = v[0] + step * (2.0 * n * (v[1] - v[0]) * inv_dr2);
        for (int i = 1; i < N; ++i) {
            const double r = i * dr;
            const double lap = (v[i + 1] - 2.0 * v[i] + v[i - 1]) * inv_dr2 +
                               (n - 1) * (v[i + 1] - v[i - 1]) / (2.0 * dr * r);
            vn[i] = v[i] + step * lap;
        }
        vn[N] = (4.0 * vn[N - 1] - vn[N - 2]) / (3.0 - 2.0 * dr);
        v.swap(vn);
        t += step;
        while (next < times.size() && t >= times[next] - 1e-15) {
            snapshot(t);
            ++next;
        }
    }
    if (out.empty() || out.back().t < t) snapshot(t);
    return out;
}

/// L2(B^n) projection coefficient <v, phi0(lambda0 .)> / ||phi0(lambda0 .)||^2
/// with weight r^(n-1) dr, composite trapezoid on the sample grid.
inline double project_ground(const GroundState& gs, const std::vector<double>& v) {
    const int N = static_cast<int>(v.size()) - 1;
    if (N < 2) throw std::invalid_argument("project_ground: need at least 3 samples");
    const double dr = 1.0 / N;
    double num = 0.0, den = 0.0;
    for (int i = 0; i <= N; ++i) {
        const double r = i * dr;
        const double w = (i == 0 || i == N ? 0.5 : 1.0) * std::pow(r, gs.n - 1);
        const double g = phi0_eval(gs, gs.lambda0 * r).first;
        num += w * v[i] * g;
        den += w * g * g;
    }
    return num / den;
}

/// Rayleigh quotient of a sampled radial profile:
/// (int phi'^2 r^(n-1) dr - phi(1)^2) / int phi^2 r^(n-1) dr,
/// derivatives by second-order differences. Reproduces mu for eigenmodes.
inline double rayleigh_quotient(int n, const std::vector<double>& phi) {
    const int N = static_cast<int>(phi.size()) - 1;
    const double dr = 1.0 / N;
    auto dphi = [&](int i) {
        if (i == 0) return (-3.0 * phi[0] + 4.0 * phi[1] - phi[2]) / (2.0 * dr);
        if (i == N) return (3.0 * phi[N] - 4.0 * phi[N - 1] + phi[N - 2]) / (2.0 * dr);
        return (phi[i + 1] - phi[i - 1]) / (2.0 * dr);
    };
    double grad = 0.0, mass = 0.0;
    for (int i = 0; i <= N; ++i) {
        const double r = i * dr;
        const double w = (i == 0 || i == N ? 0.5 : 1.0) * std::pow(r, n - 1);
        grad += w * dphi(i) * dphi(i);
        mass += w * phi[i] * phi[i];
    }
    return (grad * dr - phi[N] * phi[N]) / (mass * dr);
}

}  // namespace fbmcf
