#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "fbmcf/errors.hpp"
#include "fbmcf/ground_state.hpp"

namespace fbmcf {

// =============================================================================
// Barrier families for free-boundary mean curvature flow in the unit ball.
//
// Sphere barriers S_theta: the n-sphere meeting the unit sphere orthogonally
// at height sin(theta); in profile coordinates
//     |x|^2 + (csc(theta) - y)^2 = cot^2(theta),
// with mean curvature n tan(theta). Moved along the schedules
//     theta-(t) = arcsin e^(nt),  theta+(t) = arcsin e^(2nt),
// the lower family moves no faster than its curvature and the upper no
// slower, so they bound solutions from below/above.
//
// Subsolution surfaces Sigma^lambda_t: axially symmetric graphs defined by
//     sin(lambda y) = e^(lambda^2 t) phi0(lambda |x|),  y in (0, pi/(2 lambda)),
// whose normal speed never exceeds their mean curvature.
// =============================================================================

struct SphereBarrier {
    double theta = 0.0;
    double center_height = 0.0;  ///< csc(theta)
    double radius = 0.0;         ///< cot(theta)
    double mean_curvature = 0.0; ///< n tan(theta), n supplied at construction

    SphereBarrier() = default;
    SphereBarrier(int n, double theta_)
        : theta(theta_),
          center_height(1.0 / std::sin(theta_)),
          radius(1.0 / std::tan(theta_)),
          mean_curvature(n * std::tan(theta_)) {
        if (!(theta_ > 0.0 && theta_ < 1.5707963267948966))
            throw std::domain_error("SphereBarrier: theta must be in (0, pi/2)");
    }

    /// Height of the lower cap over radius x (the part inside the ball).
    double cap_height(double x) const {
        const double s = radius * radius - x * x;
        if (s < 0.0) throw std::domain_error("SphereBarrier: x beyond cap footprint");
        return center_height - std::sqrt(s);
    }

    /// Signed distance of a profile point to the sphere, positive inside
    /// the barrier ball.
    double signed_inside_distance(double x, double y) const {
        const double dy = y - center_height;
        return radius - std::sqrt(x * x + dy * dy);
    }
};

/// theta-(t) = arcsin e^(nt) (lower) or theta+(t) = arcsin e^(2nt) (upper).
enum class ScheduleKind { lower, upper };

inline double barrier_schedule(int n, double t, ScheduleKind kind) {
    if (t >= 0.0) throw std::domain_error("barrier_schedule: t must be < 0");
    const double rate = (kind == ScheduleKind::lower ? n : 2.0 * n);
    return std::asin(std::exp(rate * t));
}

struct ScheduleReport {
    double worst_margin = 0.0;
    double worst_time = 0.0;
    int violations = 0;  ///< sample points with margin < -1e-6
};

/// Compare the inward normal speed of the moving sphere family against its
/// mean curvature at sampled cap points, speed by centered finite difference
/// of the signed distance. Margin is H - speed for the lower schedule and
/// speed - H for the upper one; both are nonnegative in exact arithmetic.
inline ScheduleReport verify_sphere_schedule(int n, ScheduleKind kind,
                                             const std::vector<double>& t_grid,
                                             int samples = 64) {
    ScheduleReport rep;
    rep.worst_margin = 1e300;
    const double h = 1e-6;
    for (double t : t_grid) {
        if (t + h >= 0.0) throw std::domain_error("verify_sphere_schedule: t too close to 0");
        const double theta = barrier_schedule(n, t, kind);
        const SphereBarrier now(n, theta);
        const SphereBarrier before(n, barrier_schedule(n, t - h, kind));
        const SphereBarrier after(n, barrier_schedule(n, t + h, kind));
        for (int k = 0; k <= samples; ++k) {
            // Cap points P(a) = C + R (sin a, -cos a), a in [0, theta].
            const double a = theta * k / samples;
            const double x = now.radius * std::sin(a);
            const double y = now.center_height - now.radius * std::cos(a);
            const double speed = -(after.signed_inside_distance(x, y) -
                                   before.signed_inside_distance(x, y)) /
                                 (2.0 * h);
            const double margin = (kind == ScheduleKind::lower)
                                      ? now.mean_curvature - speed
                                      : speed - now.mean_curvature;
            if (margin < rep.worst_margin) {
                rep.worst_margin = margin;
                rep.worst_time = t;
            }
            if (margin < -1e-6) ++rep.violations;
        }
    }
    return rep;
}

// =============================================================================
// Sigma^lambda_t surfaces
// =============================================================================

struct SigmaSurface {
    GroundState gs;
    double lambda = 0.0;
    double t = 0.0;

    SigmaSurface(GroundState gs_, double lambda_, double t_)
        : gs(std::move(gs_)), lambda(lambda_), t(t_) {
        if (!(lambda > 0.0)) throw std::domain_error("SigmaSurface: lambda must be > 0");
        if (!(t < 0.0)) throw std::domain_error("SigmaSurface: t must be < 0");
    }
};

/// Height y(x) = arcsin(e^(lambda^2 t) phi0(lambda x)) / lambda.
/// Strictly increasing in x; defined while the arcsin argument stays below 1.
inline double sigma_height(const SigmaSurface& s, double x) {
    if (x < 0.0) throw std::domain_error("sigma_height: x must be >= 0");
    const double arg =
        std::exp(s.lambda * s.lambda * s.t) * phi0_eval(s.gs, s.lambda * x).first;
    if (arg >= 1.0)
        throw std::domain_error("sigma_height: surface is vertical before x = " +
                                std::to_string(x));
    return std::asin(arg) / s.lambda;
}

/// Largest x (strictly) below which the surface stays graphical, found by
/// bisection on the arcsin argument; capped at x_cap.
inline double sigma_graphical_range(const SigmaSurface& s, double x_cap = 1.0) {
    auto arg = [&](double x) {
        return std::exp(s.lambda * s.lambda * s.t) * phi0_eval(s.gs, s.lambda * x).first;
    };
    if (arg(x_cap) < 1.0) return x_cap;
    double lo = 0.0, hi = x_cap;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (arg(mid) < 1.0 ? lo : hi) = mid;
    }
    return lo;
}

struct SigmaGeometry {
    double y = 0.0;
    double theta = 0.0;      ///< turning angle of the profile tangent
    double kappa = 0.0;      ///< profile curvature
    double kappa_hat = 0.0;  ///< rotational curvature
    double H = 0.0;          ///< mean curvature
    double speed = 0.0;      ///< inward normal speed -gamma_t . nu
};

/// Pointwise geometry of Sigma^lambda_t along the profile curve:
///   tan(theta) = tan(lambda y) Phi(lambda x)
///   kappa      = lambda tan(lambda y) cos(theta) (1 - (n-1) Phi2(lambda x) cos^2(theta))
///   kappa_hat  = lambda tan(lambda y) cos(theta) Phi2(lambda x)
///   H          = kappa + (n-1) kappa_hat
///   speed      = lambda tan(lambda y) cos(theta)
/// with the removable singularities at x = 0 filled by Phi2(0) = 1/n
/// (there theta = 0 and kappa = kappa_hat).
inline SigmaGeometry sigma_geometry(const SigmaSurface& s, double x) {
    SigmaGeometry g;
    g.y = sigma_height(s, x);
    const int n = s.gs.n;
    const auto [Phi, Phi2] = phi_ratios(s.gs, s.lambda * x);
    const double T = std::tan(s.lambda * g.y);
    const double tan_theta = T * Phi;
    const double c = 1.0 / std::sqrt(1.0 + tan_theta * tan_theta);
    g.theta = std::atan(tan_theta);
    g.kappa = s.lambda * T * c * (1.0 - (n - 1) * Phi2 * c * c);
    g.kappa_hat = s.lambda * T * c * Phi2;
    g.H = g.kappa + (n - 1) * g.kappa_hat;
    g.speed = s.lambda * T * c;
    return g;
}

/// Arclength derivative of the mean curvature along the profile
/// (closed form; the proof's expression assembled from kappa and Phi2').
inline double sigma_H_s(const SigmaSurface& s, double x) {
    const SigmaGeometry g = sigma_geometry(s, x);
    const int n = s.gs.n;
    const double lam = s.lambda;
    const double rho = lam * x;
    const double P = phi_ratios(s.gs, rho).second;
    const double Pp = phi_ratio2_derivative(s.gs, rho);
    const double T = std::tan(lam * g.y);
    const double c = std::cos(g.theta);
    const double sn = std::sin(g.theta);
    const double sec2 = 1.0 + T * T;
    return lam * (lam * sec2 * sn * c - T * sn * g.kappa) * (1.0 + (n - 1) * sn * sn * P) +
           (n - 1) * lam * T * c * (2.0 * sn * c * g.kappa * P + lam * sn * sn * c * Pp);
}

/// Subsolution margin min over the grid of H - speed (analytically >= 0,
/// identically 0 for n = 1).
inline double verify_subsolution(const SigmaSurface& s, const std::vector<double>& x_grid) {
    double worst = 1e300;
    for (double x : x_grid) {
        const SigmaGeometry g = sigma_geometry(s, x);
        worst = std::min(worst, g.H - g.speed);
    }
    return worst;
}

/// Gradient conditions on Sigma^lambda: returns
/// (min over grid of grad H . X, max over grid of |grad log H|).
inline std::pair<double, double> gradient_conditions(const SigmaSurface& s,
                                                     const std::vector<double>& x_grid) {
    double min_gx = 1e300;
    double max_glh = 0.0;
    for (double x : x_grid) {
        const SigmaGeometry g = sigma_geometry(s, x);
        const double Hs = sigma_H_s(s, x);
        const double tangent_dot_X = x * std::cos(g.theta) + g.y * std::sin(g.theta);
        min_gx = std::min(min_gx, Hs * tangent_dot_X);
        max_glh = std::max(max_glh, std::abs(Hs) / g.H);
    }
    return {min_gx, max_glh};
}

// =============================================================================
// Boundary matching: lambda(theta) and the initial-data time t_rho
// =============================================================================

/// Matching function f(lambda) = Phi(lambda cos t) cos t - cot(lambda sin t) sin t.
/// Its root is the frequency whose Sigma surface meets the unit sphere
/// orthogonally at height sin(theta). f is strictly increasing in lambda.
inline double lambda_theta_residual(const GroundState& gs, double theta, double lambda) {
    const double c = std::cos(theta);
    const double sn = std::sin(theta);
    const double lhs = phi_ratios(gs, lambda * c).first * c;
    const double arg = lambda * sn;
    return lhs - sn * std::cos(arg) / std::sin(arg);
}

/// Unique root of the matching equation in (0, pi/(2 sin theta)).
/// The scan asserts a single sign change; more than one is reported as a
/// convergence failure. Note: lambda(theta) < lambda0 holds for n >= 2 but
/// the ordering is reversed for n = 1 (the root then lies in
/// (lambda0, pi/2]); no clamp is applied.
inline double solve_lambda_theta(const GroundState& gs, double theta) {
    if (!(theta > 0.0 && theta < 1.5707963267948966))
        throw std::domain_error("solve_lambda_theta: theta must be in (0, pi/2)");
    const double delta = 1e-8;
    // The root lies below max(lambda0, pi/2); capping the bracket keeps the
    // series arguments inside the certified range for small theta.
    const double hi_end =
        std::min(1.5707963267948966 / std::sin(theta) - delta, gs.lambda0 + 2.0);
    const double lo_end = delta;

    // Scan for sign changes; the function is -inf near 0 and positive at the
    // upper end, so exactly one change is expected.
    const int cells = 200;
    double bracket_lo = 0.0, bracket_hi = 0.0;
    int changes = 0;
    double a = lo_end;
    double fa = lambda_theta_residual(gs, theta, a);
    for (int k = 1; k <= cells; ++k) {
        const double b = lo_end + (hi_end - lo_end) * k / cells;
        const double fb = lambda_theta_residual(gs, theta, b);
        if (fa * fb < 0.0) {
            if (changes == 0) {
                bracket_lo = a;
                bracket_hi = b;
            }
            ++changes;
        }
        a = b;
        fa = fb;
    }
    if (changes == 0)
        throw no_convergence_error("solve_lambda_theta: no sign change; theta outside range");
    if (changes > 1)
        throw no_convergence_error("solve_lambda_theta: multiple sign changes (" +
                                   std::to_string(changes) + ") in the matching function");

    double lo = bracket_lo, hi = bracket_hi;
    double flo = lambda_theta_residual(gs, theta, lo);
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = lambda_theta_residual(gs, theta, mid);
        if (fmid == 0.0) return mid;
        if (flo * fmid < 0.0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Frequency and starting time of the initial surface meeting the unit
/// sphere orthogonally at height sin(rho):
///   -t_rho = lambda_rho^-2 log(phi(lambda_rho cos rho) / sin(lambda_rho sin rho)).
inline std::pair<double, double> initial_time(const GroundState& gs, double rho) {
    if (!(rho > 0.0 && rho < 1.5707963267948966))
        throw std::domain_error("initial_time: rho must be in (0, pi/2)");
    const double lam = solve_lambda_theta(gs, rho);
    const double phi_b = phi0_eval(gs, lam * std::cos(rho)).first;
    const double t_rho = -std::log(phi_b / std::sin(lam * std::sin(rho))) / (lam * lam);
    return {lam, t_rho};
}

}  // namespace fbmcf
