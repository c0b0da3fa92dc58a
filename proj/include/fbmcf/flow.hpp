#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "fbmcf/barriers.hpp"
#include "fbmcf/errors.hpp"
#include "fbmcf/ground_state.hpp"

namespace fbmcf {

// =============================================================================
// Rotationally symmetric free-boundary mean curvature flow in B^(n+1),
// written as a graph y = u(x, t) over the shrinking disc x in [0, x_b(t)],
// tracked on the normalized grid xi = x/x_b:
//
//   u_t = u_xx/(1 + u_x^2) + (n-1) u_x / x                 (interior)
//   u_x(x_b) = u(x_b)/x_b,  x_b^2 + u(x_b)^2 = 1           (free boundary)
//   u_x(0) = 0                                             (axis)
//
// advanced by an explicit two-stage (Heun) step with the chain-rule
// correction xi (dx_b/dt) u_x for the moving coordinate. The initial data is
// the subsolution surface Sigma^{lambda(rho)}_{t_rho}, which meets the unit
// sphere orthogonally at height sin(rho).
// =============================================================================

struct ProfileState {
    int n = 0;
    double t = 0.0;
    int M = 0;              ///< grid cells; nodes xi_i = i/M, i = 0..M
    std::vector<double> u;  ///< heights u(xi_i x_b, t)
    double x_b = 0.0;       ///< boundary radius in (0, 1)

    double dxi() const { return 1.0 / M; }
    double dx() const { return x_b / M; }
};

struct TraceRecord {
    double t = 0.0;
    double y_min = 0.0;     ///< axis height u_0
    double y_max = 0.0;     ///< boundary height u_M = sin(theta_bar)
    double theta_bar = 0.0;
    double H_min = 0.0;     ///< curvature at the axis
    double H_max = 0.0;     ///< curvature at the boundary
    double x_b = 0.0;
};

struct FlowTrace {
    std::vector<TraceRecord> records;
    double t_ext = std::numeric_limits<double>::quiet_NaN();  ///< set by alignment
    std::map<std::string, std::string> config;
};

/// Invariant breach during a run; carries the last valid state so callers
/// can dump it.
struct flow_abort_error : invariant_breach_error {
    ProfileState last_valid;
    flow_abort_error(const std::string& what, ProfileState s)
        : invariant_breach_error(what), last_valid(std::move(s)) {}
};

// -----------------------------------------------------------------------------
// Profile invariants
// -----------------------------------------------------------------------------

/// Throws invariant_breach_error naming the first violated ProfileState
/// invariant (compatibility, axis/orthogonality closure, monotonicity,
/// height bounds).
inline void check_profile_invariants(const ProfileState& s) {
    const int M = s.M;
    const double scale = std::max(1.0, std::abs(s.u[M]));
    auto fail = [&](const std::string& what) {
        throw invariant_breach_error("profile invariant: " + what + " at t = " +
                                     std::to_string(s.t));
    };
    if (!(s.x_b > 0.0 && s.x_b < 1.0)) fail("x_b outside (0, 1)");
    if (std::abs(s.x_b * s.x_b + s.u[M] * s.u[M] - 1.0) > 1e-10) fail("boundary compatibility");
    for (int i = 0; i + 1 <= M; ++i)
        if (s.u[i + 1] < s.u[i] - 1e-12 * scale) fail("monotonicity");
    double sup = 0.0;
    for (double v : s.u) sup = std::max(sup, std::abs(v));
    for (int i = 1; i < M; ++i)
        if (s.u[i + 1] - 2.0 * s.u[i] + s.u[i - 1] < -1e-6 * sup) fail("convexity");
    if (!(s.u[0] > 0.0 && s.u[0] <= s.u[M] && s.u[M] < 1.0)) fail("height bounds");
    const double ortho = (3.0 * s.u[M] - 4.0 * s.u[M - 1] + s.u[M - 2]) / (2.0 * s.dxi()) -
                         s.u[M];
    if (std::abs(ortho) > 1e-6 * scale) fail("free-boundary orthogonality closure");
}

// -----------------------------------------------------------------------------
// Spatial operators
// -----------------------------------------------------------------------------

/// du_i/dt at nodes 0..M-1 (the boundary node is closed separately):
/// graphical mean curvature operator plus the moving-grid chain-rule term
/// xi_i (dx_b/dt) u_x. The axis uses the limit n u_xx(0).
inline std::vector<double> interior_velocity(const ProfileState& s, double dxbdt = 0.0) {
    const int M = s.M;
    const double dx = s.dx();
    const double inv_dx2 = 1.0 / (dx * dx);
    std::vector<double> v(M);
    v[0] = s.n * 2.0 * (s.u[1] - s.u[0]) * inv_dx2;
    for (int i = 1; i < M; ++i) {
        const double x = (static_cast<double>(i) / M) * s.x_b;
        const double ux = (s.u[i + 1] - s.u[i - 1]) / (2.0 * dx);
        const double uxx = (s.u[i + 1] - 2.0 * s.u[i] + s.u[i - 1]) * inv_dx2;
        v[i] = uxx / (1.0 + ux * ux) + (s.n - 1) * ux / x +
               (static_cast<double>(i) / M) * dxbdt * ux;
    }
    return v;
}

struct BoundarySolveResult {
    double u_b = 0.0;
    double x_b = 0.0;
    int iterations = 0;
};

/// Close the free boundary after an interior update: solve
///   u_x(x_b) = u_b / x_b  (second-order one-sided difference)
///   x_b = sqrt(1 - u_b^2)
/// by a guarded scalar Newton iteration (bisection fallback). The interior
/// nodes u_{M-1}, u_{M-2} are taken from `s`.
inline BoundarySolveResult boundary_solve(const ProfileState& s) {
    const int M = s.M;
    const double dxi = s.dxi();
    const double um1 = s.u[M - 1];
    const double um2 = s.u[M - 2];
    auto residual = [&](double ub) {
        const double xb = std::sqrt(std::max(1.0 - ub * ub, 1e-30));
        return (3.0 * ub - 4.0 * um1 + um2) / (2.0 * dxi * xb) - ub / xb;
    };

    BoundarySolveResult r;
    double lo = um1;
    double hi = 1.0 - 1e-12;
    double ub = std::min(std::max(s.u[M], lo + 1e-15), hi);
    bool done = false;
    for (int it = 0; it < 30; ++it) {
        const double f = residual(ub);
        ++r.iterations;
        if (std::abs(f) <= 1e-12) {
            done = true;
            break;
        }
        const double h = 1e-9 * std::max(1.0, std::abs(ub));
        const double fp = (residual(ub + h) - residual(ub - h)) / (2.0 * h);
        const double next = ub - f / fp;
        if (!(next > lo && next < hi) || !std::isfinite(next)) break;
        ub = next;
    }
    if (!done) {
        // Bisection on [u_{M-1}, 1): the residual is -inf-like at the left
        // (4 u_{M-1} dominates) and grows with u_b.
        double flo = residual(lo + 1e-15);
        for (int it = 0; it < 120; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = residual(mid);
            ++r.iterations;
            if (std::abs(fm) <= 1e-12 || hi - lo < 1e-16) {
                ub = mid;
                done = true;
                break;
            }
            if (flo * fm < 0.0) {
                hi = mid;
            } else {
                lo = mid;
                flo = fm;
            }
            ub = mid;
        }
        if (!done)
            throw no_convergence_error("boundary_solve: no root for the orthogonality closure");
    }
    r.u_b = ub;
    r.x_b = std::sqrt(1.0 - ub * ub);
    return r;
}

/// Stability limit of the explicit step (axis node binds).
inline double flow_max_dt(const ProfileState& s) {
    const double dx = s.dx();
    return dx * dx / (2.0 * s.n);
}

/// One explicit Heun step of size dt; the chain-rule term uses the
/// previous accepted step's dx_b/dt in both stages. dt = 0 is the identity.
inline ProfileState step(const ProfileState& s, double dt, double dxbdt_prev = 0.0) {
    if (dt == 0.0) return s;
    if (dt < 0.0) throw std::invalid_argument("step: dt must be >= 0");
    if (dt > flow_max_dt(s) * (1.0 + 1e-12))
        throw cfl_violation_error("step: dt exceeds stability limit " +
                                  std::to_string(flow_max_dt(s)));
    const int M = s.M;

    const std::vector<double> v1 = interior_velocity(s, dxbdt_prev);
    ProfileState pred = s;
    for (int i = 0; i < M; ++i) pred.u[i] = s.u[i] + dt * v1[i];
    {
        const BoundarySolveResult b = boundary_solve(pred);
        pred.u[M] = b.u_b;
        pred.x_b = b.x_b;
    }
    pred.t = s.t + dt;

    const std::vector<double> v2 = interior_velocity(pred, dxbdt_prev);
    ProfileState next = s;
    for (int i = 0; i < M; ++i) next.u[i] = s.u[i] + 0.5 * dt * (v1[i] + v2[i]);
    const BoundarySolveResult b = boundary_solve(next);
    next.u[M] = b.u_b;
    next.x_b = b.x_b;
    next.t = s.t + dt;
    return next;
}

/// Mean curvature along the profile, positive for the convex cap:
///   H = u_xx/(1+u_x^2)^(3/2) + (n-1) u_x / (x sqrt(1+u_x^2)),
/// axis limit n u_xx(0), one-sided second-order stencils at the boundary.
inline std::vector<double> mean_curvature_profile(const ProfileState& s) {
    const int M = s.M;
    const double dx = s.dx();
    const double inv_dx2 = 1.0 / (dx * dx);
    std::vector<double> H(M + 1);
    H[0] = s.n * 2.0 * (s.u[1] - s.u[0]) * inv_dx2;
    for (int i = 1; i < M; ++i) {
        const double x = (static_cast<double>(i) / M) * s.x_b;
        const double ux = (s.u[i + 1] - s.u[i - 1]) / (2.0 * dx);
        const double uxx = (s.u[i + 1] - 2.0 * s.u[i] + s.u[i - 1]) * inv_dx2;
        const double q = 1.0 + ux * ux;
        H[i] = uxx / (q * std::sqrt(q)) + (s.n - 1) * ux / (x * std::sqrt(q));
    }
    {
        const double ux = (3.0 * s.u[M] - 4.0 * s.u[M - 1] + s.u[M - 2]) / (2.0 * dx);
        const double uxx =
            (2.0 * s.u[M] - 5.0 * s.u[M - 1] + 4.0 * s.u[M - 2] - s.u[M - 3]) * inv_dx2;
        const double q = 1.0 + ux * ux;
        H[M] = uxx / (q * std::sqrt(q)) + (s.n - 1) * ux / (s.x_b * std::sqrt(q));
    }
    return H;
}

// -----------------------------------------------------------------------------
// Initial data and time integration
// -----------------------------------------------------------------------------

/// Sample Sigma^{lambda(rho)}_{t_rho} on the normalized grid x = xi cos(rho).
/// The flow clock starts at t = 0; the extinction-at-zero normalization is
/// applied later by the diagnostics.
inline ProfileState build_initial_profile(const GroundState& gs, double rho, int M) {
    if (!(rho > 0.0 && rho <= 0.5))
        throw std::domain_error("build_initial_profile: rho must be in (0, 0.5]");
    if (M < 50) throw std::invalid_argument("build_initial_profile: M must be >= 50");
    const auto [lam, t_rho] = initial_time(gs, rho);
    const SigmaSurface sigma(gs, lam, t_rho);

    ProfileState s;
    s.n = gs.n;
    s.t = 0.0;
    s.M = M;
    s.x_b = std::cos(rho);
    s.u.resize(M + 1);
    for (int i = 0; i < M; ++i)
        s.u[i] = sigma_height(sigma, (static_cast<double>(i) / M) * s.x_b);
    s.u[M] = std::sin(rho);
    check_profile_invariants(s);
    return s;
}

struct RunParams {
    int n = 2;
    double rho = 0.05;
    int M = 400;
    double cfl_safety = 0.2;
    double stop_sin_theta = 0.9;
    double min_x_b = 0.05;
    double trace_interval = 1e-3;
    int snapshot_every = 100;                 ///< every K-th trace record
    std::vector<double> snapshot_times;       ///< extra requested snapshot times
};

struct RunResult {
    FlowTrace trace;
    std::vector<ProfileState> snapshots;
    ProfileState final_state;
};

namespace detail {

inline TraceRecord make_record(const ProfileState& s) {
    const std::vector<double> H = mean_curvature_profile(s);
    TraceRecord r;
    r.t = s.t;
    r.y_min = s.u[0];
    r.y_max = s.u[s.M];
    r.theta_bar = std::asin(s.u[s.M]);
    r.H_min = H[0];
    r.H_max = H[s.M];
    r.x_b = s.x_b;
    return r;
}

/// State linearly interpolated between two consecutive steps.
inline ProfileState interpolate_state(const ProfileState& a, const ProfileState& b, double t) {
    const double w = (t - a.t) / (b.t - a.t);
    ProfileState s = a;
    s.t = t;
    s.x_b = a.x_b + w * (b.x_b - a.x_b);
    for (std::size_t i = 0; i < s.u.size(); ++i) s.u[i] = a.u[i] + w * (b.u[i] - a.u[i]);
    return s;
}

}  // namespace detail

/// Integrate from the Sigma initial data until sin(theta_bar) reaches
/// stop_sin_theta or x_b falls below min_x_b. Trace records are emitted at
/// each crossing of the record interval, snapshots every K-th record plus at
/// every requested time (interpolated). Deterministic for a fixed parameter
/// set. On an invariant breach the last valid state is attached to the error.
inline RunResult run(const GroundState& gs, const RunParams& p) {
    if (gs.n != p.n) throw std::invalid_argument("run: GroundState dimension mismatch");
    RunResult out;
    ProfileState state = build_initial_profile(gs, p.rho, p.M);

    std::vector<double> wanted = p.snapshot_times;
    std::sort(wanted.begin(), wanted.end());
    std::size_t next_wanted = 0;

    out.trace.records.push_back(detail::make_record(state));
    out.snapshots.push_back(state);
    while (next_wanted < wanted.size() && wanted[next_wanted] <= 0.0) ++next_wanted;

    long records_emitted = 1;
    double next_record_t = p.trace_interval;
    double dxbdt = 0.0;  // first step uses 0

    if (state.u[state.M] >= p.stop_sin_theta) {
        out.final_state = state;
        return out;  // immediate stop: trace of length 1
    }

    while (true) {
        const double dt = std::min(p.cfl_safety * state.dx() * state.dx(), flow_max_dt(state));
        ProfileState next = step(state, dt, dxbdt);
        dxbdt = (next.x_b - state.x_b) / dt;

        while (next_wanted < wanted.size() && next.t >= wanted[next_wanted]) {
            out.snapshots.push_back(detail::interpolate_state(state, next, wanted[next_wanted]));
            ++next_wanted;
        }
        state = std::move(next);

        if (state.t >= next_record_t - 1e-15) {
            try {
                check_profile_invariants(state);
            } catch (const invariant_breach_error& e) {
                throw flow_abort_error(e.what(), state);
            }
            out.trace.records.push_back(detail::make_record(state));
            ++records_emitted;
            if (records_emitted % p.snapshot_every == 0) out.snapshots.push_back(state);
            while (next_record_t <= state.t + 1e-15) next_record_t += p.trace_interval;
        }
        if (state.u[state.M] >= p.stop_sin_theta || state.x_b < p.min_x_b) break;
    }
    check_profile_invariants(state);
    if (out.trace.records.back().t < state.t) out.trace.records.push_back(detail::make_record(state));
    if (out.snapshots.back().t < state.t) out.snapshots.push_back(state);
    out.final_state = state;
    return out;
}

/// Extinction time consistent with the sin(theta_bar) <= e^(n(t - t_ext))
/// normalization: over the last decade of boundary heights, the tightest
/// anchor t_i - log(sin theta_bar_i)/n. For an exactly umbilic trace
/// (sin theta_bar = e^(n(t-c))) every sample gives c.
inline double estimate_extinction(const FlowTrace& trace, int n) {
    double peak = 0.0;
    for (const TraceRecord& r : trace.records) peak = std::max(peak, r.y_max);
    if (peak < 0.5)
        throw insufficient_data_error("estimate_extinction: trace never reaches sin theta = 0.5");
    double t_ext = -1e300;
    for (const TraceRecord& r : trace.records) {
        if (r.y_max < peak / 10.0) continue;
        t_ext = std::max(t_ext, r.t - std::log(r.y_max) / n);
    }
    return t_ext;
}

}  // namespace fbmcf
