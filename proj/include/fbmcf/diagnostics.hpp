#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fbmcf/barriers.hpp"
#include "fbmcf/errors.hpp"
#include "fbmcf/flow.hpp"
#include "fbmcf/ground_state.hpp"

namespace fbmcf {

// =============================================================================
// Pass/fail reports for the quantitative estimates satisfied by the flow:
// the crude curvature/height estimates, the ground-state height asymptotics,
// sphere-barrier containment, and the two-run uniqueness comparison. Every
// check is a pure function of its inputs; margins are signed with positive
// meaning satisfied, and pass <=> worst_margin >= -tolerance.
// =============================================================================

struct EstimateReport {
    std::string name;
    double worst_margin = 0.0;
    double worst_time = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

inline EstimateReport make_report(std::string name, double margin, double time, double tol) {
    EstimateReport r;
    r.name = std::move(name);
    r.worst_margin = margin;
    r.worst_time = time;
    r.tolerance = tol;
    r.pass = margin >= -tol;
    return r;
}

/// Shift the clock so extinction sits at t = 0 (the flow's natural
/// normalization). Returns the shift; aligning twice shifts by ~1e-16.
inline double align_to_extinction(FlowTrace& trace, std::vector<ProfileState>* snapshots,
                                  int n) {
    const double t_ext = estimate_extinction(trace, n);
    for (TraceRecord& r : trace.records) r.t -= t_ext;
    if (snapshots)
        for (ProfileState& s : *snapshots) s.t -= t_ext;
    trace.t_ext = 0.0;
    return t_ext;
}

namespace detail {

inline void require_aligned(const FlowTrace& trace, const char* who) {
    if (std::isnan(trace.t_ext) || trace.records.empty())
        throw insufficient_data_error(std::string(who) + ": trace not aligned to extinction");
}

}  // namespace detail

// -----------------------------------------------------------------------------
// Crude estimates: H_min <= n tan(theta_bar) <= H_max,
// sin(theta_bar) <= e^(nt), and the two-sided y_min bound.
// -----------------------------------------------------------------------------
inline std::vector<EstimateReport> check_crude_estimates(const FlowTrace& trace, int n,
                                                         double tol = 1e-3) {
    detail::require_aligned(trace, "check_crude_estimates");
    double m_order = 1e300, t_order = 0.0;
    double m_sin = 1e300, t_sin = 0.0;
    double m_y = 1e300, t_y = 0.0;
    for (const TraceRecord& r : trace.records) {
        const double ntan = n * std::tan(r.theta_bar);
        const double a = std::min(ntan - r.H_min, r.H_max - ntan) / ntan;
        if (a < m_order) {
            m_order = a;
            t_order = r.t;
        }
        const double bound = std::exp(n * r.t);
        const double b = (bound - r.y_max) / bound;
        if (b < m_sin) {
            m_sin = b;
            t_sin = r.t;
        }
        const double lower = r.y_max / (1.0 + std::cos(r.theta_bar));
        const double c = std::min(r.y_min - lower, r.y_max - r.y_min) / r.y_max;
        if (c < m_y) {
            m_y = c;
            t_y = r.t;
        }
    }
    return {make_report("crude_curvature_order", m_order, t_order, tol),
            make_report("crude_sin_theta_bound", m_sin, t_sin, tol),
            make_report("crude_y_min_bounds", m_y, t_y, tol)};
}

// -----------------------------------------------------------------------------
// Height asymptotics: H_min/y_min >= lambda0^2, monotone rescaled height,
// convergence of A(t), and the e^(2nt) correction fit.
// -----------------------------------------------------------------------------
struct HeightAsymptoticsTols {
    double ratio_tol = 5e-3;
    double drift_tol = 1e-6;
    double tv_tol = 5e-3;
    double fit_tol = 5e-3;
};

inline std::vector<EstimateReport> check_height_asymptotics(const FlowTrace& trace,
                                                            const GroundState& gs,
                                                            HeightAsymptoticsTols tols = {}) {
    detail::require_aligned(trace, "check_height_asymptotics");
    if (trace.records.size() < 8)
        throw insufficient_data_error("check_height_asymptotics: trace too short");
    const double l02 = gs.lambda0 * gs.lambda0;
    const int n = gs.n;

    // (a) speed-to-height ratio floor
    double m_ratio = 1e300, t_ratio = 0.0;
    for (const TraceRecord& r : trace.records) {
        const double a = r.H_min / (l02 * r.y_min) - 1.0;
        if (a < m_ratio) {
            m_ratio = a;
            t_ratio = r.t;
        }
    }

    // (b) A(t) = e^(-lambda0^2 t) y_min nondecreasing (vs its running max)
    std::vector<double> A(trace.records.size());
    for (std::size_t i = 0; i < A.size(); ++i)
        A[i] = std::exp(-l02 * trace.records[i].t) * trace.records[i].y_min;
    double m_drift = 1e300, t_drift = 0.0;
    double running = A[0];
    for (std::size_t i = 1; i < A.size(); ++i) {
        const double d = A[i] / running - 1.0;
        if (d < m_drift) {
            m_drift = d;
            t_drift = trace.records[i].t;
        }
        running = std::max(running, A[i]);
    }

    // (c) A(t) settles: total variation over the earliest third of the trace
    const double t0 = trace.records.front().t;
    const double t1 = trace.records.back().t;
    const double t_cut = t0 + (t1 - t0) / 3.0;
    double tv = 0.0, mean = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < A.size() && trace.records[i].t <= t_cut; ++i) {
        if (i > 0) tv += std::abs(A[i] - A[i - 1]);
        mean += A[i];
        ++count;
    }
    if (count < 3) throw insufficient_data_error("check_height_asymptotics: early window empty");
    mean /= count;
    const double m_tv = tols.tv_tol - tv / mean;

    // (d) H_min/y_min - lambda0^2 ~ C e^(2nt): least-squares C, then residual
    double sw2 = 0.0, swz = 0.0;
    for (const TraceRecord& r : trace.records) {
        const double w = std::exp(2.0 * n * r.t);
        const double z = r.H_min / r.y_min - l02;
        sw2 += w * w;
        swz += w * z;
    }
    const double C = swz / sw2;
    double ss = 0.0;
    for (const TraceRecord& r : trace.records) {
        const double w = std::exp(2.0 * n * r.t);
        const double z = r.H_min / r.y_min - l02;
        ss += (z - C * w) * (z - C * w);
    }
    const double rms = std::sqrt(ss / trace.records.size());

    return {make_report("height_ratio_floor", m_ratio, t_ratio, tols.ratio_tol),
            make_report("rescaled_height_monotone", m_drift, t_drift, tols.drift_tol),
            make_report("rescaled_height_settles", m_tv, t_cut, 0.0),
            make_report("ratio_correction_fit_C_nonneg", C, t1, 0.0),
            make_report("ratio_correction_fit_residual", tols.fit_tol - rms / l02, t1, 0.0)};
}

// -----------------------------------------------------------------------------
// Ground-state shape of early snapshots
// -----------------------------------------------------------------------------

/// sup over the grid of |u(x)/u(0) - phi0(lambda0 x)|; the axis normalization
/// removes the unknown amplitude. Only meaningful while the profile is low
/// (u_M <= 0.1).
inline double shape_error(const ProfileState& snapshot, const GroundState& gs) {
    if (snapshot.u[snapshot.M] > 0.1)
        throw regime_violation_error("shape_error: snapshot outside the early-time regime");
    double sup = 0.0;
    for (int i = 0; i <= snapshot.M; ++i) {
        const double x = (static_cast<double>(i) / snapshot.M) * snapshot.x_b;
        const double model = phi0_eval(gs, gs.lambda0 * x).first;
        sup = std::max(sup, std::abs(snapshot.u[i] / snapshot.u[0] - model));
    }
    return sup;
}

// -----------------------------------------------------------------------------
// Two-run uniqueness comparison
// -----------------------------------------------------------------------------

namespace detail {

/// Time at which y_min first crosses `height` (linear interpolation).
inline double time_at_height(const FlowTrace& trace, double height) {
    const auto& rec = trace.records;
    if (rec.front().y_min >= height) return rec.front().t;
    for (std::size_t i = 1; i < rec.size(); ++i) {
        if (rec[i].y_min >= height) {
            const double w = (height - rec[i - 1].y_min) / (rec[i].y_min - rec[i - 1].y_min);
            return rec[i - 1].t + w * (rec[i].t - rec[i - 1].t);
        }
    }
    throw insufficient_data_error("time_at_height: run never reaches the reference height");
}

inline double eval_u(const ProfileState& s, double x) {
    const double xi = x / s.x_b * s.M;
    const int i = std::min(static_cast<int>(xi), s.M - 1);
    const double w = xi - i;
    return s.u[i] + w * (s.u[i + 1] - s.u[i]);
}

/// Profile interpolated in time between bracketing snapshots.
inline ProfileState snapshot_at(const std::vector<ProfileState>& snaps, double t) {
    if (snaps.empty() || t < snaps.front().t - 1e-12 || t > snaps.back().t + 1e-12)
        throw insufficient_data_error("snapshot_at: time outside snapshot coverage");
    for (std::size_t i = 1; i < snaps.size(); ++i) {
        if (snaps[i].t >= t) {
            ProfileState s = snaps[i - 1];
            const double dt = snaps[i].t - snaps[i - 1].t;
            const double w = dt > 0.0 ? (t - snaps[i - 1].t) / dt : 0.0;
            s.t = t;
            s.x_b = snaps[i - 1].x_b + w * (snaps[i].x_b - snaps[i - 1].x_b);
            for (std::size_t k = 0; k < s.u.size(); ++k)
                s.u[k] = snaps[i - 1].u[k] + w * (snaps[i].u[k] - snaps[i - 1].u[k]);
            return s;
        }
    }
    return snaps.back();
}

}  // namespace detail

struct CompareResult {
    EstimateReport report;
    double distance = 0.0;
    double reference_height = 0.0;  ///< after any clamping
};

/// Time-translate run B so its y_min matches run A's at the reference height,
/// then take the sup over the overlapping window of the sup-norm distance
/// between the interpolated profiles. The reference is clamped up to the
/// first recorded heights when they start above it.
inline CompareResult compare_runs(const FlowTrace& traceA,
                                  const std::vector<ProfileState>& snapsA,
                                  const FlowTrace& traceB,
                                  const std::vector<ProfileState>& snapsB,
                                  double reference_height = 0.01, double tol = 1e-2) {
    if (traceA.records.empty() || traceB.records.empty())
        throw insufficient_data_error("compare_runs: empty trace");
    const double y_ref = std::max({reference_height, traceA.records.front().y_min,
                                   traceB.records.front().y_min});
    const double tA = detail::time_at_height(traceA, y_ref);
    const double tB = detail::time_at_height(traceB, y_ref);

    const double endA = snapsA.back().t - tA;
    const double endB = snapsB.back().t - tB;
    const double window = std::min(endA, endB);
    if (window <= 0.0) throw insufficient_data_error("compare_runs: aligned windows disjoint");

    double dist = 0.0, t_worst = 0.0;
    const int time_samples = 64;
    for (int k = 0; k <= time_samples; ++k) {
        const double s = window * k / time_samples;
        const ProfileState a = detail::snapshot_at(snapsA, tA + s);
        const ProfileState b = detail::snapshot_at(snapsB, tB + s);
        const double x_max = std::min(a.x_b, b.x_b);
        for (int i = 0; i <= a.M; ++i) {
            const double x = (static_cast<double>(i) / a.M) * a.x_b;
            if (x > x_max) break;
            const double d = std::abs(a.u[i] - detail::eval_u(b, x));
            if (d > dist) {
                dist = d;
                t_worst = s;
            }
        }
    }
    CompareResult res;
    res.distance = dist;
    res.reference_height = y_ref;
    res.report = make_report("uniqueness_profile_distance", tol - dist, t_worst, 0.0);
    return res;
}

// -----------------------------------------------------------------------------
// Sphere-barrier containment along a run
// -----------------------------------------------------------------------------

/// Check each snapshot against the scheduled spheres anchored at the first
/// snapshot: below the upper schedule started from the tangent sphere
/// sin(theta) = 2 sin(rho)/(1 + sin^2(rho)), above the lower schedule started
/// from sin(theta) = sin(rho). Margins are vertical distances; the check for
/// a schedule stops once that schedule reaches extinction. The anchor shifts
/// exist to let tests inject a deliberately wrong schedule.
inline EstimateReport barrier_containment(const std::vector<ProfileState>& snapshots, int n,
                                          double tol = 1e-4, double lower_anchor_shift = 0.0,
                                          double upper_anchor_shift = 0.0) {
    if (snapshots.empty()) throw insufficient_data_error("barrier_containment: no snapshots");
    const ProfileState& first = snapshots.front();
    const double sin_rho = first.u[first.M];
    const double sin_upper0 = 2.0 * sin_rho / (1.0 + sin_rho * sin_rho);
    const double t0 = first.t;

    double worst = 1e300, t_worst = t0;
    for (const ProfileState& s : snapshots) {
        const double dt = s.t - t0;
        const double sin_lo = sin_rho * std::exp(n * (dt + lower_anchor_shift));
        const double sin_up = sin_upper0 * std::exp(2.0 * n * (dt + upper_anchor_shift));
        auto update = [&](double m) {
            if (m < worst) {
                worst = m;
                t_worst = s.t;
            }
        };
        if (sin_lo < 1.0) {
            const SphereBarrier lower(n, std::asin(sin_lo));
            update(s.u[s.M] - sin_lo);  // boundary heights ordered
            const double x_max = std::min(s.x_b, std::cos(std::asin(sin_lo)));
            for (int i = 0; i <= s.M; ++i) {
                const double x = (static_cast<double>(i) / s.M) * s.x_b;
                if (x > x_max) break;
                update(s.u[i] - lower.cap_height(x));
            }
        }
        if (sin_up < 1.0) {
            const SphereBarrier upper(n, std::asin(sin_up));
            update(sin_up - s.u[s.M]);
            const double x_max = std::min(s.x_b, std::cos(std::asin(sin_up)));
            for (int i = 0; i <= s.M; ++i) {
                const double x = (static_cast<double>(i) / s.M) * s.x_b;
                if (x > x_max) break;
                update(upper.cap_height(x) - s.u[i]);
            }
        }
    }
    return make_report("barrier_containment", worst, t_worst, tol);
}

/// H attains its minimum at the axis node and its maximum at the boundary
/// node on every snapshot (index equality up to rounding).
inline EstimateReport check_curvature_extrema(const std::vector<ProfileState>& snapshots) {
    double worst = 1e300, t_worst = 0.0;
    for (const ProfileState& s : snapshots) {
        const std::vector<double> H = mean_curvature_profile(s);
        const double lo = *std::min_element(H.begin(), H.end());
        const double hi = *std::max_element(H.begin(), H.end());
        const double m = std::min(lo - H.front(), H.back() - hi) / std::abs(H.back());
        if (m < worst) {
            worst = m;
            t_worst = s.t;
        }
    }
    return make_report("curvature_extrema_locations", worst, t_worst, 1e-9);
}

}  // namespace fbmcf
