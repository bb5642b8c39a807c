#pragma once

// Forward solvers and cross-checks for the truncated coupled wave system.
//
// Per-mode dynamics:  a'' + w^2 a = kappa f(t), so with P+-(t) = integral of
// f(s) exp(-+ i w s) over [0, t],
//
//     a(t)  = a0 cos(wt) + a0' sin(wt)/w
//             + kappa [ e^{iwt} P+(t) - e^{-iwt} P-(t) ] / (2iw),
//     a'(t) = -a0 w sin(wt) + a0' cos(wt)
//             + kappa [ e^{iwt} P+(t) + e^{-iwt} P-(t) ] / 2.
//
// The characteristic combinations C+- = +-iw a + a' then obey
// C+(t) = e^{iwt} (C+(0) + kappa P+(t)) and mirrored for C-, which is what
// ties terminal states to the exponential moments of f.
//
// The finite-difference oracle discretizes the vector field equation
// u_tt = u_xx - A u directly (leapfrog in time, centered in space) and
// imposes the two nonlocal boundary equations each step by solving the
// 2x2 system [[alpha1, beta1], [alpha2, beta2]] (u(0), u(a))^T = (b f, 0)^T,
// giving u(0, t) = beta2 f(t) b / eta and u(a, t) = -alpha2 f(t) b / eta.

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wavectl/errors.hpp"
#include "wavectl/mode_lattice.hpp"
#include "wavectl/moment_solver.hpp"
#include "wavectl/quadrature.hpp"
#include "wavectl/spectral_bvp.hpp"

namespace wavectl {

// ── Per-mode Duhamel trajectories ────────────────────────────────────────────

struct ModeTrajectory {
    double dt = 0.0;
    Eigen::VectorXcd a;   // position coefficient at t = i * dt
    Eigen::VectorXcd ap;  // velocity coefficient at the same instants
    // Max deviation of the centered difference of `a` from `ap`; O(dt^2) for
    // any consistent trajectory, recorded as a self-check.
    double deriv_consistency = 0.0;
};

namespace detail {

inline double trajectory_consistency(const Eigen::VectorXcd& a,
                                     const Eigen::VectorXcd& ap, double dt) {
    double worst = 0.0;
    for (Eigen::Index i = 1; i + 1 < a.size(); ++i) {
        const cplx diff = (a(i + 1) - a(i - 1)) / (2.0 * dt);
        worst = std::max(worst, std::abs(diff - ap(i)));
    }
    return worst;
}

}  // namespace detail

// Core integrator over control values sampled uniformly with step `dt`
// (values[i] = f(i * dt)).  Cumulative Simpson supplies both windowed
// integrals P+- at every node.
inline ModeTrajectory duhamel_sampled(const std::vector<cplx>& values,
                                      double dt, const Mode& mode) {
    if (values.size() < 3 || dt <= 0.0)
        throw ConfigError("duhamel_sampled: need at least 3 samples and dt > 0");
    const cplx w = mode.omega;
    if (std::abs(w) <= 1e-14)
        throw ZeroFrequency(mode.k, mode.l,
                            "duhamel: zero frequency has no oscillator kernel");
    const size_t n = values.size();
    ModeTrajectory out;
    out.dt = dt;
    out.a = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n));
    out.ap = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n));
    if (std::abs(mode.kappa) == 0.0) return out;

    const cplx iw = cplx(0.0, 1.0) * w;
    std::vector<cplx> gp(n), gm(n);
    for (size_t i = 0; i < n; ++i) {
        const double t = dt * static_cast<double>(i);
        gp[i] = values[i] * std::exp(-iw * t);
        gm[i] = values[i] * std::exp(iw * t);
    }
    const auto pp = cumulative_simpson(gp, dt);
    const auto pm = cumulative_simpson(gm, dt);
    for (size_t i = 0; i < n; ++i) {
        const double t = dt * static_cast<double>(i);
        const cplx ep = std::exp(iw * t), em = std::exp(-iw * t);
        out.a(static_cast<Eigen::Index>(i)) =
            mode.kappa * (ep * pp[i] - em * pm[i]) / (2.0 * iw);
        out.ap(static_cast<Eigen::Index>(i)) =
            mode.kappa * (ep * pp[i] + em * pm[i]) * 0.5;
    }
    out.deriv_consistency = detail::trajectory_consistency(out.a, out.ap, dt);
    return out;
}

inline ModeTrajectory duhamel(const ControlSignal& f, const Mode& mode,
                              double T, int steps = 4096) {
    if (T <= 0.0 || steps < 2)
        throw ConfigError("duhamel: need T > 0 and steps >= 2");
    std::vector<cplx> values(static_cast<size_t>(steps) + 1);
    const double dt = T / steps;
    for (int i = 0; i <= steps; ++i)
        values[static_cast<size_t>(i)] = eval_control(f, dt * i);
    return duhamel_sampled(values, dt, mode);
}

// ── Free evolution ───────────────────────────────────────────────────────────

// Closed-form homogeneous flow; forwards to the lattice-level evolution.
inline StateCoefficients free_evolution(const StateCoefficients& st,
                                        const ModeSet& ms, double t) {
    return free_evolve(st, ms, t);
}

// ── Full truncated simulation ────────────────────────────────────────────────

struct SeriesSolution {
    double dt = 0.0;
    int steps = 0;
    int K = 0;
    int N = 0;
    std::vector<Eigen::MatrixXcd> a;   // time index -> K x N coefficients
    std::vector<Eigen::MatrixXcd> ap;  // matching velocities
    double deriv_consistency = 0.0;    // worst per-mode self-check
};

inline SeriesSolution simulate(const ControlSignal& f,
                               const StateCoefficients& initial,
                               const ModeSet& ms, double T, int steps = 4096) {
    if (T <= 0.0 || steps < 2)
        throw ConfigError("simulate: need T > 0 and steps >= 2");
    if (initial.a.rows() != ms.K || initial.a.cols() != ms.N)
        throw ConfigError("simulate: initial state shape does not match lattice");
    SeriesSolution sol;
    sol.dt = T / steps;
    sol.steps = steps;
    sol.K = ms.K;
    sol.N = ms.N;
    sol.a.assign(static_cast<size_t>(steps) + 1,
                 Eigen::MatrixXcd::Zero(ms.K, ms.N));
    sol.ap.assign(static_cast<size_t>(steps) + 1,
                  Eigen::MatrixXcd::Zero(ms.K, ms.N));

    std::vector<cplx> values(static_cast<size_t>(steps) + 1);
    for (int i = 0; i <= steps; ++i)
        values[static_cast<size_t>(i)] = eval_control(f, sol.dt * i);

    for (int k = 0; k < ms.K; ++k)
        for (int l = 0; l < ms.N; ++l) {
            const cplx w = ms.omega_grid(k, l);
            Mode mode;
            mode.k = k + 1;
            mode.l = l + 1;
            mode.omega = w;
            mode.kappa = ms.kappa_grid(k);
            auto traj = duhamel_sampled(values, sol.dt, mode);
            sol.deriv_consistency =
                std::max(sol.deriv_consistency, traj.deriv_consistency);
            const cplx a0 = initial.a(k, l), ap0 = initial.ap(k, l);
            for (int i = 0; i <= steps; ++i) {
                const cplx wt = w * (sol.dt * static_cast<double>(i));
                const cplx c = std::cos(wt), s = std::sin(wt);
                sol.a[static_cast<size_t>(i)](k, l) =
                    a0 * c + ap0 * s / w + traj.a(i);
                sol.ap[static_cast<size_t>(i)](k, l) =
                    -a0 * w * s + ap0 * c + traj.ap(i);
            }
        }
    return sol;
}

inline StateCoefficients state_at(const SeriesSolution& sol, const ModeSet& ms,
                                  int index) {
    if (index < 0 || index > sol.steps)
        throw ConfigError("state_at: time index out of range");
    return encode_state(sol.a[static_cast<size_t>(index)],
                        sol.ap[static_cast<size_t>(index)], ms);
}

// ── Field synthesis ──────────────────────────────────────────────────────────

// Pointwise synthesis u_j(x) = sum_{k,l} coeffs(k,l) u_k(x) (vec_l)_j for a
// single time slice.  `vectors` holds the component vectors column-wise.
inline Eigen::MatrixXcd series_eval(const Eigen::MatrixXcd& coeffs,
                                    const std::vector<SpatialMode>& modes,
                                    const Eigen::MatrixXcd& vectors,
                                    const Eigen::VectorXd& xgrid) {
    const Eigen::Index K = coeffs.rows(), N = coeffs.cols();
    if (static_cast<Eigen::Index>(modes.size()) < K)
        throw ConfigError("series_eval: fewer spatial modes than coefficients");
    if (vectors.rows() != N || vectors.cols() < N)
        throw ConfigError("series_eval: component vectors do not match N");
    Eigen::MatrixXcd spatial(K, xgrid.size());
    for (Eigen::Index k = 0; k < K; ++k)
        for (Eigen::Index j = 0; j < xgrid.size(); ++j)
            spatial(k, j) = eval_eigenfunction(modes[static_cast<size_t>(k)],
                                               xgrid(j));
    // (N x N) * (N x K) * (K x X)
    return vectors.leftCols(N) * (coeffs.transpose() * spatial);
}

// Recover coefficients from field samples on a uniform grid over [0, a]:
// strip the component direction with the dual vectors (row l of the inverse
// eigenbasis), then project each scalar slice onto the spatial family by
// quadrature against the companions and solve the K x K pairing system so
// the result is exact on the truncated span.
inline Eigen::MatrixXcd project_field(const Eigen::MatrixXcd& field, double a,
                                      const std::vector<SpatialMode>& modes,
                                      const Eigen::MatrixXcd& dual_vectors) {
    const Eigen::Index N = field.rows();
    const Eigen::Index M = field.cols();
    const Eigen::Index K = static_cast<Eigen::Index>(modes.size());
    if (M < 3) throw ConfigError("project_field: need at least 3 x-samples");
    if (dual_vectors.rows() != N || dual_vectors.cols() != N)
        throw ConfigError("project_field: dual vectors must be N x N");
    const double dx = a / static_cast<double>(M - 1);
    Eigen::MatrixXcd moments(K, N);
    std::vector<cplx> integrand(static_cast<size_t>(M));
    for (Eigen::Index l = 0; l < N; ++l) {
        // v_l(x) = <dual_l, u(x)> picks out the l-th component channel.
        Eigen::RowVectorXcd v =
            dual_vectors.col(l).transpose() * field;  // 1 x M
        for (Eigen::Index k = 0; k < K; ++k) {
            for (Eigen::Index j = 0; j < M; ++j)
                integrand[static_cast<size_t>(j)] =
                    v(j) * std::conj(eval_biorthogonal(
                               modes[static_cast<size_t>(k)], dx * j));
            moments(k, l) = simpson(integrand, dx);
        }
    }
    // moments(k, l) = sum_m G(m, k) c(m, l): the pairing acts through the
    // transpose of the companion Gram.
    const auto gram = biorthogonality_gram(modes);
    return gram.transpose().partialPivLu().solve(moments);
}

// ── Finite-difference oracle ─────────────────────────────────────────────────

struct FDGrid {
    int cells = 0;    // spatial intervals; dx = a / cells
    double dt = 0.0;  // uniform time step, exact divisor of the horizon
    int steps = 0;
};

inline FDGrid make_fd_grid(double a, int cells, double T, double cfl = 0.95) {
    if (a <= 0.0 || cells < 4 || T <= 0.0 || cfl <= 0.0)
        throw ConfigError("make_fd_grid: need a > 0, cells >= 4, T > 0, cfl > 0");
    const double dx = a / cells;
    FDGrid g;
    g.cells = cells;
    g.steps = static_cast<int>(std::ceil(T / (cfl * dx) - 1e-12));
    if (g.steps < 2) g.steps = 2;
    g.dt = T / g.steps;
    if (g.dt > dx * (1.0 + 1e-12))
        throw UnstableGrid("make_fd_grid: time step exceeds spatial step "
                           "(explicit leapfrog needs dt <= dx)");
    return g;
}

struct FDResult {
    Eigen::VectorXd x;     // cells + 1 nodes on [0, a]
    Eigen::MatrixXcd u;    // N x (cells + 1) terminal field
    Eigen::MatrixXcd ut;   // centered-in-time terminal velocity
};

inline FDResult fd_oracle(const BoundaryCoefficients& bc,
                          const Eigen::MatrixXd& coupling,
                          const Eigen::VectorXd& b, double a,
                          const Eigen::MatrixXcd& u0,
                          const Eigen::MatrixXcd& v0, const ControlSignal& f,
                          double T, const FDGrid& grid) {
    const Eigen::Index N = coupling.rows();
    const Eigen::Index M = grid.cells;
    if (coupling.cols() != N || b.size() != N)
        throw ConfigError("fd_oracle: coupling matrix and b sizes disagree");
    if (u0.rows() != N || u0.cols() != M + 1 || v0.rows() != N ||
        v0.cols() != M + 1)
        throw ConfigError("fd_oracle: initial fields must be N x (cells + 1)");
    const double dx = a / static_cast<double>(M);
    if (grid.dt > dx * (1.0 + 1e-12))
        throw UnstableGrid("fd_oracle: time step exceeds spatial step");
    const double dt = grid.dt;
    const Eigen::MatrixXcd A = coupling.cast<cplx>();

    const Eigen::VectorXcd bc0 = (cplx(bc.beta2) / bc.eta) * b.cast<cplx>();
    const Eigen::VectorXcd bca = (-cplx(bc.alpha2) / bc.eta) * b.cast<cplx>();
    auto apply_boundary = [&](Eigen::MatrixXcd& u, double t) {
        const cplx ft = eval_control(f, t);
        u.col(0) = ft * bc0;
        u.col(M) = ft * bca;
    };

    auto rhs = [&](const Eigen::MatrixXcd& u) {
        // u_xx - A u at interior nodes (columns 1..M-1), zero columns at ends.
        Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(N, M + 1);
        out.middleCols(1, M - 1) =
            (u.leftCols(M - 1) - 2.0 * u.middleCols(1, M - 1) +
             u.rightCols(M - 1)) /
                (dx * dx) -
            A * u.middleCols(1, M - 1);
        return out;
    };

    Eigen::MatrixXcd prev = u0;
    apply_boundary(prev, 0.0);
    // Second-order Taylor start, then boundary values at t = dt.
    Eigen::MatrixXcd curr = prev + dt * v0 + (0.5 * dt * dt) * rhs(prev);
    apply_boundary(curr, dt);

    // One step beyond the horizon so the terminal velocity is centered.
    Eigen::MatrixXcd next;
    for (int m = 1; m <= grid.steps; ++m) {
        next = 2.0 * curr - prev + (dt * dt) * rhs(curr);
        // Interior update above also wrote the end columns; fix them.
        apply_boundary(next, dt * (m + 1));
        prev.swap(curr);
        curr.swap(next);
    }
    // Loop invariant: curr = u(T + dt), prev = u(T).  Recover u(T - dt) for
    // the centered velocity with one backward step.
    Eigen::MatrixXcd back = 2.0 * prev - curr + (dt * dt) * rhs(prev);
    apply_boundary(back, T - dt);

    FDResult res;
    res.x = Eigen::VectorXd::LinSpaced(M + 1, 0.0, a);
    res.u = prev;
    res.ut = (curr - back) / (2.0 * dt);
    return res;
}

// ── Continuity of the control-to-state map ──────────────────────────────────

struct ContinuityReport {
    double sup_state_norm = 0.0;
    double control_l2 = 0.0;
    double ratio = 0.0;  // 0 by convention for a vanishing control
};

inline ContinuityReport continuity_check(const ControlSignal& f,
                                         const ModeSet& ms, double T,
                                         int steps = 2048) {
    ContinuityReport rep;
    std::vector<cplx> l2_integrand(static_cast<size_t>(steps) + 1);
    const double dt = T / steps;
    for (int i = 0; i <= steps; ++i) {
        const cplx v = eval_control(f, dt * i);
        l2_integrand[static_cast<size_t>(i)] = cplx(std::norm(v), 0.0);
    }
    rep.control_l2 = std::sqrt(
        std::max(0.0, simpson(l2_integrand, dt).real()));
    if (rep.control_l2 == 0.0) return rep;

    Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(ms.K, ms.N);
    auto sol = simulate(f, encode_state(z, z, ms), ms, T, steps);
    for (int i = 0; i <= steps; ++i)
        rep.sup_state_norm = std::max(
            rep.sup_state_norm, state_norm(state_at(sol, ms, i)));
    rep.ratio = rep.sup_state_norm / rep.control_l2;
    return rep;
}

// ── Coefficient-norm vs field-norm equivalence ───────────────────────────────

struct EquivalenceReport {
    double lhs = 0.0;    // sum over modes of (|C+|^2 + |C-|^2) / k^2
    double rhs = 0.0;    // ||u||_L2^2 + ||u_t||_{H^-1}^2
    double ratio = 1.0;  // lhs / rhs; 1 by convention for the zero state
};

inline EquivalenceReport equivalence_check(
    const StateCoefficients& st, const ModeSet& ms,
    const std::vector<SpatialMode>& modes, const Eigen::MatrixXcd& vectors,
    int x_samples = 2049, int sine_terms = 0) {
    EquivalenceReport rep;
    const double lhs = state_norm(st);
    rep.lhs = lhs * lhs;
    const double a = ms.a;
    if (sine_terms <= 0) sine_terms = std::max(64, 4 * ms.K);
    if (x_samples % 2 == 0) ++x_samples;  // odd count keeps Simpson clean

    Eigen::VectorXd xgrid = Eigen::VectorXd::LinSpaced(x_samples, 0.0, a);
    const double dx = a / static_cast<double>(x_samples - 1);
    Eigen::MatrixXcd u = series_eval(st.a, modes, vectors, xgrid);
    Eigen::MatrixXcd ut = series_eval(st.ap, modes, vectors, xgrid);

    std::vector<cplx> integrand(static_cast<size_t>(x_samples));
    double l2sq = 0.0;
    for (Eigen::Index j = 0; j < u.rows(); ++j) {
        for (int i = 0; i < x_samples; ++i)
            integrand[static_cast<size_t>(i)] = cplx(std::norm(u(j, i)), 0.0);
        l2sq += simpson(integrand, dx).real();
    }
    // Velocity in the dual norm: expand each component over the orthonormal
    // sine family and weight the coefficients by 1 / nu_n^2.
    double dualsq = 0.0;
    const double scale = std::sqrt(2.0 / a);
    for (Eigen::Index j = 0; j < ut.rows(); ++j)
        for (int n = 1; n <= sine_terms; ++n) {
            const double nu = static_cast<double>(n) * kPi / a;
            for (int i = 0; i < x_samples; ++i)
                integrand[static_cast<size_t>(i)] =
                    ut(j, i) * scale * std::sin(nu * (dx * i));
            dualsq += std::norm(simpson(integrand, dx)) / (nu * nu);
        }
    rep.rhs = l2sq + dualsq;
    rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 1.0;
    return rep;
}

}  // namespace wavectl
