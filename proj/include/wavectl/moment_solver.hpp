#pragma once

// Moment-problem synthesis of the boundary control.  Steering the (k,l)
// oscillator from its free evolution to a prescribed terminal coefficient is
// equivalent, through the forced-oscillator solution formula, to prescribing
// the inner products of the unknown control f against the exponential family
//   e_kl(t) = exp(i omega_kl t)  on (0, T),
// one per signed lattice mode:
//   <f, e_kl> = alpha_kl,
//   alpha_kl = C_required(k, l) * exp(-i omega_kl T) / kappa_k,
// with <f, g> = int_0^T f conj(g) dt.  The synthesized control is the unique
// minimal-L^2-norm solution, obtained inside span{e_kl} by solving the Gram
// system; the Gram entries have the closed form
//   <e_p, e_q> = (exp(i(w_p - conj(w_q))T) - 1) / (i(w_p - conj(w_q))),
// equal to T on the diagonal for real frequencies.
//
// Clustered frequencies make that system ill-conditioned; `edd` mode performs
// the exact triangular change of basis to exponential divided differences
// (divided_differences.hpp) on both the family and the targets, solves the
// re-based system, and represents the control in the re-based family.  The
// constraint set is unchanged, so both modes converge to the same minimizer
// whenever both are solvable.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wavectl/divided_differences.hpp"
#include "wavectl/errors.hpp"
#include "wavectl/mode_lattice.hpp"
#include "wavectl/quadrature.hpp"
#include "wavectl/spectral_bvp.hpp"

namespace wavectl {

// ── Exponential family ───────────────────────────────────────────────────────

struct ExponentialFamily {
    std::vector<cplx> frequencies;
    double T = 0.0;
};

inline ExponentialFamily make_family(std::vector<cplx> frequencies, double T,
                                     double dup_tol = 1e-14) {
    if (T <= 0.0) throw ConfigError("horizon T must be positive");
    double scale = 1.0;
    for (const auto& w : frequencies) scale = std::max(scale, std::abs(w));
    for (size_t i = 0; i < frequencies.size(); ++i)
        for (size_t j = i + 1; j < frequencies.size(); ++j)
            if (std::abs(frequencies[i] - frequencies[j]) <= dup_tol * scale)
                throw DuplicateFrequency(
                    "family members " + std::to_string(i) + " and " +
                    std::to_string(j) + " coincide");
    return {std::move(frequencies), T};
}

// ── Gram matrix ──────────────────────────────────────────────────────────────

namespace detail {
// K(delta) = int_0^T exp(i delta t) dt, series form near delta = 0.
inline cplx exp_pair_kernel(cplx delta, double T) {
    const cplx z = cplx(0.0, 1.0) * delta * T;
    if (std::abs(z) < 1e-4) {
        // T * phi1(z), phi1(z) = (e^z - 1)/z, 6-term Taylor (error ~ |z|^6).
        cplx phi(1.0, 0.0);
        cplx term(1.0, 0.0);
        for (int k = 2; k <= 7; ++k) {
            term *= z / static_cast<double>(k);
            phi += term;
        }
        return T * phi;
    }
    return (std::exp(z) - 1.0) / (cplx(0.0, 1.0) * delta);
}
}  // namespace detail

// G(i, j) = <e_i, e_j>, Hermitian positive semidefinite.
inline Eigen::MatrixXcd gram(const ExponentialFamily& fam) {
    const int m = static_cast<int>(fam.frequencies.size());
    Eigen::MatrixXcd g(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            g(i, j) = detail::exp_pair_kernel(
                fam.frequencies[i] - std::conj(fam.frequencies[j]), fam.T);
    return g;
}

struct GramReport {
    Eigen::MatrixXcd matrix;
    double cond = 0.0;
    double min_eig = 0.0;
    double max_eig = 0.0;
    std::vector<std::string> warnings;
};

inline GramReport gram_report(const ExponentialFamily& fam,
                              double cluster_rel = 1e-3) {
    GramReport rep;
    rep.matrix = gram(fam);
    Eigen::MatrixXcd h = 0.5 * (rep.matrix + rep.matrix.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
    rep.min_eig = eig.eigenvalues().minCoeff();
    rep.max_eig = eig.eigenvalues().maxCoeff();
    rep.cond = rep.min_eig > 0.0
                   ? rep.max_eig / rep.min_eig
                   : std::numeric_limits<double>::infinity();
    std::vector<cplx> sorted = fam.frequencies;
    std::sort(sorted.begin(), sorted.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    for (const auto& c : detect_clusters(sorted, cluster_rel))
        if (c.size > 1)
            rep.warnings.push_back(
                "cluster of " + std::to_string(c.size) +
                " frequencies near re(omega) = " +
                std::to_string(sorted[c.start].real()) +
                "; direct Gram may be ill-conditioned, consider edd mode");
    return rep;
}

// ── Moment problem assembly ──────────────────────────────────────────────────

struct MomentProblem {
    ExponentialFamily family;
    Eigen::VectorXcd targets;                      // alpha per member
    std::vector<std::pair<int, int>> provenance;   // signed (k, l) per member
    std::vector<std::string> notes;
};

// Reduces an (initial, target) pair at horizon T to moment targets: the free
// evolution of the initial state is subtracted (linearity), the difference is
// encoded as required signed C coefficients, and each becomes
//   alpha = C_required * exp(-i omega T) / kappa.
// Unreachable modes (kappa = 0) with zero required C are dropped from the
// family with a note; a nonzero requirement on an unreachable mode is a
// contradiction and throws.
inline MomentProblem target_moments(const StateCoefficients& initial,
                                    const StateCoefficients& final_state,
                                    const ModeSet& ms, double T,
                                    double drop_tol = 1e-10) {
    if (initial.K != ms.K || initial.N != ms.N || final_state.K != ms.K ||
        final_state.N != ms.N)
        throw ConfigError("state truncation does not match lattice");
    const StateCoefficients drifted = free_evolve(initial, ms, T);
    const Eigen::MatrixXcd delta_plus = final_state.C_plus - drifted.C_plus;
    const Eigen::MatrixXcd delta_minus = final_state.C_minus - drifted.C_minus;
    const double cscale = std::max(
        {delta_plus.cwiseAbs().maxCoeff(), delta_minus.cwiseAbs().maxCoeff(),
         1.0});

    MomentProblem prob;
    std::vector<cplx> freqs;
    std::vector<cplx> alphas;
    const cplx iu(0.0, 1.0);
    for (const auto& mode : ms.modes) {
        const int row = std::abs(mode.k) - 1;
        const int col = mode.l - 1;
        const cplx c_req = mode.k > 0 ? delta_plus(row, col)
                                      : delta_minus(row, col);
        if (!mode.reachable) {
            if (std::abs(c_req) <= drop_tol * cscale) {
                prob.notes.push_back(
                    "mode (" + std::to_string(mode.k) + ", " +
                    std::to_string(mode.l) +
                    ") unreachable (kappa = 0) and unneeded; dropped");
                continue;
            }
            throw InconsistentTargets(
                "mode (" + std::to_string(mode.k) + ", " +
                std::to_string(mode.l) +
                ") is unreachable (kappa = 0) but the target requires |C| = " +
                std::to_string(std::abs(c_req)));
        }
        freqs.push_back(mode.omega);
        alphas.push_back(c_req * std::exp(-iu * mode.omega * T) / mode.kappa);
        prob.provenance.emplace_back(mode.k, mode.l);
    }
    prob.family = make_family(std::move(freqs), T);
    prob.targets.resize(static_cast<long>(alphas.size()));
    for (size_t i = 0; i < alphas.size(); ++i)
        prob.targets(static_cast<long>(i)) = alphas[i];
    return prob;
}

// ── Control signal ───────────────────────────────────────────────────────────

// Synthesized control.  `basis_nodes[j]` lists the frequency nodes of basis
// member j: a single node for a plain exponential, a prefix of a cluster for
// a divided-difference member.  Samples are uniform on [0, T] inclusive.
struct ControlSignal {
    double T = 0.0;
    std::vector<std::vector<cplx>> basis_nodes;
    Eigen::VectorXcd coefficients;
    std::vector<std::pair<int, int>> provenance;
    std::vector<cplx> samples;
    double dt = 0.0;
    double l2_norm = 0.0;
    double gram_condition = 1.0;
    double algebraic_residual = 0.0;
    double edd_amplification = 1.0;  // max |alpha~| / max |alpha|, edd mode
    bool used_edd = false;
    std::vector<std::string> warnings;
};

inline cplx eval_control(const ControlSignal& f, double t,
                         double confluent_switch = 1e-8) {
    cplx sum(0.0, 0.0);
    for (long j = 0; j < f.coefficients.size(); ++j)
        sum += f.coefficients(j) *
               eval_edd(f.basis_nodes[static_cast<size_t>(j)], t,
                        confluent_switch);
    return sum;
}

inline std::vector<cplx> resample_control(const ControlSignal& f, int n) {
    if (n < 3) throw ConfigError("resample count must be at least 3");
    std::vector<cplx> out(static_cast<size_t>(n));
    const double h = f.T / static_cast<double>(n - 1);
    for (int i = 0; i < n; ++i)
        out[static_cast<size_t>(i)] = eval_control(f, h * i);
    return out;
}

enum class SolveMode { Direct, Edd };

struct SolveOptions {
    double ridge = 0.0;
    double cond_cap = 1e12;
    double cond_warn = 1e6;
    int samples_per_period = 64;
    int min_samples = 513;
    double cluster_rel = 1e-3;
    double confluent_switch = 1e-8;
    double inconsistent_tol = 1e-8;
    int gram_quad_min_panels = 64;  // edd-mode quadrature floor
    // Endpoint flattening: augment the solve with auxiliary exponentials at
    // fresh low frequencies and pin f (order 1) and also f' (order 2) to zero
    // at t = 0 and t = T.  A control with flat endpoints has O(1/w^2) or
    // O(1/w^3) correlation against out-of-family exponentials, which keeps
    // modes beyond the synthesis truncation from being excited through the
    // boundary; the bare minimal-norm signal only decays like O(1/w).
    // Ignores `ridge`.  0 disables.
    int taper_order = 0;
};

namespace detail {

inline double family_max_frequency(const std::vector<cplx>& freqs) {
    double m = 0.0;
    for (const auto& w : freqs) m = std::max(m, std::abs(w));
    return m;
}

inline int sample_count(double T, double max_freq, const SolveOptions& opt) {
    const double periods = T * max_freq / (2.0 * kPi);
    const int by_rate =
        static_cast<int>(std::ceil(periods * opt.samples_per_period)) + 1;
    return std::max(opt.min_samples, by_rate);
}

// <basis_i, basis_j> over [0, T]: analytic kernel between plain exponentials,
// panel quadrature of the stable evaluations otherwise.
inline cplx basis_pair_integral(const std::vector<cplx>& ni,
                                const std::vector<cplx>& nj, double T,
                                const SolveOptions& opt) {
    if (ni.size() == 1 && nj.size() == 1)
        return exp_pair_kernel(ni[0] - std::conj(nj[0]), T);
    double mf = 1.0;
    for (const auto& w : ni) mf = std::max(mf, std::abs(w));
    for (const auto& w : nj) mf = std::max(mf, std::abs(w));
    const int panels = std::max(opt.gram_quad_min_panels,
                                panels_for_frequency(2.0 * mf, T));
    return gauss_panels(
        [&](double t) {
            return eval_edd(ni, t, opt.confluent_switch) *
                   std::conj(eval_edd(nj, t, opt.confluent_switch));
        },
        0.0, T, panels);
}

// Shared tail of both solve paths: factor the constraint system, check
// conditioning and consistency, cache the norm, sample the signal.
inline ControlSignal finish_solve(const Eigen::MatrixXcd& basis_gram,
                                  const Eigen::VectorXcd& rhs,
                                  std::vector<std::vector<cplx>> basis_nodes,
                                  std::vector<std::pair<int, int>> provenance,
                                  double T, double max_freq,
                                  const SolveOptions& opt,
                                  std::vector<std::string> warnings) {
    Eigen::MatrixXcd h = 0.5 * (basis_gram + basis_gram.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
    const double max_eig = eig.eigenvalues().maxCoeff();
    const double min_eig = eig.eigenvalues().minCoeff();
    const double cond = min_eig > 0.0
                            ? max_eig / min_eig
                            : std::numeric_limits<double>::infinity();
    if (cond > opt.cond_cap)
        throw IllConditioned(
            cond,
            "constraint Gram condition number " + std::to_string(cond) +
                " exceeds cap " + std::to_string(opt.cond_cap) +
                "; use edd mode or a larger horizon T");
    if (cond > opt.cond_warn)
        warnings.push_back("constraint Gram condition number " +
                           std::to_string(cond) + " above warning threshold");

    // Constraint matrix: <f, basis_i> = sum_j c_j <basis_j, basis_i>, i.e. the
    // transpose (= conjugate) of the Gram in <., .> orientation.
    const long m = basis_gram.rows();
    Eigen::MatrixXcd pairings = basis_gram;
    Eigen::VectorXcd c;
    double resid = 0.0;
    if (opt.taper_order == 0) {
        Eigen::MatrixXcd a = basis_gram.transpose();
        if (opt.ridge > 0.0)
            a += opt.ridge * Eigen::MatrixXcd::Identity(a.rows(), a.cols());
        Eigen::LDLT<Eigen::MatrixXcd> ldlt(a);
        c = ldlt.solve(rhs);
        resid = (basis_gram.transpose() * c - rhs).cwiseAbs().maxCoeff();
        if (opt.ridge == 0.0 &&
            resid > opt.inconsistent_tol *
                        (1.0 + rhs.cwiseAbs().maxCoeff() +
                         basis_gram.cwiseAbs().maxCoeff() *
                             c.cwiseAbs().maxCoeff()))
            throw InconsistentTargets(
                "constraint system residual " + std::to_string(resid) +
                " exceeds consistency tolerance");
    } else {
        if (opt.taper_order < 0 || opt.taper_order > 2)
            throw ConfigError("taper_order must be 0, 1, or 2");
        // Fresh auxiliary frequencies strictly below the family band: every
        // family magnitude is >= base, so base/2 and base/4 never collide.
        double base = std::numeric_limits<double>::infinity();
        double top = 0.0;
        for (const auto& nodes : basis_nodes)
            for (const auto& w : nodes) {
                const double mag = std::abs(w);
                if (mag > 1e-9) base = std::min(base, mag);
                top = std::max(top, mag);
            }
        if (!std::isfinite(base)) base = top + 1.0;
        std::vector<cplx> aux{cplx(0.5 * base, 0.0), cplx(-0.5 * base, 0.0)};
        if (opt.taper_order == 2) {
            aux.push_back(cplx(0.25 * base, 0.0));
            aux.push_back(cplx(-0.25 * base, 0.0));
        }
        const long p = static_cast<long>(aux.size());
        for (const auto& w : aux) {
            basis_nodes.push_back({w});
            provenance.emplace_back(0, 0);
        }
        pairings.conservativeResize(m + p, m + p);
        for (long i = 0; i < m + p; ++i)
            for (long j = 0; j < m + p; ++j)
                if (i >= m || j >= m)
                    pairings(i, j) = basis_pair_integral(
                        basis_nodes[static_cast<size_t>(i)],
                        basis_nodes[static_cast<size_t>(j)], T, opt);
        // Square system: the m family-moment rows plus endpoint rows pinning
        // f (and, at order 2, f') to zero at t = 0 and t = T.
        Eigen::MatrixXcd sys(m + p, m + p);
        sys.topRows(m) = pairings.transpose().topRows(m);
        long r = m;
        for (const double tt : {0.0, T}) {
            for (long j = 0; j < m + p; ++j)
                sys(r, j) = eval_edd(basis_nodes[static_cast<size_t>(j)], tt,
                                     opt.confluent_switch);
            ++r;
        }
        if (opt.taper_order == 2)
            for (const double tt : {0.0, T}) {
                for (long j = 0; j < m + p; ++j)
                    sys(r, j) = eval_edd_derivative(
                        basis_nodes[static_cast<size_t>(j)], tt,
                        opt.confluent_switch);
                ++r;
            }
        Eigen::VectorXcd rhs_aug = Eigen::VectorXcd::Zero(m + p);
        rhs_aug.head(m) = rhs;
        c = sys.partialPivLu().solve(rhs_aug);
        resid = (sys * c - rhs_aug).cwiseAbs().maxCoeff();
        if (resid > opt.inconsistent_tol *
                        (1.0 + rhs.cwiseAbs().maxCoeff() +
                         sys.cwiseAbs().maxCoeff() * c.cwiseAbs().maxCoeff()))
            throw InconsistentTargets(
                "augmented constraint system residual " +
                std::to_string(resid) + " exceeds consistency tolerance");
    }

    ControlSignal f;
    f.T = T;
    f.basis_nodes = std::move(basis_nodes);
    f.coefficients = c;
    f.provenance = std::move(provenance);
    f.gram_condition = cond;
    f.algebraic_residual = resid;
    f.warnings = std::move(warnings);

    cplx norm2(0.0, 0.0);
    for (long i = 0; i < c.size(); ++i)
        for (long j = 0; j < c.size(); ++j)
            norm2 += c(i) * std::conj(c(j)) * pairings(i, j);
    f.l2_norm = std::sqrt(std::max(0.0, norm2.real()));

    const int n = sample_count(T, max_freq, opt);
    f.samples.resize(static_cast<size_t>(n));
    f.dt = T / static_cast<double>(n - 1);
    for (int i = 0; i < n; ++i)
        f.samples[static_cast<size_t>(i)] =
            eval_control(f, f.dt * i, opt.confluent_switch);
    return f;
}

}  // namespace detail

inline ControlSignal solve(const MomentProblem& prob,
                           SolveMode mode = SolveMode::Direct,
                           const SolveOptions& opt = SolveOptions{}) {
    const int m = static_cast<int>(prob.family.frequencies.size());
    if (m == 0) {
        // Nothing to steer: the minimal-norm control is identically zero.
        ControlSignal f;
        f.T = prob.family.T > 0.0 ? prob.family.T : 1.0;
        const int n = opt.min_samples;
        f.samples.assign(static_cast<size_t>(n), cplx(0.0, 0.0));
        f.dt = f.T / static_cast<double>(n - 1);
        f.coefficients = Eigen::VectorXcd::Zero(0);
        return f;
    }
    const double max_freq = detail::family_max_frequency(prob.family.frequencies);
    // Problems built by hand may omit provenance; pad with (0, 0) markers so
    // downstream bookkeeping can index it safely.
    std::vector<std::pair<int, int>> provenance = prob.provenance;
    if (provenance.size() != static_cast<size_t>(m))
        provenance.assign(static_cast<size_t>(m), {0, 0});

    if (mode == SolveMode::Direct) {
        auto rep = gram_report(prob.family, opt.cluster_rel);
        std::vector<std::vector<cplx>> nodes;
        nodes.reserve(static_cast<size_t>(m));
        for (const auto& w : prob.family.frequencies) nodes.push_back({w});
        return detail::finish_solve(rep.matrix, prob.targets, std::move(nodes),
                                    std::move(provenance), prob.family.T,
                                    max_freq, opt, rep.warnings);
    }

    // EDD mode: sort members, detect clusters, re-basis family and targets.
    std::vector<int> perm(static_cast<size_t>(m));
    std::iota(perm.begin(), perm.end(), 0);
    const auto& fr = prob.family.frequencies;
    std::sort(perm.begin(), perm.end(), [&](int x, int y) {
        if (fr[static_cast<size_t>(x)].real() != fr[static_cast<size_t>(y)].real())
            return fr[static_cast<size_t>(x)].real() <
                   fr[static_cast<size_t>(y)].real();
        return fr[static_cast<size_t>(x)].imag() <
               fr[static_cast<size_t>(y)].imag();
    });
    std::vector<cplx> sorted(static_cast<size_t>(m));
    std::vector<std::pair<int, int>> prov(static_cast<size_t>(m));
    Eigen::VectorXcd alpha_sorted(m);
    for (int i = 0; i < m; ++i) {
        sorted[static_cast<size_t>(i)] = fr[static_cast<size_t>(perm[i])];
        prov[static_cast<size_t>(i)] =
            provenance[static_cast<size_t>(perm[i])];
        alpha_sorted(i) = prob.targets(perm[i]);
    }

    const auto clusters = detect_clusters(sorted, opt.cluster_rel);
    std::vector<std::vector<cplx>> basis(static_cast<size_t>(m));
    Eigen::VectorXcd rhs(m);
    double amp_num = 0.0, amp_den = 0.0;
    for (const auto& cl : clusters) {
        std::vector<cplx> conj_nodes(static_cast<size_t>(cl.size));
        std::vector<cplx> vals(static_cast<size_t>(cl.size));
        for (int j = 0; j < cl.size; ++j) {
            conj_nodes[static_cast<size_t>(j)] =
                std::conj(sorted[static_cast<size_t>(cl.start + j)]);
            vals[static_cast<size_t>(j)] = alpha_sorted(cl.start + j);
        }
        const auto table = dd_prefix_table(conj_nodes, vals);
        for (int j = 0; j < cl.size; ++j) {
            basis[static_cast<size_t>(cl.start + j)].assign(
                sorted.begin() + cl.start, sorted.begin() + cl.start + j + 1);
            rhs(cl.start + j) = table[static_cast<size_t>(j)];
            amp_num = std::max(amp_num, std::abs(table[static_cast<size_t>(j)]));
            amp_den = std::max(amp_den, std::abs(vals[static_cast<size_t>(j)]));
        }
    }

    // Re-based Gram by panel quadrature (the members are no longer plain
    // exponentials, but their evaluations are stable).
    const double T = prob.family.T;
    const int panels = std::max(opt.gram_quad_min_panels,
                                panels_for_frequency(2.0 * max_freq, T));
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(m, m);
    const double half = 0.5 * (T / panels);
    std::vector<cplx> vals(static_cast<size_t>(m));
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * (T / panels);
        for (std::size_t q = 0; q < kGauss16Nodes.size(); ++q) {
            const double w = half * kGauss16Weights[q];
            for (const double sign : {1.0, -1.0}) {
                const double t = mid + sign * half * kGauss16Nodes[q];
                for (int i = 0; i < m; ++i)
                    vals[static_cast<size_t>(i)] =
                        eval_edd(basis[static_cast<size_t>(i)], t,
                                 opt.confluent_switch);
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j)
                        g(i, j) += w * vals[static_cast<size_t>(i)] *
                                   std::conj(vals[static_cast<size_t>(j)]);
            }
        }
    }

    auto f = detail::finish_solve(g, rhs, std::move(basis), std::move(prov), T,
                                  max_freq, opt, {});
    f.used_edd = true;
    f.edd_amplification = amp_den > 0.0 ? amp_num / amp_den : 1.0;
    return f;
}

// ── Independent residual check ───────────────────────────────────────────────

// Max moment mismatch, evaluated by dense quadrature of the sampled signal
// rather than through the Gram algebra.
inline double moment_residual(const ControlSignal& f,
                              const ExponentialFamily& fam,
                              const Eigen::VectorXcd& targets,
                              int samples_per_period = 1024) {
    const int m = static_cast<int>(fam.frequencies.size());
    if (m == 0) return 0.0;
    double max_freq = detail::family_max_frequency(fam.frequencies);
    for (const auto& nodes : f.basis_nodes)
        for (const auto& w : nodes) max_freq = std::max(max_freq, std::abs(w));
    const double periods = fam.T * (2.0 * max_freq) / (2.0 * kPi);
    int n = std::max(2049, static_cast<int>(std::ceil(periods *
                                                      samples_per_period)) +
                               1);
    std::vector<cplx> fs;
    if (f.coefficients.size() == 0) {
        fs.assign(static_cast<size_t>(n), cplx(0.0, 0.0));
    } else {
        fs = resample_control(f, n);
    }
    const double h = fam.T / static_cast<double>(n - 1);
    double worst = 0.0;
    std::vector<cplx> integrand(static_cast<size_t>(n));
    const cplx iu(0.0, 1.0);
    for (int i = 0; i < m; ++i) {
        const cplx wbar = std::conj(fam.frequencies[static_cast<size_t>(i)]);
        for (int p = 0; p < n; ++p)
            integrand[static_cast<size_t>(p)] =
                fs[static_cast<size_t>(p)] * std::exp(-iu * wbar * (h * p));
        const cplx moment = simpson(integrand, h);
        worst = std::max(worst, std::abs(moment - targets(i)));
    }
    return worst;
}

}  // namespace wavectl
