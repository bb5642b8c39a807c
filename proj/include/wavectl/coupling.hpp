#pragma once

// Finite coupling block between the scalar wave channels: an N x N real
// symmetric matrix A acting across components, together with the control
// direction b through which the single boundary input enters every channel.
//
// The module provides
//   * decompose       : orthonormal eigenpairs (lambda_l, phi_l), ascending,
//                        with the biorthogonal family psi_l (= phi_l for
//                        symmetric A) and the control moments m_l = (b, psi_l);
//   * kalman_rank     : numerical rank of [b, Ab, ..., A^{N-1} b], the
//                        controllability matrix; rank N means every eigen
//                        channel is reachable from the single input;
//   * normalize_control_moments: rescales each pair (phi_l, psi_l) so that
//                        (b, psi_l) = 1, keeping (phi_i, psi_j) = delta_ij;
//                        after this step the forcing enters every channel with
//                        unit weight, which is what the synthesis code assumes;
//   * check_nonresonance: scans for collisions mu_k - mu_l = lambda_i -
//                        lambda_j between spatial and coupling spectral gaps;
//                        a collision makes two lattice frequencies coincide
//                        and breaks the moment problem.
//
// All guarantees are for the finite truncation the user supplies.

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "wavectl/errors.hpp"

namespace wavectl {

// ── Operator ─────────────────────────────────────────────────────────────────

struct CouplingOperator {
    int N = 0;
    Eigen::MatrixXd entries;  // symmetric, stored exactly symmetrized
    Eigen::VectorXd b;        // control direction, not identically zero
};

// Accepts entries within `tol`-relative of symmetric and stores the exact
// symmetrization so downstream code can rely on A = A^T bitwise.
inline CouplingOperator make_coupling(const Eigen::MatrixXd& entries,
                                      const Eigen::VectorXd& b,
                                      double tol = 1e-12) {
    if (entries.rows() != entries.cols())
        throw ConfigError("coupling matrix must be square");
    const int n = static_cast<int>(entries.rows());
    if (n < 1) throw ConfigError("coupling matrix must be at least 1x1");
    if (b.size() != n)
        throw ConfigError("control direction length must match matrix dimension");
    const double scale = entries.cwiseAbs().maxCoeff();
    const double asym = (entries - entries.transpose()).cwiseAbs().maxCoeff();
    if (asym > tol * std::max(scale, 1.0))
        throw NotSymmetric("coupling matrix asymmetry " + std::to_string(asym));
    if (b.cwiseAbs().maxCoeff() == 0.0)
        throw ConfigError("control direction must have a nonzero entry");
    CouplingOperator op;
    op.N = n;
    op.entries = 0.5 * (entries + entries.transpose());
    op.b = b;
    return op;
}

// ── Eigenstructure ───────────────────────────────────────────────────────────

struct SpectralDecomposition {
    Eigen::VectorXd lambdas;          // ascending
    Eigen::MatrixXd phi;              // orthonormal eigenvectors, by column
    Eigen::MatrixXd psi;              // biorthogonal family, by column
    Eigen::VectorXd control_moments;  // m_l = (b, psi_l)
};

// Full symmetric eigendecomposition with a pairwise-distinctness gate: the
// synthesis chain needs simple eigenvalues, so a spectral gap at or below
// `distinct_tol` * ||A|| is rejected rather than silently deduplicated.
inline SpectralDecomposition decompose(const CouplingOperator& op,
                                       double distinct_tol = 1e-8) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op.entries);
    if (solver.info() != Eigen::Success)
        throw MathPreconditionError("eigendecomposition failed to converge");
    SpectralDecomposition dec;
    dec.lambdas = solver.eigenvalues();  // ascending by contract
    dec.phi = solver.eigenvectors();
    const double norm_a = op.entries.norm();
    for (int l = 0; l + 1 < op.N; ++l) {
        const double gap = dec.lambdas(l + 1) - dec.lambdas(l);
        if (gap <= distinct_tol * norm_a)
            throw RepeatedEigenvalues(
                "eigenvalue gap " + std::to_string(gap) + " at index " +
                std::to_string(l + 1) + " is below " +
                std::to_string(distinct_tol) + " * ||A||");
    }
    dec.psi = dec.phi;  // symmetric operator: biorthogonal family is itself
    dec.control_moments = dec.psi.transpose() * op.b;
    return dec;
}

// ── Controllability rank ─────────────────────────────────────────────────────

inline Eigen::MatrixXd controllability_matrix(const CouplingOperator& op) {
    Eigen::MatrixXd k(op.N, op.N);
    Eigen::VectorXd col = op.b;
    for (int j = 0; j < op.N; ++j) {
        k.col(j) = col;
        col = op.entries * col;
    }
    return k;
}

inline int kalman_rank(const CouplingOperator& op, double rank_tol = 1e-10) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(controllability_matrix(op));
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > rank_tol * sv(0)) ++rank;
    return rank;
}

// ── Moment normalization ─────────────────────────────────────────────────────

// Rescales phi_l by m_l and psi_l by 1/m_l so every control moment becomes 1.
// The pairing (phi_i, psi_j) = delta_ij is preserved exactly, and applying the
// map twice is the identity on the second pass.  A moment at or below
// `moment_tol` * ||b|| names the unreachable channel (1-based).
inline SpectralDecomposition normalize_control_moments(
    const SpectralDecomposition& dec, const Eigen::VectorXd& b,
    double moment_tol = 1e-10) {
    const int n = static_cast<int>(dec.lambdas.size());
    const double bscale = b.norm();
    SpectralDecomposition out = dec;
    for (int l = 0; l < n; ++l) {
        const double m = b.dot(dec.psi.col(l));
        if (std::abs(m) <= moment_tol * bscale)
            throw ZeroMoment(l + 1, "control moment vanishes for eigenmode " +
                                        std::to_string(l + 1));
        out.phi.col(l) = m * dec.phi.col(l);
        out.psi.col(l) = dec.psi.col(l) / m;
        out.control_moments(l) = b.dot(out.psi.col(l));
    }
    return out;
}

// ── Spectral-gap collision scan ──────────────────────────────────────────────

struct ResonanceViolation {
    int k = 0, l = 0;  // spatial indices, 1-based
    int i = 0, j = 0;  // coupling indices, 1-based
    double mu_gap = 0.0;
    double lambda_gap = 0.0;
};

// Reports every quadruple with |(mu_k - mu_l) - (lambda_i - lambda_j)| at or
// below `tol`, over k != l and i != j within the supplied truncations.  An
// empty result certifies only the checked ranges.
inline std::vector<ResonanceViolation> check_nonresonance(
    const std::vector<double>& mus, const std::vector<double>& lambdas,
    double tol = 1e-9) {
    std::vector<ResonanceViolation> out;
    const int km = static_cast<int>(mus.size());
    const int lm = static_cast<int>(lambdas.size());
    for (int k = 0; k < km; ++k)
        for (int l = 0; l < km; ++l) {
            if (k == l) continue;
            for (int i = 0; i < lm; ++i)
                for (int j = 0; j < lm; ++j) {
                    if (i == j) continue;
                    const double mg = mus[k] - mus[l];
                    const double lg = lambdas[i] - lambdas[j];
                    if (std::abs(mg - lg) <= tol)
                        out.push_back({k + 1, l + 1, i + 1, j + 1, mg, lg});
                }
        }
    return out;
}

}  // namespace wavectl
