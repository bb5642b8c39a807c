// Spatial eigenstructure of -d^2/dx^2 on (0, a) under the two-point boundary
// form
//
//     alpha1 * u(0) + beta1 * u(a) = g1
//     alpha2 * u(0) + beta2 * u(a) = g2,       eta = alpha1*beta2 - alpha2*beta1.
//
// With eta != 0 the pair is solvable for the endpoint values, and the closed
// eigenfamily used throughout the library is
//
//     nu_n = n*pi/a,   mu_n = nu_n^2,
//     u_n(x) = cos(nu_n x) + sigma_n sin(nu_n x),
//     sigma_n = -(alpha2 + beta2(-1)^n) / (alpha1 + beta1(-1)^n),
//
// so sigma_n takes one value per parity of n.  The companion family is the
// rescaling  ubar_n = gamma_n u_n.  The printed closed form for the scale,
// (a/2)(1 + sigma_n^2), is kept as a seed value only; the library normalizes
// gamma_n from the actual integral  int |u_n|^2 = (a/2)(1 + |sigma_n|^2)  so
// that  int_0^a u_n conj(ubar_n) dx = 1  holds exactly.  The two agree up to
// inversion for real sigma and differ for the seed when sigma is complex.
//
// The family is NOT orthogonal for admissible coefficients: opposite-parity
// pairs couple with Gram mass proportional to  k sigma_k - n sigma_n, and the
// published orthogonality condition demanding that this vanish is generically
// unsatisfiable when eta != 0.  The residual helpers below expose both facts
// numerically instead of assuming them away; downstream synthesis does not
// rely on orthogonality of this family.

#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "wavectl/errors.hpp"
#include "wavectl/quadrature.hpp"

namespace wavectl {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// ── Boundary form ────────────────────────────────────────────────────────────

struct BoundaryCoefficients {
    cplx alpha1{};  // row 1: alpha1*u(0) + beta1*u(a)  (control row)
    cplx beta1{};
    cplx alpha2{};  // row 2: alpha2*u(0) + beta2*u(a)  (homogeneous row)
    cplx beta2{};
    cplx eta{};

    double scale() const {
        return std::max(std::max(std::abs(alpha1), std::abs(beta1)),
                        std::max(std::abs(alpha2), std::abs(beta2)));
    }
};

// Validates eta away from zero.  `tol` is relative: eta is compared against
// tol * scale^2 since it is a product of two coefficients.
inline BoundaryCoefficients make_boundary(cplx alpha1, cplx beta1, cplx alpha2,
                                          cplx beta2, double tol = 1e-12) {
    BoundaryCoefficients bc{alpha1, beta1, alpha2, beta2,
                            alpha1 * beta2 - alpha2 * beta1};
    const double s = bc.scale();
    if (s == 0.0 || std::abs(bc.eta) <= tol * s * s)
        throw DegenerateBoundary("boundary form degenerate: |eta| = " +
                                 std::to_string(std::abs(bc.eta)));
    return bc;
}

// ── Eigenfamily ──────────────────────────────────────────────────────────────

struct SpatialMode {
    int n = 0;
    double a = 0.0;
    double nu = 0.0;      // n*pi/a
    double mu = 0.0;      // nu^2
    cplx sigma{};
    cplx gamma{};         // normalized companion scale, 2/(a(1+|sigma|^2))
    cplx gamma_seed{};    // printed closed form, (a/2)(1+sigma^2)
};

inline cplx sigma_for_parity(const BoundaryCoefficients& bc, int n,
                             double tol = 1e-12) {
    const double parity = (n % 2 == 0) ? 1.0 : -1.0;
    const cplx denom = bc.alpha1 + bc.beta1 * parity;
    if (std::abs(denom) <= tol * bc.scale())
        throw ParityDegeneracy(
            n, "alpha1 + beta1*(-1)^n vanishes for n = " + std::to_string(n));
    return -(bc.alpha2 + bc.beta2 * parity) / denom;
}

inline SpatialMode spatial_mode_with_sigma(double a, int n, cplx sigma) {
    if (a <= 0.0) throw ConfigError("interval length must be positive");
    if (n < 1) throw ConfigError("mode index must be >= 1");
    SpatialMode m;
    m.n = n;
    m.a = a;
    m.nu = n * kPi / a;
    m.mu = m.nu * m.nu;
    m.sigma = sigma;
    const double mass = 0.5 * a * (1.0 + std::norm(sigma));
    m.gamma = 1.0 / mass;
    m.gamma_seed = 0.5 * a * (1.0 + sigma * sigma);
    return m;
}

inline SpatialMode spatial_mode(const BoundaryCoefficients& bc, double a, int n,
                                double tol = 1e-12) {
    return spatial_mode_with_sigma(a, n, sigma_for_parity(bc, n, tol));
}

inline cplx eval_eigenfunction(const SpatialMode& m, double x) {
    return std::cos(m.nu * x) + m.sigma * std::sin(m.nu * x);
}

// Analytic second derivative; satisfies -u'' = mu*u to rounding.
inline cplx eval_eigenfunction_dxx(const SpatialMode& m, double x) {
    return -m.mu * std::cos(m.nu * x) - m.sigma * m.mu * std::sin(m.nu * x);
}

inline cplx eval_biorthogonal(const SpatialMode& m, double x) {
    return m.gamma * eval_eigenfunction(m, x);
}

// ── Diagnostics ──────────────────────────────────────────────────────────────

// Endpoint residuals of the two boundary rows against the closed endpoint
// values u_n(0) = 1, u_n(a) = (-1)^n.
inline std::pair<cplx, cplx> bc_residual(const SpatialMode& m,
                                         const BoundaryCoefficients& bc) {
    const double parity = (m.n % 2 == 0) ? 1.0 : -1.0;
    return {bc.alpha1 + bc.beta1 * parity, bc.alpha2 + bc.beta2 * parity};
}

// Published pairwise orthogonality condition, reported as the residual
//   n*(alpha2+beta2(-1)^n)/(alpha1+beta1(-1)^n) - k*(same at k)
// which equals k*sigma_k - n*sigma_n.  Zero would make u_n ⊥ u_k.
inline cplx orthogonality_condition_residual(const BoundaryCoefficients& bc,
                                             int n, int k, double tol = 1e-12) {
    const cplx sn = sigma_for_parity(bc, n, tol);
    const cplx sk = sigma_for_parity(bc, k, tol);
    return static_cast<double>(n) * (-sn) - static_cast<double>(k) * (-sk);
}

// Gram of the family against its companion,  G(j, n) = int u_j conj(ubar_n).
// `quad_points` is the total Gauss point budget; panels scale with the
// highest frequency so the entries hold to quadrature tolerance.
inline Eigen::MatrixXcd biorthogonality_gram(const std::vector<SpatialMode>& modes,
                                             int quad_points = 4096) {
    const int m = static_cast<int>(modes.size());
    Eigen::MatrixXcd g(m, m);
    if (m == 0) return g;
    const double a = modes.front().a;
    double numax = 0.0;
    for (const auto& mode : modes) numax = std::max(numax, mode.nu);
    int panels = std::max(quad_points / 16, panels_for_frequency(2.0 * numax, a));
    for (int j = 0; j < m; ++j) {
        for (int n = 0; n < m; ++n) {
            auto fn = [&](double x) {
                return eval_eigenfunction(modes[j], x) *
                       std::conj(eval_biorthogonal(modes[n], x));
            };
            g(j, n) = gauss_panels(fn, 0.0, a, panels);
        }
    }
    return g;
}

inline Eigen::MatrixXcd biorthogonality_gram(const BoundaryCoefficients& bc,
                                             double a, int n_max,
                                             int quad_points = 4096) {
    std::vector<SpatialMode> modes;
    modes.reserve(n_max);
    for (int n = 1; n <= n_max; ++n) modes.push_back(spatial_mode(bc, a, n));
    return biorthogonality_gram(modes, quad_points);
}

inline double max_offdiagonal(const Eigen::MatrixXcd& g) {
    double worst = 0.0;
    for (int i = 0; i < g.rows(); ++i)
        for (int j = 0; j < g.cols(); ++j)
            if (i != j) worst = std::max(worst, std::abs(g(i, j)));
    return worst;
}

inline double max_diag_deviation(const Eigen::MatrixXcd& g) {
    double worst = 0.0;
    for (int i = 0; i < g.rows() && i < g.cols(); ++i)
        worst = std::max(worst, std::abs(g(i, i) - 1.0));
    return worst;
}

}  // namespace wavectl
