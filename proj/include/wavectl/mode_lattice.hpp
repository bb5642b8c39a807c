#pragma once

// Signed frequency lattice of the coupled system.  Each spatial index k >= 1
// pairs with each coupling eigenvalue lambda_l to give a frequency
//   omega_kl = principal_sqrt(nu_k^2 + lambda_l),
// extended to signed indices by omega_{-k,l} = -omega_{k,l}.  The boundary
// control enters the (k,l) oscillator through the amplification factor
//   kappa_k = gamma_k * nu_k * sigma_k * (beta2 + (-1)^k alpha2) / eta,
// obtained by projecting the inhomogeneous boundary data onto the companion
// family: the control fixes the endpoint values w(0) = beta2 f / eta and
// w(a) = -alpha2 f / eta, and pairing those against the companion derivative
// produces the parity-dependent row combination beta2 + (-1)^k alpha2.
// A factor of zero marks the mode unreachable (not an error).
//
// The second half of the module is bookkeeping shared by synthesis and
// verification: the C encoding C_kl = i omega_kl a_kl + a'_kl of a state
// (invertible per signed pair), the weighted coefficient norm, and gap
// diagnostics (pairwise separation, per-k cluster widths, and log-log
// growth/decay slopes of |omega| and cluster width).

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wavectl/coupling.hpp"
#include "wavectl/errors.hpp"
#include "wavectl/spectral_bvp.hpp"

namespace wavectl {

// ── Frequencies and amplification ────────────────────────────────────────────

// Principal square root of nu^2 + lambda.  A negative radicand yields a purely
// imaginary frequency (the caller records a hyperbolicity warning); a radicand
// at zero is rejected because the oscillator inversion divides by omega.
inline cplx omega(double nu, double lambda, double tol = 1e-12, int k = 0,
                  int l = 0) {
    const double rad = nu * nu + lambda;
    const double scale = std::max({nu * nu, std::abs(lambda), 1.0});
    if (std::abs(rad) <= tol * scale)
        throw ZeroFrequency(k, l, "frequency radicand vanishes: nu^2 + lambda = " +
                                      std::to_string(rad));
    if (rad >= 0.0) return cplx(std::sqrt(rad), 0.0);
    return cplx(0.0, std::sqrt(-rad));
}

inline cplx kappa(const SpatialMode& m, const BoundaryCoefficients& bc) {
    const double parity = (m.n % 2 == 0) ? 1.0 : -1.0;
    return m.gamma * m.nu * m.sigma * (bc.beta2 + parity * bc.alpha2) / bc.eta;
}

// Natural magnitude scale of kappa for the reachability cutoff.
inline double kappa_scale(const SpatialMode& m, const BoundaryCoefficients& bc) {
    return std::abs(m.gamma) * m.nu * (1.0 + std::abs(m.sigma)) *
           (std::abs(bc.alpha2) + std::abs(bc.beta2)) / std::abs(bc.eta);
}

// ── Lattice ──────────────────────────────────────────────────────────────────

struct Mode {
    int k = 0;              // signed spatial index, never 0
    int l = 0;              // coupling index, 1-based
    cplx omega{};
    cplx kappa{};
    double nu = 0.0;        // |k| pi / a
    bool reachable = true;  // false when kappa is (numerically) zero
};

struct ModeSet {
    int K = 0;
    int N = 0;
    double a = 0.0;
    std::vector<Mode> modes;        // 2*K*N entries, sorted by Re omega
    Eigen::MatrixXcd omega_grid;    // K x N, positive-k frequencies
    Eigen::VectorXcd kappa_grid;    // K, per spatial index
    std::vector<std::string> warnings;
};

inline ModeSet build_lattice(const BoundaryCoefficients& bc, double a, int K,
                             const SpectralDecomposition& dec,
                             double zero_tol = 1e-12) {
    if (K < 1) throw ConfigError("spatial truncation K must be >= 1");
    const int N = static_cast<int>(dec.lambdas.size());
    ModeSet ms;
    ms.K = K;
    ms.N = N;
    ms.a = a;
    ms.omega_grid.resize(K, N);
    ms.kappa_grid.resize(K);
    ms.modes.reserve(2 * K * N);
    for (int k = 1; k <= K; ++k) {
        const SpatialMode sm = spatial_mode(bc, a, k);
        const cplx kap = kappa(sm, bc);
        const double kscale = kappa_scale(sm, bc);
        const bool reach = std::abs(kap) > 1e-12 * std::max(kscale, 1e-300);
        ms.kappa_grid(k - 1) = kap;
        for (int l = 0; l < N; ++l) {
            const double lam = dec.lambdas(l);
            const cplx w = omega(sm.nu, lam, zero_tol, k, l + 1);
            ms.omega_grid(k - 1, l) = w;
            if (sm.nu * sm.nu + lam < 0.0)
                ms.warnings.push_back(
                    "hyperbolicity: nu^2 + lambda < 0 at (k, l) = (" +
                    std::to_string(k) + ", " + std::to_string(l + 1) +
                    "), frequency is imaginary");
            ms.modes.push_back({k, l + 1, w, kap, sm.nu, reach});
            ms.modes.push_back({-k, l + 1, -w, kap, sm.nu, reach});
        }
    }
    std::sort(ms.modes.begin(), ms.modes.end(), [](const Mode& x, const Mode& y) {
        if (x.omega.real() != y.omega.real())
            return x.omega.real() < y.omega.real();
        if (x.omega.imag() != y.omega.imag())
            return x.omega.imag() < y.omega.imag();
        if (x.k != y.k) return x.k < y.k;
        return x.l < y.l;
    });
    return ms;
}

// ── Gap diagnostics ──────────────────────────────────────────────────────────

struct GapReport {
    double delta = 0.0;              // min pairwise |omega - omega'|
    Eigen::VectorXd cluster_width;   // per k = 1..K: max_{l,m} |omega_kl - omega_km|
    double slope_omega = 0.0;        // log-log slope of |omega_kl| vs k, k >= 4
    double slope_width = 0.0;        // log-log slope of cluster width vs k, k >= 4
    std::vector<double> nearest;     // per mode (mset.modes order): closest other
};

namespace detail {
inline double loglog_slope(const std::vector<double>& xs,
                           const std::vector<double>& ys) {
    // Least-squares slope through (log x, log y); NaN when underdetermined.
    if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) {
        const double lx = std::log(xs[i]);
        const double ly = std::log(ys[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return (n * sxy - sx * sy) / denom;
}
}  // namespace detail

inline GapReport gap_statistics(const ModeSet& ms) {
    GapReport rep;
    const int m = static_cast<int>(ms.modes.size());
    rep.nearest.assign(m, std::numeric_limits<double>::infinity());
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            const double d = std::abs(ms.modes[i].omega - ms.modes[j].omega);
            rep.nearest[i] = std::min(rep.nearest[i], d);
            rep.nearest[j] = std::min(rep.nearest[j], d);
        }
    rep.delta = m > 1 ? *std::min_element(rep.nearest.begin(), rep.nearest.end())
                      : 0.0;

    rep.cluster_width = Eigen::VectorXd::Zero(ms.K);
    for (int k = 1; k <= ms.K; ++k) {
        double w = 0.0;
        for (int l = 0; l < ms.N; ++l)
            for (int q = l + 1; q < ms.N; ++q)
                w = std::max(w, std::abs(ms.omega_grid(k - 1, l) -
                                         ms.omega_grid(k - 1, q)));
        rep.cluster_width(k - 1) = w;
    }

    std::vector<double> ks, mags, wks, widths;
    for (int k = 4; k <= ms.K; ++k) {
        for (int l = 0; l < ms.N; ++l) {
            const double mag = std::abs(ms.omega_grid(k - 1, l));
            if (mag > 0.0) {
                ks.push_back(static_cast<double>(k));
                mags.push_back(mag);
            }
        }
        if (rep.cluster_width(k - 1) > 0.0) {
            wks.push_back(static_cast<double>(k));
            widths.push_back(rep.cluster_width(k - 1));
        }
    }
    rep.slope_omega = detail::loglog_slope(ks, mags);
    rep.slope_width = detail::loglog_slope(wks, widths);
    return rep;
}

// ── State encoding ───────────────────────────────────────────────────────────

// Position/velocity coefficients over the unsigned grid (k = 1..K rows,
// l = 1..N columns) together with the signed first-order encoding
//   C_{+k,l} = +i omega_kl a_kl + a'_kl,
//   C_{-k,l} = -i omega_kl a_kl + a'_kl,
// which the synthesis chain steers directly.
struct StateCoefficients {
    int K = 0;
    int N = 0;
    Eigen::MatrixXcd a;        // K x N
    Eigen::MatrixXcd ap;       // K x N
    Eigen::MatrixXcd C_plus;   // K x N
    Eigen::MatrixXcd C_minus;  // K x N
};

inline StateCoefficients encode_state(const Eigen::MatrixXcd& a,
                                      const Eigen::MatrixXcd& ap,
                                      const ModeSet& ms) {
    if (a.rows() != ms.K || a.cols() != ms.N || ap.rows() != ms.K ||
        ap.cols() != ms.N)
        throw ConfigError("state coefficient shape does not match truncation");
    StateCoefficients st;
    st.K = ms.K;
    st.N = ms.N;
    st.a = a;
    st.ap = ap;
    st.C_plus.resize(ms.K, ms.N);
    st.C_minus.resize(ms.K, ms.N);
    const cplx iu(0.0, 1.0);
    for (int k = 0; k < ms.K; ++k)
        for (int l = 0; l < ms.N; ++l) {
            const cplx w = ms.omega_grid(k, l);
            st.C_plus(k, l) = iu * w * a(k, l) + ap(k, l);
            st.C_minus(k, l) = -iu * w * a(k, l) + ap(k, l);
        }
    return st;
}

inline StateCoefficients decode_state(const Eigen::MatrixXcd& c_plus,
                                      const Eigen::MatrixXcd& c_minus,
                                      const ModeSet& ms) {
    if (c_plus.rows() != ms.K || c_plus.cols() != ms.N ||
        c_minus.rows() != ms.K || c_minus.cols() != ms.N)
        throw ConfigError("state coefficient shape does not match truncation");
    StateCoefficients st;
    st.K = ms.K;
    st.N = ms.N;
    st.C_plus = c_plus;
    st.C_minus = c_minus;
    st.a.resize(ms.K, ms.N);
    st.ap.resize(ms.K, ms.N);
    const cplx iu(0.0, 1.0);
    for (int k = 0; k < ms.K; ++k)
        for (int l = 0; l < ms.N; ++l) {
            const cplx w = ms.omega_grid(k, l);
            st.a(k, l) = (c_plus(k, l) - c_minus(k, l)) / (2.0 * iu * w);
            st.ap(k, l) = 0.5 * (c_plus(k, l) + c_minus(k, l));
        }
    return st;
}

// Homogeneous (control-free) evolution of a state by time t, mode by mode:
//   a(t)  = a cos(wt) + a' sin(wt)/w,
//   a'(t) = -a w sin(wt) + a' cos(wt).
// Valid for complex w as well (imaginary frequencies grow hyperbolically).
inline StateCoefficients free_evolve(const StateCoefficients& st,
                                     const ModeSet& ms, double t) {
    if (st.K != ms.K || st.N != ms.N)
        throw ConfigError("state truncation does not match lattice");
    Eigen::MatrixXcd a(ms.K, ms.N), ap(ms.K, ms.N);
    for (int k = 0; k < ms.K; ++k)
        for (int l = 0; l < ms.N; ++l) {
            const cplx w = ms.omega_grid(k, l);
            const cplx c = std::cos(w * t);
            const cplx s = std::sin(w * t);
            a(k, l) = st.a(k, l) * c + st.ap(k, l) * s / w;
            ap(k, l) = -st.a(k, l) * w * s + st.ap(k, l) * c;
        }
    return encode_state(a, ap, ms);
}

// ── Norms ────────────────────────────────────────────────────────────────────

// Weighted coefficient norm (sum |c_i|^2 |w_i|^r)^(1/2).
inline double wr_norm(const std::vector<cplx>& coeffs,
                      const std::vector<double>& weights, double r) {
    if (coeffs.size() != weights.size())
        throw ConfigError("coefficient and weight counts differ");
    double sum = 0.0;
    for (size_t i = 0; i < coeffs.size(); ++i) {
        const double w = std::abs(weights[i]);
        if (r < 0.0 && w == 0.0)
            throw ZeroWeight("zero weight at index " + std::to_string(i) +
                             " with negative order r");
        sum += std::norm(coeffs[i]) * (r == 0.0 ? 1.0 : std::pow(w, r));
    }
    return std::sqrt(sum);
}

// The state norm used by synthesis and verification: the signed C encoding
// weighted by 1/k^2, a position-plus-weak-velocity energy proxy.
inline double state_norm(const StateCoefficients& st) {
    double sum = 0.0;
    for (int k = 0; k < st.K; ++k) {
        const double kk = static_cast<double>(k + 1) * (k + 1);
        for (int l = 0; l < st.N; ++l)
            sum += (std::norm(st.C_plus(k, l)) + std::norm(st.C_minus(k, l))) / kk;
    }
    return std::sqrt(sum);
}

}  // namespace wavectl
