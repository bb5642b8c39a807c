#pragma once

// Divided differences of the exponential t -> exp(i w t) over a list of
// frequency nodes, used to re-basis clustered frequencies.  A cluster of d
// nearby nodes makes the plain exponentials nearly parallel in L^2(0,T); the
// divided-difference family
//   e~_1 = exp(i w_1 t),
//   e~_j = [w_1, ..., w_j] exp(i . t)   (j-th order divided difference)
// spans the same space with uniformly separated members.
//
// Evaluation is the numerically stable part: the textbook sum
// sum_m exp(i w_m t) / prod_{n != m} (w_m - w_n) cancels catastrophically for
// close nodes, so evaluation goes through
//   d = 2: exp(i m t) * 2i sin(delta t / 2) / delta  (m = midpoint),
//          with the analytic confluent limit i t exp(i m t) below a switch;
//   d >= 3: the (1, d) entry of exp(i t J), J = bidiag(nodes; superdiag 1),
//           computed by scaling-and-squaring on a truncated Taylor series.
// Both forms are exact rearrangements, not approximations.
//
// The data-side table (dd_prefix_table) applies the same triangular transform
// to moment targets; near-coincident nodes amplify the data differences, and
// that growth is inherent to the re-basis, not a defect.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wavectl/errors.hpp"
#include "wavectl/spectral_bvp.hpp"

namespace wavectl {

// ── Small dense matrix exponential ───────────────────────────────────────────

// Scaling-and-squaring Taylor exponential for the small bidiagonal blocks
// used here (dimension = cluster size).
inline Eigen::MatrixXcd expm_small(const Eigen::MatrixXcd& m) {
    const int d = static_cast<int>(m.rows());
    const double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    double scale = 1.0;
    while (norm1 * scale > 0.5) {
        scale *= 0.5;
        ++squarings;
    }
    Eigen::MatrixXcd a = m * scale;
    Eigen::MatrixXcd result = Eigen::MatrixXcd::Identity(d, d);
    Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(d, d);
    for (int k = 1; k <= 40; ++k) {
        term = (term * a) / static_cast<double>(k);
        result += term;
        if (term.cwiseAbs().maxCoeff() <= 1e-20 * result.cwiseAbs().maxCoeff())
            break;
    }
    for (int s = 0; s < squarings; ++s) result = result * result;
    return result;
}

// ── Stable evaluation of exponential divided differences ─────────────────────

// Value at time t of the divided difference of exp(i w t) over `nodes`.
// `confluent_switch` is the relative spacing below which the two-node form
// switches to its analytic limit.
inline cplx eval_edd(const std::vector<cplx>& nodes, double t,
                     double confluent_switch = 1e-8) {
    const int d = static_cast<int>(nodes.size());
    if (d == 0) throw ConfigError("divided difference needs at least one node");
    const cplx iu(0.0, 1.0);
    if (d == 1) return std::exp(iu * nodes[0] * t);
    if (d == 2) {
        const cplx mid = 0.5 * (nodes[0] + nodes[1]);
        const cplx delta = nodes[0] - nodes[1];
        const double scale =
            std::max({std::abs(nodes[0]), std::abs(nodes[1]), 1.0});
        if (std::abs(delta) <= confluent_switch * scale)
            return iu * t * std::exp(iu * mid * t);
        return std::exp(iu * mid * t) * 2.0 * iu * std::sin(0.5 * delta * t) /
               delta;
    }
    Eigen::MatrixXcd j = Eigen::MatrixXcd::Zero(d, d);
    for (int r = 0; r < d; ++r) {
        j(r, r) = nodes[r];
        if (r + 1 < d) j(r, r + 1) = 1.0;
    }
    return expm_small(iu * t * j)(0, d - 1);
}

// Time derivative of eval_edd.  With g(w) = e^{iwt}, d/dt applies the linear
// factor iw under the divided difference, and the last-node Leibniz rule
// dd[w g](w_1..w_d) = w_d dd[g](w_1..w_d) + dd[g](w_1..w_{d-1}) turns that
// into two stable evaluations over node prefixes.
inline cplx eval_edd_derivative(const std::vector<cplx>& nodes, double t,
                                double confluent_switch = 1e-8) {
    const cplx iu(0.0, 1.0);
    const cplx head = nodes.back() * eval_edd(nodes, t, confluent_switch);
    if (nodes.size() == 1) return iu * head;
    std::vector<cplx> shorter(nodes.begin(), nodes.end() - 1);
    return iu * (head + eval_edd(shorter, t, confluent_switch));
}

// ── Data-side divided differences ────────────────────────────────────────────

// Newton-style prefix table: result[j] = divided difference of the data over
// nodes[0..j].  Used to transform moment targets alongside the basis change.
inline std::vector<cplx> dd_prefix_table(const std::vector<cplx>& nodes,
                                         const std::vector<cplx>& values) {
    const int d = static_cast<int>(nodes.size());
    if (static_cast<int>(values.size()) != d)
        throw ConfigError("divided-difference node and value counts differ");
    std::vector<cplx> table = values;
    for (int r = 1; r < d; ++r)
        for (int i = d - 1; i >= r; --i) {
            const cplx denom = nodes[i] - nodes[i - r];
            if (denom == cplx(0.0))
                throw DuplicateFrequency(
                    "coincident nodes in divided-difference table");
            table[i] = (table[i] - table[i - 1]) / denom;
        }
    return table;
}

// ── Cluster detection ────────────────────────────────────────────────────────

struct Cluster {
    int start = 0;  // index into the sorted frequency list
    int size = 0;
};

// Maximal runs of consecutive (sorted) frequencies with spacing below
// `rel_threshold` times the mean magnitude of the family.
inline std::vector<Cluster> detect_clusters(const std::vector<cplx>& sorted_freqs,
                                            double rel_threshold = 1e-3) {
    std::vector<Cluster> out;
    const int m = static_cast<int>(sorted_freqs.size());
    if (m == 0) return out;
    double mean = 0.0;
    for (const auto& w : sorted_freqs) mean += std::abs(w);
    mean /= static_cast<double>(m);
    const double threshold = rel_threshold * std::max(mean, 1e-300);
    Cluster current{0, 1};
    for (int i = 1; i < m; ++i) {
        if (std::abs(sorted_freqs[i] - sorted_freqs[i - 1]) < threshold) {
            ++current.size;
        } else {
            out.push_back(current);
            current = {i, 1};
        }
    }
    out.push_back(current);
    return out;
}

}  // namespace wavectl
