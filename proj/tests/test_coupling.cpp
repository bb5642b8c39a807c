// Oracle and property tests for the coupling block: eigenstructure with the
// distinctness gate, controllability rank, control-moment normalization, and
// the spectral-gap collision scan.

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "wavectl/coupling.hpp"
#include "wavectl/errors.hpp"

namespace {

Eigen::MatrixXd random_symmetric(int n, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = u(rng);
    return 0.5 * (m + m.transpose());
}

Eigen::VectorXd random_vector(int n, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = u(rng);
    return v;
}

// ── Construction ─────────────────────────────────────────────────────────────

TEST(CouplingConstruction, RejectsAsymmetricEntries) {
    Eigen::MatrixXd a(2, 2);
    a << 0.0, 1.0, 2.0, 0.0;
    Eigen::VectorXd b = Eigen::VectorXd::Ones(2);
    EXPECT_THROW(wavectl::make_coupling(a, b), wavectl::NotSymmetric);
}

TEST(CouplingConstruction, RejectsZeroControlDirection) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(2, 2);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(2);
    EXPECT_THROW(wavectl::make_coupling(a, b), wavectl::ConfigError);
}

TEST(CouplingConstruction, SymmetrizesWithinTolerance) {
    Eigen::MatrixXd a(2, 2);
    a << 1.0, 0.5 + 1e-14, 0.5, 2.0;
    auto op = wavectl::make_coupling(a, Eigen::VectorXd::Ones(2));
    EXPECT_EQ(op.entries(0, 1), op.entries(1, 0));
}

// ── Eigenstructure ───────────────────────────────────────────────────────────

TEST(Decompose, DiagonalMatrix) {
    Eigen::MatrixXd a = Eigen::Vector2d(1.0, 2.0).asDiagonal();
    auto op = wavectl::make_coupling(a, Eigen::Vector2d(1.0, 1.0));
    auto dec = wavectl::decompose(op);
    EXPECT_NEAR(dec.lambdas(0), 1.0, 1e-14);
    EXPECT_NEAR(dec.lambdas(1), 2.0, 1e-14);
    // Eigenvectors are the standard basis up to sign.
    EXPECT_NEAR(std::abs(dec.phi(0, 0)), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(dec.phi(1, 1)), 1.0, 1e-14);
    EXPECT_NEAR(dec.phi(1, 0), 0.0, 1e-14);
    EXPECT_NEAR(dec.phi(0, 1), 0.0, 1e-14);
}

TEST(Decompose, ExchangeMatrix) {
    Eigen::MatrixXd a(2, 2);
    a << 0.0, 1.0, 1.0, 0.0;
    auto op = wavectl::make_coupling(a, Eigen::Vector2d(1.0, 0.0));
    auto dec = wavectl::decompose(op);
    EXPECT_NEAR(dec.lambdas(0), -1.0, 1e-14);
    EXPECT_NEAR(dec.lambdas(1), 1.0, 1e-14);
    const double r = 1.0 / std::sqrt(2.0);
    for (int c = 0; c < 2; ++c) {
        EXPECT_NEAR(std::abs(dec.phi(0, c)), r, 1e-14);
        EXPECT_NEAR(std::abs(dec.phi(1, c)), r, 1e-14);
    }
    // Opposite signs in the first column, matching signs in the second.
    EXPECT_LT(dec.phi(0, 0) * dec.phi(1, 0), 0.0);
    EXPECT_GT(dec.phi(0, 1) * dec.phi(1, 1), 0.0);
}

TEST(Decompose, RepeatedEigenvaluesRejected) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(2, 2);
    auto op = wavectl::make_coupling(a, Eigen::Vector2d(1.0, 0.0));
    EXPECT_THROW(wavectl::decompose(op), wavectl::RepeatedEigenvalues);
}

TEST(Decompose, SingleChannelSkipsDistinctnessGate) {
    Eigen::MatrixXd a(1, 1);
    a << 5.0;
    auto op = wavectl::make_coupling(a, Eigen::VectorXd::Ones(1));
    auto dec = wavectl::decompose(op);
    EXPECT_NEAR(dec.lambdas(0), 5.0, 1e-14);
}

TEST(Decompose, ReconstructsOperator) {
    std::mt19937 rng(11u);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 5);
        Eigen::MatrixXd a = random_symmetric(n, rng);
        auto op = wavectl::make_coupling(a, Eigen::VectorXd::Ones(n));
        wavectl::SpectralDecomposition dec;
        try {
            dec = wavectl::decompose(op);
        } catch (const wavectl::RepeatedEigenvalues&) {
            continue;  // measure-zero draw; skip
        }
        Eigen::MatrixXd rebuilt = Eigen::MatrixXd::Zero(n, n);
        for (int l = 0; l < n; ++l)
            rebuilt +=
                dec.lambdas(l) * dec.phi.col(l) * dec.phi.col(l).transpose();
        EXPECT_LE((rebuilt - op.entries).norm(), 1e-10 * op.entries.norm());
    }
}

TEST(Decompose, ResidualAndBiorthogonality) {
    std::mt19937 rng(12u);
    Eigen::MatrixXd a = random_symmetric(5, rng);
    auto op = wavectl::make_coupling(a, Eigen::VectorXd::Ones(5));
    auto dec = wavectl::decompose(op);
    for (int l = 0; l < 5; ++l) {
        Eigen::VectorXd resid =
            op.entries * dec.phi.col(l) - dec.lambdas(l) * dec.phi.col(l);
        EXPECT_LE(resid.norm(), 1e-10 * op.entries.norm());
    }
    Eigen::MatrixXd pairing = dec.phi.transpose() * dec.psi;
    EXPECT_LE((pairing - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(),
              1e-10);
}

// ── Controllability rank ─────────────────────────────────────────────────────

TEST(KalmanRank, DiagonalExamples) {
    Eigen::MatrixXd a = Eigen::Vector2d(1.0, 2.0).asDiagonal();
    EXPECT_EQ(wavectl::kalman_rank(wavectl::make_coupling(a, Eigen::Vector2d(1.0, 1.0))), 2);
    EXPECT_EQ(wavectl::kalman_rank(wavectl::make_coupling(a, Eigen::Vector2d(0.0, 1.0))), 1);
}

TEST(KalmanRank, FullRankAgainstDeterminantOracle) {
    // Distinct eigenvalues and a control direction with every eigen-component
    // nonzero force a nonsingular controllability matrix.
    std::mt19937 rng(13u);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 5;
        Eigen::MatrixXd g = Eigen::MatrixXd::NullaryExpr(n, n, [&]() {
            return std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
        });
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
        Eigen::MatrixXd q = qr.householderQ();
        Eigen::VectorXd lam(n);
        for (int i = 0; i < n; ++i) lam(i) = 1.0 + 0.7 * i;
        Eigen::MatrixXd a = q * lam.asDiagonal() * q.transpose();
        Eigen::VectorXd b = q * Eigen::VectorXd::Ones(n);  // all components 1
        auto op = wavectl::make_coupling(a, b);
        EXPECT_EQ(wavectl::kalman_rank(op), n);
        const double det = wavectl::controllability_matrix(op).determinant();
        EXPECT_GT(std::abs(det), 1e-8);
    }
}

TEST(KalmanRank, InvariantUnderControlScaling) {
    std::mt19937 rng(14u);
    Eigen::MatrixXd a = random_symmetric(4, rng);
    Eigen::VectorXd b = random_vector(4, rng);
    auto r1 = wavectl::kalman_rank(wavectl::make_coupling(a, b));
    auto r2 = wavectl::kalman_rank(wavectl::make_coupling(a, 3.7 * b));
    auto r3 = wavectl::kalman_rank(wavectl::make_coupling(a, -1e-3 * b));
    EXPECT_EQ(r1, r2);
    EXPECT_EQ(r1, r3);
}

TEST(KalmanRank, AgreesWithMomentCriterion) {
    // Full rank holds exactly when every control moment of the decomposition
    // is nonzero; both code paths must agree on random draws.
    std::mt19937 rng(15u);
    int checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 6);
        Eigen::MatrixXd a = random_symmetric(n, rng);
        Eigen::VectorXd b = random_vector(n, rng);
        if (b.cwiseAbs().maxCoeff() == 0.0) continue;
        auto op = wavectl::make_coupling(a, b);
        wavectl::SpectralDecomposition dec;
        try {
            dec = wavectl::decompose(op);
        } catch (const wavectl::RepeatedEigenvalues&) {
            continue;
        }
        const bool full_rank = wavectl::kalman_rank(op) == n;
        const bool all_moments =
            dec.control_moments.cwiseAbs().minCoeff() > 1e-10 * b.norm();
        EXPECT_EQ(full_rank, all_moments) << "n = " << n << ", trial " << trial;
        ++checked;
    }
    EXPECT_GE(checked, 90);
}

// ── Moment normalization ─────────────────────────────────────────────────────

TEST(NormalizeMoments, DiagonalClosedForm) {
    Eigen::MatrixXd a = Eigen::Vector2d(1.0, 2.0).asDiagonal();
    Eigen::VectorXd b(2);
    b << 2.0, 3.0;
    auto op = wavectl::make_coupling(a, b);
    auto dec = wavectl::normalize_control_moments(wavectl::decompose(op), b);
    // Sign conventions cancel: phi_l scales by m_l, psi_l by 1/m_l.
    EXPECT_NEAR(dec.phi(0, 0), 2.0, 1e-14);
    EXPECT_NEAR(dec.phi(1, 0), 0.0, 1e-14);
    EXPECT_NEAR(dec.psi(0, 0), 0.5, 1e-14);
    EXPECT_NEAR(dec.phi(1, 1), 3.0, 1e-14);
    EXPECT_NEAR(dec.psi(1, 1), 1.0 / 3.0, 1e-14);
    EXPECT_NEAR(dec.control_moments(0), 1.0, 1e-14);
    EXPECT_NEAR(dec.control_moments(1), 1.0, 1e-14);
}

TEST(NormalizeMoments, IdempotentAndPairingPreserved) {
    std::mt19937 rng(16u);
    Eigen::MatrixXd a = random_symmetric(5, rng);
    Eigen::VectorXd b = random_vector(5, rng);
    auto op = wavectl::make_coupling(a, b);
    auto once = wavectl::normalize_control_moments(wavectl::decompose(op), b);
    auto twice = wavectl::normalize_control_moments(once, b);
    EXPECT_LE((once.phi - twice.phi).cwiseAbs().maxCoeff(),
              1e-12 * std::max(1.0, once.phi.cwiseAbs().maxCoeff()));
    EXPECT_LE((once.psi - twice.psi).cwiseAbs().maxCoeff(),
              1e-12 * std::max(1.0, once.psi.cwiseAbs().maxCoeff()));
    Eigen::MatrixXd pairing = once.phi.transpose() * once.psi;
    EXPECT_LE((pairing - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(),
              1e-10);
}

TEST(NormalizeMoments, NamesUnreachableChannel) {
    Eigen::MatrixXd a = Eigen::Vector2d(1.0, 2.0).asDiagonal();
    Eigen::VectorXd b(2);
    b << 0.0, 1.0;
    auto op = wavectl::make_coupling(a, b);
    try {
        wavectl::normalize_control_moments(wavectl::decompose(op), b);
        FAIL() << "expected ZeroMoment";
    } catch (const wavectl::ZeroMoment& e) {
        EXPECT_EQ(e.l, 1);
    }
}

// ── Spectral-gap collision scan ──────────────────────────────────────────────

TEST(NonResonance, WellSeparatedSpectraAreClean) {
    std::vector<double> mus{1.0, 4.0, 9.0};
    std::vector<double> lambdas{0.3, 0.55};
    auto violations = wavectl::check_nonresonance(mus, lambdas);
    EXPECT_TRUE(violations.empty());
    // Exhaustive oracle over the same ranges.
    int count = 0;
    for (size_t k = 0; k < mus.size(); ++k)
        for (size_t l = 0; l < mus.size(); ++l)
            for (size_t i = 0; i < lambdas.size(); ++i)
                for (size_t j = 0; j < lambdas.size(); ++j)
                    if (k != l && i != j &&
                        std::abs((mus[k] - mus[l]) - (lambdas[i] - lambdas[j])) <=
                            1e-9)
                        ++count;
    EXPECT_EQ(count, 0);
}

TEST(NonResonance, ConstructedCollisionReported) {
    auto violations = wavectl::check_nonresonance({1.0, 4.0}, {0.0, 3.0});
    ASSERT_EQ(violations.size(), 2u);  // (2,1,2,1) and its mirror (1,2,1,2)
    bool found = false;
    for (const auto& v : violations)
        if (v.k == 2 && v.l == 1 && v.i == 2 && v.j == 1) {
            found = true;
            EXPECT_NEAR(v.mu_gap, 3.0, 1e-14);
            EXPECT_NEAR(v.lambda_gap, 3.0, 1e-14);
        }
    EXPECT_TRUE(found);
}

TEST(NonResonance, SingleEigenvalueIsVacuous) {
    auto violations = wavectl::check_nonresonance({1.0, 4.0, 9.0}, {5.0});
    EXPECT_TRUE(violations.empty());
}

}  // namespace
