#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "wavectl/quadrature.hpp"

namespace {

using wavectl::cumulative_simpson;
using wavectl::gauss_panels;
using wavectl::panels_for_frequency;
using wavectl::simpson;

constexpr double kPi = 3.141592653589793238462643383279502884;

TEST(GaussPanels, PolynomialExact) {
    // Degree-31 polynomial is exact for the 16-point rule on one panel.
    auto fn = [](double x) { return std::pow(x, 31.0); };
    const double got = gauss_panels(fn, 0.0, 1.0, 1);
    EXPECT_NEAR(got, 1.0 / 32.0, 1e-15);
}

TEST(GaussPanels, OscillatoryCosineProduct) {
    // int_0^pi cos(7x) cos(7x) dx = pi/2, the workhorse integral of the
    // spatial Gram assembly.
    auto fn = [](double x) { return std::cos(7.0 * x) * std::cos(7.0 * x); };
    const int panels = panels_for_frequency(14.0, kPi);
    EXPECT_NEAR(gauss_panels(fn, 0.0, kPi, panels), kPi / 2.0, 1e-12);
}

TEST(GaussPanels, ComplexIntegrand) {
    // int_0^1 e^{2 pi i x} dx = 0.
    auto fn = [](double x) {
        return std::exp(std::complex<double>(0.0, 2.0 * kPi * x));
    };
    const std::complex<double> got = gauss_panels(fn, 0.0, 1.0, 4);
    EXPECT_NEAR(std::abs(got), 0.0, 1e-14);
}

TEST(Simpson, MatchesClosedForm) {
    const int n = 200;
    const double h = kPi / n;
    std::vector<double> g(n + 1);
    for (int i = 0; i <= n; ++i) g[i] = std::sin(i * h);
    EXPECT_NEAR(simpson(g, h), 2.0, 1e-8);
}

TEST(Simpson, OddSampleCountClosed) {
    const int n = 201;  // even sample count -> odd interval count
    const double h = 1.0 / n;
    std::vector<double> g(n + 1);
    for (int i = 0; i <= n; ++i) g[i] = std::exp(i * h);
    EXPECT_NEAR(simpson(g, h), std::exp(1.0) - 1.0, 1e-9);
}

TEST(CumulativeSimpson, PrefixesMatchAntiderivative) {
    const int n = 512;
    const double h = 2.0 / n;
    std::vector<double> g(n + 1);
    for (int i = 0; i <= n; ++i) g[i] = std::cos(3.0 * i * h);
    const auto s = cumulative_simpson(g, h);
    for (int i = 0; i <= n; ++i) {
        const double want = std::sin(3.0 * i * h) / 3.0;
        EXPECT_NEAR(s[i], want, 1e-9) << "prefix " << i;
    }
}

TEST(CumulativeSimpson, FinalEntryAgreesWithSimpson) {
    const int n = 317;
    const double h = 1.0 / n;
    std::vector<double> g(n + 1);
    for (int i = 0; i <= n; ++i) g[i] = 1.0 / (1.0 + i * h);
    const auto s = cumulative_simpson(g, h);
    EXPECT_NEAR(s.back(), simpson(g, h), 1e-12);
    EXPECT_NEAR(s.back(), std::log(2.0), 1e-9);
}

}  // namespace
