// Fixed-order quadrature kernels shared by the spectral and moment modules.
//
// Two schemes cover every integral in the library:
//  * composite 16-point Gauss-Legendre on uniform panels, for spatial inner
//    products of trigonometric eigenfunctions (spectrally accurate once the
//    panel count scales with the highest frequency present);
//  * cumulative composite Simpson on a uniform time grid, for Duhamel-type
//    running integrals where every prefix value is needed.
//
// The cumulative rule closes odd prefixes with the three-point Newton-Cotes
// half panel, keeping the local error at O(h^4) for every prefix length.

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace wavectl {

inline constexpr std::array<double, 8> kGauss16Nodes = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
    0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
    0.9445750230732326, 0.9894009349916499};

inline constexpr std::array<double, 8> kGauss16Weights = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
    0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
    0.0622535239386479, 0.0271524594117541};

// Integrate fn over [lo, hi] with `panels` uniform Gauss-Legendre panels.
template <typename Fn>
auto gauss_panels(Fn&& fn, double lo, double hi, int panels)
    -> decltype(fn(lo)) {
    if (panels < 1) throw std::invalid_argument("gauss_panels: panels < 1");
    using R = decltype(fn(lo));
    const double width = (hi - lo) / panels;
    R total{};
    for (int p = 0; p < panels; ++p) {
        const double mid = lo + (p + 0.5) * width;
        const double half = 0.5 * width;
        R acc{};
        for (std::size_t i = 0; i < kGauss16Nodes.size(); ++i) {
            const double dx = half * kGauss16Nodes[i];
            acc += kGauss16Weights[i] * (fn(mid + dx) + fn(mid - dx));
        }
        total += half * acc;
    }
    return total;
}

// Panel count so oscillations up to angular frequency `freq` over [0, len]
// are resolved well past double precision by the 16-point rule.
inline int panels_for_frequency(double freq, double len) {
    const double cycles = freq * len / (2.0 * 3.141592653589793238462643383279502884);
    const int panels = static_cast<int>(cycles) + 4;
    return panels < 4 ? 4 : panels;
}

// Composite Simpson over all n+1 uniformly spaced samples (h = spacing).
// Odd sample counts are closed with the three-point end rule.
template <typename T>
T simpson(const std::vector<T>& g, double h) {
    const std::size_t n = g.size();
    if (n < 3) throw std::invalid_argument("simpson: need at least 3 samples");
    T acc{};
    std::size_t i = 0;
    for (; i + 2 < n; i += 2)
        acc += (h / 3.0) * (g[i] + 4.0 * g[i + 1] + g[i + 2]);
    if (i + 1 < n)  // one interval left: Newton-Cotes half panel
        acc += (h / 12.0) * (-g[n - 3] + 8.0 * g[n - 2] + 5.0 * g[n - 1]);
    return acc;
}

// Running integral S_i = int_{t_0}^{t_i} g dt for every prefix of the grid.
template <typename T>
std::vector<T> cumulative_simpson(const std::vector<T>& g, double h) {
    const std::size_t n = g.size();
    if (n < 3) throw std::invalid_argument("cumulative_simpson: need at least 3 samples");
    std::vector<T> s(n);
    s[0] = T{};
    for (std::size_t i = 1; i < n; ++i) {
        if (i % 2 == 0) {
            s[i] = s[i - 2] + (h / 3.0) * (g[i - 2] + 4.0 * g[i - 1] + g[i]);
        } else if (i + 1 < n) {
            s[i] = s[i - 1] + (h / 12.0) * (5.0 * g[i - 1] + 8.0 * g[i] - g[i + 1]);
        } else {
            s[i] = s[i - 1] + (h / 12.0) * (-g[i - 2] + 8.0 * g[i - 1] + 5.0 * g[i]);
        }
    }
    return s;
}

}  // namespace wavectl
