// SPDX-License-Identifier: Apache-2.0
#pragma once

// Fixed-order composite Gauss-Legendre quadrature. Deterministic by
// construction: no adaptive subdivision, so results are identical across
// platforms and runs for the same panel count.

#include <array>
#include <cstddef>

namespace hbfsim {

namespace detail {
// 16-point Gauss-Legendre rule on [-1,1], positive half (rule is symmetric).
inline constexpr std::array<double, 8> kGl16Nodes = {
    0.0950125098376374401853, 0.2816035507792589132305,
    0.4580167776572273863424, 0.6178762444026437484467,
    0.7554044083550030338951, 0.8656312023878317438805,
    0.9445750230732325760780, 0.9894009349916499325962,
};
inline constexpr std::array<double, 8> kGl16Weights = {
    0.1894506104550684962854, 0.1826034150449235888667,
    0.1691565193950025381893, 0.1495959888165767320815,
    0.1246289712555338720525, 0.0951585116824927848099,
    0.0622535239386478928628, 0.0271524594117540948518,
};
} // namespace detail

// Integral of f over [a, b] with `panels` equal panels of 16-point GL each.
template <typename F>
double integrate(F&& f, double a, double b, int panels) {
    if (panels < 1) panels = 1;
    const double h = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        const double half = 0.5 * h;
        double acc = 0.0;
        for (std::size_t i = 0; i < detail::kGl16Nodes.size(); ++i) {
            const double dx = half * detail::kGl16Nodes[i];
            acc += detail::kGl16Weights[i] * (f(mid - dx) + f(mid + dx));
        }
        total += acc * half;
    }
    return total;
}

} // namespace hbfsim
