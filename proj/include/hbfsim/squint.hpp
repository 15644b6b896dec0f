// SPDX-License-Identifier: Apache-2.0
#pragma once

// Beam-squint analytics: normalized array gains of phase-shifter and
// switch networks, the beam squint ratio (exact subcarrier sum and the
// N*b*Delta/8 closed form), and expected array gains (exact quadrature
// plus the interpolated closed approximations).

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "hbfsim/quadrature.hpp"

namespace hbfsim {

struct SquintParams {
    int n = 1;            // antennas
    double frac_bw = 0.0; // b = B / f_c
    double spacing = 0.5; // Delta
    int k = 1;            // subcarriers, used by the exact forms

    // Relative subcarrier offset c_k = (k - (K+1)/2) / K, k 1-based.
    double ck(int idx) const { return (idx - 0.5 * (k + 1)) / k; }
    // Normalized subcarrier frequency xi_k = f_k / f_c.
    double xi(int idx) const { return 1.0 + ck(idx) * frac_bw; }
};

struct SwitchVector {
    Eigen::VectorXi entries;

    int active() const { return entries.sum(); }
    void check() const {
        for (int i = 0; i < entries.size(); ++i)
            if (entries(i) != 0 && entries(i) != 1)
                throw std::invalid_argument("SwitchVector: entries must be 0 or 1");
        if (active() == 0)
            throw std::invalid_argument("SwitchVector: needs at least one active entry");
    }
    static SwitchVector all_ones(int n) {
        return {Eigen::VectorXi::Ones(n)};
    }
};

// Normalized gain of a phase-shifter array aligned at f_c, evaluated at
// normalized frequency xi = f/f_c and direction theta_bar = sin(theta):
// |sin(N*pi*Delta*(1-xi)*theta_bar) / (N*sin(pi*Delta*(1-xi)*theta_bar))|,
// with the removable singularity evaluated as its limit 1.
inline double ps_gain(double theta_bar, double xi, const SquintParams& p) {
    const double u = p.spacing * (1.0 - xi) * theta_bar;
    if (std::abs(u - std::round(u)) < 1e-9) return 1.0;
    const double x = std::numbers::pi * u;
    return std::abs(std::sin(p.n * x) / (p.n * std::sin(x)));
}

// Normalized gain of a switch network with on/off pattern w:
// (1/N) * |sum_n w_n * exp(-j*2*pi*(n-1)*Delta*xi*theta_bar)|.
inline double sw_gain(const SwitchVector& w, double theta_bar, double xi, double spacing) {
    w.check();
    const int n = static_cast<int>(w.entries.size());
    const std::complex<double> step =
        std::polar(1.0, -2.0 * std::numbers::pi * spacing * xi * theta_bar);
    std::complex<double> rot{1.0, 0.0};
    std::complex<double> acc{0.0, 0.0};
    for (int i = 0; i < n; ++i) {
        if (w.entries(i)) acc += rot;
        rot *= step;
    }
    return std::abs(acc) / n;
}

// Exact BSR. The angular integral of |theta_bar| over [-1,1] equals 1
// analytically, leaving the subcarrier sum:
// BSR = (N*Delta*b / 2K) * sum_k |c_k|.
inline double bsr_exact(const SquintParams& p) {
    double sum = 0.0;
    for (int k = 1; k <= p.k; ++k) sum += std::abs(p.ck(k));
    return p.n * p.spacing * p.frac_bw / (2.0 * p.k) * sum;
}

// Closed-form BSR approximation: N*b*Delta/8.
inline double bsr_closed(int n, double frac_bw, double spacing) {
    return n * frac_bw * spacing / 8.0;
}

// Expected PS array gain, exact: (1/2K) * sum_k integral_{-1}^{1} g(theta_bar, xi_k).
// The integrand is even in theta_bar, so each term is integrated over [0,1].
// Composite Gauss-Legendre with panels tied to the oscillation count
// N*Delta*b*|c_k| keeps the absolute error well under 1e-6.
inline double eag_ps_exact(const SquintParams& p) {
    double total = 0.0;
    for (int k = 1; k <= p.k; ++k) {
        const double xi = p.xi(k);
        const double zeros = p.n * p.spacing * p.frac_bw * std::abs(p.ck(k));
        const int panels = 8 * static_cast<int>(std::ceil(zeros)) + 8;
        total += integrate([&](double tb) { return ps_gain(tb, xi, p); }, 0.0, 1.0, panels);
    }
    return total / p.k;
}

// Interpolated PS expected array gain:
// (2 / 3*rho) * integral_0^rho |sinc(x)| dx + 1/3 with rho = N*Delta*b/2
// and sinc(x) = sin(pi*x)/(pi*x). The integrand kinks exactly at the
// integers, so integration runs per unit interval (smooth inside).
inline double eag_ps_approx(int n, double frac_bw, double spacing) {
    const double rho = n * spacing * frac_bw / 2.0;
    if (rho < 1e-12) return 1.0;
    auto abs_sinc = [](double x) {
        if (std::abs(x) < 1e-12) return 1.0;
        const double px = std::numbers::pi * x;
        return std::abs(std::sin(px) / px);
    };
    double acc = 0.0;
    for (double lo = 0.0; lo < rho; lo += 1.0) {
        const double hi = std::min(lo + 1.0, rho);
        acc += integrate(abs_sinc, lo, hi, 4);
    }
    return 1.0 / 3.0 + 2.0 * acc / (3.0 * rho);
}

// Expected switch array gain, exact: (1/2) * integral_{-1}^{1} ||Omega(tb) w||_1
// where Omega has entries (1/KN) * exp(-j*2*Delta*pi*xi_k*(n-1)*tb). The row
// sum equals (1/K) * sum_k sw_gain, even in theta_bar.
inline double eag_sw_exact(const SwitchVector& w, const SquintParams& p) {
    w.check();
    auto row_norm = [&](double tb) {
        double acc = 0.0;
        for (int k = 1; k <= p.k; ++k) acc += sw_gain(w, tb, p.xi(k), p.spacing);
        return acc / p.k;
    };
    const double osc = p.n * p.spacing * (1.0 + p.frac_bw / 2.0);
    const int panels = std::max(64, static_cast<int>(std::ceil(16.0 * osc)));
    return integrate(row_norm, 0.0, 1.0, panels);
}

// Interpolated switch expected array gain: ||w||_1 / (3N).
inline double eag_sw_approx(const SwitchVector& w) {
    w.check();
    return w.active() / (3.0 * static_cast<double>(w.entries.size()));
}

} // namespace hbfsim
