// SPDX-License-Identifier: Apache-2.0
#pragma once

// Wideband geometric channel: L_p scattering paths, raised-cosine pulse
// shaping over D delay taps, and per-subcarrier frequency-domain matrices
// whose array responses depend on the subcarrier frequency (beam squint).

#include <cmath>
#include <cstdint>
#include <numbers>

#include "hbfsim/config.hpp"
#include "hbfsim/errors.hpp"
#include "hbfsim/rng.hpp"
#include "hbfsim/types.hpp"

namespace hbfsim {

struct PathSet {
    CVec gain;   // alpha_l ~ CN(0,1)
    RVec delay;  // tau_l ~ U[0, (D-1)*T_s]
    RVec aoa;    // theta_l^r ~ U[-pi/2, pi/2]
    RVec aod;    // theta_l^t ~ U[-pi/2, pi/2]
};

struct ChannelRealization {
    CMatSet matrices; // H_k, N_R x N_T, index 0 <-> k = 1
    PathSet paths;
    std::uint64_t seed = 0;
};

// ULA steering vector at frequency f for an array phased at f_c:
// entry m is (1/sqrt(n)) * exp(-j*2*pi*m*Delta*(f/f_c)*sin(theta)).
inline CVec array_response(double theta, double f, int n, double spacing, double carrier) {
    if (n < 1) throw std::invalid_argument("array_response: n must be >= 1");
    if (f <= 0.0 || carrier <= 0.0)
        throw std::invalid_argument("array_response: frequencies must be positive");
    const double phase_step = -2.0 * std::numbers::pi * spacing * (f / carrier) * std::sin(theta);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    CVec a(n);
    for (int m = 0; m < n; ++m)
        a(m) = std::polar(scale, phase_step * m);
    return a;
}

// Raised-cosine pulse p(t) with the removable singularity at t = +-T_s/(2*beta)
// evaluated by its analytic limit (pi/4)*sinc(1/(2*beta)). sinc is normalized:
// sinc(x) = sin(pi*x)/(pi*x).
inline double raised_cosine(double t, double ts, double beta) {
    if (ts <= 0.0) throw std::invalid_argument("raised_cosine: ts must be positive");
    if (beta <= 0.0 || beta > 1.0)
        throw std::invalid_argument("raised_cosine: beta must be in (0, 1]");
    auto sinc = [](double x) {
        if (std::abs(x) < 1e-12) return 1.0;
        const double px = std::numbers::pi * x;
        return std::sin(px) / px;
    };
    const double x = t / ts;
    const double denom = 1.0 - (2.0 * beta * x) * (2.0 * beta * x);
    if (std::abs(denom) < 1e-9)
        return std::numbers::pi / 4.0 * sinc(1.0 / (2.0 * beta));
    return sinc(x) * std::cos(std::numbers::pi * beta * x) / denom;
}

// f_k = f_c + (k - (K+1)/2) * B/K for k = 1..K; symmetric around f_c.
inline RVec subcarrier_frequencies(const SystemConfig& cfg) {
    const int K = cfg.n_subcarriers;
    RVec f(K);
    for (int k = 1; k <= K; ++k)
        f(k - 1) = cfg.carrier_hz + (k - 0.5 * (K + 1)) * cfg.bandwidth_hz / K;
    return f;
}

// Draw order is fixed for reproducibility: all gains (one Box-Muller pair
// each), then all delays, then all AoAs, then all AoDs, paths in index
// order within each block.
inline PathSet generate_paths(const SystemConfig& cfg, Rng& rng) {
    const int L = cfg.n_paths;
    PathSet p;
    p.gain.resize(L);
    p.delay.resize(L);
    p.aoa.resize(L);
    p.aod.resize(L);
    const double max_delay = (cfg.taps() - 1) * cfg.ts();
    constexpr double half_pi = std::numbers::pi / 2.0;
    for (int l = 0; l < L; ++l) p.gain(l) = rng.cnormal();
    for (int l = 0; l < L; ++l) p.delay(l) = rng.uniform(0.0, max_delay);
    for (int l = 0; l < L; ++l) p.aoa(l) = rng.uniform(-half_pi, half_pi);
    for (int l = 0; l < L; ++l) p.aod(l) = rng.uniform(-half_pi, half_pi);
    return p;
}

// Delay-domain tap at carrier f:
// H_f[d] = s * sum_l alpha_l * p(d*T_s - tau_l) * a_r(theta_l^r, f) a_t(theta_l^t, f)^H
inline CMat tap_channel(int d, double f, const PathSet& paths, const SystemConfig& cfg) {
    if (d < 0 || d >= cfg.taps())
        throw std::invalid_argument("tap_channel: tap index out of range");
    const double s = cfg.channel_norm
        ? std::sqrt(static_cast<double>(cfg.n_tx) * cfg.n_rx / cfg.n_paths)
        : 1.0;
    CMat h = CMat::Zero(cfg.n_rx, cfg.n_tx);
    for (int l = 0; l < cfg.n_paths; ++l) {
        const double pulse = raised_cosine(d * cfg.ts() - paths.delay(l), cfg.ts(), cfg.rolloff);
        if (pulse == 0.0) continue;
        const CVec ar = array_response(paths.aoa(l), f, cfg.n_rx, cfg.spacing, cfg.carrier_hz);
        const CVec at = array_response(paths.aod(l), f, cfg.n_tx, cfg.spacing, cfg.carrier_hz);
        h.noalias() += (s * pulse * paths.gain(l)) * (ar * at.adjoint());
    }
    return h;
}

// Frequency-domain channel per subcarrier:
// H_k = sum_{d=0}^{D-1} H_{f_k}[d] * exp(-j*2*pi*k*d/K), k = 1..K.
inline ChannelRealization generate_channel(const SystemConfig& cfg, std::uint64_t seed) {
    validate(cfg);
    Rng rng(seed);
    ChannelRealization out;
    out.seed = seed;
    out.paths = generate_paths(cfg, rng);
    const RVec freqs = subcarrier_frequencies(cfg);
    const int K = cfg.n_subcarriers;
    const int D = cfg.taps();
    out.matrices.reserve(K);
    for (int k = 1; k <= K; ++k) {
        CMat hk = CMat::Zero(cfg.n_rx, cfg.n_tx);
        for (int d = 0; d < D; ++d) {
            const double ang = -2.0 * std::numbers::pi * k * d / K;
            hk.noalias() += tap_channel(d, freqs(k - 1), out.paths, cfg) * std::polar(1.0, ang);
        }
        out.matrices.push_back(std::move(hk));
    }
    return out;
}

} // namespace hbfsim
