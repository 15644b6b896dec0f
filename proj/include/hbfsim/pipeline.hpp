// SPDX-License-Identifier: Apache-2.0
#pragma once

// End-to-end schemes: the switch-based hybrid pipeline (analog searches
// plus closed-form digital stages), the full-digital upper baseline, and a
// simplified quantized phase-shifter baseline.

#include <cmath>
#include <numbers>
#include <string>

#include "hbfsim/beamform.hpp"
#include "hbfsim/channel.hpp"
#include "hbfsim/config.hpp"
#include "hbfsim/errors.hpp"
#include "hbfsim/solvers.hpp"

namespace hbfsim {

enum class SolverKind { ts, pga_ts, pga_tbrs, es, random_search };

inline AnalogBeamformer solve_analog(SolverKind kind, const AnalogObjective& objective,
                                     Shape shape, const SolverParams& params, BfSide side,
                                     SearchTrace* trace = nullptr) {
    switch (kind) {
    case SolverKind::ts: {
        auto [f, tr] = tabu_search(objective, shape, params);
        f.side = side;
        if (trace) *trace = std::move(tr);
        return f;
    }
    case SolverKind::pga_ts: {
        auto [f, tr] = pga_ts(objective, shape, params, side);
        if (trace) *trace = std::move(tr);
        return f;
    }
    case SolverKind::pga_tbrs: {
        auto [f, tr] = pga_tbrs(objective, shape, params, side);
        if (trace) *trace = std::move(tr);
        return f;
    }
    case SolverKind::es: {
        if (trace) trace->termination = "exhaustive";
        return exhaustive_search(objective, shape, side);
    }
    case SolverKind::random_search: {
        Rng rng(params.seed);
        if (trace) trace->termination = "random";
        return random_analog(shape, rng, side);
    }
    }
    throw std::invalid_argument("solve_analog: unknown solver");
}

struct PipelineDiag {
    SearchTrace precoder;
    SearchTrace combiner;

    int iterations() const {
        return static_cast<int>(precoder.rows.size() + combiner.rows.size());
    }
    std::string termination() const {
        const auto tag = [](const SearchTrace& t) {
            return t.termination.empty() ? std::string("none") : t.termination;
        };
        return "p:" + tag(precoder) + ";c:" + tag(combiner);
    }
};

// The switch-based hybrid scheme. Receive projectors start at identity, the
// chosen solver designs F_RF against H_k^H H_k, the digital precoder and the
// per-subcarrier effective channels T_k follow, the same solver designs W_RF
// (the power scaling is already inside T_k, so gamma = 1 there), and the
// MMSE baseband combiner closes the loop.
inline HbfSolution run_swhbf(const SystemConfig& cfg, const ChannelRealization& h,
                             SolverKind solver, const SolverParams& params,
                             PipelineDiag* diag = nullptr) {
    validate(cfg);
    const std::size_t K = h.matrices.size();
    const double gamma = cfg.power_budget / cfg.n_streams;

    SolverParams stage = params;
    HbfSolution sol;

    // Analog precoder against the transmit-side quadratic forms.
    const EffectiveChannelSet eff_tx = make_effective_tx(h, {});
    const AnalogObjective obj_tx(eff_tx.h_t, gamma, cfg.noise_var, cfg.n_streams,
                                 params.objective_kind);
    stage.seed = derive_stream(params.seed, 1);
    sol.f_rf = solve_analog(solver, obj_tx, {cfg.n_tx, cfg.n_rf}, stage, BfSide::precoder,
                            diag ? &diag->precoder : nullptr);

    sol.f_bb = digital_precoder(sol.f_rf, h, {}, cfg.power_budget, cfg.n_streams);
    CMatSet f_k(K);
    for (std::size_t k = 0; k < K; ++k)
        f_k[k] = sol.f_rf.as_complex() * sol.f_bb[k];

    // Analog combiner against the receive-side effective channels.
    const CMatSet t_k = make_effective_rx(h, f_k);
    const AnalogObjective obj_rx(t_k, 1.0, cfg.noise_var, cfg.n_streams,
                                 params.objective_kind);
    stage.seed = derive_stream(params.seed, 2);
    sol.w_rf = solve_analog(solver, obj_rx, {cfg.n_rx, cfg.n_rf}, stage, BfSide::combiner,
                            diag ? &diag->combiner : nullptr);

    sol.w_bb.resize(K);
    CMatSet w_k(K);
    for (std::size_t k = 0; k < K; ++k) {
        sol.w_bb[k] = mmse_combiner(sol.w_rf, h.matrices[k], f_k[k], cfg.noise_var);
        w_k[k] = sol.w_rf.as_complex() * sol.w_bb[k];
    }
    sol.se_per_subcarrier = spectral_efficiency(h, f_k, w_k, cfg.noise_var);
    return sol;
}

// Full-digital upper baseline: per-subcarrier SVD with equal power across
// the N_S strongest modes. R_k = sum_i log2(1 + (P_b/(N_S sigma^2)) s_i^2).
inline double dbf_baseline(const SystemConfig& cfg, const ChannelRealization& h) {
    validate(cfg);
    const double scale = cfg.power_budget / (cfg.n_streams * cfg.noise_var);
    double acc = 0.0;
    for (const auto& hk : h.matrices) {
        Eigen::JacobiSVD<CMat> svd(hk);
        const auto& s = svd.singularValues();
        for (int i = 0; i < cfg.n_streams && i < s.size(); ++i)
            acc += std::log2(1.0 + scale * s(i) * s(i));
    }
    return acc / static_cast<double>(h.matrices.size());
}

namespace detail {

// Nearest point of the 2^bits-point uniform phase grid; bits = 0 disables
// quantization (the infinite-resolution reference).
inline double quantize_phase(double phase, int bits) {
    if (bits <= 0) return phase;
    const double step = 2.0 * std::numbers::pi / static_cast<double>(1 << bits);
    return step * std::round(phase / step);
}

inline CMat phase_beamformer(const CMat& h_avg, int n, int n_rf, int bits) {
    Eigen::SelfAdjointEigenSolver<CMat> es(h_avg);
    if (es.info() != Eigen::Success)
        throw ill_conditioned_error("pshbf_baseline: eigensolver failed");
    const double mag = 1.0 / std::sqrt(static_cast<double>(n));
    CMat out(n, n_rf);
    for (int j = 0; j < n_rf; ++j) {
        // Eigenvalues ascend, so the strongest eigenvectors sit at the end.
        const CVec u = es.eigenvectors().col(es.eigenvectors().cols() - 1 - j);
        for (int i = 0; i < n; ++i)
            out(i, j) = std::polar(mag, quantize_phase(std::arg(u(i)), bits));
    }
    return out;
}

} // namespace detail

// Simplified phase-shifter baseline: constant-modulus analog stages built
// from the quantized phases of the dominant eigenvectors of the averaged
// effective channels; digital stages identical to the switch pipeline.
inline double pshbf_baseline(const SystemConfig& cfg, const ChannelRealization& h, int bits) {
    validate(cfg);
    if (bits != 0 && bits != 1 && bits != 2 && bits != 4)
        throw config_error("pshbf_baseline: bits must be 1, 2, 4, or 0 for unquantized");
    const std::size_t K = h.matrices.size();

    const EffectiveChannelSet eff_tx = make_effective_tx(h, {});
    const CMat f_rf = detail::phase_beamformer(eff_tx.h_e, cfg.n_tx, cfg.n_rf, bits);
    const DigitalBeamformerSet f_bb =
        digital_precoder_core(f_rf, h, {}, cfg.power_budget, cfg.n_streams);
    CMatSet f_k(K);
    for (std::size_t k = 0; k < K; ++k) f_k[k] = f_rf * f_bb[k];

    const CMatSet t_k = make_effective_rx(h, f_k);
    CMat t_avg = CMat::Zero(cfg.n_rx, cfg.n_rx);
    for (const auto& t : t_k) t_avg += t;
    t_avg /= static_cast<double>(K);
    const CMat w_rf = detail::phase_beamformer(t_avg, cfg.n_rx, cfg.n_rf, bits);

    CMatSet w_k(K);
    for (std::size_t k = 0; k < K; ++k)
        w_k[k] = w_rf * mmse_combiner_core(w_rf, h.matrices[k], f_k[k], cfg.noise_var);
    return average_se(spectral_efficiency(h, f_k, w_k, cfg.noise_var));
}

} // namespace hbfsim
