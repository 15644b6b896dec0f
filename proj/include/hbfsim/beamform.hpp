// SPDX-License-Identifier: Apache-2.0
#pragma once

// Spectral efficiency, the analog design objective in its two algebraic
// forms, its gradient for projected ascent, and the closed-form digital
// precoder / MMSE combiner.

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "hbfsim/channel.hpp"
#include "hbfsim/errors.hpp"
#include "hbfsim/linalg.hpp"
#include "hbfsim/types.hpp"

namespace hbfsim {

enum class BfSide { precoder, combiner };

// Frequency-flat binary switch matrix (F_RF or W_RF); feasible when every
// entry is 0/1 and the real-field numerical rank equals the column count.
struct AnalogBeamformer {
    RMat entries;
    BfSide side = BfSide::precoder;

    int antennas() const { return static_cast<int>(entries.rows()); }
    int chains() const { return static_cast<int>(entries.cols()); }
    CMat as_complex() const { return entries.cast<cplx>(); }

    bool is_binary() const {
        for (int j = 0; j < entries.cols(); ++j)
            for (int i = 0; i < entries.rows(); ++i)
                if (entries(i, j) != 0.0 && entries(i, j) != 1.0) return false;
        return true;
    }
    bool feasible() const { return is_binary() && is_full_column_rank(entries); }
    void check() const {
        if (!is_binary())
            throw std::invalid_argument("AnalogBeamformer: entries must be 0 or 1");
        if (!is_full_column_rank(entries))
            throw infeasible_error("AnalogBeamformer: rank below chain count");
    }
};

// One digital beamformer (N_RF x N_S) per subcarrier.
using DigitalBeamformerSet = CMatSet;

// Per-subcarrier effective quantities driving the analog searches.
struct EffectiveChannelSet {
    CMatSet p_t; // projector P_t[k], N_R x N_R
    CMatSet h_t; // H_k^H P_t[k] H_k, N_T x N_T
    CMatSet t_k; // H_k F_k F_k^H H_k^H, N_R x N_R
    CMat h_e;    // (1/K) sum_k h_t[k]
};

// h_t[k] = H_k^H P_t[k] H_k and the subcarrier average h_e. An empty
// projector set means P_t[k] = I (the pipeline's initialization).
inline EffectiveChannelSet make_effective_tx(const ChannelRealization& h, const CMatSet& p_t) {
    EffectiveChannelSet eff;
    eff.p_t = p_t;
    const std::size_t K = h.matrices.size();
    eff.h_t.reserve(K);
    for (std::size_t k = 0; k < K; ++k) {
        const CMat& hk = h.matrices[k];
        CMat ht = p_t.empty() ? CMat(hk.adjoint() * hk)
                              : CMat(hk.adjoint() * p_t[k] * hk);
        // Symmetrize: the quadratic form is Hermitian up to rounding.
        ht = 0.5 * (ht + ht.adjoint()).eval();
        eff.h_t.push_back(std::move(ht));
    }
    eff.h_e = CMat::Zero(eff.h_t[0].rows(), eff.h_t[0].cols());
    for (const auto& ht : eff.h_t) eff.h_e += ht;
    eff.h_e /= static_cast<double>(K);
    return eff;
}

// t_k = H_k F_k F_k^H H_k^H for the combiner-side search.
inline CMatSet make_effective_rx(const ChannelRealization& h, const CMatSet& f_k) {
    CMatSet t;
    t.reserve(h.matrices.size());
    for (std::size_t k = 0; k < h.matrices.size(); ++k) {
        const CMat hf = h.matrices[k] * f_k[k];
        CMat tk = hf * hf.adjoint();
        tk = 0.5 * (tk + tk.adjoint()).eval();
        t.push_back(std::move(tk));
    }
    return t;
}

// R_k = log2 |I + (1/sigma^2) W_k^+ H_k F_k F_k^H H_k^H W_k| per subcarrier,
// W_k^+ the left pseudo-inverse. Evaluated through the algebraically equal
// Hermitian form det(I + (1/sigma^2) (H_k F_k)^H P_w (H_k F_k)) with P_w the
// projector onto the combiner column space (Sylvester determinant identity).
inline RVec spectral_efficiency(const ChannelRealization& h, const CMatSet& f,
                                const CMatSet& w, double noise_var) {
    const std::size_t K = h.matrices.size();
    if (f.size() != K || w.size() != K)
        throw std::invalid_argument("spectral_efficiency: need one F_k and W_k per subcarrier");
    RVec r(static_cast<int>(K));
    for (std::size_t k = 0; k < K; ++k) {
        if (w[k].isZero(0.0)) {
            // Moore-Penrose inverse of the zero combiner is zero: R_k = 0.
            r(static_cast<int>(k)) = 0.0;
            continue;
        }
        CMat pw;
        try {
            pw = projector(w[k]);
        } catch (const ill_conditioned_error&) {
            throw singular_combiner_error("spectral_efficiency: combiner lost column rank");
        }
        const CMat hf = h.matrices[k] * f[k];
        CMat m = hf.adjoint() * pw * hf;
        m = 0.5 * (m + m.adjoint()).eval();
        r(static_cast<int>(k)) = log2_det_i_plus(m, 1.0 / noise_var);
    }
    return r;
}

inline double average_se(const RVec& per_subcarrier) {
    return per_subcarrier.size() == 0 ? 0.0 : per_subcarrier.mean();
}

enum class ObjectiveForm { pinv, qr };

// Core objective on a real-valued matrix (relaxed or binary):
// f0(F) = (1/K) sum_k log2 |I + scale * F^+ M_k F|.
// The qr form sums log2(1 + scale*lambda_i(V^H M_k V)) over the top
// n_streams eigenvalues (all of them when n_streams = N_RF); pass
// n_streams <= 0 for the full determinant.
inline double f0_value(const RMat& f, const CMatSet& mats, double scale,
                       ObjectiveForm form, int n_streams = -1) {
    const int nrf = static_cast<int>(f.cols());
    const double K = static_cast<double>(mats.size());
    double acc = 0.0;
    if (form == ObjectiveForm::pinv) {
        const RMat gram = f.transpose() * f;
        Eigen::LLT<RMat> llt(gram);
        if (llt.info() != Eigen::Success)
            throw ill_conditioned_error("f0: Gram matrix not positive definite");
        const RMat pinv_f = llt.solve(f.transpose());
        for (const auto& m : mats) {
            const CMat x = pinv_f.cast<cplx>() * (m * f.cast<cplx>());
            const cplx det = (CMat::Identity(nrf, nrf) + scale * x).partialPivLu().determinant();
            acc += std::log2(std::abs(det));
        }
        return acc / K;
    }
    Eigen::HouseholderQR<RMat> qr(f);
    const RMat v = qr.householderQ() * RMat::Identity(f.rows(), nrf);
    const int top = (n_streams <= 0 || n_streams >= nrf) ? nrf : n_streams;
    for (const auto& m : mats) {
        CMat b = v.transpose().cast<cplx>() * m * v.cast<cplx>();
        b = 0.5 * (b + b.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<CMat> es(b, Eigen::EigenvaluesOnly);
        const auto& ev = es.eigenvalues(); // ascending
        for (int i = 0; i < top; ++i)
            acc += std::log2(std::max(1.0 + scale * ev(ev.size() - 1 - i), 1e-300));
    }
    return acc / K;
}

// f0 on a feasible binary beamformer, scale = gamma / sigma^2.
inline double analog_objective_f0(const AnalogBeamformer& f_rf, const EffectiveChannelSet& eff,
                                  double gamma, double noise_var, ObjectiveForm form,
                                  int n_streams = -1) {
    if (!is_full_column_rank(f_rf.entries))
        throw infeasible_error("analog_objective_f0: rank-deficient beamformer");
    return f0_value(f_rf.entries, eff.h_t, gamma / noise_var, form, n_streams);
}

// Jensen upper bound: f1 = log2 |I + (gamma/sigma^2) V^H H_e V|, V from QR.
inline double analog_objective_f1(const AnalogBeamformer& f_rf, const CMat& h_e,
                                  double gamma, double noise_var) {
    if (!is_full_column_rank(f_rf.entries))
        throw infeasible_error("analog_objective_f1: rank-deficient beamformer");
    const RMat& f = f_rf.entries;
    Eigen::HouseholderQR<RMat> qr(f);
    const RMat v = qr.householderQ() * RMat::Identity(f.rows(), f.cols());
    CMat b = v.transpose().cast<cplx>() * h_e * v.cast<cplx>();
    b = 0.5 * (b + b.adjoint()).eval();
    return log2_det_i_plus(b, gamma / noise_var);
}

inline double f1_value(const RMat& f, const CMat& h_e, double scale) {
    Eigen::HouseholderQR<RMat> qr(f);
    const RMat v = qr.householderQ() * RMat::Identity(f.rows(), f.cols());
    CMat b = v.transpose().cast<cplx>() * h_e * v.cast<cplx>();
    b = 0.5 * (b + b.adjoint()).eval();
    return log2_det_i_plus(b, scale);
}

// Gradient of f0 (bits) at a real interior point:
// (1/ln 2) * Re{ (2/K) sum_k A_k F (F^H A_k F)^{-1} - 2 F (F^H F)^{-1} }
// with A_k = I + scale * M_k supplied by the caller.
inline RMat gradient_f0(const RMat& f, const CMatSet& a_set) {
    const int n = static_cast<int>(f.rows());
    const int nrf = static_cast<int>(f.cols());
    const RMat gram = f.transpose() * f;
    if (condition_number(gram.cast<cplx>()) > 1e12)
        throw ill_conditioned_error("gradient_f0: F^H F near singular");
    CMat sum = CMat::Zero(n, nrf);
    const CMat fc = f.cast<cplx>();
    for (const auto& a : a_set) {
        const CMat af = a * fc;
        const CMat s = fc.adjoint() * af;
        if (condition_number(s) > 1e12)
            throw ill_conditioned_error("gradient_f0: F^H A_k F near singular");
        sum += af * s.partialPivLu().solve(CMat::Identity(nrf, nrf));
    }
    const RMat second = gram.llt().solve(f.transpose()).transpose();
    const RMat grad = (2.0 / static_cast<double>(a_set.size())) * sum.real() - 2.0 * second;
    return grad / std::numbers::ln2;
}

// F_BB[k] = (F_RF^H F_RF)^{-1/2} V_k sqrt(gamma): V_k holds the top-N_S right
// singular vectors of H_eff[k] = P_t[k] H_k F_RF (F_RF^H F_RF)^{-1/2}, gamma
// = P_b / N_S (equal power). Transmit power per subcarrier is exactly P_b.
inline DigitalBeamformerSet digital_precoder_core(const CMat& f_rf, const ChannelRealization& h,
                                                  const CMatSet& p_t, double p_b, int n_streams) {
    const CMat whiten = inv_sqrt_hermitian(f_rf.adjoint() * f_rf);
    const CMat g = f_rf * whiten;
    const double gamma = p_b / n_streams;
    DigitalBeamformerSet out;
    out.reserve(h.matrices.size());
    for (std::size_t k = 0; k < h.matrices.size(); ++k) {
        CMat heff = h.matrices[k] * g;
        if (!p_t.empty()) heff = p_t[k] * heff;
        Eigen::JacobiSVD<CMat> svd(heff, Eigen::ComputeThinV);
        out.push_back(whiten * svd.matrixV().leftCols(n_streams) * std::sqrt(gamma));
    }
    return out;
}

inline DigitalBeamformerSet digital_precoder(const AnalogBeamformer& f_rf,
                                             const ChannelRealization& h, const CMatSet& p_t,
                                             double p_b, int n_streams) {
    if (!is_full_column_rank(f_rf.entries))
        throw infeasible_error("digital_precoder: rank-deficient analog precoder");
    return digital_precoder_core(f_rf.as_complex(), h, p_t, p_b, n_streams);
}

// MMSE baseband combiner: W_BB[k] = (J J^H + sigma^2 W_RF^H W_RF)^{-1} J,
// J = W_RF^H H_k F_k.
inline CMat mmse_combiner_core(const CMat& w_rf, const CMat& h_k, const CMat& f_k,
                               double noise_var) {
    const CMat j = w_rf.adjoint() * h_k * f_k;
    const CMat a = j * j.adjoint() + noise_var * (w_rf.adjoint() * w_rf);
    return a.llt().solve(j);
}

inline CMat mmse_combiner(const AnalogBeamformer& w_rf, const CMat& h_k, const CMat& f_k,
                          double noise_var) {
    if (!is_full_column_rank(w_rf.entries))
        throw infeasible_error("mmse_combiner: rank-deficient analog combiner");
    return mmse_combiner_core(w_rf.as_complex(), h_k, f_k, noise_var);
}

// Everything needed to package a full hybrid design.
struct HbfSolution {
    AnalogBeamformer f_rf;
    DigitalBeamformerSet f_bb;
    AnalogBeamformer w_rf;
    DigitalBeamformerSet w_bb;
    RVec se_per_subcarrier;
};

} // namespace hbfsim
