// SPDX-License-Identifier: Apache-2.0
#pragma once

// Small dense linear-algebra helpers shared by the beamforming and solver
// code: numerical rank, Hermitian inverse square root, projectors, and
// log-determinants of Hermitian positive definite matrices.

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "hbfsim/errors.hpp"
#include "hbfsim/types.hpp"

namespace hbfsim {

// Count of singular values above tol * sigma_max. Real-field rank; binary
// matrices have O(1) entries so the relative tolerance is safe.
inline int numerical_rank(const RMat& m, double tol = 1e-9) {
    Eigen::JacobiSVD<RMat> svd(m);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) <= 0.0) return 0;
    int r = 0;
    for (int i = 0; i < s.size(); ++i)
        if (s(i) > tol * s(0)) ++r;
    return r;
}

inline int numerical_rank(const CMat& m, double tol = 1e-9) {
    Eigen::JacobiSVD<CMat> svd(m);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) <= 0.0) return 0;
    int r = 0;
    for (int i = 0; i < s.size(); ++i)
        if (s(i) > tol * s(0)) ++r;
    return r;
}

inline bool is_full_column_rank(const RMat& m, double tol = 1e-9) {
    return numerical_rank(m, tol) == m.cols();
}

// Ratio of extreme singular values; infinity when numerically singular.
inline double condition_number(const CMat& m) {
    Eigen::JacobiSVD<CMat> svd(m);
    const auto& s = svd.singularValues();
    if (s.size() == 0) return 0.0;
    const double smin = s(s.size() - 1);
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    return s(0) / smin;
}

// (M)^{-1/2} of a Hermitian positive semidefinite matrix via its
// eigendecomposition; eigenvalues clamped below at 1e-12 before inversion
// to tolerate poorly conditioned binary Gram matrices.
inline CMat inv_sqrt_hermitian(const CMat& m) {
    Eigen::SelfAdjointEigenSolver<CMat> es(m);
    if (es.info() != Eigen::Success)
        throw ill_conditioned_error("inv_sqrt_hermitian: eigensolver failed");
    RVec d = es.eigenvalues();
    for (int i = 0; i < d.size(); ++i)
        d(i) = 1.0 / std::sqrt(std::max(d(i), 1e-12));
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

// Orthogonal projector onto the column space: P = W (W^H W)^{-1} W^H.
inline CMat projector(const CMat& w) {
    if (w.cols() == 0) throw std::invalid_argument("projector: empty matrix");
    Eigen::JacobiSVD<CMat> svd(w);
    const auto& s = svd.singularValues();
    if (s(0) <= 0.0 || s(s.size() - 1) <= 1e-9 * s(0))
        throw ill_conditioned_error("projector: input is rank deficient");
    const CMat gram = w.adjoint() * w;
    return w * gram.llt().solve(w.adjoint());
}

// log2 det of I + scale * M for Hermitian PSD M, via eigenvalues.
inline double log2_det_i_plus(const CMat& m, double scale) {
    Eigen::SelfAdjointEigenSolver<CMat> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw ill_conditioned_error("log2_det_i_plus: eigensolver failed");
    double acc = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        acc += std::log2(std::max(1.0 + scale * es.eigenvalues()(i), 1e-300));
    return acc;
}

} // namespace hbfsim
