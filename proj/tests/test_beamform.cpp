// SPDX-License-Identifier: Apache-2.0
//
// Spectral efficiency, analog objectives, gradients, and the closed-form
// digital stages. The SE implementation is checked against a literal
// pseudo-inverse determinant oracle, and the gradient against central
// finite differences.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include <hbfsim/beamform.hpp>
#include <hbfsim/linalg.hpp>
#include <hbfsim/rng.hpp>

using namespace hbfsim;

namespace {

CMat random_cmat(int rows, int cols, Rng& rng) {
    CMat m(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) m(i, j) = rng.cnormal();
    return m;
}

RMat random_rmat(int rows, int cols, Rng& rng) {
    RMat m(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) m(i, j) = rng.uniform(0.2, 0.8);
    return m;
}

CMat random_hpsd(int n, Rng& rng) {
    const CMat x = random_cmat(n, n, rng);
    return x * x.adjoint();
}

ChannelRealization fake_channel(int n_rx, int n_tx, int k, Rng& rng) {
    ChannelRealization h;
    for (int i = 0; i < k; ++i) h.matrices.push_back(random_cmat(n_rx, n_tx, rng));
    return h;
}

// Literal R_k with the explicit left pseudo-inverse and a plain complex
// determinant; no Hermitian symmetrization anywhere.
double se_oracle(const CMat& h, const CMat& f, const CMat& w, double noise_var) {
    const CMat pinv = (w.adjoint() * w).inverse() * w.adjoint();
    const CMat q = h * f * f.adjoint() * h.adjoint() * w;
    const int ns = static_cast<int>(w.cols());
    const CMat inner = CMat::Identity(ns, ns) + (1.0 / noise_var) * pinv * q;
    return std::log2(std::abs(inner.determinant()));
}

} // namespace

TEST_CASE("numerical rank detects constructed low-rank matrices") {
    Rng rng(1);
    const CMat a = random_cmat(4, 2, rng);
    const CMat low = a * a.adjoint(); // rank 2 in a 4x4 frame
    REQUIRE(numerical_rank(low) == 2);
    REQUIRE(numerical_rank(CMat(CMat::Identity(5, 5))) == 5);
    REQUIRE(numerical_rank(CMat(CMat::Zero(3, 3))) == 0);
    RMat b(3, 2);
    b << 1, 2, 2, 4, 3, 6;
    REQUIRE_FALSE(is_full_column_rank(b));
}

TEST_CASE("condition number of the identity is 1") {
    REQUIRE(condition_number(CMat::Identity(4, 4)) == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Hermitian inverse square root inverts the matrix twice over") {
    Rng rng(2);
    const CMat a = random_hpsd(5, rng) + 0.5 * CMat::Identity(5, 5);
    const CMat x = inv_sqrt_hermitian(a);
    REQUIRE((x * a * x - CMat::Identity(5, 5)).norm() == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("projector is Hermitian, idempotent, and fixes the column space") {
    Rng rng(3);
    const CMat w = random_cmat(6, 3, rng);
    const CMat p = projector(w);
    REQUIRE((p - p.adjoint()).norm() == Catch::Approx(0.0).margin(1e-10));
    REQUIRE((p * p - p).norm() == Catch::Approx(0.0).margin(1e-10));
    REQUIRE((p * w - w).norm() == Catch::Approx(0.0).margin(1e-10));
    CMat sick(4, 2);
    sick.col(0) = random_cmat(4, 1, rng);
    sick.col(1) = 2.0 * sick.col(0);
    REQUIRE_THROWS_AS(projector(sick), ill_conditioned_error);
}

TEST_CASE("log2_det_i_plus matches the literal determinant") {
    Rng rng(4);
    const CMat m = random_hpsd(4, rng);
    const double s = 0.37;
    const cplx det = (CMat::Identity(4, 4) + s * m).determinant();
    REQUIRE(log2_det_i_plus(m, s) == Catch::Approx(std::log2(std::abs(det))).epsilon(1e-10));
}

TEST_CASE("spectral efficiency matches the literal pseudo-inverse oracle") {
    Rng rng(10);
    const int k = 3;
    const ChannelRealization h = fake_channel(4, 6, k, rng);
    CMatSet f, w;
    for (int i = 0; i < k; ++i) {
        f.push_back(random_cmat(6, 2, rng));
        w.push_back(random_cmat(4, 2, rng));
    }
    const RVec r = spectral_efficiency(h, f, w, 0.8);
    for (int i = 0; i < k; ++i)
        REQUIRE(r(i) ==
                Catch::Approx(se_oracle(h.matrices[i], f[i], w[i], 0.8)).epsilon(1e-9));
}

TEST_CASE("scalar link rate is log2(1 + |h|^2 P / sigma^2)") {
    ChannelRealization h;
    h.matrices.push_back(CMat::Constant(1, 1, cplx(0.6, -0.3)));
    const double p_b = 2.0, noise = 0.5;
    CMatSet f{CMat::Constant(1, 1, cplx(std::sqrt(p_b), 0.0))};
    CMatSet w{CMat::Constant(1, 1, cplx(1.0, 0.0))};
    const RVec r = spectral_efficiency(h, f, w, noise);
    const double expect = std::log2(1.0 + std::norm(cplx(0.6, -0.3)) * p_b / noise);
    REQUIRE(r(0) == Catch::Approx(expect).epsilon(1e-12));
}

TEST_CASE("zero combiner yields zero rate; collapsed combiner throws") {
    Rng rng(11);
    const ChannelRealization h = fake_channel(4, 4, 1, rng);
    CMatSet f{random_cmat(4, 2, rng)};
    CMatSet w_zero{CMat::Zero(4, 2)};
    REQUIRE(spectral_efficiency(h, f, w_zero, 1.0)(0) == 0.0);

    CMat collapsed(4, 2);
    collapsed.col(0) = random_cmat(4, 1, rng);
    collapsed.col(1) = collapsed.col(0);
    CMatSet w_bad{collapsed};
    REQUIRE_THROWS_AS(spectral_efficiency(h, f, w_bad, 1.0), singular_combiner_error);
}

TEST_CASE("rate is invariant to invertible digital recombinations of W") {
    Rng rng(12);
    const ChannelRealization h = fake_channel(4, 6, 2, rng);
    CMatSet f, w, w_rot;
    for (int i = 0; i < 2; ++i) {
        f.push_back(random_cmat(6, 2, rng));
        const CMat wi = random_cmat(4, 2, rng);
        const CMat g = random_cmat(2, 2, rng) + 2.0 * CMat::Identity(2, 2);
        w.push_back(wi);
        w_rot.push_back(wi * g);
    }
    const RVec a = spectral_efficiency(h, f, w, 0.7);
    const RVec b = spectral_efficiency(h, f, w_rot, 0.7);
    REQUIRE((a - b).norm() == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("pinv and qr objective forms agree at full stream count") {
    Rng rng(13);
    CMatSet mats;
    for (int i = 0; i < 3; ++i) mats.push_back(random_hpsd(6, rng));
    const RMat f = random_rmat(6, 3, rng);
    REQUIRE(f0_value(f, mats, 0.4, ObjectiveForm::pinv) ==
            Catch::Approx(f0_value(f, mats, 0.4, ObjectiveForm::qr, 3)).epsilon(1e-9));
    RMat b(6, 2);
    b << 1, 0, 1, 1, 0, 1, 1, 0, 0, 0, 1, 1;
    REQUIRE(f0_value(b, mats, 0.4, ObjectiveForm::pinv) ==
            Catch::Approx(f0_value(b, mats, 0.4, ObjectiveForm::qr, 2)).epsilon(1e-9));
}

TEST_CASE("qr form with a stream cap keeps only the strongest eigenvalues") {
    Rng rng(14);
    CMatSet mats{random_hpsd(5, rng)};
    const RMat f = random_rmat(5, 3, rng);
    Eigen::HouseholderQR<RMat> qr(f);
    const RMat v = qr.householderQ() * RMat::Identity(5, 3);
    CMat b = v.transpose().cast<cplx>() * mats[0] * v.cast<cplx>();
    b = 0.5 * (b + b.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<CMat> es(b, Eigen::EigenvaluesOnly);
    const double scale = 0.9;
    const double expect = std::log2(1.0 + scale * es.eigenvalues()(2));
    REQUIRE(f0_value(f, mats, scale, ObjectiveForm::qr, 1) ==
            Catch::Approx(expect).epsilon(1e-10));
}

TEST_CASE("the averaged objective is upper bounded by its Jensen form") {
    Rng rng(15);
    for (int rep = 0; rep < 5; ++rep) {
        CMatSet mats;
        CMat h_e = CMat::Zero(6, 6);
        for (int i = 0; i < 4; ++i) {
            mats.push_back(random_hpsd(6, rng));
            h_e += mats.back();
        }
        h_e /= 4.0;
        const RMat f = random_rmat(6, 2, rng);
        const double scale = 0.6;
        REQUIRE(f0_value(f, mats, scale, ObjectiveForm::qr, 2) <=
                f1_value(f, h_e, scale) + 1e-9);
    }
}

TEST_CASE("binary objectives reject rank-deficient beamformers") {
    Rng rng(16);
    CMatSet mats{random_hpsd(4, rng)};
    EffectiveChannelSet eff;
    eff.h_t = mats;
    eff.h_e = mats[0];
    RMat f(4, 2);
    f << 1, 1, 0, 0, 1, 1, 0, 0;
    const AnalogBeamformer bf{f, BfSide::precoder};
    REQUIRE_THROWS_AS(analog_objective_f0(bf, eff, 1.0, 1.0, ObjectiveForm::pinv),
                      infeasible_error);
    REQUIRE_THROWS_AS(analog_objective_f1(bf, eff.h_e, 1.0, 1.0), infeasible_error);
}

TEST_CASE("analytic gradient matches central finite differences") {
    Rng rng(17);
    auto check_shape = [&](int n, int nrf, int k) {
        CMatSet mats, a_set;
        const double scale = 0.5;
        for (int i = 0; i < k; ++i) {
            mats.push_back(random_hpsd(n, rng));
            a_set.push_back(CMat::Identity(n, n) + scale * mats.back());
        }
        const RMat f = random_rmat(n, nrf, rng);
        const RMat grad = gradient_f0(f, a_set);
        const double h = 1e-6;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < nrf; ++j) {
                RMat up = f, dn = f;
                up(i, j) += h;
                dn(i, j) -= h;
                const double fd = (f0_value(up, mats, scale, ObjectiveForm::pinv) -
                                   f0_value(dn, mats, scale, ObjectiveForm::pinv)) /
                                  (2.0 * h);
                REQUIRE(grad(i, j) == Catch::Approx(fd).margin(1e-5 * std::max(1.0, std::abs(fd))));
            }
        }
    };
    check_shape(6, 2, 3);
    check_shape(8, 4, 2);
}

TEST_CASE("gradient refuses nearly singular Gram matrices") {
    Rng rng(18);
    CMatSet a_set{CMat::Identity(4, 4) + random_hpsd(4, rng)};
    RMat f(4, 2);
    f.col(0) = RMat::Constant(4, 1, 0.5);
    f.col(1) = f.col(0);
    REQUIRE_THROWS_AS(gradient_f0(f, a_set), ill_conditioned_error);
}

TEST_CASE("digital precoder spends exactly the per-subcarrier power budget") {
    Rng rng(20);
    const ChannelRealization h = fake_channel(4, 8, 4, rng);
    RMat f(8, 2);
    f << 1, 0, 1, 1, 0, 1, 1, 0, 0, 1, 1, 1, 0, 0, 1, 0;
    const AnalogBeamformer f_rf{f, BfSide::precoder};
    const double p_b = 3.7;
    const auto f_bb = digital_precoder(f_rf, h, {}, p_b, 2);
    REQUIRE(f_bb.size() == 4);
    for (const auto& fk : f_bb) {
        const CMat full = f_rf.as_complex() * fk;
        REQUIRE((full * full.adjoint()).trace().real() ==
                Catch::Approx(p_b).epsilon(1e-10));
    }
}

TEST_CASE("SVD-based digital precoder beats random equal-power precoders") {
    Rng rng(21);
    const ChannelRealization h = fake_channel(4, 8, 3, rng);
    RMat f(8, 2);
    f << 1, 0, 1, 1, 0, 1, 1, 0, 0, 1, 1, 1, 0, 0, 1, 0;
    const AnalogBeamformer f_rf{f, BfSide::precoder};
    const double p_b = 2.0, noise = 0.4;
    const auto f_bb = digital_precoder(f_rf, h, {}, p_b, 2);

    CMatSet f_full, w;
    for (int k = 0; k < 3; ++k) {
        f_full.push_back(f_rf.as_complex() * f_bb[k]);
        w.push_back(h.matrices[k] * f_full[k]); // MRC-style full-rank combiner
    }
    const double se_opt = average_se(spectral_efficiency(h, f_full, w, noise));

    for (int rep = 0; rep < 10; ++rep) {
        CMatSet f_rand, w_rand;
        for (int k = 0; k < 3; ++k) {
            CMat bb = random_cmat(2, 2, rng);
            const CMat full = f_rf.as_complex() * bb;
            const double pw = (full * full.adjoint()).trace().real();
            bb *= std::sqrt(p_b / pw);
            f_rand.push_back(f_rf.as_complex() * bb);
            w_rand.push_back(h.matrices[k] * f_rand.back());
        }
        REQUIRE(average_se(spectral_efficiency(h, f_rand, w_rand, noise)) <= se_opt + 1e-9);
    }
}

TEST_CASE("digital precoder rejects rank-deficient analog beamformers") {
    Rng rng(22);
    const ChannelRealization h = fake_channel(4, 4, 1, rng);
    RMat f(4, 2);
    f << 1, 1, 1, 1, 0, 0, 1, 1;
    REQUIRE_THROWS_AS(digital_precoder({f, BfSide::precoder}, h, {}, 1.0, 2),
                      infeasible_error);
}

TEST_CASE("MMSE combiner matches the scalar hand value") {
    const CMat w_rf = CMat::Constant(1, 1, cplx(1.0, 0.0));
    const CMat h = CMat::Constant(1, 1, cplx(2.0, 1.0));
    const CMat f = CMat::Constant(1, 1, cplx(0.5, 0.0));
    const CMat w = mmse_combiner_core(w_rf, h, f, 0.3);
    // J = 1 + 0.5i, A = |J|^2 + 0.3 = 1.55.
    REQUIRE(w(0, 0).real() == Catch::Approx(1.0 / 1.55).epsilon(1e-12));
    REQUIRE(w(0, 0).imag() == Catch::Approx(0.5 / 1.55).epsilon(1e-12));
}

TEST_CASE("MMSE combiner minimizes the mean squared error") {
    Rng rng(23);
    const CMat w_rf = random_cmat(6, 3, rng); // analog stage fixed
    const CMat h = random_cmat(6, 5, rng);
    const CMat f = random_cmat(5, 2, rng);
    const double noise = 0.6;
    const CMat j = w_rf.adjoint() * h * f;
    const CMat a = j * j.adjoint() + noise * (w_rf.adjoint() * w_rf);
    auto mse = [&](const CMat& w) {
        return (CMat::Identity(2, 2) - w.adjoint() * j - j.adjoint() * w +
                w.adjoint() * a * w)
            .trace()
            .real() +
               2.0; // tr(I_2) from the symbol covariance, kept explicit
    };
    const CMat w_star = mmse_combiner_core(w_rf, h, f, noise);
    const double base = mse(w_star);
    for (int rep = 0; rep < 20; ++rep)
        REQUIRE(base <= mse(w_star + 0.01 * random_cmat(3, 2, rng)) + 1e-12);
}

TEST_CASE("effective channels match their definitions") {
    Rng rng(24);
    const ChannelRealization h = fake_channel(4, 6, 2, rng);

    const EffectiveChannelSet plain = make_effective_tx(h, {});
    for (int k = 0; k < 2; ++k) {
        const CMat expect = h.matrices[k].adjoint() * h.matrices[k];
        REQUIRE((plain.h_t[k] - expect).norm() == Catch::Approx(0.0).margin(1e-10));
    }
    REQUIRE((plain.h_e - 0.5 * (plain.h_t[0] + plain.h_t[1])).norm() ==
            Catch::Approx(0.0).margin(1e-10));

    CMatSet p_t;
    for (int k = 0; k < 2; ++k) p_t.push_back(projector(random_cmat(4, 2, rng)));
    const EffectiveChannelSet proj = make_effective_tx(h, p_t);
    for (int k = 0; k < 2; ++k) {
        const CMat expect = h.matrices[k].adjoint() * p_t[k] * h.matrices[k];
        REQUIRE((proj.h_t[k] - expect).norm() == Catch::Approx(0.0).margin(1e-10));
    }

    CMatSet f;
    for (int k = 0; k < 2; ++k) f.push_back(random_cmat(6, 2, rng));
    const CMatSet t = make_effective_rx(h, f);
    for (int k = 0; k < 2; ++k) {
        const CMat hf = h.matrices[k] * f[k];
        REQUIRE((t[k] - hf * hf.adjoint()).norm() == Catch::Approx(0.0).margin(1e-10));
    }
}
