// SPDX-License-Identifier: Apache-2.0
#pragma once

// Binary analog-beamformer search: tabu search over single-entry flips,
// projected gradient ascent on the [0,1] relaxation, the two hybrid
// schemes that search only the non-integer coordinates of the refined
// relaxed solution, plus exhaustive and random baselines.

#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "hbfsim/beamform.hpp"
#include "hbfsim/errors.hpp"
#include "hbfsim/rng.hpp"
#include "hbfsim/types.hpp"

namespace hbfsim {

enum class ObjectiveKind { f0, f1 };

struct SolverParams {
    int tabu_len = 0;      // L_ts; 0 means 4*N*N_RF (full) or 4*|S_I| (reduced)
    int max_iter = 300;    // N_iter
    int patience = 10;     // N_end: stop after this many unimproved iterations
    double refine_eps = 0.1;
    double pga_step_c = 3.0; // mu_i = c / sqrt(i+1)
    int pga_max_iter = 500;
    ObjectiveKind objective_kind = ObjectiveKind::f0;
    std::uint64_t seed = 0;
};

struct SearchTrace {
    struct Row {
        int iter = 0;
        double candidate = 0.0;
        double best = 0.0;
    };
    std::vector<Row> rows;
    std::string termination;
    int reduced_dim = -1; // |S_I| for the reduced-space algorithms
};

struct Shape {
    int n = 0;   // antennas
    int nrf = 0; // RF chains
};

// Bundles the per-subcarrier matrices M_k with the scaling gamma/sigma^2.
// value() scores candidates during discrete search (f0 or the Jensen bound
// f1); value_f0()/gradient() drive the relaxed ascent, which always works
// on f0 since that is the function the analytic gradient belongs to.
class AnalogObjective {
public:
    AnalogObjective(CMatSet mats, double gamma, double noise_var, int n_streams,
                    ObjectiveKind kind = ObjectiveKind::f0)
        : mats_(std::move(mats)), scale_(gamma / noise_var), n_streams_(n_streams),
          kind_(kind) {
        const int n = static_cast<int>(mats_[0].rows());
        h_e_ = CMat::Zero(n, n);
        for (const auto& m : mats_) h_e_ += m;
        h_e_ /= static_cast<double>(mats_.size());
        a_set_.reserve(mats_.size());
        for (const auto& m : mats_)
            a_set_.push_back(CMat::Identity(n, n) + scale_ * m);
        h_e_set_ = {h_e_};
        for (const auto& m : mats_) {
            const double mag = m.cwiseAbs().maxCoeff();
            if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(mag, 1.0)) {
                hermitian_ = false;
                break;
            }
        }
    }

    double value(const RMat& f) const {
        if (kind_ == ObjectiveKind::f1) return f1_value(f, h_e_, scale_);
        return f0_value(f, mats_, scale_, ObjectiveForm::qr, n_streams_);
    }
    double value_f0(const RMat& f) const {
        return f0_value(f, mats_, scale_, ObjectiveForm::pinv);
    }
    RMat gradient(const RMat& f) const { return gradient_f0(f, a_set_); }

    int dim() const { return static_cast<int>(mats_[0].rows()); }

    // True when value(f) reduces to the full determinant over col(F) at nrf
    // chains, so a determinant-ratio evaluator reproduces it to rounding.
    // Requires Hermitian matrices (value() symmetrizes the projected forms).
    bool flip_eval_ok(int nrf) const {
        if (!hermitian_) return false;
        if (kind_ == ObjectiveKind::f1) return true;
        return n_streams_ <= 0 || n_streams_ >= nrf;
    }
    // Matrix set seen by the determinant form: the per-subcarrier forms for
    // f0, the single averaged form for f1.
    const CMatSet& flip_mats() const {
        return kind_ == ObjectiveKind::f1 ? h_e_set_ : mats_;
    }
    double flip_scale() const { return scale_; }

private:
    CMatSet mats_;
    double scale_;
    int n_streams_;
    ObjectiveKind kind_;
    CMat h_e_;
    CMatSet a_set_;
    CMatSet h_e_set_;
    bool hermitian_ = true;
};

namespace detail {

inline std::string bit_key(const RMat& f) {
    std::string s;
    s.reserve(static_cast<std::size_t>(f.size()));
    for (int i = 0; i < f.rows(); ++i)
        for (int j = 0; j < f.cols(); ++j)
            s.push_back(f(i, j) != 0.0 ? '1' : '0');
    return s;
}

inline std::string bit_key(const std::vector<int>& bits) {
    std::string s;
    s.reserve(bits.size());
    for (int b : bits) s.push_back(b ? '1' : '0');
    return s;
}

// FIFO-bounded visited list with exact membership.
class TabuList {
public:
    explicit TabuList(int cap) : cap_(std::max(1, cap)) {}
    bool contains(const std::string& k) const { return set_.count(k) != 0; }
    void push(const std::string& k) {
        if (set_.count(k)) return;
        fifo_.push_back(k);
        set_.insert(k);
        if (static_cast<int>(fifo_.size()) > cap_) {
            set_.erase(fifo_.front());
            fifo_.pop_front();
        }
    }
    std::size_t distinct() const { return set_.size(); }

private:
    int cap_;
    std::deque<std::string> fifo_;
    std::unordered_set<std::string> set_;
};

// In-place complex Cholesky log-determinant. Reads only the lower triangle;
// nullopt when a pivot is not strictly positive (not positive definite).
inline std::optional<double> chol_logdet(CMat& a) {
    const int n = static_cast<int>(a.rows());
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
        double d = a(j, j).real();
        for (int k = 0; k < j; ++k) d -= std::norm(a(j, k));
        if (!(d > 0.0)) return std::nullopt;
        acc += std::log(d);
        const double root = std::sqrt(d);
        a(j, j) = root;
        for (int i = j + 1; i < n; ++i) {
            cplx s = a(i, j);
            for (int k = 0; k < j; ++k) s -= a(i, k) * std::conj(a(j, k));
            a(i, j) = s / root;
        }
    }
    return acc;
}

// Incremental scorer for single-entry flips of a binary analog matrix under
// the full-determinant objective. With V an orthonormal basis of col(F) and
// G = F^T F,
//   log det(I + s V^H M V) = log det(G + s F^H M F) - log det G,
// so caching Y_k = M_k F and X_k = F^H M_k F turns each one-entry flip into
// rank-two updates plus N_RF x N_RF Cholesky factorizations instead of a
// fresh decomposition of the projected channel. Entries must be 0/1: then
// det(F^T F) is a nonnegative integer and full column rank is decided
// exactly by det >= 1 (checked as det > 1/2 to absorb rounding).
class FlipEvaluator {
public:
    FlipEvaluator(const CMatSet& mats, double scale, const RMat& f)
        : mats_(&mats), scale_(scale) {
        mdiag_.reserve(mats.size());
        for (const auto& m : mats) mdiag_.push_back(m.diagonal().real());
        move_to(f);
    }

    // Re-centers the cache on a new binary matrix.
    void move_to(const RMat& f) {
        f_ = f;
        for (int i = 0; i < f_.size(); ++i)
            if (f_(i) != 0.0 && f_(i) != 1.0)
                throw std::invalid_argument("FlipEvaluator: entries must be 0 or 1");
        const CMat fc = f_.cast<cplx>();
        g_ = f_.transpose() * f_;
        const std::size_t count = mats_->size();
        y_.resize(count);
        x_.resize(count);
        for (std::size_t k = 0; k < count; ++k) {
            y_[k] = (*mats_)[k] * fc;
            const CMat x = fc.adjoint() * y_[k];
            x_[k] = 0.5 * (x + x.adjoint());
        }
    }

    // Objective value after flipping entry (i, j), or nullopt when the flip
    // loses full column rank. Matches direct evaluation up to rounding; use
    // it to rank neighbors, and re-evaluate the chosen one directly when an
    // exact match with the plain evaluator is needed.
    std::optional<double> flip_value(int i, int j) const {
        const double delta = f_(i, j) != 0.0 ? -1.0 : 1.0;
        const int nrf = static_cast<int>(f_.cols());
        // G' = G + delta (r e_j^T + e_j r^T) + e_j e_j^T, r = row i of F.
        RMat g2 = g_;
        for (int a = 0; a < nrf; ++a) {
            const double ra = delta * f_(i, a);
            g2(a, j) += ra;
            g2(j, a) += ra;
        }
        g2(j, j) += 1.0;
        const CMat gc = g2.cast<cplx>();
        CMat tmp = gc;
        const std::optional<double> gl = chol_logdet(tmp);
        if (!gl || *gl < kLogHalf) return std::nullopt; // integer det(G') is 0
        double acc = 0.0;
        const double sd = scale_ * delta;
        for (std::size_t k = 0; k < x_.size(); ++k) {
            // X' = X + delta (e_j y + y^H e_j^T) + M_k(i,i) e_j e_j^T with
            // y = row i of Y_k; fold the objective scale into the update.
            tmp = gc + scale_ * x_[k];
            for (int c = 0; c < nrf; ++c) {
                const cplx yc = sd * y_[k](i, c);
                tmp(j, c) += yc;
                tmp(c, j) += std::conj(yc);
            }
            tmp(j, j) += scale_ * mdiag_[k](i);
            const std::optional<double> al = chol_logdet(tmp);
            if (!al) return std::nullopt;
            acc += *al - *gl;
        }
        return acc / (static_cast<double>(x_.size()) * std::numbers::ln2);
    }

private:
    static constexpr double kLogHalf = -0.6931471805599453;
    const CMatSet* mats_;
    double scale_;
    RMat f_;
    RMat g_;
    std::vector<CMat> y_;
    std::vector<CMat> x_;
    std::vector<RVec> mdiag_;
};

} // namespace detail

// Uniform random binary matrix, rejection-sampled to full rank.
inline AnalogBeamformer random_analog(Shape shape, Rng& rng, BfSide side = BfSide::precoder) {
    if (shape.n < shape.nrf)
        throw infeasible_error("random_analog: more chains than antennas");
    for (int attempt = 0; attempt < 1000; ++attempt) {
        RMat f(shape.n, shape.nrf);
        for (int i = 0; i < shape.n; ++i)
            for (int j = 0; j < shape.nrf; ++j)
                f(i, j) = rng.bernoulli(0.5) ? 1.0 : 0.0;
        if (is_full_column_rank(f)) return {std::move(f), side};
    }
    throw infeasible_error("random_analog: no full-rank draw in 1000 attempts");
}

// All single-entry flips that keep full rank, in row-major flip order.
inline std::vector<AnalogBeamformer> neighbor_set(const AnalogBeamformer& f) {
    std::vector<AnalogBeamformer> out;
    out.reserve(static_cast<std::size_t>(f.entries.size()));
    for (int i = 0; i < f.entries.rows(); ++i) {
        for (int j = 0; j < f.entries.cols(); ++j) {
            RMat flipped = f.entries;
            flipped(i, j) = 1.0 - flipped(i, j);
            if (is_full_column_rank(flipped))
                out.push_back({std::move(flipped), f.side});
        }
    }
    return out;
}

// Tabu search over the full binary space. Each iteration moves to the best
// neighbor outside the tabu list (downhill moves allowed, which is what
// lets the search leave local optima), tracks the best visited point, and
// stops once the best value has not improved for `patience` iterations.
inline std::pair<AnalogBeamformer, SearchTrace> tabu_search(
    const AnalogObjective& objective, Shape shape, const SolverParams& params,
    std::optional<AnalogBeamformer> init = std::nullopt) {
    Rng rng(params.seed);
    AnalogBeamformer cand = init ? std::move(*init) : random_analog(shape, rng);
    cand.check();

    const int cap = params.tabu_len > 0 ? params.tabu_len : 4 * shape.n * shape.nrf;
    detail::TabuList tabu(cap);
    tabu.push(detail::bit_key(cand.entries));

    double cand_val = objective.value(cand.entries);
    AnalogBeamformer best = cand;
    double best_val = cand_val;

    // Determinant-form objectives rank flips through the incremental
    // evaluator; the chosen move is then re-scored with the plain evaluator
    // so the recorded values never depend on which path ranked the scan.
    const int n_rows = static_cast<int>(cand.entries.rows());
    const int n_cols = static_cast<int>(cand.entries.cols());
    std::optional<detail::FlipEvaluator> fast;
    if (objective.flip_eval_ok(n_cols))
        fast.emplace(objective.flip_mats(), objective.flip_scale(), cand.entries);

    SearchTrace trace;
    int stall = 0;
    trace.termination = "max_iter";
    for (int it = 1; it <= params.max_iter; ++it) {
        double bn_val = -std::numeric_limits<double>::infinity();
        bool moved = false;
        if (fast) {
            int bi = -1;
            int bj = -1;
            std::string key = detail::bit_key(cand.entries);
            for (int i = 0; i < n_rows; ++i) {
                for (int j = 0; j < n_cols; ++j) {
                    auto& ch = key[static_cast<std::size_t>(i) * n_cols + j];
                    ch = ch == '1' ? '0' : '1';
                    const bool skip = tabu.contains(key);
                    ch = ch == '1' ? '0' : '1';
                    if (skip) continue;
                    const std::optional<double> v = fast->flip_value(i, j);
                    if (v && *v > bn_val) { // strict: ties keep the lowest index
                        bn_val = *v;
                        bi = i;
                        bj = j;
                    }
                }
            }
            if (bi >= 0) {
                cand.entries(bi, bj) = 1.0 - cand.entries(bi, bj);
                cand_val = objective.value(cand.entries);
                fast->move_to(cand.entries);
                moved = true;
            }
        } else {
            std::optional<AnalogBeamformer> bn;
            for (auto& nb : neighbor_set(cand)) {
                if (tabu.contains(detail::bit_key(nb.entries))) continue;
                const double v = objective.value(nb.entries);
                if (v > bn_val) { // strict: ties keep the lowest flipped index
                    bn_val = v;
                    bn = std::move(nb);
                }
            }
            if (bn) {
                cand = std::move(*bn);
                cand_val = bn_val;
                moved = true;
            }
        }
        if (moved) tabu.push(detail::bit_key(cand.entries));
        if (cand_val > best_val) {
            best_val = cand_val;
            best = cand;
            stall = 0;
        } else {
            ++stall;
        }
        trace.rows.push_back({it, cand_val, best_val});
        if (stall >= params.patience) {
            trace.termination = "patience";
            break;
        }
    }
    return {best, trace};
}

// Projected gradient ascent on the box relaxation F in [0,1]^{N x N_RF}.
// Diminishing steps mu = c/sqrt(i+1); stops at the first non-increase of
// f0 (or when the Gram matrices degenerate); returns the best iterate seen.
inline RMat pga(const AnalogObjective& objective, Shape shape, const SolverParams& params,
                Rng& rng) {
    RMat f;
    RMat grad;
    bool started = false;
    for (int attempt = 0; attempt < 5 && !started; ++attempt) {
        f.resize(shape.n, shape.nrf);
        for (int i = 0; i < shape.n; ++i)
            for (int j = 0; j < shape.nrf; ++j)
                f(i, j) = rng.uniform01();
        try {
            grad = objective.gradient(f);
            started = true;
        } catch (const ill_conditioned_error&) {
        }
    }
    if (!started)
        throw ill_conditioned_error("pga: no well-conditioned start in 5 attempts");

    double prev = objective.value_f0(f);
    RMat best = f;
    double best_val = prev;
    for (int i = 0; i < params.pga_max_iter; ++i) {
        const double mu = params.pga_step_c / std::sqrt(static_cast<double>(i + 1));
        RMat next = (f + mu * grad).cwiseMax(0.0).cwiseMin(1.0);
        double v;
        try {
            v = objective.value_f0(next);
        } catch (const ill_conditioned_error&) {
            break;
        }
        if (v > best_val) {
            best_val = v;
            best = next;
        }
        if (v <= prev) break; // stop once the objective no longer increases
        prev = v;
        f = std::move(next);
        try {
            grad = objective.gradient(f);
        } catch (const ill_conditioned_error&) {
            break;
        }
    }
    return best;
}

// Snap entries within eps of an integer to that integer.
inline RMat refine(const RMat& f_relaxed, double eps) {
    RMat out = f_relaxed;
    for (int i = 0; i < out.rows(); ++i) {
        for (int j = 0; j < out.cols(); ++j) {
            if (std::abs(out(i, j)) <= eps) out(i, j) = 0.0;
            else if (std::abs(out(i, j) - 1.0) <= eps) out(i, j) = 1.0;
        }
    }
    return out;
}

// Bernoulli rounding of the fractional entries; exact 0/1 pass through
// without consuming randomness. Row-major draw order.
inline RMat stochastic_round(const RMat& f, Rng& rng) {
    RMat out = f;
    for (int i = 0; i < out.rows(); ++i) {
        for (int j = 0; j < out.cols(); ++j) {
            const double x = out(i, j);
            if (x != 0.0 && x != 1.0) out(i, j) = rng.bernoulli(x) ? 1.0 : 0.0;
        }
    }
    return out;
}

namespace detail {

// Row-major flat indices of the non-integer entries after refinement.
inline std::vector<int> fractional_indices(const RMat& f) {
    std::vector<int> idx;
    for (int i = 0; i < f.rows(); ++i)
        for (int j = 0; j < f.cols(); ++j)
            if (f(i, j) != 0.0 && f(i, j) != 1.0)
                idx.push_back(i * static_cast<int>(f.cols()) + j);
    return idx;
}

inline RMat place_bits(const RMat& base, const std::vector<int>& index_set,
                       const std::vector<int>& bits) {
    RMat out = base;
    const int cols = static_cast<int>(base.cols());
    for (std::size_t p = 0; p < index_set.size(); ++p)
        out(index_set[p] / cols, index_set[p] % cols) = bits[p] ? 1.0 : 0.0;
    return out;
}

struct RelaxedStart {
    RMat refined;
    std::vector<int> index_set;
};

inline RelaxedStart relaxed_start(const AnalogObjective& objective, Shape shape,
                                  const SolverParams& params, Rng& rng) {
    const RMat relaxed = pga(objective, shape, params, rng);
    RelaxedStart s;
    s.refined = refine(relaxed, params.refine_eps);
    s.index_set = fractional_indices(s.refined);
    return s;
}

} // namespace detail

// Binary candidates over the reduced coordinate set S_I from a refined PGA
// solution; the integer entries stay frozen at their snapped values.
struct ReducedCandidate {
    std::vector<int> bits;
    std::vector<int> index_set;
};

// PGA-initialized tabu search on the reduced space B^{|S_I|}. Rank-deficient
// recoveries are skipped rather than flipped around, so the neighbor scan
// is over bit flips with feasibility checked after recovery.
inline std::pair<AnalogBeamformer, SearchTrace> pga_ts(const AnalogObjective& objective,
                                                       Shape shape,
                                                       const SolverParams& params,
                                                       BfSide side = BfSide::precoder) {
    Rng rng(params.seed);
    const auto start = detail::relaxed_start(objective, shape, params, rng);
    const int dim = static_cast<int>(start.index_set.size());

    SearchTrace trace;
    trace.reduced_dim = dim;

    if (dim == 0) {
        AnalogBeamformer snapped{start.refined, side};
        if (snapped.feasible()) {
            trace.termination = "immediate";
            return {snapped, trace};
        }
        return tabu_search(objective, shape, params); // integer point infeasible
    }

    // Initial reduced candidate: stochastic rounding of the fractional basis.
    std::vector<int> q0(dim);
    bool feasible_start = false;
    for (int attempt = 0; attempt < 1000 && !feasible_start; ++attempt) {
        const RMat rounded = stochastic_round(start.refined, rng);
        for (int p = 0; p < dim; ++p) {
            const int idx = start.index_set[p];
            q0[p] = rounded(idx / shape.nrf, idx % shape.nrf) != 0.0 ? 1 : 0;
        }
        feasible_start = is_full_column_rank(detail::place_bits(start.refined, start.index_set, q0));
    }
    if (!feasible_start)
        return tabu_search(objective, shape, params);

    const int cap = params.tabu_len > 0 ? params.tabu_len : 4 * dim;
    detail::TabuList tabu(cap);
    tabu.push(detail::bit_key(q0));

    std::vector<int> cand = q0;
    RMat cand_mat = detail::place_bits(start.refined, start.index_set, cand);
    double cand_val = objective.value(cand_mat);
    RMat best_mat = cand_mat;
    double best_val = cand_val;

    // Reduced-coordinate flips are single-entry flips of the placed matrix,
    // so the same incremental ranking applies (see tabu_search).
    std::optional<detail::FlipEvaluator> fast;
    if (objective.flip_eval_ok(shape.nrf))
        fast.emplace(objective.flip_mats(), objective.flip_scale(), cand_mat);

    int stall = 0;
    trace.termination = "max_iter";
    for (int it = 1; it <= params.max_iter; ++it) {
        double bn_val = -std::numeric_limits<double>::infinity();
        int bn_flip = -1;
        std::string q_key = detail::bit_key(cand);
        for (int p = 0; p < dim; ++p) {
            auto& ch = q_key[static_cast<std::size_t>(p)];
            ch = ch == '1' ? '0' : '1';
            const bool skip = tabu.contains(q_key);
            ch = ch == '1' ? '0' : '1';
            if (skip) continue;
            const int row = start.index_set[p] / shape.nrf;
            const int col = start.index_set[p] % shape.nrf;
            if (fast) {
                const std::optional<double> v = fast->flip_value(row, col);
                if (v && *v > bn_val) {
                    bn_val = *v;
                    bn_flip = p;
                }
            } else {
                RMat m = cand_mat;
                m(row, col) = 1.0 - m(row, col);
                if (!is_full_column_rank(m)) continue;
                const double v = objective.value(m);
                if (v > bn_val) {
                    bn_val = v;
                    bn_flip = p;
                }
            }
        }
        if (bn_flip >= 0) {
            cand[bn_flip] = 1 - cand[bn_flip];
            const int idx = start.index_set[bn_flip];
            auto& entry = cand_mat(idx / shape.nrf, idx % shape.nrf);
            entry = 1.0 - entry;
            cand_val = objective.value(cand_mat);
            if (fast) fast->move_to(cand_mat);
            tabu.push(detail::bit_key(cand));
        }
        if (cand_val > best_val) {
            best_val = cand_val;
            best_mat = cand_mat;
            stall = 0;
        } else {
            ++stall;
        }
        trace.rows.push_back({it, cand_val, best_val});
        if (stall >= params.patience) {
            trace.termination = "patience";
            break;
        }
    }
    return {AnalogBeamformer{best_mat, side}, trace};
}

// PGA-initialized tabu random sampling: one stochastic-rounded sample of the
// fractional basis per iteration, evaluated only when it is new and feasible.
inline std::pair<AnalogBeamformer, SearchTrace> pga_tbrs(const AnalogObjective& objective,
                                                         Shape shape,
                                                         const SolverParams& params,
                                                         BfSide side = BfSide::precoder) {
    Rng rng(params.seed);
    const auto start = detail::relaxed_start(objective, shape, params, rng);
    const int dim = static_cast<int>(start.index_set.size());

    SearchTrace trace;
    trace.reduced_dim = dim;

    if (dim == 0) {
        AnalogBeamformer snapped{start.refined, side};
        if (snapped.feasible()) {
            trace.termination = "immediate";
            return {snapped, trace};
        }
        return tabu_search(objective, shape, params);
    }

    const int cap = params.tabu_len > 0 ? params.tabu_len : 4 * dim;
    detail::TabuList tabu(cap);
    const double space = dim < 60 ? std::pow(2.0, dim) : std::numeric_limits<double>::infinity();

    bool have_best = false;
    RMat best_mat;
    double best_val = -std::numeric_limits<double>::infinity();
    double last_eval = std::numeric_limits<double>::quiet_NaN();

    int stall = 0;
    trace.termination = "max_iter";
    for (int it = 1; it <= params.max_iter; ++it) {
        const RMat sample = stochastic_round(start.refined, rng);
        std::vector<int> q(dim);
        for (int p = 0; p < dim; ++p) {
            const int idx = start.index_set[p];
            q[p] = sample(idx / shape.nrf, idx % shape.nrf) != 0.0 ? 1 : 0;
        }
        const std::string key = detail::bit_key(q);
        bool improved = false;
        if (!tabu.contains(key)) {
            tabu.push(key);
            const RMat m = detail::place_bits(start.refined, start.index_set, q);
            if (is_full_column_rank(m)) {
                const double v = objective.value(m);
                last_eval = v;
                if (!have_best || v > best_val) {
                    best_val = v;
                    best_mat = m;
                    have_best = true;
                    improved = true;
                }
            }
        }
        if (improved) stall = 0;
        else ++stall;
        trace.rows.push_back({it, last_eval, have_best ? best_val : last_eval});
        if (stall >= params.patience) {
            trace.termination = "patience";
            break;
        }
        if (static_cast<double>(tabu.distinct()) >= space) {
            trace.termination = "exhausted";
            break;
        }
    }
    if (!have_best)
        return tabu_search(objective, shape, params);
    return {AnalogBeamformer{best_mat, side}, trace};
}

// Enumerate every binary matrix (bit j of the index is the row-major entry
// j); guard keeps the 2^(N*N_RF) loop within desk scale.
inline AnalogBeamformer exhaustive_search(const AnalogObjective& objective, Shape shape,
                                          BfSide side = BfSide::precoder) {
    const int bits = shape.n * shape.nrf;
    if (bits > 24)
        throw std::invalid_argument("exhaustive_search: N*N_RF above the 24-bit guard");
    double best_val = -std::numeric_limits<double>::infinity();
    std::optional<RMat> best;
    for (std::uint64_t x = 1; x < (1ull << bits); ++x) {
        RMat f(shape.n, shape.nrf);
        for (int j = 0; j < bits; ++j)
            f(j / shape.nrf, j % shape.nrf) = (x >> j) & 1ull ? 1.0 : 0.0;
        if (!is_full_column_rank(f)) continue;
        const double v = objective.value(f);
        if (v > best_val) { // strict: ties keep the smallest enumeration index
            best_val = v;
            best = std::move(f);
        }
    }
    if (!best)
        throw infeasible_error("exhaustive_search: no feasible matrix for this shape");
    return {*best, side};
}

} // namespace hbfsim
