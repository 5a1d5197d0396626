#pragma once

// Direct k-way partitioning of PPMI rows in cosine space, optimizing the
// H2 = I2/E1 criterion:
//   I2 = sum_k ||S_k||            with S_k the sum of the cluster's unit rows
//   E1 = sum_k n_k * cos(C_k, C)  with C_k/C the cluster/global centroids,
//                                 cosines clamped at >= 1e-12
// Greedy farthest-point seeding plus first-improvement single-move refinement;
// best of `restarts` independent seeds. Also: Calinski-Harabasz k selection,
// per-cluster descriptive/discriminative context scoring, and POS purity.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "depmine/dsm.hpp"
#include "depmine/parallel.hpp"

namespace depmine {

struct ClusterSolution {
    std::vector<uint32_t> assignment;  // row -> cluster id in [0, k)
    uint32_t k = 0;
    double h2 = 0;
    uint64_t seed = 0;

    std::vector<std::vector<uint32_t>> members() const {
        std::vector<std::vector<uint32_t>> m(k);
        for (uint32_t i = 0; i < assignment.size(); ++i) m[assignment[i]].push_back(i);
        return m;
    }
};

namespace detail {

constexpr double kCosEps = 1e-12;
constexpr double kMoveEps = 1e-10;

inline double sparse_dot_dense(const SparseMatrix& X, size_t row, const std::vector<double>& d) {
    double s = 0;
    for (size_t p = X.row_ptr[row]; p < X.row_ptr[row + 1]; ++p) s += X.val[p] * d[X.col[p]];
    return s;
}

inline double sparse_dot(const SparseMatrix& X, size_t a, size_t b) {
    double s = 0;
    size_t p = X.row_ptr[a], pe = X.row_ptr[a + 1];
    size_t q = X.row_ptr[b], qe = X.row_ptr[b + 1];
    while (p < pe && q < qe) {
        if (X.col[p] < X.col[q]) ++p;
        else if (X.col[q] < X.col[p]) ++q;
        else s += X.val[p] * X.val[q], ++p, ++q;
    }
    return s;
}

// Incremental H2 state over normalized rows.
class CriterionState {
  public:
    CriterionState(const SparseMatrix& xn, std::vector<uint32_t> assignment, uint32_t k)
        : xn_(xn), assign_(std::move(assignment)), k_(k) {
        m_.assign(xn_.n_cols, 0.0);
        row_norm2_.assign(xn_.n_rows, 0.0);
        for (size_t i = 0; i < xn_.n_rows; ++i) {
            double n2 = 0;
            for (size_t p = xn_.row_ptr[i]; p < xn_.row_ptr[i + 1]; ++p) {
                m_[xn_.col[p]] += xn_.val[p];
                n2 += xn_.val[p] * xn_.val[p];
            }
            row_norm2_[i] = n2;
        }
        m_norm_ = 0;
        for (double v : m_) m_norm_ += v * v;
        m_norm_ = std::sqrt(m_norm_);
        row_dot_m_.assign(xn_.n_rows, 0.0);
        for (size_t i = 0; i < xn_.n_rows; ++i) row_dot_m_[i] = sparse_dot_dense(xn_, i, m_);
        rebuild();
    }

    void rebuild() {
        sums_.assign(k_, std::vector<double>(xn_.n_cols, 0.0));
        size_.assign(k_, 0);
        for (size_t i = 0; i < xn_.n_rows; ++i) {
            auto& s = sums_[assign_[i]];
            for (size_t p = xn_.row_ptr[i]; p < xn_.row_ptr[i + 1]; ++p)
                s[xn_.col[p]] += xn_.val[p];
            ++size_[assign_[i]];
        }
        sum_norm2_.assign(k_, 0.0);
        sum_dot_m_.assign(k_, 0.0);
        i2_terms_.assign(k_, 0.0);
        e1_terms_.assign(k_, 0.0);
        i2_total_ = e1_total_ = 0;
        for (uint32_t c = 0; c < k_; ++c) {
            double n2 = 0, dm = 0;
            for (size_t j = 0; j < xn_.n_cols; ++j) {
                n2 += sums_[c][j] * sums_[c][j];
                dm += sums_[c][j] * m_[j];
            }
            sum_norm2_[c] = n2;
            sum_dot_m_[c] = dm;
            i2_terms_[c] = i2_term(n2);
            e1_terms_[c] = e1_term(size_[c], n2, dm);
            i2_total_ += i2_terms_[c];
            e1_total_ += e1_terms_[c];
        }
    }

    double i2_term(double norm2) const { return std::sqrt(std::max(0.0, norm2)); }

    double e1_term(size_t size, double norm2, double dot_m) const {
        double norm = std::sqrt(std::max(0.0, norm2));
        double cosv = kCosEps;
        if (norm > 0 && m_norm_ > 0) cosv = std::max(dot_m / (norm * m_norm_), kCosEps);
        return static_cast<double>(size) * cosv;
    }

    double h2() const { return i2_total_ / e1_total_; }

    // H2 if row r moved from cluster a to b; only the two touched clusters'
    // criterion terms change.
    double h2_after_move(size_t r, uint32_t a, uint32_t b) const {
        double dot_a = sparse_dot_dense(xn_, r, sums_[a]);
        double dot_b = sparse_dot_dense(xn_, r, sums_[b]);
        double v2 = row_norm2_[r];
        double a_n2 = sum_norm2_[a] - 2 * dot_a + v2;
        double b_n2 = sum_norm2_[b] + 2 * dot_b + v2;
        double a_dm = sum_dot_m_[a] - row_dot_m_[r];
        double b_dm = sum_dot_m_[b] + row_dot_m_[r];

        double i2 = i2_total_ - i2_terms_[a] - i2_terms_[b] + i2_term(a_n2) + i2_term(b_n2);
        double e1 = e1_total_ - e1_terms_[a] - e1_terms_[b] +
                    e1_term(size_[a] - 1, a_n2, a_dm) + e1_term(size_[b] + 1, b_n2, b_dm);
        return i2 / e1;
    }

    void apply_move(size_t r, uint32_t a, uint32_t b) {
        double dot_a = sparse_dot_dense(xn_, r, sums_[a]);
        double dot_b = sparse_dot_dense(xn_, r, sums_[b]);
        double v2 = row_norm2_[r];
        sum_norm2_[a] += -2 * dot_a + v2;
        sum_norm2_[b] += 2 * dot_b + v2;
        sum_dot_m_[a] -= row_dot_m_[r];
        sum_dot_m_[b] += row_dot_m_[r];
        for (size_t p = xn_.row_ptr[r]; p < xn_.row_ptr[r + 1]; ++p) {
            sums_[a][xn_.col[p]] -= xn_.val[p];
            sums_[b][xn_.col[p]] += xn_.val[p];
        }
        --size_[a];
        ++size_[b];
        assign_[r] = b;
        for (uint32_t c : {a, b}) {
            i2_total_ -= i2_terms_[c];
            e1_total_ -= e1_terms_[c];
            i2_terms_[c] = i2_term(sum_norm2_[c]);
            e1_terms_[c] = e1_term(size_[c], sum_norm2_[c], sum_dot_m_[c]);
            i2_total_ += i2_terms_[c];
            e1_total_ += e1_terms_[c];
        }
    }

    const std::vector<uint32_t>& assignment() const { return assign_; }
    size_t cluster_size(uint32_t c) const { return size_[c]; }
    double sum_norm2(uint32_t c) const { return sum_norm2_[c]; }
    double m_norm() const { return m_norm_; }
    double global_norm2() const {
        double s = 0;
        for (double v : row_norm2_) s += v;
        return s;
    }

  private:
    const SparseMatrix& xn_;
    std::vector<uint32_t> assign_;
    uint32_t k_;
    std::vector<double> m_;          // global sum of unit rows
    double m_norm_ = 0;
    std::vector<double> row_norm2_;  // 1 for nonzero rows, 0 for zero rows
    std::vector<double> row_dot_m_;
    std::vector<std::vector<double>> sums_;
    std::vector<size_t> size_;
    std::vector<double> sum_norm2_;
    std::vector<double> sum_dot_m_;
    std::vector<double> i2_terms_;
    std::vector<double> e1_terms_;
    double i2_total_ = 0;
    double e1_total_ = 0;
};

// Farthest-point seeding followed by nearest-center assignment.
inline std::vector<uint32_t> seed_assignment(const SparseMatrix& xn, uint32_t k, uint64_t seed) {
    const size_t n = xn.n_rows;
    std::vector<size_t> nonzero;
    for (size_t i = 0; i < n; ++i)
        if (xn.row_ptr[i + 1] > xn.row_ptr[i]) nonzero.push_back(i);

    std::mt19937_64 rng(seed);
    std::vector<size_t> centers;
    std::vector<char> is_center(n, 0);
    if (!nonzero.empty()) {
        size_t first = nonzero[rng() % nonzero.size()];
        centers.push_back(first);
        is_center[first] = 1;
        std::vector<double> max_cos(n, -1.0);
        for (size_t i = 0; i < n; ++i) max_cos[i] = sparse_dot(xn, i, first);
        while (centers.size() < k && centers.size() < nonzero.size()) {
            size_t best = SIZE_MAX;
            double best_cos = std::numeric_limits<double>::infinity();
            for (size_t i : nonzero) {
                if (is_center[i]) continue;
                if (max_cos[i] < best_cos) {
                    best_cos = max_cos[i];
                    best = i;
                }
            }
            if (best == SIZE_MAX) break;
            centers.push_back(best);
            is_center[best] = 1;
            for (size_t i = 0; i < n; ++i)
                max_cos[i] = std::max(max_cos[i], sparse_dot(xn, i, best));
        }
    }
    // pad with arbitrary rows when there are fewer nonzero rows than clusters
    for (size_t i = 0; i < n && centers.size() < k; ++i)
        if (!is_center[i]) {
            centers.push_back(i);
            is_center[i] = 1;
        }

    std::vector<uint32_t> assign(n, 0);
    for (size_t i = 0; i < n; ++i) {
        uint32_t best_c = 0;
        double best_cos = -std::numeric_limits<double>::infinity();
        for (uint32_t c = 0; c < centers.size(); ++c) {
            double cs = sparse_dot(xn, i, centers[c]);
            if (cs > best_cos) {
                best_cos = cs;
                best_c = c;
            }
        }
        assign[i] = best_c;
    }
    for (uint32_t c = 0; c < centers.size(); ++c) assign[centers[c]] = c;

    // repair empty clusters: donate the row least similar to its center
    std::vector<size_t> count(k, 0);
    for (uint32_t a : assign) ++count[a];
    for (uint32_t c = 0; c < k; ++c) {
        while (count[c] == 0) {
            size_t donor = SIZE_MAX;
            double worst = std::numeric_limits<double>::infinity();
            for (size_t i = 0; i < n; ++i) {
                if (count[assign[i]] <= 1 || is_center[i]) continue;
                double cs = sparse_dot(xn, i, centers[assign[i]]);
                if (cs < worst) {
                    worst = cs;
                    donor = i;
                }
            }
            if (donor == SIZE_MAX) throw std::runtime_error("cluster seeding: cannot fill cluster");
            --count[assign[donor]];
            assign[donor] = c;
            ++count[c];
        }
    }
    return assign;
}

inline ClusterSolution cluster_once(const SparseMatrix& xn, uint32_t k, uint64_t seed) {
    CriterionState st(xn, seed_assignment(xn, k, seed), k);
    double cur = st.h2();
    const size_t n = xn.n_rows;
    bool moved = true;
    size_t guard = 0;
    while (moved) {
        if (++guard > 1000) throw std::runtime_error("cluster refinement failed to converge");
        moved = false;
        for (size_t r = 0; r < n; ++r) {
            uint32_t a = st.assignment()[r];
            if (st.cluster_size(a) <= 1) continue;  // never empty a cluster
            for (uint32_t b = 0; b < k; ++b) {
                if (b == a) continue;
                double cand = st.h2_after_move(r, a, b);
                if (cand > cur + kMoveEps) {
                    st.apply_move(r, a, b);
                    if (!(st.h2() >= cur)) throw std::logic_error("H2 refinement not monotone");
                    cur = st.h2();
                    moved = true;
                    break;  // first improvement
                }
            }
        }
        st.rebuild();  // shed incremental drift between passes
        cur = st.h2();
    }
    ClusterSolution sol;
    sol.assignment = st.assignment();
    sol.k = k;
    sol.h2 = cur;
    sol.seed = seed;
    return sol;
}

}  // namespace detail

inline double criterion_h2(const SparseMatrix& X, const std::vector<uint32_t>& assignment,
                           uint32_t k) {
    if (assignment.size() != X.n_rows) throw std::invalid_argument("criterion_h2: size mismatch");
    SparseMatrix xn = normalize_rows(X);
    detail::CriterionState st(xn, assignment, k);
    return st.h2();
}

inline double criterion_h2(const SparseMatrix& X, const ClusterSolution& sol) {
    return criterion_h2(X, sol.assignment, sol.k);
}

// Best of `restarts` seeded runs; deterministic for fixed (seed, restarts),
// independent of the thread count.
inline ClusterSolution cluster(const SparseMatrix& X, uint32_t k, uint64_t seed,
                               unsigned restarts = 8, unsigned threads = 1) {
    if (k < 1 || k > X.n_rows)
        throw std::invalid_argument("cluster: k must be in [1, n_rows], got k=" + std::to_string(k) +
                                    " for " + std::to_string(X.n_rows) + " rows");
    if (restarts < 1) restarts = 1;
    SparseMatrix xn = normalize_rows(X);
    std::vector<ClusterSolution> runs(restarts);
    parallel_shards(restarts, 1, threads, [&](size_t r, size_t, size_t) {
        runs[r] = detail::cluster_once(xn, k, seed + r);
    });
    size_t best = 0;
    for (size_t r = 1; r < restarts; ++r)
        if (runs[r].h2 > runs[best].h2) best = r;
    return runs[best];
}

// ---------------------------------------------------------------------------
// k selection via Calinski-Harabasz over cosine-normalized rows.

struct KDiagnostics {
    uint32_t k = 0;
    double ch = 0;
    double h2 = 0;
};

inline std::pair<uint32_t, std::vector<KDiagnostics>> select_k(
    const SparseMatrix& X, const std::vector<uint32_t>& k_grid, uint64_t seed,
    unsigned restarts = 8, unsigned threads = 1, std::vector<std::string>* warnings = nullptr) {
    if (k_grid.empty()) throw std::invalid_argument("select_k: empty grid");
    for (uint32_t k : k_grid)
        if (k > X.n_rows)
            throw std::invalid_argument("select_k: k=" + std::to_string(k) + " exceeds row count");

    SparseMatrix xn = normalize_rows(X);
    const size_t n = xn.n_rows;
    std::vector<KDiagnostics> diag;
    for (uint32_t k : k_grid) {
        if (k < 2) {
            if (warnings)
                warnings->push_back("select_k: CH undefined for k=" + std::to_string(k) + ", skipped");
            continue;
        }
        ClusterSolution sol = cluster(X, k, seed, restarts, threads);
        detail::CriterionState st(xn, sol.assignment, k);
        double within_minus = 0;  // sum_k ||S_k||^2 / n_k
        for (uint32_t c = 0; c < k; ++c)
            within_minus += st.sum_norm2(c) / static_cast<double>(st.cluster_size(c));
        double total_sq = st.global_norm2();
        double m2 = st.m_norm() * st.m_norm();
        double w = total_sq - within_minus;
        double b = within_minus - m2 / static_cast<double>(n);
        double ch;
        if (w <= detail::kCosEps) {
            ch = std::numeric_limits<double>::infinity();  // degenerate: zero dispersion
        } else {
            ch = (b / (k - 1)) / (w / static_cast<double>(n - k));
        }
        diag.push_back({k, ch, sol.h2});
    }
    if (diag.empty()) throw std::invalid_argument("select_k: no usable k in grid");
    size_t best = 0;
    for (size_t i = 1; i < diag.size(); ++i)
        if (diag[i].ch > diag[best].ch) best = i;  // ties keep the smaller k
    return {diag[best].k, diag};
}

// ---------------------------------------------------------------------------
// Cluster descriptors: top contexts by descriptive share (share of the
// cluster's squared norm on that column) plus discriminative share (excess of
// in-cluster over out-of-cluster share). Stored score = descriptive +
// discriminative, truncated to `top`.

struct ScoredContext {
    uint32_t col = 0;
    double score = 0;
    double descriptive = 0;
    double discriminative = 0;
};

inline std::vector<std::vector<ScoredContext>> descriptors(const SparseMatrix& X,
                                                           const ClusterSolution& sol,
                                                           size_t top = 25, unsigned threads = 1) {
    SparseMatrix xn = normalize_rows(X);
    const uint32_t k = sol.k;

    // global per-column squared mass and total
    std::vector<double> global_col(xn.n_cols, 0.0);
    double global_tot = 0;
    for (size_t i = 0; i < xn.n_rows; ++i)
        for (size_t p = xn.row_ptr[i]; p < xn.row_ptr[i + 1]; ++p) {
            global_col[xn.col[p]] += xn.val[p] * xn.val[p];
            global_tot += xn.val[p] * xn.val[p];
        }

    auto members = sol.members();
    std::vector<std::vector<ScoredContext>> result(k);
    parallel_shards(k, 1, threads, [&](size_t c, size_t, size_t) {
        std::vector<double> in_col(xn.n_cols, 0.0);
        double in_tot = 0;
        for (uint32_t i : members[c])
            for (size_t p = xn.row_ptr[i]; p < xn.row_ptr[i + 1]; ++p) {
                in_col[xn.col[p]] += xn.val[p] * xn.val[p];
                in_tot += xn.val[p] * xn.val[p];
            }
        if (in_tot <= 0) return;
        double out_tot = global_tot - in_tot;

        std::vector<ScoredContext> cands;
        for (uint32_t j = 0; j < xn.n_cols; ++j) {
            if (in_col[j] <= 0) continue;
            ScoredContext sc;
            sc.col = j;
            sc.descriptive = in_col[j] / in_tot;
            double out_share = out_tot > 0 ? (global_col[j] - in_col[j]) / out_tot : 0.0;
            sc.discriminative = std::max(0.0, sc.descriptive - out_share);
            sc.score = sc.descriptive + sc.discriminative;
            cands.push_back(sc);
        }

        auto take_top = [&](auto key) {
            std::vector<ScoredContext> v = cands;
            std::sort(v.begin(), v.end(), [&](const ScoredContext& a, const ScoredContext& b) {
                double ka = key(a), kb = key(b);
                if (ka != kb) return ka > kb;
                return a.col < b.col;
            });
            if (v.size() > top) v.resize(top);
            return v;
        };
        auto by_desc = take_top([](const ScoredContext& s) { return s.descriptive; });
        auto by_disc = take_top([](const ScoredContext& s) { return s.discriminative; });

        std::vector<ScoredContext> merged = by_desc;
        for (const auto& s : by_disc) {
            bool seen = false;
            for (const auto& t : merged)
                if (t.col == s.col) {
                    seen = true;
                    break;
                }
            if (!seen) merged.push_back(s);
        }
        std::sort(merged.begin(), merged.end(), [](const ScoredContext& a, const ScoredContext& b) {
            if (a.score != b.score) return a.score > b.score;
            return a.col < b.col;
        });
        if (merged.size() > top) merged.resize(top);
        result[c] = std::move(merged);
    });
    return result;
}

// ---------------------------------------------------------------------------
// POS purity: fraction of each cluster carrying its modal short tag.

struct PurityResult {
    std::vector<double> per_cluster;
    double average = 0;
};

inline PurityResult pos_purity(const ClusterSolution& sol, const Vocabulary& vocab) {
    PurityResult r;
    r.per_cluster.assign(sol.k, 0.0);
    auto members = sol.members();
    double sum = 0;
    for (uint32_t c = 0; c < sol.k; ++c) {
        std::map<std::string, size_t> counts;
        for (uint32_t i : members[c]) ++counts[vocab.items[i].pos];
        size_t best = 0;
        for (const auto& [pos, n] : counts) best = std::max(best, n);
        r.per_cluster[c] =
            members[c].empty() ? 0.0 : static_cast<double>(best) / static_cast<double>(members[c].size());
        sum += r.per_cluster[c];
    }
    r.average = sol.k == 0 ? 0.0 : sum / sol.k;
    return r;
}

}  // namespace depmine
