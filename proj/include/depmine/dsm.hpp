#pragma once

// The distributional model: frequency-selected vocabulary, sparse
// lemma-context count matrix F (fully-specified plus generalized columns),
// and the PPMI-weighted matrix X.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "depmine/common.hpp"
#include "depmine/context.hpp"
#include "depmine/corpus.hpp"
#include "depmine/io_util.hpp"
#include "depmine/parallel.hpp"

namespace depmine {

struct Vocabulary {
    std::vector<LemmaPos> items;  // frequency desc, ties lexicographic asc
    std::vector<uint64_t> freq;
    std::unordered_map<LemmaPos, uint32_t, LemmaPosHash> index;

    size_t size() const { return items.size(); }

    bool contains(const LemmaPos& lp) const { return index.count(lp) > 0; }

    // UINT32_MAX when absent
    uint32_t id_of(const LemmaPos& lp) const {
        auto it = index.find(lp);
        return it == index.end() ? UINT32_MAX : it->second;
    }

    void rebuild_index() {
        index.clear();
        index.reserve(items.size());
        for (uint32_t i = 0; i < items.size(); ++i) index.emplace(items[i], i);
    }
};

inline Vocabulary build_vocabulary(const CorpusStats& stats, size_t n_top, uint64_t min_freq,
                                   const std::set<std::string>& target_pos,
                                   const std::set<std::string>* stoplist = nullptr) {
    std::vector<std::pair<LemmaPos, uint64_t>> cand;
    for (const auto& [lp, f] : stats.lemma_freq) {
        if (f < min_freq) continue;
        if (!target_pos.count(lp.pos)) continue;
        if (stoplist && stoplist->count(lp.lemma)) continue;
        cand.emplace_back(lp, f);
    }
    std::sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (cand.size() > n_top) cand.resize(n_top);

    Vocabulary v;
    v.items.reserve(cand.size());
    v.freq.reserve(cand.size());
    for (auto& [lp, f] : cand) {
        v.items.push_back(std::move(lp));
        v.freq.push_back(f);
    }
    v.rebuild_index();
    return v;
}

// Column dictionary of the matrix: sorted context triples.
struct ContextIndex {
    std::vector<ContextTriple> cols;  // sorted ascending

    size_t size() const { return cols.size(); }

    // UINT32_MAX when absent
    uint32_t id_of(const ContextTriple& c) const {
        auto it = std::lower_bound(cols.begin(), cols.end(), c);
        if (it == cols.end() || !(*it == c)) return UINT32_MAX;
        return static_cast<uint32_t>(it - cols.begin());
    }
};

// Compressed sparse rows; values are counts in F and weights in X.
struct SparseMatrix {
    size_t n_rows = 0;
    size_t n_cols = 0;
    std::vector<size_t> row_ptr;  // n_rows + 1
    std::vector<uint32_t> col;
    std::vector<double> val;
    double total = 0;  // T, the sum of all cells

    size_t nnz() const { return col.size(); }

    struct Cell {
        uint32_t col;
        double val;
    };

    // sorted-by-column cells of row i
    std::pair<size_t, size_t> row_range(size_t i) const { return {row_ptr[i], row_ptr[i + 1]}; }

    double row_norm(size_t i) const {
        double s = 0;
        for (size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) s += val[p] * val[p];
        return std::sqrt(s);
    }
};

struct FreqMatrix {
    SparseMatrix F;
    ContextIndex contexts;
};

// Counts fully-specified contexts per vocabulary row, expands each occurrence
// into its three columns (itself, "oth" label, "*" lemma), prunes columns whose
// total count is below context_min_freq, and assembles CSR with columns in
// sorted-triple order. Counting is parallel per sentence shard; shard maps are
// merged additively, so the result is independent of thread count and of
// sentence order.
inline FreqMatrix build_frequency_matrix(const Corpus& corpus, const Vocabulary& vocab,
                                         const ExtractOptions& opts, uint64_t context_min_freq = 2,
                                         unsigned threads = 1) {
    using CellKey = std::pair<uint32_t, ContextTriple>;
    struct CellKeyHash {
        size_t operator()(const CellKey& k) const {
            return ContextTripleHash{}(k.second) * 0x9e3779b97f4a7c15ull + k.first;
        }
    };
    using CellMap = std::unordered_map<CellKey, uint64_t, CellKeyHash>;

    const size_t n_sent = corpus.sentences.size();
    const size_t shard_size = 256;
    const size_t n_shards = n_sent == 0 ? 0 : (n_sent + shard_size - 1) / shard_size;
    std::vector<CellMap> shard_counts(n_shards);
    parallel_shards(n_sent, shard_size, threads, [&](size_t shard, size_t b, size_t e) {
        CellMap& m = shard_counts[shard];
        for (size_t si = b; si < e; ++si) {
            for (const auto& tc : extract_contexts(corpus.sentences[si], opts)) {
                uint32_t row = vocab.id_of(tc.target);
                if (row == UINT32_MAX) continue;
                for (const auto& triple : generalize(tc.context)) ++m[{row, triple}];
            }
        }
    });

    CellMap counts;
    for (auto& m : shard_counts) {
        for (auto& [k, v] : m) counts[k] += v;
        m.clear();
    }

    // column totals and pruning
    std::map<ContextTriple, uint64_t> col_totals;
    for (const auto& [k, v] : counts) col_totals[k.second] += v;

    FreqMatrix out;
    out.contexts.cols.reserve(col_totals.size());
    for (const auto& [triple, total] : col_totals)
        if (total >= context_min_freq) out.contexts.cols.push_back(triple);

    std::unordered_map<ContextTriple, uint32_t, ContextTripleHash> col_id;
    col_id.reserve(out.contexts.cols.size());
    for (uint32_t j = 0; j < out.contexts.cols.size(); ++j) col_id.emplace(out.contexts.cols[j], j);

    // CSR assembly
    std::vector<std::vector<std::pair<uint32_t, uint64_t>>> rows(vocab.size());
    for (const auto& [k, v] : counts) {
        auto it = col_id.find(k.second);
        if (it == col_id.end()) continue;
        rows[k.first].emplace_back(it->second, v);
    }
    SparseMatrix& F = out.F;
    F.n_rows = vocab.size();
    F.n_cols = out.contexts.cols.size();
    F.row_ptr.assign(F.n_rows + 1, 0);
    size_t nnz = 0;
    for (const auto& r : rows) nnz += r.size();
    F.col.reserve(nnz);
    F.val.reserve(nnz);
    for (size_t i = 0; i < rows.size(); ++i) {
        auto& r = rows[i];
        std::sort(r.begin(), r.end());
        for (auto& [c, v] : r) {
            F.col.push_back(c);
            F.val.push_back(static_cast<double>(v));
            F.total += static_cast<double>(v);
        }
        F.row_ptr[i + 1] = F.col.size();
    }
    return out;
}

// x_ij = max(0, log2(f_ij * T / (r_i * c_j))); zero cells stay zero. Marginals
// are taken over the (already pruned) matrix itself in a sequential pass; the
// weighting itself is a parallel per-cell map.
inline SparseMatrix apply_ppmi(const SparseMatrix& F, unsigned threads = 1) {
    if (!(F.total > 0)) throw std::invalid_argument("apply_ppmi: empty matrix");

    std::vector<double> row_sum(F.n_rows, 0.0), col_sum(F.n_cols, 0.0);
    for (size_t i = 0; i < F.n_rows; ++i) {
        for (size_t p = F.row_ptr[i]; p < F.row_ptr[i + 1]; ++p) {
            row_sum[i] += F.val[p];
            col_sum[F.col[p]] += F.val[p];
        }
    }

    SparseMatrix X = F;
    parallel_for(F.n_rows, threads, [&](size_t i) {
        for (size_t p = F.row_ptr[i]; p < F.row_ptr[i + 1]; ++p) {
            double f = F.val[p];
            double x = 0;
            if (f > 0) x = std::max(0.0, std::log2(f * F.total / (row_sum[i] * col_sum[F.col[p]])));
            X.val[p] = x;
        }
    });
    X.total = 0;
    for (double v : X.val) X.total += v;
    return X;
}

inline double row_cosine(const SparseMatrix& X, size_t i, size_t j) {
    double na = X.row_norm(i), nb = X.row_norm(j);
    if (na == 0 || nb == 0) return 0.0;
    double dot = 0;
    size_t p = X.row_ptr[i], pe = X.row_ptr[i + 1];
    size_t q = X.row_ptr[j], qe = X.row_ptr[j + 1];
    while (p < pe && q < qe) {
        if (X.col[p] < X.col[q]) {
            ++p;
        } else if (X.col[q] < X.col[p]) {
            ++q;
        } else {
            dot += X.val[p] * X.val[q];
            ++p;
            ++q;
        }
    }
    return dot / (na * nb);
}

// Unit-L2 rows; zero rows stay zero.
inline SparseMatrix normalize_rows(const SparseMatrix& X) {
    SparseMatrix N = X;
    N.total = 0;
    for (size_t i = 0; i < X.n_rows; ++i) {
        double nrm = X.row_norm(i);
        if (nrm == 0) continue;
        for (size_t p = X.row_ptr[i]; p < X.row_ptr[i + 1]; ++p) {
            N.val[p] = X.val[p] / nrm;
            N.total += N.val[p];
        }
    }
    return N;
}

// ---------------------------------------------------------------------------
// Dumps (TSV). Matrix: header "n_r n_c T", then "row col value" triples.

inline std::string write_matrix_tsv(const SparseMatrix& M) {
    std::string out = std::to_string(M.n_rows) + "\t" + std::to_string(M.n_cols) + "\t" +
                      fmt_double(M.total) + "\n";
    for (size_t i = 0; i < M.n_rows; ++i)
        for (size_t p = M.row_ptr[i]; p < M.row_ptr[i + 1]; ++p)
            out += std::to_string(i) + "\t" + std::to_string(M.col[p]) + "\t" + fmt_double(M.val[p]) +
                   "\n";
    return out;
}

inline SparseMatrix read_matrix_tsv(std::string_view text) {
    auto lines = split_lines(text);
    if (lines.empty()) throw std::runtime_error("matrix dump: empty");
    auto head = split_tabs(lines[0]);
    if (head.size() != 3) throw std::runtime_error("matrix dump: bad header");
    SparseMatrix M;
    M.n_rows = static_cast<size_t>(parse_int(head[0]).value());
    M.n_cols = static_cast<size_t>(parse_int(head[1]).value());
    double total = parse_double(head[2]).value();
    std::vector<std::vector<std::pair<uint32_t, double>>> rows(M.n_rows);
    for (size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        auto cols = split_tabs(lines[li]);
        if (cols.size() != 3) throw std::runtime_error("matrix dump: bad line " + std::to_string(li + 1));
        size_t r = static_cast<size_t>(parse_int(cols[0]).value());
        uint32_t c = static_cast<uint32_t>(parse_int(cols[1]).value());
        double v = parse_double(cols[2]).value();
        if (r >= M.n_rows || c >= M.n_cols) throw std::runtime_error("matrix dump: cell out of range");
        rows[r].emplace_back(c, v);
    }
    M.row_ptr.assign(M.n_rows + 1, 0);
    for (size_t i = 0; i < M.n_rows; ++i) {
        auto& r = rows[i];
        std::sort(r.begin(), r.end());
        for (auto& [c, v] : r) {
            M.col.push_back(c);
            M.val.push_back(v);
            M.total += v;
        }
        M.row_ptr[i + 1] = M.col.size();
    }
    (void)total;  // header total is advisory; recomputed from cells
    return M;
}

inline std::string write_vocab_tsv(const Vocabulary& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i)
        out += v.items[i].lemma + "\t" + v.items[i].pos + "\t" + std::to_string(v.freq[i]) + "\n";
    return out;
}

inline Vocabulary read_vocab_tsv(std::string_view text) {
    Vocabulary v;
    for (auto line : split_lines(text)) {
        if (line.empty()) continue;
        auto cols = split_tabs(line);
        if (cols.size() != 3) throw std::runtime_error("vocab dump: bad line");
        v.items.push_back({std::string(cols[0]), std::string(cols[1])});
        v.freq.push_back(static_cast<uint64_t>(parse_int(cols[2]).value()));
    }
    v.rebuild_index();
    return v;
}

inline std::string write_contexts_tsv(const ContextIndex& ci) {
    std::string out;
    for (const auto& c : ci.cols)
        out += std::string(1, to_char(c.dir)) + "\t" + c.label + "\t" + c.ctx.lemma + "\t" +
               c.ctx.pos + "\n";
    return out;
}

inline ContextIndex read_contexts_tsv(std::string_view text) {
    ContextIndex ci;
    for (auto line : split_lines(text)) {
        if (line.empty()) continue;
        auto cols = split_tabs(line);
        if (cols.size() != 4) throw std::runtime_error("context dump: bad line");
        ContextTriple c;
        c.dir = dep_dir_from_char(cols[0].empty() ? '?' : cols[0][0]);
        c.label = std::string(cols[1]);
        c.ctx = {std::string(cols[2]), std::string(cols[3])};
        ci.cols.push_back(std::move(c));
    }
    return ci;
}

}  // namespace depmine
