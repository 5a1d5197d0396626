#pragma once

// Cluster linking: descriptor contexts with a concrete lemma connect their
// origin cluster to the cluster holding that lemma; relation scores feed two
// automatically-determined thresholds that classify cluster pairs as
// Strong (either direction >= t1), Semi (directional sum >= t2), Weak (>0)
// or Unrelated.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "depmine/cluster.hpp"
#include "depmine/common.hpp"
#include "depmine/dsm.hpp"
#include "depmine/parallel.hpp"

namespace depmine {

struct ContextualRelation {
    DepDir dir = DepDir::parent;
    std::string label;  // may be "oth"; "oth" relations carry score mass but
                        // are excluded from pattern emission

    friend auto operator<=>(const ContextualRelation&, const ContextualRelation&) = default;
};

inline std::string to_string(const ContextualRelation& r) {
    return std::string(1, to_char(r.dir)) + ":" + r.label;
}

struct LinkMatrices {
    uint32_t k = 0;
    // sparse per-origin rows: target cluster -> (relation set, accumulated score)
    std::vector<std::map<uint32_t, std::pair<std::set<ContextualRelation>, double>>> out;

    double score(uint32_t i, uint32_t j) const {
        auto it = out[i].find(j);
        return it == out[i].end() ? 0.0 : it->second.second;
    }

    const std::set<ContextualRelation>* relations(uint32_t i, uint32_t j) const {
        auto it = out[i].find(j);
        return it == out[i].end() ? nullptr : &it->second.first;
    }
};

// Descriptor contexts whose lemma is the wildcard or outside the vocabulary
// contribute nothing; in-cluster lemmas never produce self-links.
inline LinkMatrices build_links(const std::vector<std::vector<ScoredContext>>& descriptors,
                                const ContextIndex& contexts, const ClusterSolution& sol,
                                const Vocabulary& vocab, unsigned threads = 1) {
    LinkMatrices lm;
    lm.k = sol.k;
    lm.out.resize(sol.k);
    parallel_shards(sol.k, 1, threads, [&](size_t x, size_t, size_t) {
        for (const auto& sc : descriptors[x]) {
            const ContextTriple& t = contexts.cols[sc.col];
            if (t.lemma_generalized()) continue;
            uint32_t row = vocab.id_of(t.ctx);
            if (row == UINT32_MAX) continue;
            uint32_t y = sol.assignment[row];
            if (y == x) continue;
            auto& cell = lm.out[x][y];
            cell.first.insert({t.dir, t.label});
            cell.second += sc.score;
        }
    });
    return lm;
}

struct Thresholds {
    double strong = 0;  // threshold_1, on directional scores
    double semi = 0;    // threshold_2, on symmetric sums
    double achieved_strong_fraction = 0;
    double achieved_semi_fraction = 0;
    bool strong_target_met = true;
    bool semi_target_met = true;
};

namespace detail {

// Fraction of clusters participating in >= 1 pair whose directional max
// reaches t (criterion 1).
inline double grouped_fraction_strong(const LinkMatrices& lm, double t) {
    std::vector<char> grouped(lm.k, 0);
    for (uint32_t i = 0; i < lm.k; ++i)
        for (const auto& [j, cell] : lm.out[i])
            if (cell.second >= t) grouped[i] = grouped[j] = 1;
    size_t n = 0;
    for (char g : grouped) n += g;
    return static_cast<double>(n) / lm.k;
}

// Criterion 2: directional sum reaches t.
inline double grouped_fraction_semi(const LinkMatrices& lm, double t) {
    std::vector<char> grouped(lm.k, 0);
    for (uint32_t i = 0; i < lm.k; ++i)
        for (const auto& [j, cell] : lm.out[i]) {
            if (j < i && lm.out[j].count(i)) continue;  // pair handled from the other side
            double sum = cell.second + lm.score(j, i);
            if (sum >= t) grouped[i] = grouped[j] = 1;
        }
    size_t n = 0;
    for (char g : grouped) n += g;
    return static_cast<double>(n) / lm.k;
}

}  // namespace detail

// Each threshold is the largest candidate value (drawn from the observed
// scores) whose grouped fraction reaches the target; when no value does, the
// smallest positive score is used and the shortfall is recorded.
inline Thresholds determine_thresholds(const LinkMatrices& lm, double target_strong = 0.30,
                                       double target_semi = 0.50) {
    if (lm.k < 2) throw std::invalid_argument("determine_thresholds: need at least 2 clusters");

    std::set<double> directional, sums;
    for (uint32_t i = 0; i < lm.k; ++i)
        for (const auto& [j, cell] : lm.out[i]) {
            if (cell.second > 0) directional.insert(cell.second);
            double s = cell.second + lm.score(j, i);
            if (s > 0) sums.insert(s);
        }
    if (directional.empty())
        throw std::invalid_argument("determine_thresholds: all relation scores are zero");

    Thresholds th;
    // the grouped fraction is non-increasing in the threshold, so the largest
    // candidate meeting the target is found by binary search
    auto search = [](const std::set<double>& candidates, double target, auto fraction, double& value,
                     double& achieved, bool& met) {
        std::vector<double> cand(candidates.begin(), candidates.end());
        if (fraction(cand.front()) < target) {
            value = cand.front();  // fallback: smallest positive score
            achieved = fraction(value);
            met = false;
            return;
        }
        size_t lo = 0, hi = cand.size() - 1;  // invariant: fraction(cand[lo]) >= target
        while (lo < hi) {
            size_t mid = lo + (hi - lo + 1) / 2;
            if (fraction(cand[mid]) >= target) lo = mid;
            else hi = mid - 1;
        }
        value = cand[lo];
        achieved = fraction(value);
        met = true;
    };
    search(directional, target_strong,
           [&](double t) { return detail::grouped_fraction_strong(lm, t); }, th.strong,
           th.achieved_strong_fraction, th.strong_target_met);
    search(sums, target_semi, [&](double t) { return detail::grouped_fraction_semi(lm, t); },
           th.semi, th.achieved_semi_fraction, th.semi_target_met);
    return th;
}

enum class RelationClass { Unrelated, Weak, Semi, Strong };

inline const char* to_string(RelationClass c) {
    switch (c) {
        case RelationClass::Strong: return "strong";
        case RelationClass::Semi: return "semi";
        case RelationClass::Weak: return "weak";
        case RelationClass::Unrelated: return "unrelated";
    }
    return "unrelated";
}

// Pair-level classes (symmetric in {i,j}); the diagonal stays Unrelated.
inline std::vector<std::vector<RelationClass>> classify_links(const LinkMatrices& lm,
                                                              const Thresholds& th) {
    std::vector<std::vector<RelationClass>> cls(lm.k,
                                                std::vector<RelationClass>(lm.k, RelationClass::Unrelated));
    for (uint32_t i = 0; i < lm.k; ++i)
        for (uint32_t j = i + 1; j < lm.k; ++j) {
            double sij = lm.score(i, j), sji = lm.score(j, i);
            RelationClass c = RelationClass::Unrelated;
            if (std::max(sij, sji) >= th.strong) c = RelationClass::Strong;
            else if (sij + sji >= th.semi) c = RelationClass::Semi;
            else if (sij > 0 || sji > 0) c = RelationClass::Weak;
            cls[i][j] = cls[j][i] = c;
        }
    return cls;
}

}  // namespace depmine
