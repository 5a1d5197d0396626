#pragma once

// Pattern generation from Strong/Semi-linked cluster pairs, attestation
// against the source corpus's dependency events, and multi-configuration
// merging with provenance.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "depmine/cluster.hpp"
#include "depmine/common.hpp"
#include "depmine/context.hpp"
#include "depmine/corpus.hpp"
#include "depmine/linker.hpp"
#include "depmine/parallel.hpp"

namespace depmine {

// The four-field construction candidate <lemma_i, dir, label, lemma_j>.
// Identity (ordering, equality, merging) is the four core fields only.
struct Pattern {
    LemmaPos a;  // lemma_i, from the origin cluster
    DepDir dir = DepDir::parent;
    std::string label;  // concrete, never "oth"
    LemmaPos b;  // lemma_j, from the target cluster
    bool attested = false;
    uint64_t attested_count = 0;
    std::set<std::string> provenance;

    auto core() const { return std::tie(a, dir, label, b); }
};

inline bool core_less(const Pattern& x, const Pattern& y) { return x.core() < y.core(); }
inline bool core_equal(const Pattern& x, const Pattern& y) { return x.core() == y.core(); }

struct PatternSet {
    std::vector<Pattern> items;  // sorted by core, unique

    size_t size() const { return items.size(); }

    void sort_unique() {
        std::sort(items.begin(), items.end(), core_less);
        items.erase(std::unique(items.begin(), items.end(), core_equal), items.end());
    }
};

// One pattern per (lemma_i in x, lemma_j in y) for every Strong/Semi pair and
// every concrete relation in R_clusters[x][y]; the reverse direction only
// emits from R_clusters[y][x]. Weak and Unrelated pairs emit nothing.
inline PatternSet generate_patterns(const ClusterSolution& sol, const Vocabulary& vocab,
                                    const LinkMatrices& links,
                                    const std::vector<std::vector<RelationClass>>& classes,
                                    const std::string& provenance_name = {}) {
    PatternSet ps;
    auto members = sol.members();
    for (uint32_t x = 0; x < links.k; ++x) {
        for (const auto& [y, cell] : links.out[x]) {
            RelationClass c = classes[x][y];
            if (c != RelationClass::Strong && c != RelationClass::Semi) continue;
            for (const auto& rel : cell.first) {
                if (rel.label == kOtherLabel) continue;
                for (uint32_t i : members[x])
                    for (uint32_t j : members[y]) {
                        Pattern p;
                        p.a = vocab.items[i];
                        p.dir = rel.dir;
                        p.label = rel.label;
                        p.b = vocab.items[j];
                        if (!provenance_name.empty()) p.provenance.insert(provenance_name);
                        ps.items.push_back(std::move(p));
                    }
            }
        }
    }
    ps.sort_unique();
    return ps;
}

// ---------------------------------------------------------------------------
// Attestation: the exact dependency event <lemma_i, dir, label, lemma_j>
// occurs in the source corpus iff context extraction emits lemma_i with the
// fully-specified triple [dir:label:lemma_j] at least once.

struct DependencyEventIndex {
    struct KeyHash {
        size_t operator()(const std::string& s) const { return fnv1a64(s); }
    };
    std::unordered_map<std::string, uint64_t, KeyHash> counts;

    static std::string key(const LemmaPos& a, DepDir dir, const std::string& label,
                           const LemmaPos& b) {
        std::string k = a.lemma;
        k += '\x1f';
        k += a.pos;
        k += to_char(dir);
        k += label;
        k += '\x1f';
        k += b.lemma;
        k += '\x1f';
        k += b.pos;
        return k;
    }

    uint64_t count(const LemmaPos& a, DepDir dir, const std::string& label, const LemmaPos& b) const {
        auto it = counts.find(key(a, dir, label, b));
        return it == counts.end() ? 0 : it->second;
    }
};

inline DependencyEventIndex build_event_index(const Corpus& corpus, const ExtractOptions& opts,
                                              unsigned threads = 1) {
    const size_t n = corpus.sentences.size();
    const size_t shard_size = 256;
    const size_t n_shards = n == 0 ? 0 : (n + shard_size - 1) / shard_size;
    std::vector<DependencyEventIndex> partial(n_shards);
    parallel_shards(n, shard_size, threads, [&](size_t shard, size_t b, size_t e) {
        auto& idx = partial[shard];
        for (size_t si = b; si < e; ++si)
            for (const auto& tc : extract_contexts(corpus.sentences[si], opts))
                ++idx.counts[DependencyEventIndex::key(tc.target, tc.context.dir, tc.context.label,
                                                       tc.context.ctx)];
    });
    DependencyEventIndex total;
    for (auto& p : partial)
        for (auto& [k, v] : p.counts) total.counts[k] += v;
    return total;
}

struct AttestationSummary {
    size_t attested = 0;
    size_t unattested = 0;
};

inline AttestationSummary split_attested(PatternSet& ps, const DependencyEventIndex& index,
                                         unsigned threads = 1) {
    parallel_for(ps.items.size(), threads, [&](size_t i) {
        Pattern& p = ps.items[i];
        p.attested_count = index.count(p.a, p.dir, p.label, p.b);
        p.attested = p.attested_count > 0;
    });
    AttestationSummary s;
    for (const auto& p : ps.items) (p.attested ? s.attested : s.unattested) += 1;
    return s;
}

// ---------------------------------------------------------------------------
// Configuration merge. Default keeps shared patterns once with merged
// provenance (|A| + |B| - |A ∩ B|); drop_shared removes them from both sides.

enum class MergeMode { keep_shared_once, drop_shared };

struct MergeStats {
    size_t overlap = 0;
    size_t overlap_attested = 0;
    size_t overlap_unattested = 0;
};

inline PatternSet merge_configs(const PatternSet& a, const PatternSet& b,
                                MergeMode mode = MergeMode::keep_shared_once,
                                MergeStats* stats = nullptr) {
    PatternSet out;
    MergeStats st;
    size_t i = 0, j = 0;
    while (i < a.items.size() || j < b.items.size()) {
        if (j >= b.items.size() || (i < a.items.size() && core_less(a.items[i], b.items[j]))) {
            out.items.push_back(a.items[i++]);
        } else if (i >= a.items.size() || core_less(b.items[j], a.items[i])) {
            out.items.push_back(b.items[j++]);
        } else {
            ++st.overlap;
            (a.items[i].attested ? st.overlap_attested : st.overlap_unattested) += 1;
            if (mode == MergeMode::keep_shared_once) {
                Pattern p = a.items[i];
                p.provenance.insert(b.items[j].provenance.begin(), b.items[j].provenance.end());
                p.attested_count = std::max(p.attested_count, b.items[j].attested_count);
                p.attested = p.attested || b.items[j].attested;
                out.items.push_back(std::move(p));
            }
            ++i;
            ++j;
        }
    }
    if (stats) *stats = st;
    return out;
}

// ---------------------------------------------------------------------------
// Headline TSV: lemma_i pos_i dir dep_label lemma_j pos_j attested provenance

inline std::string write_patterns_tsv(const PatternSet& ps) {
    std::string out;
    for (const auto& p : ps.items) {
        out += p.a.lemma;
        out += '\t';
        out += p.a.pos;
        out += '\t';
        out += to_char(p.dir);
        out += '\t';
        out += p.label;
        out += '\t';
        out += p.b.lemma;
        out += '\t';
        out += p.b.pos;
        out += '\t';
        out += p.attested ? '1' : '0';
        out += '\t';
        bool first = true;
        for (const auto& src : p.provenance) {
            if (!first) out += ',';
            out += src;
            first = false;
        }
        out += '\n';
    }
    return out;
}

inline PatternSet read_patterns_tsv(std::string_view text) {
    PatternSet ps;
    for (auto line : split_lines(text)) {
        if (line.empty()) continue;
        auto cols = split_tabs(line);
        if (cols.size() != 8) throw std::runtime_error("patterns dump: bad line");
        Pattern p;
        p.a = {std::string(cols[0]), std::string(cols[1])};
        p.dir = dep_dir_from_char(cols[2].empty() ? '?' : cols[2][0]);
        p.label = std::string(cols[3]);
        p.b = {std::string(cols[4]), std::string(cols[5])};
        p.attested = cols[6] == "1";
        if (!cols[7].empty()) {
            size_t start = 0;
            std::string_view prov = cols[7];
            for (;;) {
                size_t comma = prov.find(',', start);
                if (comma == std::string_view::npos) {
                    p.provenance.insert(std::string(prov.substr(start)));
                    break;
                }
                p.provenance.insert(std::string(prov.substr(start, comma - start)));
                start = comma + 1;
            }
        }
        ps.items.push_back(std::move(p));
    }
    return ps;
}

// Sidecar with attestation counts, aligned with the headline file by core fields.
inline std::string write_attest_counts_tsv(const PatternSet& ps) {
    std::string out;
    for (const auto& p : ps.items) {
        out += p.a.lemma;
        out += '\t';
        out += p.a.pos;
        out += '\t';
        out += to_char(p.dir);
        out += '\t';
        out += p.label;
        out += '\t';
        out += p.b.lemma;
        out += '\t';
        out += p.b.pos;
        out += '\t';
        out += std::to_string(p.attested_count);
        out += '\n';
    }
    return out;
}

inline void read_attest_counts_tsv(std::string_view text, PatternSet& ps) {
    std::map<std::string, uint64_t> counts;
    for (auto line : split_lines(text)) {
        if (line.empty()) continue;
        auto cols = split_tabs(line);
        if (cols.size() != 7) throw std::runtime_error("attest dump: bad line");
        std::string key = DependencyEventIndex::key({std::string(cols[0]), std::string(cols[1])},
                                                    dep_dir_from_char(cols[2][0]),
                                                    std::string(cols[3]),
                                                    {std::string(cols[4]), std::string(cols[5])});
        counts[key] = static_cast<uint64_t>(parse_int(cols[6]).value());
    }
    for (auto& p : ps.items) {
        auto it = counts.find(DependencyEventIndex::key(p.a, p.dir, p.label, p.b));
        if (it != counts.end()) p.attested_count = it->second;
    }
}

}  // namespace depmine
