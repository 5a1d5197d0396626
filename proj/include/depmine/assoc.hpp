#pragma once

// Statistical validation on an evaluation corpus: sentential co-occurrence
// index, MI and Z-score association measures with the low-frequency support
// rule, bigram (BI) and frequent-lemma (FL) baselines, and the three
// null-hypothesis reports.
//
//   E = f(a) * f(b) / N      MI = log2(O / E)      Z = (O - E) / sqrt(E)
//
// where N counts sentences, f and O count sentences containing the lemma /
// both lemmas (at most once per sentence). Pairs with O below the support
// cutoff score 0.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "depmine/common.hpp"
#include "depmine/corpus.hpp"
#include "depmine/io_util.hpp"
#include "depmine/parallel.hpp"
#include "depmine/patterns.hpp"

namespace depmine {

// Evaluation corpora are only POS-tagged: a sentence is a bag of lemma_pos.
using EvalSentence = std::vector<LemmaPos>;
using EvalCorpus = std::vector<EvalSentence>;

// Accepts the 4-column evaluator format (token, lemma, pos_short, sent_id)
// and the full 8-column corpus format; sentences break on blank lines or
// sent_id changes.
inline EvalCorpus parse_eval_corpus(std::string_view text) {
    EvalCorpus out;
    EvalSentence cur;
    int64_t cur_id = 0;
    bool have = false;
    auto flush = [&] {
        if (!cur.empty()) out.push_back(std::move(cur));
        cur = EvalSentence{};
        have = false;
    };
    for (auto line : split_lines(text)) {
        if (line.empty()) {
            flush();
            continue;
        }
        auto cols = split_tabs(line);
        std::string lemma, pos;
        int64_t sid = 0;
        if (cols.size() == 4) {
            lemma = std::string(cols[1]);
            pos = std::string(cols[2]);
            sid = parse_int(cols[3]).value_or(0);
        } else if (cols.size() == 8) {
            lemma = std::string(cols[1]);
            pos = std::string(cols[3]);
            sid = parse_int(cols[4]).value_or(0);
        } else {
            throw std::runtime_error("eval corpus: expected 4 or 8 columns");
        }
        if (have && sid != cur_id) flush();
        cur_id = sid;
        have = true;
        cur.push_back({std::move(lemma), std::move(pos)});
    }
    flush();
    return out;
}

inline EvalCorpus eval_view(const Corpus& corpus) {
    EvalCorpus out;
    out.reserve(corpus.sentences.size());
    for (const auto& s : corpus.sentences) {
        EvalSentence es;
        es.reserve(s.tokens.size());
        for (const auto& t : s.tokens) es.push_back(t.lemma_pos());
        out.push_back(std::move(es));
    }
    return out;
}

using LemmaPair = std::pair<LemmaPos, LemmaPos>;

inline LemmaPair make_pair_key(const LemmaPos& a, const LemmaPos& b) {
    return a <= b ? LemmaPair{a, b} : LemmaPair{b, a};
}

struct LemmaPairHash {
    size_t operator()(const LemmaPair& p) const {
        return LemmaPosHash{}(p.first) * 0x9e3779b97f4a7c15ull + LemmaPosHash{}(p.second);
    }
};

struct CooccurrenceIndex {
    uint64_t n_sentences = 0;
    std::unordered_map<LemmaPos, uint64_t, LemmaPosHash> unigram;  // f(a)
    std::unordered_map<LemmaPair, uint64_t, LemmaPairHash> joint;  // O(a,b), a <= b

    uint64_t f(const LemmaPos& a) const {
        auto it = unigram.find(a);
        return it == unigram.end() ? 0 : it->second;
    }

    uint64_t o(const LemmaPos& a, const LemmaPos& b) const {
        auto it = joint.find(make_pair_key(a, b));
        return it == joint.end() ? 0 : it->second;
    }
};

// Each sentence contributes at most once per lemma and per pair. Only lemmas
// in `universe` are indexed (empty universe = index everything).
inline CooccurrenceIndex build_index(const EvalCorpus& corpus,
                                     const std::unordered_set<LemmaPos, LemmaPosHash>& universe,
                                     unsigned threads = 1) {
    const size_t n = corpus.size();
    const size_t shard_size = 256;
    const size_t n_shards = n == 0 ? 0 : (n + shard_size - 1) / shard_size;
    std::vector<CooccurrenceIndex> partial(n_shards);
    parallel_shards(n, shard_size, threads, [&](size_t shard, size_t b, size_t e) {
        auto& idx = partial[shard];
        std::vector<LemmaPos> distinct;
        for (size_t si = b; si < e; ++si) {
            distinct.clear();
            for (const auto& lp : corpus[si]) {
                if (!universe.empty() && !universe.count(lp)) continue;
                if (std::find(distinct.begin(), distinct.end(), lp) == distinct.end())
                    distinct.push_back(lp);
            }
            for (const auto& lp : distinct) ++idx.unigram[lp];
            for (size_t i = 0; i < distinct.size(); ++i)
                for (size_t j = i + 1; j < distinct.size(); ++j)
                    ++idx.joint[make_pair_key(distinct[i], distinct[j])];
        }
    });
    CooccurrenceIndex total;
    total.n_sentences = n;
    for (auto& p : partial) {
        for (auto& [k, v] : p.unigram) total.unigram[k] += v;
        for (auto& [k, v] : p.joint) total.joint[k] += v;
    }
    return total;
}

struct AssocOptions {
    bool support_rule = true;  // pairs with O < support score 0
    uint64_t support = 5;
};

struct AssociationScore {
    double mi = 0;
    double z = 0;
    bool supported = false;
};

inline double mutual_information(const CooccurrenceIndex& idx, const LemmaPos& a, const LemmaPos& b,
                                 const AssocOptions& opts = {}) {
    uint64_t o = idx.o(a, b);
    if (opts.support_rule && o < opts.support) return 0.0;
    if (o == 0) return 0.0;  // log2(0) undefined; zero by convention
    double fa = static_cast<double>(idx.f(a)), fb = static_cast<double>(idx.f(b));
    if (fa == 0 || fb == 0 || idx.n_sentences == 0) return 0.0;
    double e = fa * fb / static_cast<double>(idx.n_sentences);
    return std::log2(static_cast<double>(o) / e);
}

inline double z_score(const CooccurrenceIndex& idx, const LemmaPos& a, const LemmaPos& b,
                      const AssocOptions& opts = {}) {
    uint64_t o = idx.o(a, b);
    if (opts.support_rule && o < opts.support) return 0.0;
    double fa = static_cast<double>(idx.f(a)), fb = static_cast<double>(idx.f(b));
    if (fa == 0 || fb == 0 || idx.n_sentences == 0) return 0.0;  // E = 0, by convention
    double e = fa * fb / static_cast<double>(idx.n_sentences);
    return (static_cast<double>(o) - e) / std::sqrt(e);
}

inline AssociationScore score_pair(const CooccurrenceIndex& idx, const LemmaPos& a,
                                   const LemmaPos& b, const AssocOptions& opts = {}) {
    AssociationScore s;
    s.supported = idx.o(a, b) >= opts.support;
    s.mi = mutual_information(idx, a, b, opts);
    s.z = z_score(idx, a, b, opts);
    return s;
}

// ---------------------------------------------------------------------------
// Threshold tables: share of scores strictly above each cut.

struct ThresholdTable {
    std::vector<double> mi_cuts, z_cuts;
    std::vector<double> mi_fractions, z_fractions;
};

inline ThresholdTable threshold_table(const std::vector<AssociationScore>& scores,
                                      std::vector<double> mi_cuts = {0, 0.5, 1},
                                      std::vector<double> z_cuts = {0, 1.96, 3.29}) {
    if (scores.empty()) throw std::invalid_argument("threshold_table: empty score set");
    ThresholdTable t;
    t.mi_cuts = std::move(mi_cuts);
    t.z_cuts = std::move(z_cuts);
    for (double cut : t.mi_cuts) {
        size_t n = 0;
        for (const auto& s : scores) n += s.mi > cut;
        t.mi_fractions.push_back(static_cast<double>(n) / static_cast<double>(scores.size()));
    }
    for (double cut : t.z_cuts) {
        size_t n = 0;
        for (const auto& s : scores) n += s.z > cut;
        t.z_fractions.push_back(static_cast<double>(n) / static_cast<double>(scores.size()));
    }
    return t;
}

// ---------------------------------------------------------------------------
// BI-Patterns: adjacent content-word lemma pairs from the source corpus with
// at least one member in the vocabulary and frequency >= min_freq.

struct BigramSet {
    std::map<LemmaPair, uint64_t> pairs;  // adjacency order preserved
};

inline BigramSet extract_bi_patterns(const Corpus& corpus, const Vocabulary& vocab,
                                     const TagScheme& scheme, uint64_t min_freq = 5,
                                     const std::set<std::string>* stoplist = nullptr) {
    std::map<LemmaPair, uint64_t> counts;
    for (const auto& s : corpus.sentences) {
        for (size_t i = 0; i + 1 < s.tokens.size(); ++i) {
            const TokenRecord& x = s.tokens[i];
            const TokenRecord& y = s.tokens[i + 1];
            auto content = [&](const TokenRecord& t) {
                if (scheme.is_proper_noun(t.pos_full)) return false;
                if (!scheme.target_pos.count(t.pos_short)) return false;
                return !(stoplist && stoplist->count(t.lemma));
            };
            if (!content(x) || !content(y)) continue;
            if (!vocab.contains(x.lemma_pos()) && !vocab.contains(y.lemma_pos())) continue;
            ++counts[{x.lemma_pos(), y.lemma_pos()}];
        }
    }
    BigramSet out;
    for (auto& [k, v] : counts)
        if (v >= min_freq) out.pairs.emplace(k, v);
    return out;
}

// ---------------------------------------------------------------------------
// FL-Patterns: unordered distinct pairs over the frequency ranking. Modes
// bound the two ranks: fl15 both within n_primary; fl30 one within n_primary,
// the other within n_secondary; flall one within n_primary, the other
// anywhere. Full enumeration when the space fits sample_size, otherwise a
// seeded uniform sample without replacement.

enum class FlMode { fl15, fl30, flall };

inline FlMode fl_mode_from_string(const std::string& s) {
    if (s == "fl15") return FlMode::fl15;
    if (s == "fl30") return FlMode::fl30;
    if (s == "flall") return FlMode::flall;
    throw std::invalid_argument("unknown FL mode: " + s);
}

// Content-POS lemmas ranked by frequency desc, ties lexicographic.
inline std::vector<LemmaPos> ranked_lemmas(const CorpusStats& stats,
                                           const std::set<std::string>& content_pos,
                                           const std::set<std::string>* stoplist = nullptr) {
    std::vector<std::pair<LemmaPos, uint64_t>> cand;
    for (const auto& [lp, f] : stats.lemma_freq) {
        if (!content_pos.count(lp.pos)) continue;
        if (stoplist && stoplist->count(lp.lemma)) continue;
        cand.emplace_back(lp, f);
    }
    std::sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::vector<LemmaPos> out;
    out.reserve(cand.size());
    for (auto& [lp, f] : cand) out.push_back(std::move(lp));
    return out;
}

inline std::vector<LemmaPair> generate_fl_patterns(const std::vector<LemmaPos>& ranked, FlMode mode,
                                                   size_t n_primary, size_t n_secondary,
                                                   size_t sample_size, uint64_t seed) {
    if (ranked.empty()) throw std::invalid_argument("generate_fl_patterns: empty frequency table");
    const size_t m = ranked.size();
    const size_t n1 = std::min(n_primary, m);
    size_t n2;
    switch (mode) {
        case FlMode::fl15: n2 = n1; break;
        case FlMode::fl30: n2 = std::min(n_secondary, m); break;
        case FlMode::flall: n2 = m; break;
        default: n2 = n1;
    }

    // pair space: {(i, j) : i < n1, i < j < n2}
    auto row_width = [&](size_t i) { return n2 > i + 1 ? n2 - i - 1 : 0; };
    uint64_t total = 0;
    for (size_t i = 0; i < n1; ++i) total += row_width(i);

    std::vector<std::pair<size_t, size_t>> picks;
    if (total <= sample_size) {
        for (size_t i = 0; i < n1; ++i)
            for (size_t j = i + 1; j < n2; ++j) picks.emplace_back(i, j);
    } else {
        // cumulative row offsets for unranking
        std::vector<uint64_t> cum(n1 + 1, 0);
        for (size_t i = 0; i < n1; ++i) cum[i + 1] = cum[i] + row_width(i);
        std::mt19937_64 rng(seed);
        std::set<uint64_t> chosen;
        while (chosen.size() < sample_size) chosen.insert(rng() % total);
        for (uint64_t t : chosen) {
            size_t i = static_cast<size_t>(
                std::upper_bound(cum.begin(), cum.end(), t) - cum.begin() - 1);
            size_t j = i + 1 + static_cast<size_t>(t - cum[i]);
            picks.emplace_back(i, j);
        }
        std::sort(picks.begin(), picks.end());
    }

    std::vector<LemmaPair> out;
    out.reserve(picks.size());
    for (auto& [i, j] : picks) out.emplace_back(ranked[i], ranked[j]);
    return out;
}

// ---------------------------------------------------------------------------
// Hypothesis reports (Tables 6-9 shapes): threshold tables and averages for
// the attested groups and the BI baseline, occurrence rates for unattested
// and FL patterns, and a threshold table for supported unattested patterns.

struct ReportOptions {
    std::vector<uint64_t> min_freq_groups{1, 2, 3, 4, 5};
    AssocOptions assoc;
    std::vector<double> mi_cuts{0, 0.5, 1};
    std::vector<double> z_cuts{0, 1.96, 3.29};
    bool average_includes_unsupported = true;
    uint64_t occurrence_high = 5;  // "occurred five times" column
};

struct HypothesisReport {
    struct ScoreRow {
        std::string group;
        size_t n = 0;
        ThresholdTable table;
        double avg_mi = 0;
        double avg_z = 0;
    };
    struct OccurrenceRow {
        std::string group;
        size_t n = 0;
        double frac_once = 0;
        double frac_high = 0;
    };
    std::vector<ScoreRow> attested_rows;  // Att-all, Att-2..Att-5
    ScoreRow bi_row;
    bool has_bi = false;
    std::vector<OccurrenceRow> occurrence_rows;  // Unattested + FL groups
    ScoreRow unattested_supported;
    bool has_unattested_supported = false;
};

namespace detail {

inline HypothesisReport::ScoreRow make_score_row(const std::string& name,
                                                 const std::vector<LemmaPair>& pairs,
                                                 const CooccurrenceIndex& idx,
                                                 const ReportOptions& opts, unsigned threads) {
    HypothesisReport::ScoreRow row;
    row.group = name;
    row.n = pairs.size();
    if (pairs.empty()) return row;
    std::vector<AssociationScore> scores(pairs.size());
    parallel_for(pairs.size(), threads, [&](size_t i) {
        scores[i] = score_pair(idx, pairs[i].first, pairs[i].second, opts.assoc);
    });
    row.table = threshold_table(scores, opts.mi_cuts, opts.z_cuts);
    double mi = 0, z = 0;
    size_t n_avg = 0;
    for (const auto& s : scores) {
        if (!opts.average_includes_unsupported && !s.supported) continue;
        mi += s.mi;
        z += s.z;
        ++n_avg;
    }
    if (n_avg > 0) {
        row.avg_mi = mi / static_cast<double>(n_avg);
        row.avg_z = z / static_cast<double>(n_avg);
    }
    return row;
}

inline HypothesisReport::OccurrenceRow make_occurrence_row(const std::string& name,
                                                           const std::vector<LemmaPair>& pairs,
                                                           const CooccurrenceIndex& idx,
                                                           uint64_t high) {
    HypothesisReport::OccurrenceRow row;
    row.group = name;
    row.n = pairs.size();
    if (pairs.empty()) return row;
    size_t once = 0, many = 0;
    for (const auto& p : pairs) {
        uint64_t o = idx.o(p.first, p.second);
        once += o >= 1;
        many += o >= high;
    }
    row.frac_once = static_cast<double>(once) / static_cast<double>(pairs.size());
    row.frac_high = static_cast<double>(many) / static_cast<double>(pairs.size());
    return row;
}

}  // namespace detail

struct BaselineInputs {
    const BigramSet* bigrams = nullptr;
    std::vector<std::pair<std::string, std::vector<LemmaPair>>> fl_sets;
};

inline HypothesisReport hypothesis_report(const PatternSet& patterns,
                                          const BaselineInputs& baselines,
                                          const CooccurrenceIndex& idx, const ReportOptions& opts,
                                          unsigned threads = 1) {
    HypothesisReport rep;

    std::vector<LemmaPair> unattested;
    std::vector<std::pair<LemmaPair, uint64_t>> attested;
    for (const auto& p : patterns.items) {
        if (p.attested) attested.emplace_back(LemmaPair{p.a, p.b}, p.attested_count);
        else unattested.emplace_back(p.a, p.b);
    }

    for (uint64_t g : opts.min_freq_groups) {
        std::vector<LemmaPair> grp;
        for (const auto& [pair, count] : attested)
            if (count >= g) grp.push_back(pair);
        std::string name = g <= 1 ? "att-all" : "att-" + std::to_string(g);
        rep.attested_rows.push_back(detail::make_score_row(name, grp, idx, opts, threads));
    }

    if (baselines.bigrams) {
        std::vector<LemmaPair> bi;
        bi.reserve(baselines.bigrams->pairs.size());
        for (const auto& [pair, freq] : baselines.bigrams->pairs) bi.push_back(pair);
        rep.bi_row = detail::make_score_row("bi-patterns", bi, idx, opts, threads);
        rep.has_bi = true;
    }

    rep.occurrence_rows.push_back(
        detail::make_occurrence_row("unattested", unattested, idx, opts.occurrence_high));
    for (const auto& [name, pairs] : baselines.fl_sets)
        rep.occurrence_rows.push_back(
            detail::make_occurrence_row(name, pairs, idx, opts.occurrence_high));

    std::vector<LemmaPair> supported;
    for (const auto& p : unattested)
        if (idx.o(p.first, p.second) >= opts.assoc.support) supported.push_back(p);
    if (!supported.empty()) {
        rep.unattested_supported =
            detail::make_score_row("unattested-supported", supported, idx, opts, threads);
        rep.has_unattested_supported = true;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Renderers

inline std::string render_report_tsv(const HypothesisReport& rep) {
    std::string out;
    auto emit_score_row = [&](const HypothesisReport::ScoreRow& r) {
        out += "scores\t" + r.group + "\t" + std::to_string(r.n);
        for (double f : r.table.mi_fractions) out += "\t" + fmt_double(f);
        for (double f : r.table.z_fractions) out += "\t" + fmt_double(f);
        out += "\t" + fmt_double(r.avg_mi) + "\t" + fmt_double(r.avg_z) + "\n";
    };
    for (const auto& r : rep.attested_rows) emit_score_row(r);
    if (rep.has_bi) emit_score_row(rep.bi_row);
    for (const auto& r : rep.occurrence_rows)
        out += "occurrence\t" + r.group + "\t" + std::to_string(r.n) + "\t" + fmt_double(r.frac_once) +
               "\t" + fmt_double(r.frac_high) + "\n";
    if (rep.has_unattested_supported) emit_score_row(rep.unattested_supported);
    return out;
}

inline std::string render_report_text(const HypothesisReport& rep) {
    std::string out;
    char buf[256];
    auto pct = [](double f) { return 100.0 * f; };

    out += "Association scores vs statistical-chance thresholds\n";
    if (!rep.attested_rows.empty()) {
        const auto& cuts = rep.attested_rows.front().table;
        out += "  group               n";
        for (double c : cuts.mi_cuts) {
            std::snprintf(buf, sizeof buf, "  MI>%-5g", c);
            out += buf;
        }
        for (double c : cuts.z_cuts) {
            std::snprintf(buf, sizeof buf, "  Z>%-6g", c);
            out += buf;
        }
        out += "  avg MI   avg Z\n";
    }
    auto emit_row = [&](const HypothesisReport::ScoreRow& r) {
        std::snprintf(buf, sizeof buf, "  %-18s %6zu", r.group.c_str(), r.n);
        out += buf;
        for (double f : r.table.mi_fractions) {
            std::snprintf(buf, sizeof buf, "  %6.1f%%", pct(f));
            out += buf;
        }
        for (double f : r.table.z_fractions) {
            std::snprintf(buf, sizeof buf, "  %6.1f%%", pct(f));
            out += buf;
        }
        std::snprintf(buf, sizeof buf, "  %6.2f  %6.2f\n", r.avg_mi, r.avg_z);
        out += buf;
    };
    for (const auto& r : rep.attested_rows) emit_row(r);
    if (rep.has_bi) emit_row(rep.bi_row);

    out += "\nOccurrence of generated and baseline pairs in the evaluation corpus\n";
    out += "  group               n    >=1      >=5\n";
    for (const auto& r : rep.occurrence_rows) {
        std::snprintf(buf, sizeof buf, "  %-18s %6zu  %5.1f%%  %5.1f%%\n", r.group.c_str(), r.n,
                      pct(r.frac_once), pct(r.frac_high));
        out += buf;
    }

    if (rep.has_unattested_supported) {
        out += "\nSupported unattested patterns vs thresholds\n";
        emit_row(rep.unattested_supported);
    }
    return out;
}

}  // namespace depmine
