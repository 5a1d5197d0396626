// Acceptance suite: one pass/fail line per criterion. Tolerances and
// thresholds are pinned in code; the process exits nonzero when any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "depmine/assoc.hpp"
#include "depmine/cluster.hpp"
#include "depmine/linker.hpp"
#include "depmine/patterns.hpp"
#include "depmine/pipeline.hpp"
#include "support/oracles.hpp"
#include "support/test_util.hpp"

using namespace depmine;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::vector<uint32_t> canon(const std::vector<uint32_t>& a) {
    std::map<uint32_t, uint32_t> seen;
    std::vector<uint32_t> out;
    out.reserve(a.size());
    for (uint32_t c : a) out.push_back(seen.emplace(c, static_cast<uint32_t>(seen.size())).first->second);
    return out;
}

// ---------------------------------------------------------------------------
// 1. PPMI oracle equivalence on 50 random sparse count matrices (<= 20x30).

Outcome criterion_ppmi_oracle() {
    std::mt19937_64 rng(11);
    for (int iter = 0; iter < 50; ++iter) {
        size_t nr = 1 + rng() % 20, nc = 1 + rng() % 30;
        oracles::Dense f(nr, std::vector<double>(nc, 0.0));
        for (size_t i = 0; i < nr; ++i)
            for (size_t j = 0; j < nc; ++j)
                if (rng() % 3 == 0) f[i][j] = static_cast<double>(1 + rng() % 20);
        bool any = false;
        for (auto& row : f)
            for (double v : row) any = any || v > 0;
        if (!any) f[0][0] = 1;

        auto got = oracles::to_dense(apply_ppmi(oracles::from_dense(f)));
        auto want = oracles::dense_ppmi(f);
        for (size_t i = 0; i < nr; ++i)
            for (size_t j = 0; j < nc; ++j)
                if (std::fabs(got[i][j] - want[i][j]) > 1e-9)
                    return {false, "mismatch at iter " + std::to_string(iter)};
    }
    return {true, "50 matrices within 1e-9"};
}

// ---------------------------------------------------------------------------
// 2. Clustering recovery on planted corpora, p in {2,3,4}.

struct PlantedMatrix {
    SparseMatrix X;
    std::vector<uint32_t> truth;
};

PlantedMatrix planted_noun_matrix(size_t groups, uint64_t seed) {
    std::mt19937_64 rng(seed * 77 + 5);
    testsup::PlantedSpec spec;
    spec.groups = groups;
    spec.nouns_per_group = 5 + rng() % 6;  // 5..10 lemmas per planted group
    spec.verbs_per_group = 4;
    spec.adjs_per_group = 3;
    spec.sentences = groups * spec.nouns_per_group * 10;
    auto planted = testsup::make_planted_corpus(spec, seed);

    ExtractOptions o;
    o.pos_map = &planted.pos_map;
    o.dep_filter = &planted.dep_filter;
    Vocabulary vocab =
        build_vocabulary(corpus_stats(planted.corpus), 10000, 1, {"n"});
    FreqMatrix fm = build_frequency_matrix(planted.corpus, vocab, o, 1);

    PlantedMatrix out;
    out.X = apply_ppmi(fm.F);
    out.truth.reserve(vocab.size());
    for (const auto& lp : vocab.items)
        out.truth.push_back(static_cast<uint32_t>(planted.group_of.at(lp.lemma)));
    return out;
}

Outcome criterion_cluster_recovery() {
    int recovered = 0, selected = 0;
    const int runs = 100;
    for (int run = 0; run < runs; ++run) {
        size_t p = 2 + run % 3;
        PlantedMatrix pm = planted_noun_matrix(p, 9000 + run);

        ClusterSolution sol = cluster(pm.X, static_cast<uint32_t>(p), 40 + run, 3);
        if (canon(sol.assignment) == canon(pm.truth)) ++recovered;

        auto [kstar, diag] = select_k(pm.X, {2, 3, 4, 5, 6}, 40 + run, 3);
        if (kstar == p) ++selected;
    }
    std::string detail = "recovered " + std::to_string(recovered) + "/100, select_k " +
                         std::to_string(selected) + "/100";
    return {recovered >= 95 && selected >= 90, detail};
}

// ---------------------------------------------------------------------------
// 3. H2 closed forms.

Outcome criterion_h2_closed_forms() {
    SparseMatrix ident = oracles::from_dense({{2, 0}, {2, 0}, {2, 0}});
    double one = criterion_h2(ident, {0, 0, 0}, 1);
    if (one != 1.0) return {false, "identical-vector cluster gave " + fmt_double(one)};

    SparseMatrix ortho = oracles::from_dense({{1, 0}, {1, 0}, {0, 3}, {0, 3}});
    double root2 = criterion_h2(ortho, {0, 0, 1, 1}, 2);
    if (std::fabs(root2 - std::sqrt(2.0)) > 1e-9)
        return {false, "orthogonal pairs gave " + fmt_double(root2)};
    return {true, "H2 = 1 exactly; H2 = sqrt(2) within 1e-9"};
}

// ---------------------------------------------------------------------------
// 4. Threshold semantics on a hand-built 6-cluster score matrix.

Outcome criterion_threshold_semantics() {
    std::vector<std::vector<double>> s = {
        {0, 12, 0, 3, 0, 0},
        {2, 0, 0, 0, 0, 0},
        {0, 0, 0, 9, 0, 1},
        {0, 0, 5, 0, 0, 0},
        {0, 4, 0, 0, 0, 0},
        {0, 0, 0, 0, 0, 0},
    };
    LinkMatrices lm;
    lm.k = 6;
    lm.out.resize(6);
    for (uint32_t i = 0; i < 6; ++i)
        for (uint32_t j = 0; j < 6; ++j)
            if (s[i][j] > 0) lm.out[i][j] = {{{DepDir::parent, "dobj"}}, s[i][j]};

    Thresholds th = determine_thresholds(lm, 0.30, 0.50);
    auto strong = oracles::sweep_strong(s, 0.30);
    auto semi = oracles::sweep_semi(s, 0.50);
    if (th.strong != strong.threshold || th.semi != semi.threshold)
        return {false, "thresholds diverge from the sweep oracle"};
    if (th.achieved_strong_fraction != strong.fraction ||
        th.achieved_semi_fraction != semi.fraction)
        return {false, "grouped fractions diverge from the sweep oracle"};

    // monotonicity across the full candidate list
    std::set<double> cands;
    for (auto& row : s)
        for (double v : row)
            if (v > 0) cands.insert(v);
    double prev = 2.0;
    for (double t : cands) {
        std::vector<char> g(6, 0);
        for (size_t i = 0; i < 6; ++i)
            for (size_t j = 0; j < 6; ++j)
                if (i != j && std::max(s[i][j], s[j][i]) >= t) g[i] = g[j] = 1;
        size_t n = 0;
        for (char c : g) n += c;
        double frac = static_cast<double>(n) / 6;
        if (frac > prev) return {false, "grouped fraction not monotone"};
        prev = frac;
    }
    return {true, "t1=" + fmt_double(th.strong) + " t2=" + fmt_double(th.semi) +
                      ", fractions match the sweep oracle"};
}

// ---------------------------------------------------------------------------
// 5. Link/pattern chain on an engineered corpus: clusters sharing dobj mass
//    give a hand-derived Strong/Semi/Weak classification, patterns are exact
//    member cross products, and Weak pairs emit nothing.

Outcome criterion_link_pattern_chain() {
    using testsup::T;
    PosMap pm = posmap_spanish_diana();
    DepFilter df = depfilter_spanish_diana();
    ExtractOptions opts;
    opts.pos_map = &pm;
    opts.dep_filter = &df;

    const char* nouns[] = {"melena", "barba", "bigote"};
    const char* verbs[] = {"afeitar", "cepillar", "rizar"};
    const char* adjs[] = {"largo", "gris"};

    std::vector<std::vector<T>> sents;
    // dominant dobj mass between the noun and verb families (skip one combo so
    // it comes back as an unattested pattern)
    for (int r = 0; r < 3; ++r)
        for (int n = 0; n < 3; ++n)
            for (int v = 0; v < 3; ++v) {
                if (n == 2 && v == 2) continue;
                sents.push_back({{verbs[v], "VMIP3S0", -1, "root"},
                                 {nouns[n], "NCMS0", 0, "dobj"}});
            }
    // moderate mod mass between nouns and adjectives
    for (int r = 0; r < 2; ++r)
        for (int n = 0; n < 3; ++n)
            for (int a = 0; a < 2; ++a)
                sents.push_back({{nouns[n], "NCMS0", -1, "root"},
                                 {adjs[a], "AQ0MS0", 0, "mod"}});
    // tiny cpred mass to a singleton adjective family
    sents.push_back({{nouns[0], "NCMS0", -1, "root"}, {"canoso", "AQ0MS0", 0, "cpred"}});
    sents.push_back({{nouns[1], "NCMS0", -1, "root"}, {"canoso", "AQ0MS0", 0, "cpred"}});

    Corpus corpus = testsup::make_corpus(sents, pm, df);
    Vocabulary vocab = build_vocabulary(corpus_stats(corpus), 100, 1, pm.scheme.target_pos);
    FreqMatrix fm = build_frequency_matrix(corpus, vocab, opts, 1);
    SparseMatrix X = apply_ppmi(fm.F);

    ClusterSolution sol = cluster(X, 4, 1, 4);

    // the partition must be the four families
    auto family = [&](const LemmaPos& lp) -> uint32_t {
        if (lp.lemma == "canoso") return 3;
        if (lp.pos == "a") return 2;
        if (lp.pos == "v") return 1;
        return 0;
    };
    std::vector<uint32_t> truth;
    for (const auto& lp : vocab.items) truth.push_back(family(lp));
    if (canon(sol.assignment) != canon(truth))
        return {false, "clustering did not recover the engineered families"};

    auto desc = descriptors(X, sol, 25);
    LinkMatrices links = build_links(desc, fm.contexts, sol, vocab);
    Thresholds th = determine_thresholds(links, 0.30, 0.75);
    auto classes = classify_links(links, th);

    // cluster ids of the families under the returned labeling
    uint32_t cn = 0, cv = 0, ca = 0, cb = 0;
    for (size_t i = 0; i < vocab.size(); ++i) {
        uint32_t f = family(vocab.items[i]);
        if (f == 0) cn = sol.assignment[i];
        if (f == 1) cv = sol.assignment[i];
        if (f == 2) ca = sol.assignment[i];
        if (f == 3) cb = sol.assignment[i];
    }

    // hand-derived expectation: with targets 0.30/0.75 on four clusters, the
    // dominant dobj pair is Strong, the mod pair is Semi, the cpred pair Weak,
    // and everything else Unrelated
    if (classes[cn][cv] != RelationClass::Strong) return {false, "noun-verb pair not Strong"};
    if (classes[cn][ca] != RelationClass::Semi) return {false, "noun-adjective pair not Semi"};
    if (classes[cn][cb] != RelationClass::Weak) return {false, "noun-cpred pair not Weak"};
    if (classes[cv][ca] != RelationClass::Unrelated || classes[cv][cb] != RelationClass::Unrelated ||
        classes[ca][cb] != RelationClass::Unrelated)
        return {false, "expected Unrelated pairs are linked"};

    PatternSet ps = generate_patterns(sol, vocab, links, classes);
    // cross products per concrete relation: dobj 3x3 both directions, mod 3x2
    // both directions; nothing from the Weak pair
    size_t n_dobj_nv = 0, n_dobj_vn = 0, n_mod = 0, n_weak = 0;
    for (const auto& p : ps.items) {
        if (p.label == "dobj" && p.dir == DepDir::parent) ++n_dobj_nv;
        if (p.label == "dobj" && p.dir == DepDir::child) ++n_dobj_vn;
        if (p.label == "mod") ++n_mod;
        if (p.a.lemma == "canoso" || p.b.lemma == "canoso") ++n_weak;
    }
    if (n_dobj_nv != 9 || n_dobj_vn != 9)
        return {false, "dobj cross product wrong: " + std::to_string(n_dobj_nv) + "+" +
                           std::to_string(n_dobj_vn)};
    if (n_mod != 12) return {false, "mod cross product wrong: " + std::to_string(n_mod)};
    if (n_weak != 0) return {false, "Weak pair emitted patterns"};

    // the skipped combo surfaces as an unattested pattern
    DependencyEventIndex idx = build_event_index(corpus, opts);
    split_attested(ps, idx);
    bool found_unattested = false;
    for (const auto& p : ps.items)
        if (p.a.lemma == "bigote" && p.b.lemma == "rizar" && !p.attested) found_unattested = true;
    if (!found_unattested) return {false, "generalization gap not flagged unattested"};

    return {true, "Strong/Semi/Weak as derived; 9+9 dobj, 12 mod, 0 weak patterns"};
}

// ---------------------------------------------------------------------------
// 6. Attestation correctness: 5 injected events among 20 candidates.

Outcome criterion_attestation() {
    using testsup::T;
    PosMap pm = posmap_spanish_diana();
    DepFilter df = depfilter_spanish_diana();
    ExtractOptions opts;
    opts.pos_map = &pm;
    opts.dep_filter = &df;

    const char* nouns[] = {"barba", "bigote", "pelo", "melena"};
    const char* verbs[] = {"afeitar", "cepillar", "rizar", "cortar", "peinar"};
    std::pair<int, int> injected[] = {{0, 0}, {1, 1}, {2, 2}, {2, 3}, {3, 4}};

    std::vector<std::vector<T>> sents;
    for (auto [n, v] : injected)
        sents.push_back({{verbs[v], "VMIP3S0", -1, "root"}, {nouns[n], "NCMS0", 0, "dobj"}});
    Corpus corpus = testsup::make_corpus(sents, pm, df);
    DependencyEventIndex idx = build_event_index(corpus, opts);

    PatternSet ps;
    for (const char* n : nouns)
        for (const char* v : verbs) {
            Pattern p;
            p.a = {n, "n"};
            p.dir = DepDir::parent;
            p.label = "dobj";
            p.b = {v, "v"};
            ps.items.push_back(p);
        }
    ps.sort_unique();
    split_attested(ps, idx);

    size_t attested = 0;
    for (const auto& p : ps.items) {
        bool should = false;
        for (auto [n, v] : injected)
            should = should || (p.a.lemma == nouns[n] && p.b.lemma == verbs[v]);
        if (p.attested != should) return {false, "flag mismatch on " + to_string(p.a)};
        attested += p.attested;
    }
    if (attested != 5) return {false, std::to_string(attested) + " attested"};
    return {true, "exactly the 5 injected events flagged among 20"};
}

// ---------------------------------------------------------------------------
// 7. Merge arithmetic on random pattern sets.

Outcome criterion_merge_arithmetic() {
    std::mt19937_64 rng(321);
    auto make = [](const std::vector<int>& ids, const char* prov) {
        PatternSet ps;
        for (int i : ids) {
            Pattern p;
            p.a = {"n" + std::to_string(i), "n"};
            p.dir = DepDir::parent;
            p.label = "dobj";
            p.b = {"v" + std::to_string(i), "v"};
            p.provenance.insert(prov);
            ps.items.push_back(p);
        }
        ps.sort_unique();
        return ps;
    };
    for (int iter = 0; iter < 50; ++iter) {
        std::vector<int> ia, ib;
        size_t shared = rng() % 12, oa = rng() % 12, ob = rng() % 12;
        for (size_t i = 0; i < shared; ++i) {
            ia.push_back(static_cast<int>(i));
            ib.push_back(static_cast<int>(i));
        }
        for (size_t i = 0; i < oa; ++i) ia.push_back(static_cast<int>(100 + i));
        for (size_t i = 0; i < ob; ++i) ib.push_back(static_cast<int>(200 + i));
        PatternSet a = make(ia, "x"), b = make(ib, "y");
        MergeStats st;
        PatternSet m = merge_configs(a, b, MergeMode::keep_shared_once, &st);
        if (m.size() != a.size() + b.size() - st.overlap || st.overlap != shared)
            return {false, "size identity violated at iter " + std::to_string(iter)};
    }
    // A = B keeps A with dual provenance
    PatternSet a = make({1, 2, 3}, "x"), b = make({1, 2, 3}, "y");
    PatternSet m = merge_configs(a, b);
    if (m.size() != 3) return {false, "A=B did not collapse to A"};
    for (const auto& p : m.items)
        if (!p.provenance.count("x") || !p.provenance.count("y"))
            return {false, "shared pattern lost a provenance"};
    return {true, "|merge| = |A|+|B|-|overlap| on 50 random splits; A=B dual-provenance"};
}

// ---------------------------------------------------------------------------
// 8. Association oracle on 100 random mini-corpora.

Outcome criterion_assoc_oracle() {
    std::mt19937_64 rng(777);
    const char* lemmas[] = {"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"};
    for (int iter = 0; iter < 100; ++iter) {
        EvalCorpus corpus;
        size_t n = 20 + rng() % 181;  // up to 200 sentences
        for (size_t s = 0; s < n; ++s) {
            EvalSentence es;
            size_t len = 1 + rng() % 6;
            for (size_t i = 0; i < len; ++i) es.push_back({lemmas[rng() % 10], "n"});
            corpus.push_back(std::move(es));
        }
        CooccurrenceIndex idx = build_index(corpus, {});
        AssocOptions opts;
        opts.support_rule = iter % 2 == 0;
        oracles::AssocOracle oracle{corpus, opts.support_rule, opts.support};

        std::vector<AssociationScore> scores;
        for (int q = 0; q < 10; ++q) {
            LemmaPos x{lemmas[rng() % 10], "n"}, y{lemmas[rng() % 10], "n"};
            if (x == y) continue;
            double mi = mutual_information(idx, x, y, opts);
            double z = z_score(idx, x, y, opts);
            if (std::fabs(mi - oracle.mi(x, y)) > 1e-9)
                return {false, "MI mismatch at iter " + std::to_string(iter)};
            if (std::fabs(z - oracle.z(x, y)) > 1e-9)
                return {false, "Z mismatch at iter " + std::to_string(iter)};
            scores.push_back(score_pair(idx, x, y, opts));
        }
        if (!scores.empty()) {
            ThresholdTable t = threshold_table(scores);
            for (size_t i = 1; i < t.mi_fractions.size(); ++i)
                if (t.mi_fractions[i] > t.mi_fractions[i - 1] + 1e-15)
                    return {false, "MI fraction chain not monotone"};
            for (size_t i = 1; i < t.z_fractions.size(); ++i)
                if (t.z_fractions[i] > t.z_fractions[i - 1] + 1e-15)
                    return {false, "Z fraction chain not monotone"};
        }
    }
    return {true, "MI and Z match brute force on 100 corpora; chains monotone"};
}

// ---------------------------------------------------------------------------
// 9. Desk-scale qualitative analogue: pipeline patterns beat same-size FL
//    samples on average MI in >= 95/100 seeded trials.

Outcome criterion_selectional_mi() {
    int wins = 0;
    const int trials = 100;
    for (int trial = 0; trial < trials; ++trial) {
        testsup::PlantedSpec spec;
        spec.groups = 3;
        spec.nouns_per_group = 6;
        spec.verbs_per_group = 5;
        spec.adjs_per_group = 3;
        spec.sentences = 1000;
        auto source = testsup::make_planted_corpus(spec, 5000 + trial);
        auto evalgen = testsup::make_planted_corpus(spec, 100000 + trial);

        ExtractOptions o;
        o.pos_map = &source.pos_map;
        o.dep_filter = &source.dep_filter;
        CorpusStats stats = corpus_stats(source.corpus);
        Vocabulary vocab = build_vocabulary(stats, 10000, 1, source.pos_map.scheme.target_pos);
        FreqMatrix fm = build_frequency_matrix(source.corpus, vocab, o, 1);
        SparseMatrix X = apply_ppmi(fm.F);

        // one family per POS per planted group
        ClusterSolution sol = cluster(X, 9, 31 + trial, 2);
        auto desc = descriptors(X, sol, 25);
        LinkMatrices links = build_links(desc, fm.contexts, sol, vocab);
        Thresholds th = determine_thresholds(links, 0.30, 0.50);
        auto classes = classify_links(links, th);
        PatternSet ps = generate_patterns(sol, vocab, links, classes);
        if (ps.items.empty()) continue;  // no win counted

        EvalCorpus eval = eval_view(evalgen.corpus);
        std::vector<LemmaPos> ranked = ranked_lemmas(stats, source.pos_map.scheme.target_pos);
        auto fl = generate_fl_patterns(ranked, FlMode::fl15, ranked.size(), ranked.size(),
                                       ps.items.size(), 900 + trial);

        std::unordered_set<LemmaPos, LemmaPosHash> universe;
        for (const auto& p : ps.items) {
            universe.insert(p.a);
            universe.insert(p.b);
        }
        for (const auto& [x, y] : fl) {
            universe.insert(x);
            universe.insert(y);
        }
        CooccurrenceIndex idx = build_index(eval, universe);

        AssocOptions opts;  // paper support rule, cutoff 5
        double pattern_avg = 0;
        for (const auto& p : ps.items) pattern_avg += mutual_information(idx, p.a, p.b, opts);
        pattern_avg /= static_cast<double>(ps.items.size());
        double fl_avg = 0;
        for (const auto& [x, y] : fl) fl_avg += mutual_information(idx, x, y, opts);
        fl_avg /= static_cast<double>(fl.size());

        if (pattern_avg > fl_avg) ++wins;
    }
    return {wins >= 95, "pattern MI beat FL baseline in " + std::to_string(wins) + "/100 trials"};
}

// ---------------------------------------------------------------------------
// 10. Determinism of the full pipeline across thread counts and reruns.

std::map<std::string, std::string> dir_bytes(const std::filesystem::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : std::filesystem::recursive_directory_iterator(root))
        if (e.is_regular_file())
            out[std::filesystem::relative(e.path(), root).string()] = read_file(e.path());
    return out;
}

Outcome criterion_determinism() {
    const std::string fixture = DEPMINE_SOURCE_DIR "/data/fixture";
    PipelineConfig base = load_config(fixture + "/config.json");
    base.source_corpus = fixture + "/source.tsv";
    base.eval_corpus = fixture + "/eval.tsv";

    auto run_with = [&](unsigned threads, const std::filesystem::path& dir) {
        PipelineConfig cfg = base;
        cfg.threads = threads;
        cfg.output_dir = dir.string();
        run_pipeline(PipelineContext::make(cfg));
        return dir_bytes(dir);
    };

    testsup::TempDir t1, t2, t8, trerun;
    auto b1 = run_with(1, t1.path);
    auto b2 = run_with(2, t2.path);
    auto b8 = run_with(8, t8.path);
    auto br = run_with(1, trerun.path);
    if (b1 != b2) return {false, "1-thread and 2-thread outputs differ"};
    if (b1 != b8) return {false, "1-thread and 8-thread outputs differ"};
    if (b1 != br) return {false, "consecutive runs differ"};
    return {true, std::to_string(b1.size()) + " artifacts byte-identical across 1/2/8 threads and reruns"};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> fn;
    double budget_seconds;  // 0 = no runtime bound
};

}  // namespace

int main() {
    std::vector<Criterion> criteria = {
        {1, "PPMI oracle equivalence", criterion_ppmi_oracle, 5.0},
        {2, "clustering recovery on planted groups", criterion_cluster_recovery, 60.0},
        {3, "H2 closed forms", criterion_h2_closed_forms, 0},
        {4, "threshold semantics vs sweep oracle", criterion_threshold_semantics, 0},
        {5, "link/pattern chain on engineered corpus", criterion_link_pattern_chain, 0},
        {6, "attestation correctness", criterion_attestation, 0},
        {7, "merge arithmetic", criterion_merge_arithmetic, 0},
        {8, "association measure oracle", criterion_assoc_oracle, 0},
        {9, "planted selectional preferences beat FL baseline", criterion_selectional_mi, 120.0},
        {10, "pipeline determinism across threads and reruns", criterion_determinism, 0},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.fn();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.budget_seconds > 0 && secs > c.budget_seconds) {
            out.pass = false;
            out.detail += " [over runtime budget of " + fmt_double(c.budget_seconds) + "s]";
        }
        std::printf("[%s] criterion %2d: %s (%s, %.1fs)\n", out.pass ? "PASS" : "FAIL", c.id,
                    c.name, out.detail.c_str(), secs);
        std::fflush(stdout);
        failures += !out.pass;
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
