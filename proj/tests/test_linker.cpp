#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "depmine/linker.hpp"
#include "support/oracles.hpp"

using namespace depmine;

namespace {

LinkMatrices links_from_scores(const std::vector<std::vector<double>>& s) {
    LinkMatrices lm;
    lm.k = static_cast<uint32_t>(s.size());
    lm.out.resize(lm.k);
    for (uint32_t i = 0; i < lm.k; ++i)
        for (uint32_t j = 0; j < lm.k; ++j)
            if (s[i][j] > 0) {
                auto& cell = lm.out[i][j];
                cell.first.insert({DepDir::parent, "dobj"});
                cell.second = s[i][j];
            }
    return lm;
}

}  // namespace

TEST_CASE("build_links resolves descriptor lemmas to their clusters") {
    // vocabulary rows: 0 barba_n (cluster 0), 1 bigote_n (cluster 0),
    //                  2 afeitar_v (cluster 1), 3 cepillar_v (cluster 1)
    Vocabulary vocab;
    vocab.items = {{"barba", "n"}, {"bigote", "n"}, {"afeitar", "v"}, {"cepillar", "v"}};
    vocab.freq = {4, 3, 2, 1};
    vocab.rebuild_index();
    ClusterSolution sol;
    sol.k = 2;
    sol.assignment = {0, 0, 1, 1};

    ContextIndex ctx;
    ctx.cols = {
        {DepDir::parent, "dobj", {"afeitar", "v"}},  // 0: -> cluster 1
        {DepDir::parent, "oth", {"cepillar", "v"}},  // 1: -> cluster 1, generalized label
        {DepDir::parent, "dobj", {"*", "v"}},        // 2: wildcard, contributes nothing
        {DepDir::child, "mod", {"largo", "a"}},      // 3: outside the vocabulary
        {DepDir::parent, "oth", {"bigote", "n"}},    // 4: own cluster, dropped
        {DepDir::child, "subj", {"barba", "n"}},     // 5: -> cluster 0
    };

    std::vector<std::vector<ScoredContext>> desc(2);
    desc[0] = {{0, 5.0, 0, 0}, {1, 3.0, 0, 0}, {2, 9.0, 0, 0}, {3, 2.0, 0, 0}, {4, 1.0, 0, 0}};
    desc[1] = {{5, 4.0, 0, 0}};

    LinkMatrices lm = build_links(desc, ctx, sol, vocab);

    // hand-summed: cluster 0 -> cluster 1 accumulates 5 + 3
    CHECK(lm.score(0, 1) == Catch::Approx(8.0));
    CHECK(lm.score(1, 0) == Catch::Approx(4.0));
    CHECK(lm.score(0, 0) == 0.0);  // diagonal stays empty
    CHECK(lm.score(1, 1) == 0.0);
    REQUIRE(lm.relations(0, 1) != nullptr);
    CHECK(lm.relations(0, 1)->size() == 2);  // <:dobj and <:oth both recorded
    CHECK(lm.relations(0, 1)->count({DepDir::parent, "oth"}) == 1);
    CHECK(lm.relations(1, 0)->count({DepDir::child, "subj"}) == 1);

    SECTION("asymmetry is allowed") { CHECK(lm.score(0, 1) != lm.score(1, 0)); }
}

TEST_CASE("determine_thresholds finds the largest value meeting the target") {
    SECTION("uniform scores group everyone") {
        double s = 3.5;
        LinkMatrices lm = links_from_scores(
            {{0, s, s, s}, {s, 0, s, s}, {s, s, 0, s}, {s, s, s, 0}});
        Thresholds th = determine_thresholds(lm, 0.30, 0.50);
        CHECK(th.strong == Catch::Approx(s));
        CHECK(th.achieved_strong_fraction == Catch::Approx(1.0));
        CHECK(th.semi == Catch::Approx(2 * s));
        CHECK(th.achieved_semi_fraction == Catch::Approx(1.0));
        CHECK(th.strong_target_met);
    }

    SECTION("AB:10 BA:1 CD:2 DC:2 with target one half") {
        LinkMatrices lm = links_from_scores(
            {{0, 10, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 2}, {0, 0, 2, 0}});
        Thresholds th = determine_thresholds(lm, 0.50, 0.50);
        CHECK(th.strong == Catch::Approx(10.0));
        CHECK(th.achieved_strong_fraction == Catch::Approx(0.5));
    }

    SECTION("all-zero scores are an error") {
        LinkMatrices lm = links_from_scores({{0, 0}, {0, 0}});
        CHECK_THROWS_AS(determine_thresholds(lm), std::invalid_argument);
    }

    SECTION("fewer than two clusters is an error") {
        LinkMatrices lm = links_from_scores({{0}});
        CHECK_THROWS_AS(determine_thresholds(lm), std::invalid_argument);
    }

    SECTION("unreachable target falls back to the smallest positive score") {
        // only {A,B} can ever group: 2/6 = 33% < 50%
        std::vector<std::vector<double>> s(6, std::vector<double>(6, 0.0));
        s[0][1] = 7;
        Thresholds th = determine_thresholds(links_from_scores(s), 0.50, 0.50);
        CHECK_FALSE(th.strong_target_met);
        CHECK(th.strong == Catch::Approx(7.0));  // smallest positive
        CHECK(th.achieved_strong_fraction == Catch::Approx(2.0 / 6.0));
    }
}

TEST_CASE("thresholds match the exhaustive sweep oracle on random matrices") {
    std::mt19937_64 rng(2025);
    for (int iter = 0; iter < 40; ++iter) {
        size_t k = 3 + rng() % 5;
        std::vector<std::vector<double>> s(k, std::vector<double>(k, 0.0));
        for (size_t i = 0; i < k; ++i)
            for (size_t j = 0; j < k; ++j)
                if (i != j && rng() % 3 == 0) s[i][j] = static_cast<double>(1 + rng() % 12);
        bool any = false;
        for (auto& row : s)
            for (double v : row) any = any || v > 0;
        if (!any) s[0][1] = 2;

        LinkMatrices lm = links_from_scores(s);
        Thresholds th = determine_thresholds(lm, 0.30, 0.50);
        auto strong = oracles::sweep_strong(s, 0.30);
        auto semi = oracles::sweep_semi(s, 0.50);
        CHECK(th.strong == Catch::Approx(strong.threshold));
        CHECK(th.achieved_strong_fraction == Catch::Approx(strong.fraction));
        CHECK(th.strong_target_met == strong.met);
        CHECK(th.semi == Catch::Approx(semi.threshold));
        CHECK(th.achieved_semi_fraction == Catch::Approx(semi.fraction));
        CHECK(th.semi_target_met == semi.met);
    }
}

TEST_CASE("grouped fraction is monotone non-increasing in the threshold") {
    std::mt19937_64 rng(99);
    const size_t k = 6;
    std::vector<std::vector<double>> s(k, std::vector<double>(k, 0.0));
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j)
            if (i != j && rng() % 2) s[i][j] = static_cast<double>(1 + rng() % 9);

    std::set<double> cands;
    for (auto& row : s)
        for (double v : row)
            if (v > 0) cands.insert(v);

    double prev = 2.0;  // above any possible fraction
    for (double t : cands) {  // ascending thresholds
        std::vector<char> g(k, 0);
        for (size_t i = 0; i < k; ++i)
            for (size_t j = 0; j < k; ++j)
                if (i != j && std::max(s[i][j], s[j][i]) >= t) g[i] = g[j] = 1;
        size_t n = 0;
        for (char c : g) n += c;
        double frac = static_cast<double>(n) / k;
        CHECK(frac <= prev);
        prev = frac;
    }
}

TEST_CASE("classify_links applies the two criteria pairwise") {
    std::vector<std::vector<double>> s = {
        {0, 10, 0, 0, 4, 0},
        {1, 0, 0, 0, 0, 0},
        {0, 0, 0, 5, 0, 0},
        {0, 0, 4, 0, 0, 0},
        {4, 0, 0, 0, 0, 0},
        {0, 0, 0, 0, 0, 0},
    };
    LinkMatrices lm = links_from_scores(s);
    Thresholds th;
    th.strong = 10;
    th.semi = 8;
    auto cls = classify_links(lm, th);

    CHECK(cls[0][1] == RelationClass::Strong);  // one direction reaches t1
    CHECK(cls[1][0] == RelationClass::Strong);
    CHECK(cls[2][3] == RelationClass::Semi);  // 5 + 4 >= 8
    CHECK(cls[0][4] == RelationClass::Semi);  // 4 + 4 >= 8
    CHECK(cls[0][2] == RelationClass::Unrelated);
    CHECK(cls[5][4] == RelationClass::Unrelated);
    CHECK(cls[0][0] == RelationClass::Unrelated);  // diagonal

    SECTION("weak requires a positive score below both criteria") {
        auto c2 = classify_links(links_from_scores({{0, 3}, {0, 0}}), th);
        CHECK(c2[0][1] == RelationClass::Weak);
    }

    SECTION("directional pair (t1, 0) is strong") {
        auto c2 = classify_links(links_from_scores({{0, 10}, {0, 0}}), th);
        CHECK(c2[0][1] == RelationClass::Strong);
    }

    SECTION("(0,0) is unrelated") {
        auto c2 = classify_links(links_from_scores({{0, 0}, {0, 0}}), th);
        CHECK(c2[0][1] == RelationClass::Unrelated);
    }

    SECTION("classes are symmetric, strong and semi disjoint, all pairs covered") {
        for (uint32_t i = 0; i < lm.k; ++i)
            for (uint32_t j = 0; j < lm.k; ++j) {
                CHECK(cls[i][j] == cls[j][i]);
                bool covered = cls[i][j] == RelationClass::Strong ||
                               cls[i][j] == RelationClass::Semi ||
                               cls[i][j] == RelationClass::Weak ||
                               cls[i][j] == RelationClass::Unrelated;
                CHECK(covered);
            }
    }
}
