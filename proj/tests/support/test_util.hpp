#pragma once

// Shared test helpers: compact corpus construction from token tuples,
// temporary directories, and synthetic corpora with planted structure.

#include <unistd.h>

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "depmine/corpus.hpp"
#include "depmine/context.hpp"

namespace testsup {

using namespace depmine;

// One token: lemma, pos_full, head (index or -1), label. Surface = lemma.
struct T {
    std::string lemma;
    std::string pos_full;
    int64_t head;
    std::string label;
};

inline Sentence make_sentence(int64_t sent_id, const std::vector<T>& toks, const PosMap& pm,
                              const DepFilter& df) {
    Sentence s;
    s.sent_id = sent_id;
    for (size_t i = 0; i < toks.size(); ++i) {
        TokenRecord r;
        r.token = toks[i].lemma;
        r.lemma = toks[i].lemma;
        r.pos_full = toks[i].pos_full;
        r.pos_short = pm.use_column ? toks[i].pos_full : normalize_pos(toks[i].pos_full, pm);
        r.sent_id = sent_id;
        r.token_id = static_cast<int64_t>(i);
        r.head_id = toks[i].head;
        r.dep_label = toks[i].label;
        r.dep_active = df.active(toks[i].label);
        s.tokens.push_back(std::move(r));
    }
    return s;
}

inline Corpus make_corpus(const std::vector<std::vector<T>>& sentences, const PosMap& pm,
                          const DepFilter& df) {
    Corpus c;
    for (size_t i = 0; i < sentences.size(); ++i)
        c.sentences.push_back(make_sentence(static_cast<int64_t>(i), sentences[i], pm, df));
    return c;
}

// Serialized TSV text for parser-level tests.
inline std::string corpus_text(const std::vector<std::vector<T>>& sentences) {
    std::string out;
    for (size_t i = 0; i < sentences.size(); ++i) {
        if (i) out += '\n';
        for (size_t t = 0; t < sentences[i].size(); ++t) {
            const auto& tok = sentences[i][t];
            out += tok.lemma + "\t" + tok.lemma + "\t" + tok.pos_full + "\tx\t" + std::to_string(i) +
                   "\t" + std::to_string(t) + "\t" + std::to_string(tok.head) + "\t" + tok.label +
                   "\n";
        }
    }
    return out;
}

struct TempDir {
    std::filesystem::path path;

    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        for (int i = 0; i < 10000; ++i) {
            auto cand = base / ("depmine_test_" + std::to_string(::getpid()) + "_" +
                                std::to_string(counter()++));
            std::error_code ec;
            if (std::filesystem::create_directories(cand, ec)) {
                path = cand;
                return;
            }
        }
        throw std::runtime_error("cannot create temp dir");
    }

    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }

    static int& counter() {
        static int c = 0;
        return c;
    }

    std::string file(const std::string& name) const { return (path / name).string(); }
};

// ---------------------------------------------------------------------------
// Planted-group corpora: `groups` disjoint lemma families whose nouns occur
// only with their own verbs (dobj) and adjectives (mod). Context support is
// disjoint across groups by construction.

struct PlantedSpec {
    size_t groups = 3;
    size_t nouns_per_group = 6;
    size_t verbs_per_group = 4;
    size_t adjs_per_group = 3;
    size_t sentences = 300;
};

struct PlantedCorpus {
    Corpus corpus;
    // planted group of every target lemma, keyed by lemma string
    std::map<std::string, size_t> group_of;
    PosMap pos_map;
    DepFilter dep_filter;
};

inline PlantedCorpus make_planted_corpus(const PlantedSpec& spec, uint64_t seed) {
    PlantedCorpus out;
    out.pos_map = posmap_spanish_diana();
    out.dep_filter = depfilter_spanish_diana();
    std::mt19937_64 rng(seed);

    auto name = [](const char* stem, size_t g, size_t i) {
        return std::string(stem) + std::to_string(g) + "x" + std::to_string(i);
    };

    std::vector<std::vector<T>> sents;
    for (size_t s = 0; s < spec.sentences; ++s) {
        size_t g = rng() % spec.groups;
        std::string noun = name("n", g, rng() % spec.nouns_per_group);
        std::string verb = name("v", g, rng() % spec.verbs_per_group);
        std::string adj = name("a", g, rng() % spec.adjs_per_group);
        // verb -> noun (dobj), noun -> adj (mod)
        std::vector<T> sent{{verb, "VMIP3S0", -1, "root"},
                            {noun, "NCMS0", 0, "dobj"},
                            {adj, "AQ0MS0", 1, "mod"}};
        sents.push_back(std::move(sent));
        out.group_of[noun] = g;
        out.group_of[verb] = g;
        out.group_of[adj] = g;
    }
    out.corpus = make_corpus(sents, out.pos_map, out.dep_filter);
    return out;
}

}  // namespace testsup
