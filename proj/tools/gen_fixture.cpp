// Regenerates the bundled fixture corpora under data/fixture: a 200-sentence
// dependency-parsed source corpus with class-consistent verb/noun/adjective
// co-occurrence, a larger POS-tagged evaluation corpus drawn from the same
// distribution, and a ready-to-run pipeline config.

#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "depmine/io_util.hpp"

namespace {

struct Tok {
    std::string lemma;
    std::string pos_full;
    int64_t head;  // -1 root, else token index
    std::string label;
};

const std::vector<std::string> kFoodNouns = {"pan",   "queso",  "carne", "sopa",
                                             "arroz", "pastel", "fruta", "pescado"};
const std::vector<std::string> kDrinkNouns = {"agua", "vino",  "leche",   "zumo",
                                              "cafe", "sidra", "cerveza", "licor"};
const std::vector<std::string> kPlaceNouns = {"casa",  "plaza", "calle",  "parque",
                                              "museo", "puente", "mercado", "teatro"};
const std::vector<std::string> kEatVerbs = {"comer", "devorar", "probar", "cocinar", "servir",
                                            "preparar"};
const std::vector<std::string> kDrinkVerbs = {"beber", "sorber", "verter", "derramar", "escanciar",
                                              "apurar"};
const std::vector<std::string> kVisitVerbs = {"visitar", "recorrer", "cruzar", "explorar", "rodear",
                                              "atravesar"};
const std::vector<std::string> kFoodAdjs = {"fresco", "rico", "caliente", "frio", "dulce", "salado"};
const std::vector<std::string> kPlaceAdjs = {"antiguo", "amplio",  "ruidoso",
                                             "tranquilo", "celebre", "oscuro"};
const std::vector<std::string> kSubjects = {"hombre", "mujer",   "vecino",   "turista",
                                            "cocinero", "abuelo", "camarero", "viajero"};
const std::vector<std::string> kProperNames = {"maria", "jaime", "carmen", "pedro"};
const std::vector<std::string> kAdverbs = {"ayer", "siempre", "despacio"};
const std::vector<std::string> kRareNouns = {"garabato", "tapiz", "yunque"};  // below min_freq

template <class T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& v) {
    return v[rng() % v.size()];
}

// theme: 0 food/eat, 1 drink/drink-verbs, 2 place/visit
std::vector<Tok> make_sentence(std::mt19937_64& rng) {
    std::vector<Tok> s;
    unsigned theme = rng() % 3;
    const auto& nouns = theme == 0 ? kFoodNouns : theme == 1 ? kDrinkNouns : kPlaceNouns;
    const auto& verbs = theme == 0 ? kEatVerbs : theme == 1 ? kDrinkVerbs : kVisitVerbs;
    const auto& adjs = theme == 2 ? kPlaceAdjs : kFoodAdjs;

    if (rng() % 10 == 0) {
        // possessive fragment: "la sopa de carne" -> sopa [>:de_sp:carne_n]
        int det = 0, head_noun = 1, prep = 2, dep_noun = 3;
        s.resize(4);
        s[det] = {"el", "DA0MS0", head_noun, "spec"};
        s[head_noun] = {pick(rng, nouns), "NCMS0", -1, "root"};
        s[prep] = {"de", "SPS00", head_noun, "sp"};
        s[dep_noun] = {pick(rng, nouns), "NCMS0", prep, "sn"};
        return s;
    }

    // clause: [det] subject verb [det] object [adj] [pp] [adv]
    bool proper_subject = rng() % 5 == 0;
    bool collocation = rng() % 3 == 0;  // fixed noun+adj pairs so bigrams accumulate
    bool with_adj = collocation || rng() % 10 < 6;
    bool with_pp = rng() % 10 < 4;
    bool with_adv = rng() % 10 < 2;
    bool rare_extra = rng() % 25 == 0;

    int verb_idx = -1;
    if (!proper_subject) {
        s.push_back({"el", "DA0MS0", static_cast<int64_t>(s.size() + 1), "spec"});
        s.push_back({pick(rng, kSubjects), "NCMS0", -2, "subj"});  // head patched below
    } else {
        s.push_back({pick(rng, kProperNames), "NP00000", -2, "subj"});
    }
    int subj_idx = static_cast<int>(s.size()) - 1;
    verb_idx = static_cast<int>(s.size());
    s.push_back({pick(rng, verbs), "VMIP3S0", -1, "root"});
    s[subj_idx].head = verb_idx;

    s.push_back({"el", "DA0MS0", static_cast<int64_t>(s.size() + 1), "spec"});
    int obj_idx = static_cast<int>(s.size());
    size_t slot = rng() % 2;
    if (collocation) {
        s.push_back({nouns[slot], "NCMS0", verb_idx, "dobj"});
        s.push_back({adjs[slot], "AQ0MS0", obj_idx, "mod"});
    } else {
        s.push_back({pick(rng, nouns), "NCMS0", verb_idx, "dobj"});
        if (with_adj) s.push_back({pick(rng, adjs), "AQ0MS0", obj_idx, "mod"});
    }
    if (with_pp) {
        int prep_idx = static_cast<int>(s.size());
        s.push_back({"en", "SPS00", verb_idx, "cc"});
        s.push_back({pick(rng, kPlaceNouns), "NCMS0", prep_idx, "sn"});
    }
    if (with_adv) s.push_back({pick(rng, kAdverbs), "RG", verb_idx, "mod"});
    if (rare_extra) {
        int prep_idx = static_cast<int>(s.size());
        s.push_back({"de", "SPS00", obj_idx, "sp"});
        s.push_back({pick(rng, kRareNouns), "NCMS0", prep_idx, "sn"});
    }
    return s;
}

std::string render_source(const std::vector<std::vector<Tok>>& sents) {
    std::string out;
    for (size_t i = 0; i < sents.size(); ++i) {
        if (i) out += '\n';
        for (size_t t = 0; t < sents[i].size(); ++t) {
            const Tok& tok = sents[i][t];
            std::string pos_short = tok.pos_full.substr(0, 2) == "NP" ? "pn"
                                    : tok.pos_full[0] == 'N'          ? "n"
                                    : tok.pos_full[0] == 'V'          ? "v"
                                    : tok.pos_full[0] == 'A'          ? "a"
                                    : tok.pos_full[0] == 'R'          ? "r"
                                    : tok.pos_full[0] == 'S'          ? "p"
                                                                      : "o";
            out += tok.lemma + "\t" + tok.lemma + "\t" + tok.pos_full + "\t" + pos_short + "\t" +
                   std::to_string(i) + "\t" + std::to_string(t) + "\t" + std::to_string(tok.head) +
                   "\t" + tok.label + "\n";
        }
    }
    return out;
}

std::string render_eval(const std::vector<std::vector<Tok>>& sents) {
    std::string out;
    for (size_t i = 0; i < sents.size(); ++i) {
        for (const Tok& tok : sents[i]) {
            std::string pos_short = tok.pos_full.substr(0, 2) == "NP" ? "pn"
                                    : tok.pos_full[0] == 'N'          ? "n"
                                    : tok.pos_full[0] == 'V'          ? "v"
                                    : tok.pos_full[0] == 'A'          ? "a"
                                    : tok.pos_full[0] == 'R'          ? "r"
                                    : tok.pos_full[0] == 'S'          ? "p"
                                                                      : "o";
            out += tok.lemma + "\t" + tok.lemma + "\t" + pos_short + "\t" + std::to_string(i) + "\n";
        }
    }
    return out;
}

const char* kConfig = R"({
  "source_corpus": "data/fixture/source.tsv",
  "eval_corpus": "data/fixture/eval.tsv",
  "output_dir": "out/fixture",
  "pos_preset": "spanish-diana",
  "dep_preset": "spanish-diana",
  "configurations": [
    {"name": "v45", "n_top": 45},
    {"name": "v60", "n_top": 60}
  ],
  "min_freq": 5,
  "context_min_freq": 2,
  "clustering": {"k_grid": [6, 8, 10, 12], "seed": 1, "restarts": 6, "top_features": 25},
  "linking": {"target_strong": 0.3, "target_semi": 0.5},
  "evaluation": {
    "support": 5,
    "baselines": ["bi", "fl15"],
    "fl_primary": 60,
    "fl_secondary": 80,
    "sample_size": 400,
    "seed": 7
  },
  "threads": 1
}
)";

}  // namespace

int main(int argc, char** argv) {
    std::string dir = argc > 1 ? argv[1] : "data/fixture";

    std::mt19937_64 src_rng(12345);
    std::vector<std::vector<Tok>> src;
    for (int i = 0; i < 200; ++i) src.push_back(make_sentence(src_rng));

    std::mt19937_64 eval_rng(99991);
    std::vector<std::vector<Tok>> ev;
    for (int i = 0; i < 800; ++i) ev.push_back(make_sentence(eval_rng));

    depmine::atomic_write_file(dir + "/source.tsv", render_source(src));
    depmine::atomic_write_file(dir + "/eval.tsv", render_eval(ev));
    depmine::atomic_write_file(dir + "/config.json", kConfig);
    std::printf("wrote %s/{source.tsv,eval.tsv,config.json}\n", dir.c_str());
    return 0;
}
