#pragma once

// Dependency-parsed corpus model: the 8-column tabular reader, POS tag
// normalization, dependency-label filtering, and corpus statistics.
//
// Input format, one token per line, blank line between sentences:
//   token  lemma  pos_full  pos_short  sent_id  token_id  head_id  dep_label

#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "depmine/common.hpp"
#include "depmine/io_util.hpp"
#include "depmine/parallel.hpp"

namespace depmine {

inline constexpr int64_t kRootHead = -1;

struct TokenRecord {
    std::string token;
    std::string lemma;
    std::string pos_full;
    std::string pos_short;  // normalized short tag (see PosMap)
    int64_t sent_id = 0;
    int64_t token_id = 0;   // 0-based position within the sentence
    int64_t head_id = kRootHead;
    std::string dep_label;  // label as read from the corpus
    bool dep_active = true; // false: edge kept in the sentence but emits no contexts

    LemmaPos lemma_pos() const { return {lemma, pos_short}; }

    friend bool operator==(const TokenRecord&, const TokenRecord&) = default;
};

struct Sentence {
    int64_t sent_id = 0;
    std::vector<TokenRecord> tokens;

    friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct Corpus {
    std::vector<Sentence> sentences;

    friend bool operator==(const Corpus&, const Corpus&) = default;
};

// Per-preset tag layout: which short tags are matrix targets, which are
// acceptable context classes, and how prepositions / proper nouns are
// recognized.
struct TagScheme {
    std::set<std::string> target_pos;    // rows of the lemma-context matrix
    std::set<std::string> context_pos;   // allowed context-lemma classes
    std::string prep_pos;                // short tag of prepositions (folding)
    std::string number_pos;              // short tag of numbers (optional collapse)
    std::string date_pos;                // short tag of dates (optional collapse)
    std::vector<std::string> pn_prefixes{"NP"};  // pos_full prefixes of proper nouns

    bool is_proper_noun(const std::string& pos_full) const {
        for (const auto& p : pn_prefixes)
            if (pos_full.size() >= p.size() && pos_full.compare(0, p.size(), p) == 0) return true;
        return false;
    }
};

// Full-tag -> short-tag normalization. Total: unmatched tags map to catch_all.
struct PosMap {
    std::map<std::string, std::string> exact;
    std::vector<std::pair<std::string, std::string>> prefixes;  // checked in order
    std::string catch_all = "O";
    bool first_letter = false;  // fallback mode: short tag = first letter of full tag
    bool use_column = false;    // trust the corpus file's own short-PoS column
    TagScheme scheme;
};

inline std::string normalize_pos(const std::string& tag, const PosMap& map) {
    if (auto it = map.exact.find(tag); it != map.exact.end()) return it->second;
    for (const auto& [prefix, target] : map.prefixes)
        if (tag.size() >= prefix.size() && tag.compare(0, prefix.size(), prefix) == 0)
            return target;
    if (map.first_letter && !tag.empty()) return std::string(1, tag[0]);
    return map.catch_all;
}

// Dependency-label policy: labels are first merged, then only kept labels
// emit contexts; everything else is inert (the token stays in the sentence).
struct DepFilter {
    std::set<std::string> kept;
    std::map<std::string, std::string> merged;  // e.g. IOBJ -> OBJ
    std::set<std::string> discarded;            // documented explicit discards

    const std::string& effective(const std::string& label) const {
        auto it = merged.find(label);
        return it == merged.end() ? label : it->second;
    }

    bool active(const std::string& label) const { return kept.count(effective(label)) > 0; }

    void validate() const {
        for (const auto& l : kept)
            if (discarded.count(l))
                throw std::invalid_argument("dep label both kept and discarded: " + l);
        for (const auto& [from, to] : merged)
            if (!kept.count(to))
                throw std::invalid_argument("merge target is not a kept label: " + from + " -> " + to);
    }
};

// ---------------------------------------------------------------------------
// Presets

// SEPLN-style English preset over the extended Penn Treebank tagset.
inline PosMap posmap_english_ptb() {
    PosMap m;
    m.exact = {
        {"JJ", "J"}, {"JJR", "J"}, {"JJS", "J"},
        {"MD", "M"},
        {"NN", "N"}, {"NNS", "N"},
        {"NP", "NP"}, {"NPS", "NP"},
        {"RB", "R"}, {"RBR", "R"}, {"RBS", "R"}, {"RP", "R"},
        {"IN", "S"},
    };
    m.prefixes = {{"VB", "V"}, {"VH", "V"}, {"VV", "V"}};
    m.catch_all = "O";
    m.scheme.target_pos = {"N", "V", "J", "R"};
    m.scheme.context_pos = {"N", "V", "J", "R", "S", "M"};
    m.scheme.prep_pos = "S";
    m.scheme.pn_prefixes = {"NP"};
    return m;
}

// EAGLES-style Spanish preset (Freeling/Treeler tag shapes, e.g. NCMP, VMIP3S0).
inline PosMap posmap_spanish_diana() {
    PosMap m;
    m.prefixes = {
        {"NP", "pn"}, {"N", "n"}, {"V", "v"}, {"A", "a"},
        {"R", "r"}, {"S", "p"}, {"Z", "z"}, {"W", "w"},
    };
    m.catch_all = "o";
    m.scheme.target_pos = {"n", "v", "a", "r"};
    m.scheme.context_pos = {"n", "v", "a", "r", "p", "z", "w"};
    m.scheme.prep_pos = "p";
    m.scheme.number_pos = "z";
    m.scheme.date_pos = "w";
    m.scheme.pn_prefixes = {"NP"};
    return m;
}

// Short tag = first letter of the full tag. Offered for corpora whose tagset
// is already collapsed; target/context classes follow the English layout.
inline PosMap posmap_first_letter() {
    PosMap m;
    m.first_letter = true;
    m.catch_all = "O";
    m.scheme.target_pos = {"N", "V", "J", "R"};
    m.scheme.context_pos = {"N", "V", "J", "R", "S", "M"};
    m.scheme.prep_pos = "S";
    m.scheme.pn_prefixes = {"NP"};
    return m;
}

// Trust the file's own short-PoS column, lowercase Spanish-style classes.
inline PosMap posmap_column() {
    PosMap m = posmap_spanish_diana();
    m.use_column = true;
    return m;
}

inline DepFilter depfilter_english_conll08() {
    DepFilter f;
    f.kept = {"ADV", "AMOD", "LGS", "NMOD", "OBJ", "PMOD", "PRD", "SBJ", "VC", "VMOD"};
    f.merged = {{"IOBJ", "OBJ"}};
    f.discarded = {"CC", "CLF", "COORD", "DEP", "EXP", "P", "PRN", "PRT", "ROOT"};
    return f;
}

inline DepFilter depfilter_spanish_diana() {
    DepFilter f;
    f.kept = {"subj", "dobj", "iobj", "creg", "cpred", "atr", "cc", "cag", "spec", "sp", "mod"};
    return f;
}

inline PosMap posmap_preset(const std::string& name) {
    if (name == "english-ptb") return posmap_english_ptb();
    if (name == "spanish-diana") return posmap_spanish_diana();
    if (name == "first-letter") return posmap_first_letter();
    if (name == "column") return posmap_column();
    throw std::invalid_argument("unknown pos preset: " + name);
}

inline DepFilter depfilter_preset(const std::string& name) {
    if (name == "english-conll08") return depfilter_english_conll08();
    if (name == "spanish-diana") return depfilter_spanish_diana();
    throw std::invalid_argument("unknown dep preset: " + name);
}

// ---------------------------------------------------------------------------
// Parsing

struct ParseReport {
    size_t malformed_lines = 0;
    size_t rejected_sentences = 0;
    std::vector<std::string> errors;  // "line N: message", capped

    void add_error(size_t line_no, const std::string& msg) {
        if (errors.size() < 100)
            errors.push_back("line " + std::to_string(line_no) + ": " + msg);
    }

    void merge(const ParseReport& other) {
        malformed_lines += other.malformed_lines;
        rejected_sentences += other.rejected_sentences;
        for (const auto& e : other.errors)
            if (errors.size() < 100) errors.push_back(e);
    }
};

namespace detail {

// head links must form a forest over the sentence's tokens
inline bool validate_sentence(const Sentence& s, size_t first_line, ParseReport& report) {
    std::unordered_map<int64_t, size_t> by_id;
    for (size_t i = 0; i < s.tokens.size(); ++i) {
        if (!by_id.emplace(s.tokens[i].token_id, i).second) {
            report.add_error(first_line, "duplicate token_id " + std::to_string(s.tokens[i].token_id));
            return false;
        }
    }
    for (const auto& t : s.tokens) {
        if (t.head_id == kRootHead) continue;
        if (!by_id.count(t.head_id)) {
            report.add_error(first_line, "head_id " + std::to_string(t.head_id) + " out of range");
            return false;
        }
    }
    // walk head chains with visit stamps
    std::vector<int> stamp(s.tokens.size(), 0);
    int pass = 0;
    for (size_t i = 0; i < s.tokens.size(); ++i) {
        ++pass;
        size_t cur = i;
        while (true) {
            if (stamp[cur] == pass) {
                report.add_error(first_line, "cycle in head links at token_id " +
                                                 std::to_string(s.tokens[cur].token_id));
                return false;
            }
            if (stamp[cur] != 0) break;  // joins an already-cleared chain
            stamp[cur] = pass;
            int64_t h = s.tokens[cur].head_id;
            if (h == kRootHead) break;
            cur = by_id[h];
        }
    }
    return true;
}

struct BlockResult {
    std::vector<Sentence> sentences;
    ParseReport report;
};

inline void parse_block(const std::vector<std::string_view>& lines, size_t base_line_no,
                        const PosMap& pos_map, const DepFilter& dep_filter, BlockResult& out) {
    Sentence cur;
    size_t cur_first_line = 0;

    auto flush = [&] {
        if (cur.tokens.empty()) return;
        if (validate_sentence(cur, cur_first_line, out.report)) {
            out.sentences.push_back(std::move(cur));
        } else {
            ++out.report.rejected_sentences;
        }
        cur = Sentence{};
    };

    for (size_t li = 0; li < lines.size(); ++li) {
        const size_t line_no = base_line_no + li;
        std::string_view line = lines[li];
        if (line.empty()) {
            flush();
            continue;
        }
        auto cols = split_tabs(line);
        if (cols.size() != 8) {
            ++out.report.malformed_lines;
            out.report.add_error(line_no, "expected 8 columns, got " + std::to_string(cols.size()));
            continue;
        }
        auto sent_id = parse_int(cols[4]);
        auto token_id = parse_int(cols[5]);
        auto head_id = parse_int(cols[6]);
        if (!sent_id || !token_id || !head_id) {
            ++out.report.malformed_lines;
            out.report.add_error(line_no, "non-integer id field");
            continue;
        }
        if (!cur.tokens.empty() && *sent_id != cur.sent_id) flush();
        if (cur.tokens.empty()) {
            cur.sent_id = *sent_id;
            cur_first_line = line_no;
        }

        TokenRecord t;
        t.token = std::string(cols[0]);
        t.lemma = std::string(cols[1]);
        t.pos_full = std::string(cols[2]);
        t.pos_short = pos_map.use_column ? std::string(cols[3]) : normalize_pos(t.pos_full, pos_map);
        t.sent_id = *sent_id;
        t.token_id = *token_id;
        // root convention: -1 or the token's own index
        t.head_id = (*head_id == kRootHead || *head_id == *token_id) ? kRootHead : *head_id;
        t.dep_label = std::string(cols[7]);
        t.dep_active = dep_filter.active(t.dep_label);
        cur.tokens.push_back(std::move(t));
    }
    flush();
}

}  // namespace detail

// Parses the full text of a corpus. Ingestion is data-parallel over
// sentence-delimited blocks with an ordered merge.
inline Corpus parse_corpus(std::string_view text, const PosMap& pos_map, const DepFilter& dep_filter,
                           ParseReport* report = nullptr, unsigned threads = 1) {
    auto lines = split_lines(text);

    // block boundaries: group lines so each block ends on a blank line
    constexpr size_t kTargetBlock = 4096;
    std::vector<size_t> starts{0};
    size_t pos = 0;
    while (pos + kTargetBlock < lines.size()) {
        size_t cut = pos + kTargetBlock;
        while (cut < lines.size() && !lines[cut].empty()) ++cut;
        if (cut >= lines.size()) break;
        ++cut;  // include the blank line in the finished block
        starts.push_back(cut);
        pos = cut;
    }
    starts.push_back(lines.size());

    const size_t n_blocks = starts.size() - 1;
    std::vector<detail::BlockResult> results(n_blocks);
    parallel_shards(n_blocks, 1, threads, [&](size_t b, size_t, size_t) {
        std::vector<std::string_view> block(lines.begin() + static_cast<ptrdiff_t>(starts[b]),
                                            lines.begin() + static_cast<ptrdiff_t>(starts[b + 1]));
        detail::parse_block(block, starts[b] + 1, pos_map, dep_filter, results[b]);
    });

    Corpus corpus;
    ParseReport merged;
    for (auto& r : results) {
        for (auto& s : r.sentences) corpus.sentences.push_back(std::move(s));
        merged.merge(r.report);
    }
    if (report) *report = merged;
    return corpus;
}

inline Corpus parse_corpus_file(const std::string& path, const PosMap& pos_map,
                                const DepFilter& dep_filter, ParseReport* report = nullptr,
                                unsigned threads = 1) {
    return parse_corpus(read_file(path), pos_map, dep_filter, report, threads);
}

inline std::string serialize_corpus(const Corpus& corpus) {
    std::string out;
    bool first = true;
    for (const auto& s : corpus.sentences) {
        if (!first) out += '\n';
        first = false;
        for (const auto& t : s.tokens) {
            out += t.token;
            out += '\t';
            out += t.lemma;
            out += '\t';
            out += t.pos_full;
            out += '\t';
            out += t.pos_short;
            out += '\t';
            out += std::to_string(t.sent_id);
            out += '\t';
            out += std::to_string(t.token_id);
            out += '\t';
            out += std::to_string(t.head_id);
            out += '\t';
            out += t.dep_label;
            out += '\n';
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Statistics

struct CorpusStats {
    uint64_t token_count = 0;
    uint64_t sentence_count = 0;
    std::map<LemmaPos, uint64_t> lemma_freq;     // over (lemma, pos_short)
    std::map<std::string, uint64_t> pos_counts;  // per short tag
};

inline CorpusStats corpus_stats(const Corpus& corpus, unsigned threads = 1) {
    const size_t n = corpus.sentences.size();
    std::vector<CorpusStats> partial((n + 255) / 256 == 0 ? 1 : (n + 255) / 256);
    parallel_shards(n, 256, threads, [&](size_t shard, size_t b, size_t e) {
        CorpusStats& st = partial[shard];
        for (size_t i = b; i < e; ++i) {
            const auto& s = corpus.sentences[i];
            ++st.sentence_count;
            for (const auto& t : s.tokens) {
                ++st.token_count;
                ++st.lemma_freq[t.lemma_pos()];
                ++st.pos_counts[t.pos_short];
            }
        }
    });
    CorpusStats total;
    for (const auto& st : partial) {
        total.token_count += st.token_count;
        total.sentence_count += st.sentence_count;
        for (const auto& [k, v] : st.lemma_freq) total.lemma_freq[k] += v;
        for (const auto& [k, v] : st.pos_counts) total.pos_counts[k] += v;
    }
    return total;
}

}  // namespace depmine
