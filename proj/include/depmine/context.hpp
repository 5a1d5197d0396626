#pragma once

// Syntactic context extraction: for every eligible lemma occurrence, emit the
// fully-specified [dir:label:context_lemma] triples, folding prepositions into
// the label and substituting proper nouns by the pn_n class token. The two
// single-slot generalizations ("oth" label, "*" lemma) are produced separately
// by generalize() at matrix-build time.

#include <array>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "depmine/common.hpp"
#include "depmine/corpus.hpp"

namespace depmine {

struct ExtractOptions {
    const PosMap* pos_map = nullptr;
    const DepFilter* dep_filter = nullptr;
    const std::set<std::string>* stoplist = nullptr;  // lemmas excluded on both sides
    bool fold_prepositions = true;
    bool collapse_numbers_dates = false;  // map number/date lemmas to num_z / date_w
};

struct TargetContext {
    LemmaPos target;
    ContextTriple context;

    friend bool operator==(const TargetContext&, const TargetContext&) = default;
};

inline std::string fold_preposition(const std::string& prep_lemma, const std::string& dep_label) {
    return prep_lemma + "_" + dep_label;
}

// Returns {c, c with label "oth", c with lemma "*"}; the original comes first.
inline std::array<ContextTriple, 3> generalize(const ContextTriple& c) {
    if (!c.fully_specified())
        throw std::invalid_argument("generalize: context is already generalized: " + to_string(c));
    ContextTriple oth = c;
    oth.label = kOtherLabel;
    ContextTriple star = c;
    star.ctx.lemma = kWildcardLemma;  // POS kept
    return {c, oth, star};
}

namespace detail {

inline bool is_stop(const ExtractOptions& o, const std::string& lemma) {
    return o.stoplist && o.stoplist->count(lemma) > 0;
}

inline bool eligible_target(const ExtractOptions& o, const TokenRecord& t) {
    const TagScheme& s = o.pos_map->scheme;
    if (s.is_proper_noun(t.pos_full)) return false;
    if (!s.target_pos.count(t.pos_short)) return false;
    return !is_stop(o, t.lemma);
}

inline bool eligible_context(const ExtractOptions& o, const TokenRecord& t) {
    const TagScheme& s = o.pos_map->scheme;
    if (s.is_proper_noun(t.pos_full)) return true;
    if (!s.context_pos.count(t.pos_short)) return false;
    return !is_stop(o, t.lemma);
}

inline LemmaPos context_lemma(const ExtractOptions& o, const TokenRecord& t) {
    const TagScheme& s = o.pos_map->scheme;
    if (s.is_proper_noun(t.pos_full)) return {"pn", "n"};
    if (o.collapse_numbers_dates) {
        if (!s.number_pos.empty() && t.pos_short == s.number_pos) return {"num", s.number_pos};
        if (!s.date_pos.empty() && t.pos_short == s.date_pos) return {"date", s.date_pos};
    }
    return t.lemma_pos();
}

inline bool is_preposition(const ExtractOptions& o, const TokenRecord& t) {
    const std::string& p = o.pos_map->scheme.prep_pos;
    return !p.empty() && t.pos_short == p;
}

}  // namespace detail

// Emits (target, context) pairs in (token_id, parent-then-children) order.
// The context side may be any allowed context class or a proper noun; the
// target side is restricted to the preset's content classes.
inline std::vector<TargetContext> extract_contexts(const Sentence& sentence,
                                                   const ExtractOptions& opts) {
    std::vector<TargetContext> out;
    const auto& toks = sentence.tokens;
    const size_t n = toks.size();

    // token_id -> index, and children lists in token order
    std::unordered_map<int64_t, size_t> by_id;
    by_id.reserve(n);
    for (size_t i = 0; i < n; ++i) by_id.emplace(toks[i].token_id, i);
    std::vector<std::vector<size_t>> children(n);
    for (size_t i = 0; i < n; ++i) {
        if (toks[i].head_id == kRootHead) continue;
        auto it = by_id.find(toks[i].head_id);
        if (it != by_id.end() && it->second != i) children[it->second].push_back(i);
    }

    const DepFilter& filter = *opts.dep_filter;

    auto emit = [&](const TokenRecord& target, DepDir dir, const std::string& label,
                    const TokenRecord& ctx) {
        if (!detail::eligible_target(opts, target)) return;
        if (!detail::eligible_context(opts, ctx)) return;
        out.push_back({target.lemma_pos(), {dir, label, detail::context_lemma(opts, ctx)}});
    };

    // Folded label for the edge grandparent -> prep -> dependent; empty if the
    // prep's incoming edge is inert.
    auto folded_label = [&](const TokenRecord& prep) -> std::string {
        if (!filter.active(prep.dep_label)) return {};
        return fold_preposition(prep.lemma, filter.effective(prep.dep_label));
    };

    // A preposition's foldable dependents: content-class words (not further
    // prepositions), located structurally regardless of their own edge label.
    auto prep_dependents = [&](size_t prep_idx) {
        std::vector<size_t> deps;
        for (size_t d : children[prep_idx]) {
            const TokenRecord& t = toks[d];
            if (detail::is_preposition(opts, t)) continue;
            if (opts.pos_map->scheme.is_proper_noun(t.pos_full) ||
                opts.pos_map->scheme.context_pos.count(t.pos_short))
                deps.push_back(d);
        }
        return deps;
    };

    for (size_t i = 0; i < n; ++i) {
        const TokenRecord& tgt = toks[i];

        // context from the governing side (dir '<')
        if (tgt.head_id != kRootHead) {
            auto hit = by_id.find(tgt.head_id);
            if (hit != by_id.end() && hit->second != i) {
                const TokenRecord& head = toks[hit->second];
                if (opts.fold_prepositions && detail::is_preposition(opts, head)) {
                    // grandparent reached through the preposition; preposition
                    // chains fold no further (mirrors prep_dependents)
                    if (head.head_id != kRootHead) {
                        auto git = by_id.find(head.head_id);
                        if (git != by_id.end() &&
                            !detail::is_preposition(opts, toks[git->second])) {
                            std::string label = folded_label(head);
                            if (!label.empty()) emit(tgt, DepDir::parent, label, toks[git->second]);
                        }
                    }
                } else if (filter.active(tgt.dep_label)) {
                    emit(tgt, DepDir::parent, filter.effective(tgt.dep_label), head);
                }
            }
        }

        // contexts from governed tokens (dir '>')
        for (size_t c : children[i]) {
            const TokenRecord& child = toks[c];
            if (opts.fold_prepositions && detail::is_preposition(opts, child)) {
                std::string label = folded_label(child);
                if (label.empty()) continue;
                for (size_t d : prep_dependents(c)) emit(tgt, DepDir::child, label, toks[d]);
            } else if (filter.active(child.dep_label)) {
                emit(tgt, DepDir::child, filter.effective(child.dep_label), child);
            }
        }
    }
    return out;
}

}  // namespace depmine
