#pragma once

// Shared vocabulary of the pipeline: lemma identity, dependency direction,
// and the syntactic context triple that doubles as matrix column and link edge.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace depmine {

// Lemma identity throughout the pipeline is the (lemma, short-POS) pair,
// rendered as "lemma_pos".
struct LemmaPos {
    std::string lemma;
    std::string pos;

    friend auto operator<=>(const LemmaPos&, const LemmaPos&) = default;
};

inline std::string to_string(const LemmaPos& lp) { return lp.lemma + "_" + lp.pos; }

// '<': the context word governs the target; '>': the target governs the context word.
enum class DepDir : char { parent = '<', child = '>' };

constexpr char to_char(DepDir d) { return static_cast<char>(d); }

inline DepDir dep_dir_from_char(char c) {
    if (c == '<') return DepDir::parent;
    if (c == '>') return DepDir::child;
    throw std::invalid_argument(std::string("bad dependency direction: ") + c);
}

inline constexpr const char* kOtherLabel = "oth";   // generalized dependency label
inline constexpr const char* kWildcardLemma = "*";  // generalized context lemma

// One syntactic neighbor of a target lemma: [dir:label:context_lemma].
// label may be a folded preposition label ("de_sp") or the generalized "oth";
// ctx.lemma may be the wildcard "*" (POS kept). Never both generalized at once.
struct ContextTriple {
    DepDir dir = DepDir::parent;
    std::string label;
    LemmaPos ctx;

    bool label_generalized() const { return label == kOtherLabel; }
    bool lemma_generalized() const { return ctx.lemma == kWildcardLemma; }
    bool fully_specified() const { return !label_generalized() && !lemma_generalized(); }

    friend auto operator<=>(const ContextTriple&, const ContextTriple&) = default;
};

inline std::string to_string(const ContextTriple& c) {
    std::string s(1, to_char(c.dir));
    s += ':';
    s += c.label;
    s += ':';
    s += to_string(c.ctx);
    return s;
}

// FNV-1a, used both for container hashing and artifact fingerprints.
inline uint64_t fnv1a64(const void* data, size_t n, uint64_t h = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline uint64_t fnv1a64(const std::string& s, uint64_t h = 0xcbf29ce484222325ull) {
    return fnv1a64(s.data(), s.size(), h);
}

struct LemmaPosHash {
    size_t operator()(const LemmaPos& lp) const {
        uint64_t h = fnv1a64(lp.lemma);
        h = fnv1a64("\x1f", 1, h);
        h = fnv1a64(lp.pos, h);
        return static_cast<size_t>(h);
    }
};

struct ContextTripleHash {
    size_t operator()(const ContextTriple& c) const {
        char d = to_char(c.dir);
        uint64_t h = fnv1a64(&d, 1);
        h = fnv1a64(c.label, h);
        h = fnv1a64("\x1f", 1, h);
        h = LemmaPosHash{}(c.ctx) ^ (h * 0x9e3779b97f4a7c15ull);
        return static_cast<size_t>(h);
    }
};

// Shortest-exact double formatting is not needed; 17 significant digits
// round-trips and is byte-stable across runs.
inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace depmine
