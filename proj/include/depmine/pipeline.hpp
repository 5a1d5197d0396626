#pragma once

// End-to-end pipeline: structured JSON config, per-stage artifact files with
// metadata sidecars, and the subcommand runners. Every stage reloads its
// predecessor's dumps, so `pipeline` is literally the composition of the
// individual subcommands; outputs are written atomically and are pure
// functions of (inputs, config, seed).

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "depmine/assoc.hpp"
#include "depmine/cluster.hpp"
#include "depmine/common.hpp"
#include "depmine/context.hpp"
#include "depmine/corpus.hpp"
#include "depmine/dsm.hpp"
#include "depmine/io_util.hpp"
#include "depmine/linker.hpp"
#include "depmine/patterns.hpp"

namespace depmine {

namespace fs = std::filesystem;
using nlohmann::json;

// Usage / precondition problems exit with code 2; runtime failures with 1.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct VocabConfig {
    std::string name;
    size_t n_top = 0;
};

struct PipelineConfig {
    std::string source_corpus;
    std::string eval_corpus;
    std::string output_dir;

    std::string pos_preset = "spanish-diana";
    std::string dep_preset = "spanish-diana";
    std::string pos_map_file;     // custom PosMap JSON, overrides the preset
    std::string dep_filter_file;  // custom DepFilter JSON, overrides the preset
    std::string stoplist_file;
    bool fold_prepositions = true;
    bool collapse_numbers_dates = false;

    std::vector<VocabConfig> configurations;
    uint64_t min_freq = 5;
    uint64_t context_min_freq = 2;

    uint32_t k = 0;  // 0: use k_grid
    std::vector<uint32_t> k_grid;
    uint64_t seed = 1;
    unsigned restarts = 8;
    size_t top_features = 25;

    double target_strong = 0.30;
    double target_semi = 0.50;

    uint64_t support = 5;
    std::vector<double> mi_cuts{0, 0.5, 1};
    std::vector<double> z_cuts{0, 1.96, 3.29};
    std::vector<uint64_t> min_freq_groups{1, 2, 3, 4, 5};
    std::vector<std::string> baselines{"bi", "fl15"};
    size_t fl_primary = 15000;
    size_t fl_secondary = 30000;
    size_t sample_size = 10000;
    uint64_t eval_seed = 7;
    bool average_includes_unsupported = true;

    MergeMode merge_mode = MergeMode::keep_shared_once;

    unsigned threads = 1;
    bool verbose = false;
};

// ---------------------------------------------------------------------------
// Config loading with field-path errors.

namespace cfgdetail {

inline const json* find(const json& root, const std::string& path) {
    const json* cur = &root;
    size_t start = 0;
    while (start < path.size()) {
        size_t dot = path.find('.', start);
        std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
        if (!cur->is_object() || !cur->contains(key)) return nullptr;
        cur = &(*cur)[key];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    return cur;
}

template <class T>
T require(const json& root, const std::string& path) {
    const json* j = find(root, path);
    if (!j) throw UsageError("config: missing field: " + path);
    try {
        return j->get<T>();
    } catch (const json::exception&) {
        throw UsageError("config: invalid value at field: " + path);
    }
}

template <class T>
void maybe(const json& root, const std::string& path, T& out) {
    const json* j = find(root, path);
    if (!j) return;
    try {
        out = j->get<T>();
    } catch (const json::exception&) {
        throw UsageError("config: invalid value at field: " + path);
    }
}

}  // namespace cfgdetail

inline PipelineConfig config_from_json(const json& j) {
    using namespace cfgdetail;
    PipelineConfig c;
    c.source_corpus = require<std::string>(j, "source_corpus");
    maybe(j, "eval_corpus", c.eval_corpus);
    c.output_dir = require<std::string>(j, "output_dir");

    maybe(j, "pos_preset", c.pos_preset);
    maybe(j, "dep_preset", c.dep_preset);
    maybe(j, "pos_map_file", c.pos_map_file);
    maybe(j, "dep_filter_file", c.dep_filter_file);
    maybe(j, "stoplist_file", c.stoplist_file);
    maybe(j, "fold_prepositions", c.fold_prepositions);
    maybe(j, "collapse_numbers_dates", c.collapse_numbers_dates);

    const json* confs = find(j, "configurations");
    if (!confs || !confs->is_array() || confs->empty())
        throw UsageError("config: missing field: configurations (non-empty array)");
    std::set<std::string> names;
    for (size_t i = 0; i < confs->size(); ++i) {
        const json& e = (*confs)[i];
        VocabConfig vc;
        std::string base = "configurations." + std::to_string(i);
        if (!e.is_object() || !e.contains("name") || !e.contains("n_top"))
            throw UsageError("config: invalid value at field: " + base);
        vc.name = e["name"].get<std::string>();
        vc.n_top = e["n_top"].get<size_t>();
        if (!names.insert(vc.name).second)
            throw UsageError("config: duplicate configuration name at field: " + base + ".name");
        c.configurations.push_back(std::move(vc));
    }

    maybe(j, "min_freq", c.min_freq);
    maybe(j, "context_min_freq", c.context_min_freq);
    maybe(j, "clustering.k", c.k);
    maybe(j, "clustering.k_grid", c.k_grid);
    maybe(j, "clustering.seed", c.seed);
    maybe(j, "clustering.restarts", c.restarts);
    maybe(j, "clustering.top_features", c.top_features);
    maybe(j, "linking.target_strong", c.target_strong);
    maybe(j, "linking.target_semi", c.target_semi);
    maybe(j, "evaluation.support", c.support);
    maybe(j, "evaluation.mi_cuts", c.mi_cuts);
    maybe(j, "evaluation.z_cuts", c.z_cuts);
    maybe(j, "evaluation.min_freq_groups", c.min_freq_groups);
    maybe(j, "evaluation.baselines", c.baselines);
    maybe(j, "evaluation.fl_primary", c.fl_primary);
    maybe(j, "evaluation.fl_secondary", c.fl_secondary);
    maybe(j, "evaluation.sample_size", c.sample_size);
    maybe(j, "evaluation.seed", c.eval_seed);
    maybe(j, "evaluation.average_includes_unsupported", c.average_includes_unsupported);

    std::string merge = "keep-shared-once";
    maybe(j, "merge_mode", merge);
    if (merge == "keep-shared-once") c.merge_mode = MergeMode::keep_shared_once;
    else if (merge == "drop-shared") c.merge_mode = MergeMode::drop_shared;
    else throw UsageError("config: invalid value at field: merge_mode");

    maybe(j, "threads", c.threads);
    return c;
}

inline PipelineConfig load_config(const std::string& path) {
    if (!file_exists(path)) throw UsageError("config file not found: " + path);
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw UsageError("config: parse error in " + path + ": " + e.what());
    }
    return config_from_json(j);
}

// ---------------------------------------------------------------------------
// Custom tag/filter resources.

inline PosMap posmap_from_json(const json& j) {
    PosMap m;
    if (j.contains("preset")) m = posmap_preset(j["preset"].get<std::string>());
    if (j.contains("exact"))
        for (auto& [k, v] : j["exact"].items()) m.exact[k] = v.get<std::string>();
    if (j.contains("prefixes")) {
        m.prefixes.clear();
        for (auto& e : j["prefixes"])
            m.prefixes.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    }
    if (j.contains("catch_all")) m.catch_all = j["catch_all"].get<std::string>();
    if (j.contains("first_letter")) m.first_letter = j["first_letter"].get<bool>();
    if (j.contains("use_column")) m.use_column = j["use_column"].get<bool>();
    if (j.contains("scheme")) {
        const json& s = j["scheme"];
        auto str_set = [](const json& a) {
            std::set<std::string> out;
            for (auto& e : a) out.insert(e.get<std::string>());
            return out;
        };
        if (s.contains("target_pos")) m.scheme.target_pos = str_set(s["target_pos"]);
        if (s.contains("context_pos")) m.scheme.context_pos = str_set(s["context_pos"]);
        if (s.contains("prep_pos")) m.scheme.prep_pos = s["prep_pos"].get<std::string>();
        if (s.contains("number_pos")) m.scheme.number_pos = s["number_pos"].get<std::string>();
        if (s.contains("date_pos")) m.scheme.date_pos = s["date_pos"].get<std::string>();
        if (s.contains("pn_prefixes")) {
            m.scheme.pn_prefixes.clear();
            for (auto& e : s["pn_prefixes"]) m.scheme.pn_prefixes.push_back(e.get<std::string>());
        }
    }
    return m;
}

inline DepFilter depfilter_from_json(const json& j) {
    DepFilter f;
    if (j.contains("preset")) f = depfilter_preset(j["preset"].get<std::string>());
    if (j.contains("kept")) {
        f.kept.clear();
        for (auto& e : j["kept"]) f.kept.insert(e.get<std::string>());
    }
    if (j.contains("merged"))
        for (auto& [k, v] : j["merged"].items()) f.merged[k] = v.get<std::string>();
    if (j.contains("discarded"))
        for (auto& e : j["discarded"]) f.discarded.insert(e.get<std::string>());
    f.validate();
    return f;
}

// ---------------------------------------------------------------------------
// Stage context: resolved resources plus artifact paths.

struct PipelineContext {
    PipelineConfig cfg;
    PosMap pos_map;
    DepFilter dep_filter;
    std::set<std::string> stoplist;

    static PipelineContext make(PipelineConfig cfg) {
        PipelineContext ctx;
        ctx.pos_map = cfg.pos_map_file.empty()
                          ? posmap_preset(cfg.pos_preset)
                          : posmap_from_json(json::parse(read_file(cfg.pos_map_file)));
        ctx.dep_filter = cfg.dep_filter_file.empty()
                             ? depfilter_preset(cfg.dep_preset)
                             : depfilter_from_json(json::parse(read_file(cfg.dep_filter_file)));
        ctx.dep_filter.validate();
        if (!cfg.stoplist_file.empty()) {
            std::string stop_text = read_file(cfg.stoplist_file);  // views point into this
            for (auto line : split_lines(stop_text))
                if (!line.empty()) ctx.stoplist.insert(std::string(line));
        }
        ctx.cfg = std::move(cfg);
        return ctx;
    }

    ExtractOptions extract_options() const {
        ExtractOptions o;
        o.pos_map = &pos_map;
        o.dep_filter = &dep_filter;
        o.stoplist = stoplist.empty() ? nullptr : &stoplist;
        o.fold_prepositions = cfg.fold_prepositions;
        o.collapse_numbers_dates = cfg.collapse_numbers_dates;
        return o;
    }

    fs::path out() const { return cfg.output_dir; }
    fs::path cfg_dir(const VocabConfig& vc) const { return out() / ("cfg-" + vc.name); }
};

namespace stagedetail {

inline std::string hex64(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline std::string fingerprint(std::string_view content) { return hex64(fnv1a64(content.data(), content.size())); }

// Writes an artifact atomically and records its fingerprint.
struct MetaWriter {
    json meta;

    void put(const fs::path& path, std::string_view content) {
        atomic_write_file(path, content);
        meta["outputs"][path.filename().string()] = fingerprint(content);
    }

    void finish(const fs::path& meta_path) {
        atomic_write_file(meta_path, meta.dump(2) + "\n");
    }
};

inline std::string need(const fs::path& path, const std::string& stage, const std::string& hint) {
    if (!file_exists(path))
        throw UsageError(stage + ": missing input file: " + path.string() + " (run `" + hint +
                         "` first)");
    return read_file(path);
}

// Stale-input detection: the recorded fingerprint of a produced file must
// still match its content.
inline void check_fresh(const fs::path& meta_path, const fs::path& file, std::string_view content,
                        const std::string& stage) {
    if (!file_exists(meta_path)) return;
    json meta = json::parse(read_file(meta_path));
    if (!meta.contains("outputs")) return;
    const auto& outs = meta["outputs"];
    std::string name = file.filename().string();
    if (!outs.contains(name)) return;
    if (outs[name].get<std::string>() != fingerprint(content))
        throw UsageError(stage + ": stale input file: " + file.string() +
                         " (content changed since it was produced; rerun the producing stage)");
}

}  // namespace stagedetail

// ---------------------------------------------------------------------------
// Stages.

inline void run_ingest(const PipelineContext& ctx) {
    const auto& cfg = ctx.cfg;
    if (!file_exists(cfg.source_corpus))
        throw UsageError("ingest: missing input file: " + cfg.source_corpus);
    ParseReport report;
    Corpus corpus =
        parse_corpus(read_file(cfg.source_corpus), ctx.pos_map, ctx.dep_filter, &report, cfg.threads);
    CorpusStats stats = corpus_stats(corpus, cfg.threads);

    std::string stats_tsv;
    for (const auto& [lp, f] : stats.lemma_freq)
        stats_tsv += lp.lemma + "\t" + lp.pos + "\t" + std::to_string(f) + "\n";

    stagedetail::MetaWriter w;
    w.meta["stage"] = "ingest";
    w.meta["params"] = {{"pos_preset", cfg.pos_preset},
                        {"dep_preset", cfg.dep_preset},
                        {"fold_prepositions", cfg.fold_prepositions},
                        {"collapse_numbers_dates", cfg.collapse_numbers_dates}};
    w.meta["stats"] = {{"tokens", stats.token_count},
                       {"sentences", stats.sentence_count},
                       {"malformed_lines", report.malformed_lines},
                       {"rejected_sentences", report.rejected_sentences}};
    w.put(ctx.out() / "corpus.tsv", serialize_corpus(corpus));
    w.put(ctx.out() / "stats.tsv", stats_tsv);
    w.finish(ctx.out() / "ingest.meta.json");

    if (cfg.verbose)
        std::fprintf(stderr, "[ingest] %llu sentences, %llu tokens, %zu malformed lines, %zu rejected\n",
                     (unsigned long long)stats.sentence_count, (unsigned long long)stats.token_count,
                     report.malformed_lines, report.rejected_sentences);
}

inline Corpus load_ingested_corpus(const PipelineContext& ctx, const std::string& stage) {
    std::string text = stagedetail::need(ctx.out() / "corpus.tsv", stage, "ingest");
    stagedetail::check_fresh(ctx.out() / "ingest.meta.json", ctx.out() / "corpus.tsv", text, stage);
    return parse_corpus(text, ctx.pos_map, ctx.dep_filter, nullptr, ctx.cfg.threads);
}

inline void run_matrix(const PipelineContext& ctx, const std::string& context_dump = {}) {
    const auto& cfg = ctx.cfg;
    Corpus corpus = load_ingested_corpus(ctx, "matrix");
    CorpusStats stats = corpus_stats(corpus, cfg.threads);
    ExtractOptions opts = ctx.extract_options();

    if (!context_dump.empty()) {
        std::string dump;
        for (const auto& s : corpus.sentences)
            for (const auto& tc : extract_contexts(s, opts))
                dump += tc.target.lemma + "\t" + tc.target.pos + "\t" +
                        std::string(1, to_char(tc.context.dir)) + "\t" + tc.context.label + "\t" +
                        tc.context.ctx.lemma + "\t" + tc.context.ctx.pos + "\n";
        atomic_write_file(context_dump, dump);
    }

    for (const auto& vc : cfg.configurations) {
        Vocabulary vocab = build_vocabulary(stats, vc.n_top, cfg.min_freq,
                                            ctx.pos_map.scheme.target_pos,
                                            ctx.stoplist.empty() ? nullptr : &ctx.stoplist);
        FreqMatrix fm = build_frequency_matrix(corpus, vocab, opts, cfg.context_min_freq, cfg.threads);
        SparseMatrix ppmi = apply_ppmi(fm.F, cfg.threads);

        stagedetail::MetaWriter w;
        w.meta["stage"] = "matrix";
        w.meta["params"] = {{"configuration", vc.name},
                            {"n_top", vc.n_top},
                            {"min_freq", cfg.min_freq},
                            {"context_min_freq", cfg.context_min_freq}};
        w.meta["shape"] = {{"n_rows", fm.F.n_rows}, {"n_cols", fm.F.n_cols}, {"total", fm.F.total}};
        fs::path dir = ctx.cfg_dir(vc);
        w.put(dir / "vocab.tsv", write_vocab_tsv(vocab));
        w.put(dir / "contexts.tsv", write_contexts_tsv(fm.contexts));
        w.put(dir / "freq.tsv", write_matrix_tsv(fm.F));
        w.put(dir / "ppmi.tsv", write_matrix_tsv(ppmi));
        w.finish(dir / "matrix.meta.json");
        if (cfg.verbose)
            std::fprintf(stderr, "[matrix] %s: %zu rows x %zu contexts\n", vc.name.c_str(),
                         fm.F.n_rows, fm.F.n_cols);
    }
}

struct LoadedMatrix {
    Vocabulary vocab;
    ContextIndex contexts;
    SparseMatrix ppmi;
};

inline LoadedMatrix load_matrix(const PipelineContext& ctx, const VocabConfig& vc,
                                const std::string& stage) {
    fs::path dir = ctx.cfg_dir(vc);
    LoadedMatrix lm;
    std::string vtxt = stagedetail::need(dir / "vocab.tsv", stage, "matrix");
    std::string ctxt = stagedetail::need(dir / "contexts.tsv", stage, "matrix");
    std::string mtxt = stagedetail::need(dir / "ppmi.tsv", stage, "matrix");
    stagedetail::check_fresh(dir / "matrix.meta.json", dir / "ppmi.tsv", mtxt, stage);
    lm.vocab = read_vocab_tsv(vtxt);
    lm.contexts = read_contexts_tsv(ctxt);
    lm.ppmi = read_matrix_tsv(mtxt);
    return lm;
}

inline std::string write_clusters_machine(const ClusterSolution& sol,
                                          const std::vector<std::vector<ScoredContext>>& desc,
                                          const ContextIndex& contexts) {
    std::string out = "K\t" + std::to_string(sol.k) + "\t" + fmt_double(sol.h2) + "\t" +
                      std::to_string(sol.seed) + "\n";
    for (size_t i = 0; i < sol.assignment.size(); ++i)
        out += "A\t" + std::to_string(i) + "\t" + std::to_string(sol.assignment[i]) + "\n";
    for (uint32_t c = 0; c < desc.size(); ++c)
        for (const auto& sc : desc[c]) {
            const ContextTriple& t = contexts.cols[sc.col];
            out += "D\t" + std::to_string(c) + "\t" + std::string(1, to_char(t.dir)) + "\t" +
                   t.label + "\t" + t.ctx.lemma + "\t" + t.ctx.pos + "\t" + fmt_double(sc.score) +
                   "\t" + fmt_double(sc.descriptive) + "\t" + fmt_double(sc.discriminative) + "\n";
        }
    return out;
}

struct LoadedClusters {
    ClusterSolution sol;
    std::vector<std::vector<ScoredContext>> descriptors;
};

inline LoadedClusters read_clusters_machine(std::string_view text, const ContextIndex& contexts) {
    LoadedClusters lc;
    for (auto line : split_lines(text)) {
        if (line.empty()) continue;
        auto cols = split_tabs(line);
        if (cols[0] == "K") {
            lc.sol.k = static_cast<uint32_t>(parse_int(cols[1]).value());
            lc.sol.h2 = parse_double(cols[2]).value();
            lc.sol.seed = static_cast<uint64_t>(parse_int(cols[3]).value());
            lc.descriptors.resize(lc.sol.k);
        } else if (cols[0] == "A") {
            size_t row = static_cast<size_t>(parse_int(cols[1]).value());
            if (lc.sol.assignment.size() <= row) lc.sol.assignment.resize(row + 1);
            lc.sol.assignment[row] = static_cast<uint32_t>(parse_int(cols[2]).value());
        } else if (cols[0] == "D") {
            uint32_t c = static_cast<uint32_t>(parse_int(cols[1]).value());
            ContextTriple t;
            t.dir = dep_dir_from_char(cols[2][0]);
            t.label = std::string(cols[3]);
            t.ctx = {std::string(cols[4]), std::string(cols[5])};
            ScoredContext sc;
            uint32_t col = contexts.id_of(t);
            if (col == UINT32_MAX) throw std::runtime_error("clusters dump: unknown context " + to_string(t));
            sc.col = col;
            sc.score = parse_double(cols[6]).value();
            sc.descriptive = parse_double(cols[7]).value();
            sc.discriminative = parse_double(cols[8]).value();
            lc.descriptors[c].push_back(sc);
        } else {
            throw std::runtime_error("clusters dump: bad record type");
        }
    }
    return lc;
}

inline std::string write_clusters_human(const ClusterSolution& sol, const Vocabulary& vocab,
                                        const std::vector<std::vector<ScoredContext>>& desc,
                                        const ContextIndex& contexts, const PurityResult& purity) {
    std::string out;
    auto members = sol.members();
    char buf[128];
    for (uint32_t c = 0; c < sol.k; ++c) {
        std::snprintf(buf, sizeof buf, "cluster %u (n=%zu, purity=%.2f)\n", c, members[c].size(),
                      purity.per_cluster[c]);
        out += buf;
        out += "  lemmas:";
        for (uint32_t i : members[c]) out += " " + to_string(vocab.items[i]);
        out += "\n";
        for (const auto& sc : desc[c]) {
            const ContextTriple& t = contexts.cols[sc.col];
            std::snprintf(buf, sizeof buf, "  %c %s %s %.6f\n", to_char(t.dir), t.label.c_str(),
                          to_string(t.ctx).c_str(), sc.score);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

inline void run_cluster(const PipelineContext& ctx) {
    const auto& cfg = ctx.cfg;
    if (cfg.k == 0 && cfg.k_grid.empty())
        throw UsageError("config: missing field: clustering.k or clustering.k_grid");
    for (const auto& vc : cfg.configurations) {
        LoadedMatrix lm = load_matrix(ctx, vc, "cluster");
        std::vector<std::string> warnings;
        std::vector<KDiagnostics> diag;
        uint32_t k = cfg.k;
        if (k == 0) {
            auto [kstar, d] = select_k(lm.ppmi, cfg.k_grid, cfg.seed, cfg.restarts, cfg.threads,
                                       &warnings);
            k = kstar;
            diag = std::move(d);
        }
        ClusterSolution sol = cluster(lm.ppmi, k, cfg.seed, cfg.restarts, cfg.threads);
        auto desc = descriptors(lm.ppmi, sol, cfg.top_features, cfg.threads);
        PurityResult purity = pos_purity(sol, lm.vocab);

        stagedetail::MetaWriter w;
        w.meta["stage"] = "cluster";
        w.meta["params"] = {{"configuration", vc.name},
                            {"k", k},
                            {"seed", cfg.seed},
                            {"restarts", cfg.restarts},
                            {"top_features", cfg.top_features}};
        w.meta["result"] = {{"h2", sol.h2}, {"avg_purity", purity.average}};
        if (!diag.empty()) {
            json jd = json::array();
            for (const auto& d : diag) jd.push_back({{"k", d.k}, {"ch", d.ch}, {"h2", d.h2}});
            w.meta["k_selection"] = jd;
        }
        if (!warnings.empty()) w.meta["warnings"] = warnings;
        fs::path dir = ctx.cfg_dir(vc);
        w.put(dir / "clusters.tsv", write_clusters_machine(sol, desc, lm.contexts));
        w.put(dir / "clusters.txt", write_clusters_human(sol, lm.vocab, desc, lm.contexts, purity));
        w.finish(dir / "cluster.meta.json");
        if (cfg.verbose)
            std::fprintf(stderr, "[cluster] %s: k=%u h2=%.6f purity=%.3f\n", vc.name.c_str(), k,
                         sol.h2, purity.average);
    }
}

inline void run_link(const PipelineContext& ctx) {
    const auto& cfg = ctx.cfg;
    for (const auto& vc : cfg.configurations) {
        LoadedMatrix lm = load_matrix(ctx, vc, "link");
        fs::path dir = ctx.cfg_dir(vc);
        std::string ctext = stagedetail::need(dir / "clusters.tsv", "link", "cluster");
        stagedetail::check_fresh(dir / "cluster.meta.json", dir / "clusters.tsv", ctext, "link");
        LoadedClusters lc = read_clusters_machine(ctext, lm.contexts);

        LinkMatrices links = build_links(lc.descriptors, lm.contexts, lc.sol, lm.vocab, cfg.threads);
        Thresholds th = determine_thresholds(links, cfg.target_strong, cfg.target_semi);
        auto classes = classify_links(links, th);

        std::string tsv;
        for (uint32_t i = 0; i < links.k; ++i)
            for (uint32_t j = i + 1; j < links.k; ++j) {
                double sij = links.score(i, j), sji = links.score(j, i);
                if (sij == 0 && sji == 0) continue;
                auto rels = [&](uint32_t x, uint32_t y) {
                    std::string s;
                    const auto* r = links.relations(x, y);
                    if (!r) return s;
                    bool first = true;
                    for (const auto& rel : *r) {
                        if (!first) s += ',';
                        s += to_string(rel);
                        first = false;
                    }
                    return s;
                };
                tsv += std::to_string(i) + "\t" + std::to_string(j) + "\t" +
                       to_string(classes[i][j]) + "\t" + fmt_double(sij) + "\t" + fmt_double(sji) +
                       "\t" + rels(i, j) + "\t" + rels(j, i) + "\n";
            }

        stagedetail::MetaWriter w;
        w.meta["stage"] = "link";
        w.meta["params"] = {{"configuration", vc.name},
                            {"target_strong", cfg.target_strong},
                            {"target_semi", cfg.target_semi}};
        w.meta["thresholds"] = {{"strong", th.strong},
                                {"semi", th.semi},
                                {"achieved_strong_fraction", th.achieved_strong_fraction},
                                {"achieved_semi_fraction", th.achieved_semi_fraction},
                                {"strong_target_met", th.strong_target_met},
                                {"semi_target_met", th.semi_target_met}};
        w.put(dir / "links.tsv", tsv);
        w.finish(dir / "link.meta.json");
        if (cfg.verbose)
            std::fprintf(stderr, "[link] %s: t1=%.6f (%.1f%%) t2=%.6f (%.1f%%)\n", vc.name.c_str(),
                         th.strong, 100 * th.achieved_strong_fraction, th.semi,
                         100 * th.achieved_semi_fraction);
    }
}

inline void run_patterns(const PipelineContext& ctx) {
    const auto& cfg = ctx.cfg;
    Corpus corpus = load_ingested_corpus(ctx, "patterns");
    DependencyEventIndex events = build_event_index(corpus, ctx.extract_options(), cfg.threads);

    std::optional<PatternSet> merged;
    size_t merge_overlap_total = 0;
    for (const auto& vc : cfg.configurations) {
        LoadedMatrix lm = load_matrix(ctx, vc, "patterns");
        fs::path dir = ctx.cfg_dir(vc);
        std::string ctext = stagedetail::need(dir / "clusters.tsv", "patterns", "cluster");
        LoadedClusters lc = read_clusters_machine(ctext, lm.contexts);
        std::string ltext = stagedetail::need(dir / "links.tsv", "patterns", "link");
        stagedetail::check_fresh(dir / "link.meta.json", dir / "links.tsv", ltext, "patterns");

        // links.tsv is the report form; relations are rebuilt from the cluster dump
        LinkMatrices links = build_links(lc.descriptors, lm.contexts, lc.sol, lm.vocab, cfg.threads);
        Thresholds th = determine_thresholds(links, cfg.target_strong, cfg.target_semi);
        auto classes = classify_links(links, th);

        PatternSet ps = generate_patterns(lc.sol, lm.vocab, links, classes, vc.name);
        AttestationSummary att = split_attested(ps, events, cfg.threads);

        stagedetail::MetaWriter w;
        w.meta["stage"] = "patterns";
        w.meta["params"] = {{"configuration", vc.name}};
        w.meta["result"] = {{"patterns", ps.size()},
                            {"attested", att.attested},
                            {"unattested", att.unattested}};
        w.put(dir / "patterns.tsv", write_patterns_tsv(ps));
        w.put(dir / "attest.tsv", write_attest_counts_tsv(ps));
        w.finish(dir / "patterns.meta.json");
        if (cfg.verbose)
            std::fprintf(stderr, "[patterns] %s: %zu patterns (%zu attested, %zu unattested)\n",
                         vc.name.c_str(), ps.size(), att.attested, att.unattested);

        if (!merged) {
            merged = std::move(ps);
        } else {
            MergeStats st;
            *merged = merge_configs(*merged, ps, cfg.merge_mode, &st);
            merge_overlap_total += st.overlap;
        }
    }

    AttestationSummary att;
    for (const auto& p : merged->items) (p.attested ? att.attested : att.unattested) += 1;
    stagedetail::MetaWriter w;
    w.meta["stage"] = "patterns-merged";
    w.meta["params"] = {{"merge_mode", cfg.merge_mode == MergeMode::keep_shared_once
                                           ? "keep-shared-once"
                                           : "drop-shared"}};
    w.meta["result"] = {{"patterns", merged->size()},
                        {"attested", att.attested},
                        {"unattested", att.unattested},
                        {"overlap", merge_overlap_total}};
    w.put(ctx.out() / "patterns.tsv", write_patterns_tsv(*merged));
    w.put(ctx.out() / "attest.tsv", write_attest_counts_tsv(*merged));
    w.finish(ctx.out() / "patterns.meta.json");
    if (cfg.verbose)
        std::fprintf(stderr, "[patterns] merged: %zu patterns (%zu attested, %zu unattested)\n",
                     merged->size(), att.attested, att.unattested);
}

inline void run_evaluate(const PipelineContext& ctx) {
    const auto& cfg = ctx.cfg;
    if (cfg.eval_corpus.empty()) throw UsageError("config: missing field: eval_corpus");
    if (!file_exists(cfg.eval_corpus))
        throw UsageError("evaluate: missing input file: " + cfg.eval_corpus);

    std::string ptext = stagedetail::need(ctx.out() / "patterns.tsv", "evaluate", "patterns");
    stagedetail::check_fresh(ctx.out() / "patterns.meta.json", ctx.out() / "patterns.tsv", ptext,
                             "evaluate");
    PatternSet patterns = read_patterns_tsv(ptext);
    std::string atext = stagedetail::need(ctx.out() / "attest.tsv", "evaluate", "patterns");
    read_attest_counts_tsv(atext, patterns);

    Corpus source = load_ingested_corpus(ctx, "evaluate");
    CorpusStats stats = corpus_stats(source, cfg.threads);
    EvalCorpus eval = parse_eval_corpus(read_file(cfg.eval_corpus));

    // baselines
    BaselineInputs baselines;
    BigramSet bigrams;
    size_t largest_vocab = 0;
    for (const auto& vc : cfg.configurations) largest_vocab = std::max(largest_vocab, vc.n_top);
    std::vector<LemmaPos> ranked = ranked_lemmas(stats, ctx.pos_map.scheme.target_pos,
                                                 ctx.stoplist.empty() ? nullptr : &ctx.stoplist);
    for (const auto& b : cfg.baselines) {
        if (b == "bi") {
            Vocabulary vocab = build_vocabulary(stats, largest_vocab, cfg.min_freq,
                                                ctx.pos_map.scheme.target_pos,
                                                ctx.stoplist.empty() ? nullptr : &ctx.stoplist);
            bigrams = extract_bi_patterns(source, vocab, ctx.pos_map.scheme, cfg.support,
                                          ctx.stoplist.empty() ? nullptr : &ctx.stoplist);
            baselines.bigrams = &bigrams;
        } else {
            FlMode mode = fl_mode_from_string(b);
            baselines.fl_sets.emplace_back(
                b, generate_fl_patterns(ranked, mode, cfg.fl_primary, cfg.fl_secondary,
                                        cfg.sample_size, cfg.eval_seed));
        }
    }

    // universe of lemmas that need co-occurrence counts
    std::unordered_set<LemmaPos, LemmaPosHash> universe;
    for (const auto& p : patterns.items) {
        universe.insert(p.a);
        universe.insert(p.b);
    }
    for (const auto& [pair, freq] : bigrams.pairs) {
        universe.insert(pair.first);
        universe.insert(pair.second);
    }
    for (const auto& [name, pairs] : baselines.fl_sets)
        for (const auto& pr : pairs) {
            universe.insert(pr.first);
            universe.insert(pr.second);
        }

    CooccurrenceIndex idx = build_index(eval, universe, cfg.threads);

    ReportOptions ropts;
    ropts.min_freq_groups = cfg.min_freq_groups;
    ropts.assoc.support = cfg.support;
    ropts.mi_cuts = cfg.mi_cuts;
    ropts.z_cuts = cfg.z_cuts;
    ropts.average_includes_unsupported = cfg.average_includes_unsupported;
    ropts.occurrence_high = cfg.support;
    HypothesisReport rep = hypothesis_report(patterns, baselines, idx, ropts, cfg.threads);

    stagedetail::MetaWriter w;
    w.meta["stage"] = "evaluate";
    w.meta["params"] = {{"support", cfg.support},
                        {"sample_size", cfg.sample_size},
                        {"seed", cfg.eval_seed},
                        {"baselines", cfg.baselines}};
    w.meta["eval_corpus_sentences"] = idx.n_sentences;
    w.put(ctx.out() / "report.tsv", render_report_tsv(rep));
    w.put(ctx.out() / "report.txt", render_report_text(rep));
    w.finish(ctx.out() / "evaluate.meta.json");
    if (cfg.verbose) std::fprintf(stderr, "[evaluate] report written\n");
}

inline void run_pipeline(const PipelineContext& ctx) {
    // referenced paths must exist before any stage runs
    if (!file_exists(ctx.cfg.source_corpus))
        throw UsageError("pipeline: missing input file: " + ctx.cfg.source_corpus);
    if (!ctx.cfg.eval_corpus.empty() && !file_exists(ctx.cfg.eval_corpus))
        throw UsageError("pipeline: missing input file: " + ctx.cfg.eval_corpus);
    run_ingest(ctx);
    run_matrix(ctx);
    run_cluster(ctx);
    run_link(ctx);
    run_patterns(ctx);
    if (!ctx.cfg.eval_corpus.empty()) run_evaluate(ctx);
}

inline int run_subcommand(const std::string& name, const PipelineContext& ctx) {
    if (name == "ingest") run_ingest(ctx);
    else if (name == "matrix") run_matrix(ctx);
    else if (name == "cluster") run_cluster(ctx);
    else if (name == "link") run_link(ctx);
    else if (name == "patterns") run_patterns(ctx);
    else if (name == "evaluate") run_evaluate(ctx);
    else if (name == "pipeline") run_pipeline(ctx);
    else throw UsageError("unknown subcommand: " + name);
    return 0;
}

}  // namespace depmine
