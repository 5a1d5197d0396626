// Command-line front end: one subcommand per pipeline stage plus `pipeline`
// to run everything. Exit codes: 0 ok, 1 runtime failure, 2 usage error.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "depmine/pipeline.hpp"

namespace {

struct Overrides {
    std::string config_path;
    unsigned threads = 0;
    bool verbose = false;

    std::string pos_preset, dep_preset, pos_map_file, dep_filter_file, stoplist_file;
    bool no_fold = false;
    bool collapse_num_dates = false;
    std::string dump_contexts;

    uint32_t k = 0;
    std::vector<uint32_t> k_grid;
    int64_t seed = -1;
    unsigned restarts = 0;
    size_t top_features = 0;

    double target_strong = -1, target_semi = -1;

    std::string merge_mode;

    std::vector<uint64_t> min_freq_groups;
    int64_t support = -1;
    std::vector<double> mi_cuts, z_cuts;
    std::vector<std::string> baselines;
    size_t sample_size = 0;
    int64_t eval_seed = -1;
    bool avg_supported_only = false;
};

void apply_overrides(const CLI::App& sub, const Overrides& ov, depmine::PipelineConfig& cfg) {
    auto set = [&](const char* flag) { return sub.count(flag) > 0; };
    // `evaluate` owns no clustering, so its --seed drives the FL sampling
    const bool eval_stage = sub.get_name() == "evaluate";
    if (set("--threads")) cfg.threads = ov.threads;
    if (set("--verbose")) cfg.verbose = true;
    if (set("--pos-preset")) cfg.pos_preset = ov.pos_preset;
    if (set("--dep-preset")) cfg.dep_preset = ov.dep_preset;
    if (set("--pos-map")) cfg.pos_map_file = ov.pos_map_file;
    if (set("--dep-filter")) cfg.dep_filter_file = ov.dep_filter_file;
    if (set("--stoplist")) cfg.stoplist_file = ov.stoplist_file;
    if (set("--no-fold-prepositions")) cfg.fold_prepositions = false;
    if (set("--collapse-num-dates")) cfg.collapse_numbers_dates = true;
    if (set("--k")) {
        cfg.k = ov.k;
        cfg.k_grid.clear();
    }
    if (set("--k-grid")) {
        cfg.k_grid = ov.k_grid;
        cfg.k = 0;
    }
    if (set("--seed")) {
        if (eval_stage) cfg.eval_seed = static_cast<uint64_t>(ov.seed);
        else cfg.seed = static_cast<uint64_t>(ov.seed);
    }
    if (set("--restarts")) cfg.restarts = ov.restarts;
    if (set("--top-features")) cfg.top_features = ov.top_features;
    if (set("--target-strong")) cfg.target_strong = ov.target_strong;
    if (set("--target-semi")) cfg.target_semi = ov.target_semi;
    if (set("--merge-mode"))
        cfg.merge_mode = ov.merge_mode == "drop-shared" ? depmine::MergeMode::drop_shared
                                                        : depmine::MergeMode::keep_shared_once;
    if (set("--min-freq-groups")) cfg.min_freq_groups = ov.min_freq_groups;
    if (set("--support")) cfg.support = static_cast<uint64_t>(ov.support);
    if (set("--mi-cuts")) cfg.mi_cuts = ov.mi_cuts;
    if (set("--z-cuts")) cfg.z_cuts = ov.z_cuts;
    if (set("--baseline")) cfg.baselines = ov.baselines;
    if (set("--sample-size")) cfg.sample_size = ov.sample_size;
    if (set("--eval-seed")) cfg.eval_seed = static_cast<uint64_t>(ov.eval_seed);
    if (set("--avg-supported-only")) cfg.average_includes_unsupported = false;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lexico-syntactic pattern discovery from dependency-parsed corpora"};
    app.require_subcommand(1);

    Overrides ov;
    std::vector<CLI::App*> subs;
    const char* stage_names[] = {"ingest", "matrix", "cluster", "link",
                                 "patterns", "evaluate", "pipeline"};
    const char* stage_descs[] = {
        "parse and normalize the source corpus",
        "build vocabulary, frequency and PPMI matrices",
        "partition lemmas and score cluster descriptors",
        "link clusters and classify relations",
        "generate, attest and merge patterns",
        "score patterns and baselines on the evaluation corpus",
        "run all stages"};
    for (size_t i = 0; i < 7; ++i) {
        CLI::App* s = app.add_subcommand(stage_names[i], stage_descs[i]);
        s->add_option("--config", ov.config_path, "pipeline config (JSON)")->required();
        s->add_option("--threads", ov.threads, "worker threads");
        s->add_flag("--verbose", ov.verbose, "stage progress on stderr");
        s->add_option("--pos-preset", ov.pos_preset,
                      "english-ptb | spanish-diana | first-letter | column");
        s->add_option("--dep-preset", ov.dep_preset, "english-conll08 | spanish-diana");
        s->add_option("--pos-map", ov.pos_map_file, "custom PosMap JSON file");
        s->add_option("--dep-filter", ov.dep_filter_file, "custom DepFilter JSON file");
        s->add_option("--stoplist", ov.stoplist_file, "stopword list, one lemma per line");
        s->add_flag("--no-fold-prepositions", ov.no_fold, "emit raw preposition edges");
        s->add_flag("--collapse-num-dates", ov.collapse_num_dates,
                    "collapse number/date context lemmas to class tokens");
        s->add_option("--k", ov.k, "fixed cluster count");
        s->add_option("--k-grid", ov.k_grid, "candidate cluster counts")->delimiter(',');
        s->add_option("--seed", ov.seed, "clustering seed");
        s->add_option("--restarts", ov.restarts, "clustering restarts");
        s->add_option("--top-features", ov.top_features, "descriptor contexts per cluster");
        s->add_option("--target-strong", ov.target_strong, "criterion-1 grouped-cluster target");
        s->add_option("--target-semi", ov.target_semi, "criterion-2 grouped-cluster target");
        s->add_option("--merge-mode", ov.merge_mode, "keep-shared-once | drop-shared");
        s->add_option("--min-freq-groups", ov.min_freq_groups, "attested frequency groups")
            ->delimiter(',');
        s->add_option("--support", ov.support, "co-occurrence support cutoff");
        s->add_option("--mi-cuts", ov.mi_cuts, "MI thresholds")->delimiter(',');
        s->add_option("--z-cuts", ov.z_cuts, "Z-score thresholds")->delimiter(',');
        s->add_option("--baseline", ov.baselines, "bi | fl15 | fl30 | flall");
        s->add_option("--sample-size", ov.sample_size, "FL-pattern sample size");
        s->add_option("--eval-seed", ov.eval_seed, "FL sampling seed");
        s->add_flag("--avg-supported-only", ov.avg_supported_only,
                    "exclude unsupported pairs from report averages");
        if (std::string(stage_names[i]) == "matrix")
            s->add_option("--dump-contexts", ov.dump_contexts,
                          "write the per-occurrence context TSV to this file");
        subs.push_back(s);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage problems exit 2
    }

    CLI::App* active = app.get_subcommands().front();
    try {
        depmine::PipelineConfig cfg = depmine::load_config(ov.config_path);
        apply_overrides(*active, ov, cfg);
        auto ctx = depmine::PipelineContext::make(std::move(cfg));
        if (active->get_name() == "matrix" && !ov.dump_contexts.empty()) {
            depmine::run_matrix(ctx, ov.dump_contexts);
            return 0;
        }
        return depmine::run_subcommand(active->get_name(), ctx);
    } catch (const depmine::UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
