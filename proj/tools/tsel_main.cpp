// tsel: topic selection and judging-budget simulation for IR test collections.
//
// Subcommands: validate, synth, gen-train, train, tune, select, eval,
// simulate, reusability. Every artifact embeds a provenance header (tool
// version, command, options, seed) so that identical configs reproduce
// byte-identical outputs.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tsel/budget.hpp"
#include "tsel/collection.hpp"
#include "tsel/errors.hpp"
#include "tsel/features.hpp"
#include "tsel/mart.hpp"
#include "tsel/metrics.hpp"
#include "tsel/parallel.hpp"
#include "tsel/reusability.hpp"
#include "tsel/rng.hpp"
#include "tsel/selection.hpp"
#include "tsel/statap.hpp"
#include "tsel/synthetic.hpp"
#include "tsel/training.hpp"
#include "tsel/version.hpp"

namespace fs = std::filesystem;
using namespace tsel;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitInsufficient = 4;

// "# ..." provenance block embedded at the top of CSV artifacts and as a
// "provenance" object in JSON artifacts. Deliberately timestamp-free.
std::string provenance(const std::string& command,
                       const std::vector<std::pair<std::string, std::string>>& options) {
    std::ostringstream out;
    out << "# tsel " << kVersion << "\n# command: " << command << '\n';
    out << "# options:";
    for (const auto& [k, v] : options) out << ' ' << k << '=' << v;
    out << '\n';
    return out.str();
}

nlohmann::json provenance_json(const std::string& command,
                               const std::vector<std::pair<std::string, std::string>>& options) {
    nlohmann::json j;
    j["tool"] = std::string("tsel ") + kVersion;
    j["command"] = command;
    for (const auto& [k, v] : options) j["options"][k] = v;
    return j;
}

// Expands run arguments: directories contribute their *.run / *.run.gz
// files (sorted), plain paths pass through.
std::vector<std::string> expand_run_paths(const std::vector<std::string>& args) {
    std::vector<std::string> paths;
    for (const auto& arg : args) {
        if (fs::is_directory(arg)) {
            std::vector<std::string> found;
            for (const auto& entry : fs::directory_iterator(arg)) {
                if (!entry.is_regular_file()) continue;
                const std::string name = entry.path().filename().string();
                if (name.ends_with(".run") || name.ends_with(".run.gz"))
                    found.push_back(entry.path().string());
            }
            std::sort(found.begin(), found.end());
            if (found.empty())
                throw ConfigError("no .run files found in directory " + arg);
            paths.insert(paths.end(), found.begin(), found.end());
        } else if (fs::exists(arg)) {
            paths.push_back(arg);
        } else {
            throw ConfigError("path does not exist: " + arg);
        }
    }
    if (paths.empty()) throw ConfigError("no run files given");
    return paths;
}

void require_exists(const std::string& path, const std::string& what) {
    if (!fs::exists(path)) throw ConfigError(what + " does not exist: " + path);
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::istringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stoi(item));
    }
    return out;
}

std::set<std::size_t> parse_feature_mask(const std::string& text) {
    std::set<std::size_t> mask;
    std::istringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        bool found = false;
        for (std::size_t i = 0; i < kNumCoreFeatures; ++i) {
            if (item == kCoreFeatureNames[i]) {
                mask.insert(i);
                found = true;
            }
        }
        if (!found && !item.empty())
            throw ConfigError("unknown core feature '" + item + "' in mask");
    }
    return mask;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

struct CommonPaths {
    std::vector<std::string> runs;
    std::string qrels;
};

RunSet load_runs(const std::vector<std::string>& run_args, int depth) {
    return parse_runs(expand_run_paths(run_args), depth);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Topic selection and judging-budget simulation for IR test collections"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from a key=value config file");
    app.allow_config_extras(CLI::config_extras_mode::error);

    int threads = 0;
    app.add_option("--threads", threads, "Max worker threads (0 = all cores)");

    // ---- validate ----
    auto* cmd_validate = app.add_subcommand("validate", "Parse runs and qrels, report anomalies");
    CommonPaths v_paths;
    int v_depth = 100;
    std::string v_out;
    cmd_validate->add_option("--runs", v_paths.runs, "Run files or directories")->required();
    cmd_validate->add_option("--qrels", v_paths.qrels, "Qrels file")->required();
    cmd_validate->add_option("--depth", v_depth, "Max list depth");
    cmd_validate->add_option("-o,--out", v_out, "Validation report JSON path");

    // ---- synth ----
    auto* cmd_synth = app.add_subcommand("synth", "Generate a deterministic synthetic collection");
    SynthConfig synth_cfg;
    std::string synth_out;
    cmd_synth->add_option("--topics", synth_cfg.n_topics, "Number of topics")->required();
    cmd_synth->add_option("--systems", synth_cfg.n_systems, "Number of systems")->required();
    cmd_synth->add_option("--depth", synth_cfg.list_depth, "Ranked-list length");
    cmd_synth->add_option("--groups", synth_cfg.n_groups, "Number of participant groups (0 = none)");
    cmd_synth->add_option("--seed", synth_cfg.seed, "Generator seed")->required();
    cmd_synth->add_option("-o,--out", synth_out, "Output directory")->required();

    // ---- gen-train ----
    auto* cmd_gen = app.add_subcommand("gen-train", "Generate training data from judged collections");
    std::vector<std::string> gen_runs, gen_qrels, gen_ids;
    TrainingGenOptions gen_opts;
    std::string gen_out;
    cmd_gen->add_option("--runs", gen_runs, "Run directory/file per collection (repeatable)")
        ->required();
    cmd_gen->add_option("--qrels", gen_qrels, "Qrels file per collection (repeatable)")->required();
    cmd_gen->add_option("--id", gen_ids, "Collection id per collection (default c0, c1, ...)");
    cmd_gen->add_option("-W,--scenarios", gen_opts.scenarios_per_size,
                        "Random scenarios per subset size");
    cmd_gen->add_option("-K,--bins", gen_opts.label_bins, "Label bins");
    cmd_gen->add_option("--depth", gen_opts.pool_depth, "Pool depth");
    cmd_gen->add_option("--cutoff", gen_opts.map_cutoff, "AP cutoff");
    std::uint64_t gen_seed = 0;
    cmd_gen->add_option("--seed", gen_seed, "Seed")->required();
    cmd_gen->add_option("-o,--out", gen_out, "Training CSV path")->required();

    // ---- train ----
    auto* cmd_train = app.add_subcommand("train", "Train the gradient-boosted scorer");
    std::string train_data_path, train_out;
    MartOptions train_opts;
    cmd_train->add_option("--data", train_data_path, "Training CSV")->required();
    cmd_train->add_option("--trees", train_opts.num_trees, "Number of trees");
    cmd_train->add_option("--leaves", train_opts.num_leaves, "Leaves per tree");
    cmd_train->add_option("--shrinkage", train_opts.shrinkage, "Learning rate");
    cmd_train->add_option("--min-leaf", train_opts.min_leaf, "Min samples per leaf");
    cmd_train->add_option("-o,--out", train_out, "Model JSON path")->required();

    // ---- tune ----
    auto* cmd_tune = app.add_subcommand("tune", "Grid-search the leaf count on a tuning collection");
    std::string tune_data_path, tune_grid, tune_out;
    CommonPaths tune_paths;
    MartOptions tune_base;
    int tune_depth = 100, tune_cutoff = 100;
    cmd_tune->add_option("--data", tune_data_path, "Training CSV")->required();
    cmd_tune->add_option("--runs", tune_paths.runs, "Tuning collection runs")->required();
    cmd_tune->add_option("--qrels", tune_paths.qrels, "Tuning collection qrels")->required();
    cmd_tune->add_option("--grid", tune_grid, "Comma list of leaf counts (default 2,4,...,50)");
    cmd_tune->add_option("--trees", tune_base.num_trees, "Number of trees");
    cmd_tune->add_option("--shrinkage", tune_base.shrinkage, "Learning rate");
    cmd_tune->add_option("--depth", tune_depth, "Pool depth");
    cmd_tune->add_option("--cutoff", tune_cutoff, "AP cutoff");
    cmd_tune->add_option("-o,--out", tune_out, "Tuning report CSV path");

    // ---- select ----
    auto* cmd_select = app.add_subcommand("select", "Select topics with a strategy");
    CommonPaths sel_paths;
    std::string sel_strategy, sel_model_path, sel_out, sel_mask;
    int sel_m = 0, sel_depth = 100, sel_cutoff = 100;
    std::size_t sel_trials = 1000;
    std::uint64_t sel_seed = 0;
    bool sel_seed_given = false;
    cmd_select->add_option("--runs", sel_paths.runs, "Run files or directories")->required();
    cmd_select->add_option("--qrels", sel_paths.qrels, "Qrels (oracle/random; optional for l2r)");
    cmd_select
        ->add_option("--strategy", sel_strategy, "oracle | l2r | random")
        ->required()
        ->check(CLI::IsMember({"oracle", "l2r", "random"}));
    cmd_select->add_option("-M,--topics", sel_m, "Number of topics to select")->required();
    cmd_select->add_option("--model", sel_model_path, "Model JSON (l2r)");
    cmd_select->add_option("--trials", sel_trials, "Random baseline trials");
    cmd_select->add_option("--mask", sel_mask, "Comma list of core features to zero (ablation)");
    std::string sel_features_out, sel_features_in;
    cmd_select->add_option("--features-out", sel_features_out,
                           "Write the per-topic core-feature table as CSV (l2r)");
    cmd_select->add_option("--features-in", sel_features_in,
                           "Load the core-feature table from CSV instead of computing it (l2r)");
    cmd_select->add_option("--depth", sel_depth, "Pool depth");
    cmd_select->add_option("--cutoff", sel_cutoff, "AP cutoff");
    cmd_select->add_option("--seed", sel_seed, "Seed (required for random)")
        ->each([&](const std::string&) { sel_seed_given = true; });
    cmd_select->add_option("-o,--out", sel_out, "Trace CSV path")->required();

    // ---- eval ----
    auto* cmd_eval = app.add_subcommand("eval", "Print MAP table and tau for a topic subset");
    CommonPaths eval_paths;
    std::string eval_topics, eval_trace;
    int eval_m = 0, eval_cutoff = 100;
    cmd_eval->add_option("--runs", eval_paths.runs, "Run files or directories")->required();
    cmd_eval->add_option("--qrels", eval_paths.qrels, "Qrels file")->required();
    cmd_eval->add_option("--topics", eval_topics, "Comma list of topics to evaluate");
    cmd_eval->add_option("--trace", eval_trace, "Trace CSV whose prefix defines the subset");
    cmd_eval->add_option("-M,--prefix", eval_m, "Prefix length of the trace (default: all)");
    cmd_eval->add_option("--cutoff", eval_cutoff, "AP cutoff");

    // ---- simulate ----
    auto* cmd_sim = app.add_subcommand("simulate", "Budget simulation over a selection trace");
    CommonPaths sim_paths;
    std::string sim_trace, sim_speed = "constant", sim_error = "none", sim_counts, sim_out;
    std::string sim_strategy = "trace";
    double sim_budget_hours = 0.0;
    BudgetScenario sim_scenario;
    std::size_t sim_trials = 1000;
    cmd_sim->add_option("--runs", sim_paths.runs, "Run files or directories")->required();
    cmd_sim->add_option("--qrels", sim_paths.qrels, "Qrels file")->required();
    cmd_sim->add_option("--trace", sim_trace, "Trace CSV (omit with --strategy random)");
    cmd_sim->add_option("--strategy", sim_strategy, "trace | random")
        ->check(CLI::IsMember({"trace", "random"}));
    cmd_sim->add_option("--trials", sim_trials, "Random subset trials per count");
    cmd_sim->add_option("--budget-hours", sim_budget_hours, "Total budget in hours")->required();
    cmd_sim->add_option("--tdc", sim_scenario.tdc_seconds, "Topic development cost in seconds");
    cmd_sim->add_option("--speed", sim_speed, "constant | variable")
        ->check(CLI::IsMember({"constant", "variable"}));
    cmd_sim->add_option("--error", sim_error, "none | tdc")
        ->check(CLI::IsMember({"none", "tdc"}));
    cmd_sim->add_option("--samples", sim_scenario.judgments_repeats, "statAP sampling repeats");
    cmd_sim->add_option("--flip-repeats", sim_scenario.flip_repeats, "Error-model repeats");
    cmd_sim->add_option("--counts", sim_counts, "Comma list of topic counts")->required();
    cmd_sim->add_option("--depth", sim_scenario.pool_depth, "Pool depth");
    cmd_sim->add_option("--cutoff", sim_scenario.map_cutoff, "AP cutoff");
    cmd_sim->add_option("--seed", sim_scenario.seed, "Seed")->required();
    cmd_sim->add_option("-o,--out", sim_out, "Curve CSV path")->required();

    // ---- reusability ----
    auto* cmd_reuse = app.add_subcommand("reusability", "Leave-one-group-out scoring of a subset");
    CommonPaths reuse_paths;
    std::string reuse_trace, reuse_groups, reuse_out;
    int reuse_m = 0, reuse_quota = 0, reuse_repeats = 20, reuse_depth = 100, reuse_cutoff = 100;
    std::uint64_t reuse_seed = 0;
    cmd_reuse->add_option("--runs", reuse_paths.runs, "Run files or directories")->required();
    cmd_reuse->add_option("--qrels", reuse_paths.qrels, "Qrels file")->required();
    cmd_reuse->add_option("--trace", reuse_trace, "Trace CSV with the selected topics")->required();
    cmd_reuse->add_option("-M,--prefix", reuse_m, "Prefix length of the trace (default: all)");
    cmd_reuse->add_option("--groups", reuse_groups, "Group map CSV (default: one group per run)");
    cmd_reuse->add_option("--quota", reuse_quota, "Sampled judgments per topic")->required();
    cmd_reuse->add_option("--repeats", reuse_repeats, "Sampling repeats");
    cmd_reuse->add_option("--depth", reuse_depth, "Pool depth");
    cmd_reuse->add_option("--cutoff", reuse_cutoff, "AP cutoff");
    cmd_reuse->add_option("--seed", reuse_seed, "Seed")->required();
    cmd_reuse->add_option("-o,--out", reuse_out, "Result CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    set_max_threads(threads);

    try {
        if (*cmd_validate) {
            require_exists(v_paths.qrels, "qrels");
            RunSet rs = load_runs(v_paths.runs, v_depth);
            Qrels q = parse_qrels(v_paths.qrels, &rs.report);
            validate_collection(rs, q);
            std::cout << "systems: " << rs.runs.size() << "\ntopics: " << rs.topics.size()
                      << "\njudgments: " << q.judgment_count()
                      << "\nwarnings: " << rs.report.warning_count() << '\n';
            if (!v_out.empty()) {
                nlohmann::json j = nlohmann::json::parse(rs.report.to_json());
                j["provenance"] = provenance_json(
                    "validate", {{"runs", std::to_string(rs.runs.size())}, {"depth", std::to_string(v_depth)}});
                std::ofstream out(v_out, std::ios::binary);
                out << j.dump(2) << '\n';
            }
            return 0;
        }

        if (*cmd_synth) {
            auto coll = generate_collection(synth_cfg);
            write_collection(coll, synth_out);
            std::cout << "wrote " << coll.runs.runs.size() << " runs, "
                      << coll.qrels.judgment_count() << " judgments to " << synth_out << '\n';
            return 0;
        }

        if (*cmd_gen) {
            if (gen_runs.size() != gen_qrels.size())
                throw ConfigError("--runs and --qrels must be given once per collection");
            std::vector<TrainingRecord> merged;
            TrainingGenStats totals;
            for (std::size_t c = 0; c < gen_runs.size(); ++c) {
                require_exists(gen_qrels[c], "qrels");
                RunSet rs = load_runs({gen_runs[c]},
                                      std::max(gen_opts.pool_depth, gen_opts.map_cutoff));
                Qrels q = parse_qrels(gen_qrels[c]);
                TrainingGenOptions opts = gen_opts;
                opts.seed = derive_seed(gen_seed, c);
                opts.collection_id = c < gen_ids.size() ? gen_ids[c] : "c" + std::to_string(c);
                TrainingGenStats stats;
                auto records = generate_training_data(rs, q, opts, &stats);
                totals.raw_records += stats.raw_records;
                totals.degenerate_scenarios += stats.degenerate_scenarios;
                merged.insert(merged.end(), records.begin(), records.end());
            }
            merged = dedup_records(std::move(merged));
            const auto header = provenance(
                "gen-train", {{"collections", std::to_string(gen_runs.size())},
                              {"W", std::to_string(gen_opts.scenarios_per_size)},
                              {"K", std::to_string(gen_opts.label_bins)},
                              {"depth", std::to_string(gen_opts.pool_depth)},
                              {"cutoff", std::to_string(gen_opts.map_cutoff)},
                              {"seed", std::to_string(gen_seed)}});
            write_training_csv(merged, gen_out, header);
            std::cout << "records: " << merged.size() << " (raw " << totals.raw_records
                      << ", degenerate scenarios " << totals.degenerate_scenarios << ")\n";
            return 0;
        }

        if (*cmd_train) {
            require_exists(train_data_path, "training data");
            auto data = read_training_csv(train_data_path);
            auto model = train_mart(data, train_opts);
            {
                nlohmann::json j = nlohmann::json::parse(model.to_json());
                j["provenance"] = provenance_json(
                    "train", {{"trees", std::to_string(train_opts.num_trees)},
                              {"leaves", std::to_string(train_opts.num_leaves)},
                              {"shrinkage", fmt(train_opts.shrinkage)},
                              {"min_leaf", std::to_string(train_opts.min_leaf)},
                              {"records", std::to_string(data.size())}});
                std::ofstream out(train_out, std::ios::binary);
                if (!out) throw ConfigError("cannot write " + train_out);
                out << j.dump() << '\n';
            }
            std::cout << "trees: " << model.trees.size()
                      << "\nfinal training mse: " << fmt(model.training_mse.back()) << '\n';
            for (const auto& note : model.notes) std::cerr << "warning: " << note << '\n';
            return 0;
        }

        if (*cmd_tune) {
            require_exists(tune_data_path, "training data");
            require_exists(tune_paths.qrels, "qrels");
            auto data = read_training_csv(tune_data_path);
            RunSet rs = load_runs(tune_paths.runs, std::max(tune_depth, tune_cutoff));
            Qrels q = parse_qrels(tune_paths.qrels);
            std::vector<int> grid =
                tune_grid.empty() ? default_leaf_grid() : parse_int_list(tune_grid);
            auto result = tune_leaves(data, rs, q, grid, tune_base, tune_depth, tune_cutoff);
            std::cout << "best leaves: " << result.best_num_leaves << '\n';
            for (const auto& row : result.report)
                std::cout << "  leaves " << row.num_leaves << ": mean tau "
                          << fmt(row.mean_tau) << '\n';
            if (!tune_out.empty()) {
                std::ofstream out(tune_out, std::ios::binary);
                out << provenance("tune", {{"grid", std::to_string(grid.size())},
                                           {"trees", std::to_string(tune_base.num_trees)}});
                out << "num_leaves,mean_tau\n";
                for (const auto& row : result.report)
                    out << row.num_leaves << ',' << fmt(row.mean_tau) << '\n';
            }
            return 0;
        }

        if (*cmd_select) {
            RunSet rs = load_runs(sel_paths.runs, std::max(sel_depth, sel_cutoff));
            const std::size_t m = static_cast<std::size_t>(sel_m);
            const auto header = provenance(
                "select", {{"strategy", sel_strategy},
                           {"M", std::to_string(sel_m)},
                           {"depth", std::to_string(sel_depth)},
                           {"cutoff", std::to_string(sel_cutoff)},
                           {"seed", sel_seed_given ? std::to_string(sel_seed) : "none"}});

            if (sel_strategy == "random") {
                if (!sel_seed_given) throw ConfigError("random strategy requires --seed");
                if (sel_paths.qrels.empty()) throw ConfigError("random strategy requires --qrels");
                require_exists(sel_paths.qrels, "qrels");
                Qrels q = parse_qrels(sel_paths.qrels);
                const ApTable ap(rs, q, sel_cutoff);
                std::ofstream out(sel_out, std::ios::binary);
                if (!out) throw ConfigError("cannot write " + sel_out);
                out << header << "n_topics,mean_tau,std_tau\n";
                for (std::size_t n = 1; n <= m; ++n) {
                    auto baseline = random_select(ap, n, sel_trials, sel_seed);
                    out << n << ',' << fmt(baseline.mean_tau) << ',' << fmt(baseline.std_tau)
                        << '\n';
                }
                std::cout << "wrote random baseline curve to " << sel_out << '\n';
                return 0;
            }

            SelectionTrace trace;
            if (sel_strategy == "oracle") {
                if (sel_paths.qrels.empty()) throw ConfigError("oracle strategy requires --qrels");
                require_exists(sel_paths.qrels, "qrels");
                Qrels q = parse_qrels(sel_paths.qrels);
                trace = greedy_oracle_select(rs, q, m, sel_cutoff);
            } else { // l2r
                if (sel_model_path.empty()) throw ConfigError("l2r strategy requires --model");
                require_exists(sel_model_path, "model");
                MartModel model = MartModel::load(sel_model_path);
                FeatureTable table;
                if (!sel_features_in.empty()) {
                    require_exists(sel_features_in, "feature table");
                    table = FeatureTable::read_csv(sel_features_in);
                } else {
                    table = FeatureTable(rs, sel_depth);
                }
                if (!sel_features_out.empty()) table.write_csv(sel_features_out);
                if (!sel_mask.empty()) table.set_mask(parse_feature_mask(sel_mask));
                trace = l2r_select(table, model, m);
                if (!sel_paths.qrels.empty()) {
                    require_exists(sel_paths.qrels, "qrels");
                    Qrels q = parse_qrels(sel_paths.qrels);
                    trace.tau_after_step = evaluate_trace(rs, q, trace.selected, sel_cutoff);
                }
            }
            trace.seed = sel_seed;
            write_trace_csv(trace, sel_out, header);
            write_trace_json(trace, fs::path(sel_out).replace_extension(".json").string(),
                             provenance_json("select", {{"strategy", sel_strategy},
                                                        {"M", std::to_string(sel_m)},
                                                        {"depth", std::to_string(sel_depth)},
                                                        {"cutoff", std::to_string(sel_cutoff)}})
                                 .dump());
            std::cout << "selected " << trace.selected.size() << " topics";
            if (!trace.tau_after_step.empty())
                std::cout << "; final tau " << fmt(trace.tau_after_step.back());
            std::cout << '\n';
            return 0;
        }

        if (*cmd_eval) {
            require_exists(eval_paths.qrels, "qrels");
            RunSet rs = load_runs(eval_paths.runs, eval_cutoff);
            Qrels q = parse_qrels(eval_paths.qrels);
            auto full = rank_systems(rs, q, rs.topics, eval_cutoff);
            char row[64];
            std::cout << "system ranking over all " << rs.topics.size() << " topics (MAP@"
                      << eval_cutoff << "):\n";
            for (const auto& [id, score] : full.entries) {
                std::snprintf(row, sizeof(row), "%.4f", score);
                std::cout << "  " << id << '\t' << row << '\n';
            }

            std::vector<TopicId> subset;
            if (!eval_trace.empty()) {
                auto trace = read_trace_csv(eval_trace);
                const std::size_t take = eval_m > 0
                                             ? std::min<std::size_t>(trace.selected.size(),
                                                                     static_cast<std::size_t>(eval_m))
                                             : trace.selected.size();
                subset.assign(trace.selected.begin(),
                              trace.selected.begin() + static_cast<long>(take));
            } else if (!eval_topics.empty()) {
                std::istringstream ss(eval_topics);
                std::string t;
                while (std::getline(ss, t, ','))
                    if (!t.empty()) subset.push_back(t);
            }
            if (!subset.empty()) {
                auto sub = rank_systems(rs, q, subset, eval_cutoff);
                const double tau = kendall_tau(sub.order(), full.order());
                std::snprintf(row, sizeof(row), "%.4f", tau);
                std::cout << "subset of " << subset.size() << " topics: tau " << row << '\n';
            }
            return 0;
        }

        if (*cmd_sim) {
            require_exists(sim_paths.qrels, "qrels");
            RunSet rs = load_runs(sim_paths.runs,
                                   std::max(sim_scenario.pool_depth, sim_scenario.map_cutoff));
            Qrels q = parse_qrels(sim_paths.qrels);
            sim_scenario.total_budget_seconds = static_cast<long>(sim_budget_hours * 3600.0);
            sim_scenario.speed_model =
                sim_speed == "variable" ? SpeedModel::Variable : SpeedModel::Constant;
            sim_scenario.error_model =
                sim_error == "tdc" ? ErrorModel::TdcLinked : ErrorModel::None;
            const auto counts = parse_int_list(sim_counts);
            if (counts.empty()) throw ConfigError("--counts is empty");

            std::vector<CurveRow> rows;
            if (sim_strategy == "random") {
                rows = simulate_curve_random(rs, q, sim_scenario, sim_trials, counts);
            } else {
                if (sim_trace.empty()) throw ConfigError("--trace required unless --strategy random");
                require_exists(sim_trace, "trace");
                auto trace = read_trace_csv(sim_trace);
                rows = simulate_curve(rs, q, sim_scenario, trace, counts);
            }
            const auto header = provenance(
                "simulate",
                {{"strategy", sim_strategy},
                 {"budget_hours", fmt(sim_budget_hours)},
                 {"tdc", std::to_string(sim_scenario.tdc_seconds)},
                 {"speed", sim_speed},
                 {"error", sim_error},
                 {"samples", std::to_string(sim_scenario.judgments_repeats)},
                 {"flip_repeats", std::to_string(sim_scenario.flip_repeats)},
                 {"seed", std::to_string(sim_scenario.seed)}});
            write_curve_csv(rows, sim_out, header);
            bool any_valid = false;
            for (const auto& row : rows)
                if (!row.insufficient) any_valid = true;
            std::cout << "wrote " << rows.size() << " rows to " << sim_out << '\n';
            if (!any_valid) {
                std::cerr << "error: budget insufficient for every requested topic count\n";
                return kExitInsufficient;
            }
            return 0;
        }

        if (*cmd_reuse) {
            require_exists(reuse_paths.qrels, "qrels");
            require_exists(reuse_trace, "trace");
            RunSet rs = load_runs(reuse_paths.runs, std::max(reuse_depth, reuse_cutoff));
            Qrels q = parse_qrels(reuse_paths.qrels);
            auto trace = read_trace_csv(reuse_trace);
            const std::size_t take =
                reuse_m > 0 ? std::min<std::size_t>(trace.selected.size(),
                                                    static_cast<std::size_t>(reuse_m))
                            : trace.selected.size();
            std::vector<TopicId> topics(trace.selected.begin(),
                                        trace.selected.begin() + static_cast<long>(take));
            GroupMap groups;
            if (!reuse_groups.empty()) {
                require_exists(reuse_groups, "group map");
                groups = read_group_csv(reuse_groups);
            }
            auto result = loo_reusability(rs, q, topics, groups, reuse_quota, reuse_repeats,
                                          reuse_seed, reuse_depth, reuse_cutoff);
            std::cout << "loo reusability over " << topics.size() << " topics: mean tau "
                      << fmt(result.mean_tau) << ", std " << fmt(result.std_tau) << '\n';
            for (const auto& s : result.skipped)
                std::cerr << "skipped (pool emptied): " << s << '\n';
            if (!reuse_out.empty()) {
                std::ofstream out(reuse_out, std::ios::binary);
                out << provenance("reusability",
                                  {{"M", std::to_string(topics.size())},
                                   {"quota", std::to_string(reuse_quota)},
                                   {"repeats", std::to_string(reuse_repeats)},
                                   {"seed", std::to_string(reuse_seed)}});
                out << "n_topics,mean_tau,std_tau,skipped\n";
                out << topics.size() << ',' << fmt(result.mean_tau) << ','
                    << fmt(result.std_tau) << ',' << result.skipped.size() << '\n';
            }
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
