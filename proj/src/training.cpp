#include "tsel/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "tsel/errors.hpp"
#include "tsel/metrics.hpp"
#include "tsel/parallel.hpp"
#include "tsel/rng.hpp"
#include "tsel/selection.hpp"

namespace tsel {

namespace {

double round12(double x) { return std::nearbyint(x * 1e12) / 1e12; }

} // namespace

int bin_tau_label(double tau, double tau_min, double tau_max, int k) {
    if (tau_max <= tau_min) return 0;
    int label = static_cast<int>(std::floor(static_cast<double>(k) * (tau - tau_min) /
                                            (tau_max - tau_min)));
    if (label >= k) label = k - 1; // tau == tau_max falls into the top bin
    if (label < 0) label = 0;
    return label;
}

std::vector<TrainingRecord> generate_training_data(const RunSet& runs, const Qrels& qrels,
                                                   const TrainingGenOptions& opts,
                                                   TrainingGenStats* stats) {
    if (opts.scenarios_per_size < 1) throw ConfigError("W must be >= 1");
    if (opts.label_bins < 2) throw ConfigError("K must be >= 2");
    const std::size_t n_topics = runs.topics.size();
    if (n_topics < 3) throw DataError("training generation needs at least 3 topics");

    const ApTable ap(runs, qrels, opts.map_cutoff);
    const FeatureTable features(runs, opts.pool_depth);
    const std::vector<TopicId>& topics = runs.topics;

    struct Scenario {
        int subset_size;
        int trial;
    };
    std::vector<Scenario> scenarios;
    for (int i = 0; i + 2 <= static_cast<int>(n_topics); ++i)
        for (int w = 0; w < opts.scenarios_per_size; ++w) scenarios.push_back({i, w});

    std::vector<std::vector<TrainingRecord>> per_scenario(scenarios.size());
    std::vector<int> degenerate(scenarios.size(), 0);
    parallel_for(scenarios.size(), [&](std::size_t sc) {
        const int i = scenarios[sc].subset_size;
        const int trial = scenarios[sc].trial;
        Rng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(i),
                            static_cast<std::uint64_t>(trial)));
        const auto pick = rng.sample_indices(n_topics, static_cast<std::size_t>(i));

        std::set<TopicId> selected;
        std::vector<std::size_t> selected_idx;
        for (std::size_t p : pick) {
            selected.insert(topics[p]);
            selected_idx.push_back(p);
        }
        std::set<TopicId> candidates;
        std::vector<std::size_t> candidate_idx;
        for (std::size_t t = 0; t < n_topics; ++t) {
            if (!selected.count(topics[t])) {
                candidates.insert(topics[t]);
                candidate_idx.push_back(t);
            }
        }

        std::vector<double> taus(candidate_idx.size());
        auto with_t = selected_idx;
        with_t.push_back(0);
        for (std::size_t c = 0; c < candidate_idx.size(); ++c) {
            with_t.back() = candidate_idx[c];
            taus[c] = ap.tau_vs_truth(with_t);
        }
        const double tau_min = *std::min_element(taus.begin(), taus.end());
        const double tau_max = *std::max_element(taus.begin(), taus.end());
        if (tau_max <= tau_min) degenerate[sc] = 1;

        auto& out = per_scenario[sc];
        out.reserve(candidate_idx.size());
        for (std::size_t c = 0; c < candidate_idx.size(); ++c) {
            TrainingRecord rec;
            rec.label = bin_tau_label(taus[c], tau_min, tau_max, opts.label_bins);
            rec.features = features.assemble(topics[candidate_idx[c]], selected, candidates);
            rec.collection_id = opts.collection_id;
            rec.scenario = trial;
            rec.subset_size = i;
            out.push_back(std::move(rec));
        }
    });

    std::vector<TrainingRecord> records;
    std::size_t raw = 0;
    for (auto& v : per_scenario) raw += v.size();
    records.reserve(raw);
    for (auto& v : per_scenario)
        for (auto& r : v) records.push_back(std::move(r));
    if (stats) {
        stats->raw_records = raw;
        for (int d : degenerate) stats->degenerate_scenarios += static_cast<std::size_t>(d);
    }
    return dedup_records(std::move(records));
}

std::vector<TrainingRecord> dedup_records(std::vector<TrainingRecord> records) {
    auto key_less = [](const TrainingRecord& a, const TrainingRecord& b) {
        if (a.label != b.label) return a.label < b.label;
        for (std::size_t i = 0; i < kFeatureVectorSize; ++i) {
            const double x = round12(a.features[i]), y = round12(b.features[i]);
            if (x != y) return x < y;
        }
        return false;
    };
    auto key_eq = [&](const TrainingRecord& a, const TrainingRecord& b) {
        return !key_less(a, b) && !key_less(b, a);
    };
    std::stable_sort(records.begin(), records.end(), key_less);
    records.erase(std::unique(records.begin(), records.end(), key_eq), records.end());
    return records;
}

void write_training_csv(const std::vector<TrainingRecord>& records, const std::string& path,
                        const std::string& provenance_header) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    if (!provenance_header.empty()) out << provenance_header;
    out << "label";
    for (const auto& name : feature_slot_names()) out << ',' << name;
    out << '\n';
    char buf[32];
    for (const auto& r : records) {
        out << r.label;
        for (double x : r.features) {
            std::snprintf(buf, sizeof(buf), "%.17g", x);
            out << ',' << buf;
        }
        out << '\n';
    }
}

std::vector<TrainingRecord> read_training_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    std::vector<TrainingRecord> records;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        TrainingRecord rec;
        std::istringstream ss(line);
        std::string field;
        std::size_t col = 0;
        while (std::getline(ss, field, ',')) {
            try {
                if (col == 0)
                    rec.label = std::stoi(field);
                else if (col <= kFeatureVectorSize)
                    rec.features[col - 1] = std::stod(field);
                else
                    throw std::invalid_argument("extra column");
            } catch (const std::exception&) {
                throw ParseError(path, line_no, "bad field '" + field + "'");
            }
            ++col;
        }
        if (col != 1 + kFeatureVectorSize)
            throw ParseError(path, line_no, "expected 64 columns, got " + std::to_string(col));
        records.push_back(rec);
    }
    return records;
}

std::vector<int> default_leaf_grid() {
    std::vector<int> grid;
    for (int l = 2; l <= 50; l += 2) grid.push_back(l);
    return grid;
}

TuneResult tune_leaves(const std::vector<TrainingRecord>& train_data, const RunSet& tuning_runs,
                       const Qrels& tuning_qrels, const std::vector<int>& leaf_grid,
                       const MartOptions& base_opts, int pool_depth, int map_cutoff) {
    if (leaf_grid.empty()) throw ConfigError("tune: empty leaf grid");
    std::vector<int> grid = leaf_grid;
    std::sort(grid.begin(), grid.end()); // argmax tie goes to the smaller leaf count
    const FeatureTable table(tuning_runs, pool_depth);
    const ApTable ap(tuning_runs, tuning_qrels, map_cutoff);
    const std::size_t steps = std::min<std::size_t>(50, tuning_runs.topics.size());

    TuneResult result;
    for (int leaves : grid) {
        MartOptions opts = base_opts;
        opts.num_leaves = leaves;
        MartModel model = train_mart(train_data, opts);
        SelectionTrace trace = l2r_select(table, model, steps);
        const auto taus = evaluate_trace(ap, trace.selected);
        double mean = 0.0;
        for (double t : taus) mean += t;
        mean /= static_cast<double>(taus.size());
        result.report.push_back({leaves, mean});
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < result.report.size(); ++i)
        if (result.report[i].mean_tau > result.report[best].mean_tau) best = i;
    result.best_num_leaves = result.report[best].num_leaves;
    return result;
}

} // namespace tsel
