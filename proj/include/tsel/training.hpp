#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsel/collection.hpp"
#include "tsel/features.hpp"
#include "tsel/mart.hpp"

namespace tsel {

struct TrainingGenOptions {
    int scenarios_per_size = 200; // W: random scenarios per subset size
    int label_bins = 50;          // K
    int pool_depth = 100;
    int map_cutoff = 100;
    std::uint64_t seed = 1;
    std::string collection_id = "c0";
};

struct TrainingGenStats {
    std::size_t raw_records = 0;
    std::size_t degenerate_scenarios = 0; // tau_max == tau_min, all labels 0
};

// Maps a tau score into one of k equal bins over [tau_min, tau_max];
// tau == tau_max lands in the top bin, a degenerate range labels 0.
int bin_tau_label(double tau, double tau_min, double tau_max, int k);

// Simulates partially-built collections on a fully judged one: for each
// already-selected subset size i and W random subsets P, every candidate
// topic is labeled by binning the Kendall tau it would achieve when added
// to P, and paired with its feature vector.
std::vector<TrainingRecord> generate_training_data(const RunSet& runs, const Qrels& qrels,
                                                   const TrainingGenOptions& opts,
                                                   TrainingGenStats* stats = nullptr);

// Canonical sort + exact-duplicate removal (label and features, rounded to
// 1e-12). Applied after merging records from all source collections.
std::vector<TrainingRecord> dedup_records(std::vector<TrainingRecord> records);

void write_training_csv(const std::vector<TrainingRecord>& records, const std::string& path,
                        const std::string& provenance_header = "");
std::vector<TrainingRecord> read_training_csv(const std::string& path);

struct TuneRow {
    int num_leaves = 0;
    double mean_tau = 0.0;
};

struct TuneResult {
    int best_num_leaves = 0;
    std::vector<TuneRow> report;
};

// Trains one model per grid point and scores it by the mean Kendall tau
// over a selection trajectory on the tuning collection (first
// min(50, N_tuning) steps). Ties go to the smaller leaf count.
TuneResult tune_leaves(const std::vector<TrainingRecord>& train_data, const RunSet& tuning_runs,
                       const Qrels& tuning_qrels, const std::vector<int>& leaf_grid,
                       const MartOptions& base_opts, int pool_depth = 100, int map_cutoff = 100);

std::vector<int> default_leaf_grid(); // {2, 4, ..., 50}

} // namespace tsel
