#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tsel/collection.hpp"

namespace tsel {

inline constexpr std::size_t kNumCoreFeatures = 7;
inline constexpr std::size_t kFeatureVectorSize = 63;

// The seven judgment-free per-topic features.
struct CoreFeatures {
    double avg_weight = 0.0; // mean sampling weight over the pool
    double std_weight = 0.0; // std of sampling weights
    double avg_tau = 0.0;    // mean pairwise Kendall tau of ranked lists
    double std_tau = 0.0;    // std of pairwise taus
    double cost = 0.0;       // |pool| / (|S| * depth)
    double std_cost = 0.0;   // std of pairwise union sizes |L_i u L_j|
    double std_qpp = 0.0;    // std of per-system score-deviation QPP

    std::array<double, kNumCoreFeatures> to_array() const {
        return {avg_weight, std_weight, avg_tau, std_tau, cost, std_cost, std_qpp};
    }
};

using FeatureVector = std::array<double, kFeatureVectorSize>;

extern const std::array<const char*, kNumCoreFeatures> kCoreFeatureNames;

// The documented 63 slot names: tc_<f> for the candidate, then
// (mean,std) pairs for P, Pbar, P+tc, Pbar-tc.
std::vector<std::string> feature_slot_names();

// Score-deviation query performance predictor: min-max normalize the full
// score list, return the population std of the top-k normalized scores.
// Constant score lists degenerate to 0.
double qpp(const std::vector<RunEntry>& run_list, int k = 100);

// All 7 core features for one topic. Requires >= 2 systems.
CoreFeatures core_features(const RunSet& runs, const TopicId& topic, int depth = 100);

// Mean and population std of each core feature over a set of topics,
// as (mean,std) pairs; empty input -> 14 zeros.
std::array<double, 2 * kNumCoreFeatures> aggregate(const std::vector<CoreFeatures>& features);

// Per-collection core-feature cache. Core features depend only on the
// topic, so they are computed once and reused across selection states.
class FeatureTable {
public:
    FeatureTable() = default;
    FeatureTable(const RunSet& runs, int depth = 100);

    const std::vector<TopicId>& topics() const { return topics_; }
    const CoreFeatures& core(const TopicId& topic) const;

    // 63-slot vector for candidate t_c given selected P and candidates P_bar.
    // Preconditions: t_c in P_bar, P and P_bar disjoint, P u P_bar = topics.
    FeatureVector assemble(const TopicId& t_c, const std::set<TopicId>& selected,
                           const std::set<TopicId>& candidates) const;

    // Zeroes the given core features (by index) in every assembled vector;
    // used for ablation from the CLI.
    void set_mask(const std::set<std::size_t>& masked_core) { masked_ = masked_core; }

    void write_csv(const std::string& path) const;
    static FeatureTable read_csv(const std::string& path);

private:
    std::vector<TopicId> topics_;
    std::map<TopicId, CoreFeatures> core_;
    std::set<std::size_t> masked_;
};

} // namespace tsel
