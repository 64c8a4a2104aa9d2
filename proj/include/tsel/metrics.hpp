#pragma once

#include <string>
#include <vector>

#include "tsel/collection.hpp"

namespace tsel {

enum class Measure { MapAtCutoff, StatAP };

struct SystemRanking {
    std::vector<std::pair<std::string, double>> entries; // (system_id, score), best first
    Measure measure = Measure::MapAtCutoff;

    std::vector<std::string> order() const {
        std::vector<std::string> ids;
        ids.reserve(entries.size());
        for (const auto& [id, score] : entries) ids.push_back(id);
        return ids;
    }
};

// AP@cutoff with R = total relevant for the topic in qrels; 0 when R = 0.
double average_precision(const std::vector<std::string>& run_list, const Qrels& qrels,
                         const TopicId& topic, int cutoff = 100);

// Kendall tau-a between two strict orderings of the same id set.
double kendall_tau(const std::vector<std::string>& a, const std::vector<std::string>& b);

// Sorts (system_id, score) pairs into ranking order: descending score,
// ties by ascending system_id.
SystemRanking make_ranking(std::vector<std::pair<std::string, double>> scored, Measure measure);

// Per-system mean AP@cutoff over `topics`.
SystemRanking rank_systems(const RunSet& runs, const Qrels& qrels,
                           const std::vector<TopicId>& topics, int cutoff = 100);

// Precomputed per-system, per-topic AP matrix. All the selection and
// training loops rank subsets of topics thousands of times; one pass over
// the runs up front makes each ranking a row-mean plus a sort.
class ApTable {
public:
    ApTable(const RunSet& runs, const Qrels& qrels, int cutoff = 100);

    const std::vector<TopicId>& topics() const { return topics_; }
    std::size_t topic_index(const TopicId& t) const;
    double ap(std::size_t system, std::size_t topic) const { return ap_[system][topic]; }

    SystemRanking rank(const std::vector<std::size_t>& topic_indices) const;
    SystemRanking rank_all() const;

    // Kendall tau of rank(topic_indices) against the all-topics ranking.
    double tau_vs_truth(const std::vector<std::size_t>& topic_indices) const;

private:
    std::vector<std::string> system_ids_;
    std::vector<TopicId> topics_;
    std::vector<std::vector<double>> ap_; // [system][topic]
    std::vector<std::string> truth_order_;
};

} // namespace tsel
