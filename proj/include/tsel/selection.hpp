#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsel/collection.hpp"
#include "tsel/features.hpp"
#include "tsel/mart.hpp"
#include "tsel/metrics.hpp"

namespace tsel {

struct SelectionTrace {
    std::string strategy_id;
    std::uint64_t seed = 0;
    std::vector<TopicId> selected;       // in selection order
    std::vector<double> tau_after_step;  // same length; empty until evaluated
};

// Greedy oracle: at each step adds the candidate whose addition maximizes
// the Kendall tau against the all-topics ranking. Needs full judgments.
// Ties go to the lexicographically smallest topic id.
SelectionTrace greedy_oracle_select(const RunSet& runs, const Qrels& qrels, std::size_t m,
                                    int map_cutoff = 100);

// Model-driven greedy selection. Judgment-free by construction: only the
// feature table and the model are consulted. Ties on the model score go to
// the smallest topic id.
SelectionTrace l2r_select(const FeatureTable& features, const MartModel& model, std::size_t m);

// Kendall tau against the ground-truth ranking after each prefix of
// `selected`. Fills SelectionTrace::tau_after_step for any strategy.
std::vector<double> evaluate_trace(const ApTable& ap, const std::vector<TopicId>& selected);
std::vector<double> evaluate_trace(const RunSet& runs, const Qrels& qrels,
                                   const std::vector<TopicId>& selected, int map_cutoff = 100);

struct RandomBaseline {
    double mean_tau = 0.0;
    double std_tau = 0.0;
};

// Mean/std of tau over `trials` uniformly random m-subsets.
RandomBaseline random_select(const RunSet& runs, const Qrels& qrels, std::size_t m,
                             std::size_t trials, std::uint64_t seed, int map_cutoff = 100);
RandomBaseline random_select(const ApTable& ap, std::size_t m, std::size_t trials,
                             std::uint64_t seed);

// Artifact writers; `header` is the provenance block ("# ..." lines) and
// `provenance_json` an optional serialized object embedded under
// "provenance" in the JSON artifact.
void write_trace_csv(const SelectionTrace& trace, const std::string& path,
                     const std::string& header = "");
void write_trace_json(const SelectionTrace& trace, const std::string& path,
                      const std::string& provenance_json = "");
SelectionTrace read_trace_csv(const std::string& path);

} // namespace tsel
