#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsel/collection.hpp"
#include "tsel/selection.hpp"

namespace tsel {

enum class SpeedModel { Constant, Variable };
enum class ErrorModel { None, TdcLinked };

struct BudgetScenario {
    long total_budget_seconds = 0;
    long tdc_seconds = 0; // topic development cost
    SpeedModel speed_model = SpeedModel::Constant;
    ErrorModel error_model = ErrorModel::None;
    int judgments_repeats = 20; // statAP sampling repetitions
    int flip_repeats = 50;      // outer repetitions of judgment flipping
    int pool_depth = 100;
    int map_cutoff = 100;
    std::uint64_t seed = 1;
};

// Seconds to judge one document when x documents are judged per topic:
// 15 up to 32, an exponential decay between, 9 from 127 on.
double judging_time_per_doc(int judgments_per_topic);

struct Quota {
    int judgments = 0;
    bool insufficient = false; // budget cannot even cover topic development
};

// Judgments affordable per topic after topic-development cost is deducted
// and the remaining budget is split equally. The variable model finds the
// largest j whose total judging time j*f(j) fits the per-topic budget.
Quota judgments_per_topic(long budget_seconds, int n_topics, long tdc_seconds,
                          SpeedModel model);

// Judging accuracy as a function of topic development cost: 0.92 at 76s,
// +0.02 per doubling, capped at 1.0. Values below 76s are refused.
double accuracy_for_tdc(long tdc_seconds);

// Independently flips each judgment with probability 1 - accuracy.
Qrels flip_judgments(const Qrels& qrels, double accuracy, std::uint64_t seed);

struct CurveRow {
    int n_topics = 0;
    double mean_tau = 0.0;
    double std_tau = 0.0;
    int quota = 0;
    bool insufficient = false;
};

// Budget curve for prefixes of a selection trace: per topic count, sample
// the affordable number of documents per topic, score systems with statAP,
// and report tau against the full-judgment ground truth.
std::vector<CurveRow> simulate_curve(const RunSet& runs, const Qrels& qrels,
                                     const BudgetScenario& scenario, const SelectionTrace& trace,
                                     const std::vector<int>& topic_counts);

// Same, but with `trials` fresh random topic subsets per count.
std::vector<CurveRow> simulate_curve_random(const RunSet& runs, const Qrels& qrels,
                                            const BudgetScenario& scenario, std::size_t trials,
                                            const std::vector<int>& topic_counts);

void write_curve_csv(const std::vector<CurveRow>& rows, const std::string& path,
                     const std::string& header = "");

} // namespace tsel
