#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tsel/collection.hpp"

namespace tsel {

struct SampleDesign {
    TopicId topic;
    std::map<std::string, double> weights;        // pool doc -> w(d,S), sums to 1
    std::vector<std::string> sample;              // sorted doc ids
    std::map<std::string, double> inclusion_prob; // sampled doc -> pi_d in (0,1]
};

// Rank-derived document weights over the pool:
//   u_s(d) = (1/depth) * sum_{k=rank_s(d)}^{depth} 1/k   if d in top-depth of s
//   w(d,S) = mean_s u_s(d), normalized to sum to 1 over the pool.
std::map<std::string, double> statap_weights(const RunSet& runs, const TopicId& topic,
                                             int depth = 100);

// Without-replacement PPS systematic sample of exactly m documents.
// Units whose scaled weight crosses 1 are taken with certainty (iterated),
// the remainder is sampled systematically; recorded inclusion probabilities
// are exact for this procedure and equal min(1, m*w_d) whenever no unit
// crosses the certainty threshold.
SampleDesign statap_sample(const TopicId& topic, const std::map<std::string, double>& weights,
                           std::size_t m, std::uint64_t seed);

// Horvitz-Thompson AP estimate of a run against the sampled judgments.
// Unjudged sampled documents count as non-relevant; 0 when no sampled
// document is relevant.
double statap_score(const std::vector<std::string>& run_list, const Qrels& qrels,
                    const SampleDesign& design);

} // namespace tsel
