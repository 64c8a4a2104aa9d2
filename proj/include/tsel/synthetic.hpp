#pragma once

#include <cstdint>
#include <string>

#include "tsel/collection.hpp"
#include "tsel/reusability.hpp"

namespace tsel {

// Deterministic synthetic test collection: systems of graded quality,
// topics of varying discriminative power, Zipf-ish relevant counts.
// Real TREC data is a drop-in replacement through the same parsers.
struct SynthConfig {
    int n_topics = 8;
    int n_systems = 5;
    int list_depth = 30; // ranked-list length per system per topic
    int n_groups = 0;    // 0 = no group map
    std::uint64_t seed = 1;
};

struct SynthCollection {
    RunSet runs;
    Qrels qrels;
    GroupMap groups;
};

SynthCollection generate_collection(const SynthConfig& config);

// Writes <dir>/<system>.run, <dir>/qrels.txt and, when groups are
// configured, <dir>/groups.csv.
void write_collection(const SynthCollection& collection, const std::string& dir);

} // namespace tsel
