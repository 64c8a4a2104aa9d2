#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tsel/collection.hpp"

namespace tsel {

// system_id -> group_id. Systems missing from the map default to their own
// singleton group (the harshest reusability test).
struct GroupMap {
    std::map<std::string, std::string> group_of;

    std::string group_for(const std::string& system_id) const {
        auto it = group_of.find(system_id);
        return it == group_of.end() ? system_id : it->second;
    }
};

GroupMap read_group_csv(const std::string& path);

struct ReusabilityResult {
    double mean_tau = 0.0;
    double std_tau = 0.0;
    std::vector<std::string> skipped; // "group/topic" pairs whose pool emptied
};

// Leave-one-group-out: each group's runs are scored with statAP on samples
// drawn from pools built without that group's contributions; the combined
// held-out ranking is compared against the full-judgment ground truth.
ReusabilityResult loo_reusability(const RunSet& runs, const Qrels& qrels,
                                  const std::vector<TopicId>& selected_topics,
                                  const GroupMap& groups, int quota_per_topic, int repeats,
                                  std::uint64_t seed, int pool_depth = 100, int map_cutoff = 100);

} // namespace tsel
