#include "tsel/reusability.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "tsel/errors.hpp"
#include "tsel/metrics.hpp"
#include "tsel/parallel.hpp"
#include "tsel/rng.hpp"
#include "tsel/statap.hpp"

namespace tsel {

GroupMap read_group_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    GroupMap groups;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string system_id, group_id;
        if (!std::getline(ss, system_id, ',') || !std::getline(ss, group_id, ','))
            throw ParseError(path, line_no, "expected system_id,group_id");
        if (system_id == "system_id") continue; // optional header row
        groups.group_of[system_id] = group_id;
    }
    return groups;
}

ReusabilityResult loo_reusability(const RunSet& runs, const Qrels& qrels,
                                  const std::vector<TopicId>& selected_topics,
                                  const GroupMap& groups, int quota_per_topic, int repeats,
                                  std::uint64_t seed, int pool_depth, int map_cutoff) {
    if (selected_topics.empty()) throw std::invalid_argument("loo_reusability: empty topic set");
    if (quota_per_topic < 1) throw std::invalid_argument("loo_reusability: quota must be >= 1");
    if (repeats < 1) throw std::invalid_argument("loo_reusability: repeats must be >= 1");
    for (const auto& t : selected_topics)
        if (!runs.has_topic(t)) throw DataError("unknown topic '" + t + "'");

    std::vector<std::string> group_ids;
    std::map<std::string, std::vector<std::size_t>> members;
    for (std::size_t s = 0; s < runs.runs.size(); ++s) {
        const std::string g = groups.group_for(runs.runs[s].system_id);
        if (!members.count(g)) group_ids.push_back(g);
        members[g].push_back(s);
    }
    std::sort(group_ids.begin(), group_ids.end());
    if (group_ids.size() < 2)
        throw std::invalid_argument("loo_reusability: need at least 2 groups");

    const ApTable ap(runs, qrels, map_cutoff);
    const std::vector<std::string> truth_order = ap.rank_all().order();

    // Held-out weights per (group, topic): pools built from every system
    // outside the group. Empty pools mark the topic skipped for that group.
    struct HeldOut {
        std::vector<std::map<std::string, double>> weights; // [topic]; empty = skipped
    };
    std::map<std::string, HeldOut> held;
    ReusabilityResult result;
    for (const auto& g : group_ids) {
        RunSet rest;
        rest.topics = runs.topics;
        for (std::size_t s = 0; s < runs.runs.size(); ++s)
            if (groups.group_for(runs.runs[s].system_id) != g)
                rest.runs.push_back(runs.runs[s]);
        HeldOut h;
        h.weights.resize(selected_topics.size());
        for (std::size_t t = 0; t < selected_topics.size(); ++t) {
            try {
                h.weights[t] = statap_weights(rest, selected_topics[t], pool_depth);
            } catch (const DataError&) {
                result.skipped.push_back(g + "/" + selected_topics[t]);
            }
        }
        held[g] = std::move(h);
    }

    std::vector<std::vector<std::string>> run_docs(runs.runs.size());
    std::map<TopicId, std::size_t> topic_pos;
    for (std::size_t t = 0; t < selected_topics.size(); ++t) topic_pos[selected_topics[t]] = t;
    std::vector<std::vector<std::vector<std::string>>> lists(runs.runs.size());
    for (std::size_t s = 0; s < runs.runs.size(); ++s) {
        lists[s].resize(selected_topics.size());
        for (std::size_t t = 0; t < selected_topics.size(); ++t) {
            const auto* list = runs.runs[s].list_for(selected_topics[t]);
            if (!list) continue;
            const std::size_t depth =
                std::min<std::size_t>(list->size(), static_cast<std::size_t>(pool_depth));
            for (std::size_t i = 0; i < depth; ++i)
                lists[s][t].push_back((*list)[i].doc_id);
        }
    }

    std::vector<double> taus(static_cast<std::size_t>(repeats));
    parallel_for(taus.size(), [&](std::size_t rep) {
        std::vector<std::pair<std::string, double>> scored(runs.runs.size());
        for (std::size_t gi = 0; gi < group_ids.size(); ++gi) {
            const auto& g = group_ids[gi];
            const HeldOut& h = held.at(g);
            std::vector<SampleDesign> designs(selected_topics.size());
            std::vector<bool> usable(selected_topics.size(), false);
            for (std::size_t t = 0; t < selected_topics.size(); ++t) {
                if (h.weights[t].empty()) continue;
                const std::size_t m = std::min<std::size_t>(
                    h.weights[t].size(), static_cast<std::size_t>(quota_per_topic));
                designs[t] = statap_sample(selected_topics[t], h.weights[t], m,
                                           derive_seed(seed, rep, gi, t));
                usable[t] = true;
            }
            for (std::size_t s : members.at(g)) {
                double sum = 0.0;
                std::size_t counted = 0;
                for (std::size_t t = 0; t < selected_topics.size(); ++t) {
                    if (!usable[t]) continue; // emptied pool: excluded, not zero
                    sum += statap_score(lists[s][t], qrels, designs[t]);
                    ++counted;
                }
                scored[s] = {runs.runs[s].system_id,
                             counted ? sum / static_cast<double>(counted) : 0.0};
            }
        }
        taus[rep] = kendall_tau(make_ranking(scored, Measure::StatAP).order(), truth_order);
    });

    for (double t : taus) result.mean_tau += t;
    result.mean_tau /= static_cast<double>(taus.size());
    double ss = 0.0;
    for (double t : taus) ss += (t - result.mean_tau) * (t - result.mean_tau);
    result.std_tau = std::sqrt(ss / static_cast<double>(taus.size()));
    std::sort(result.skipped.begin(), result.skipped.end());
    return result;
}

} // namespace tsel
