#include "tsel/metrics.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "tsel/errors.hpp"
#include "tsel/parallel.hpp"

namespace tsel {

double average_precision(const std::vector<std::string>& run_list, const Qrels& qrels,
                         const TopicId& topic, int cutoff) {
    if (cutoff < 1) throw std::invalid_argument("cutoff must be >= 1");
    const std::size_t total_relevant = qrels.relevant_count(topic);
    if (total_relevant == 0) return 0.0;
    std::size_t hits = 0;
    double sum = 0.0;
    const std::size_t n = std::min<std::size_t>(run_list.size(), static_cast<std::size_t>(cutoff));
    for (std::size_t k = 0; k < n; ++k) {
        if (qrels.get(topic, run_list[k]) == 1) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(k + 1);
        }
    }
    return sum / static_cast<double>(total_relevant);
}

namespace {

// Counts inversions with merge sort; tau needs C - D = total - 2*inversions.
std::uint64_t count_inversions(std::vector<std::uint32_t>& v, std::vector<std::uint32_t>& tmp,
                               std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return 0;
    std::size_t mid = lo + (hi - lo) / 2;
    std::uint64_t inv = count_inversions(v, tmp, lo, mid) + count_inversions(v, tmp, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (v[i] <= v[j]) {
            tmp[k++] = v[i++];
        } else {
            inv += mid - i;
            tmp[k++] = v[j++];
        }
    }
    while (i < mid) tmp[k++] = v[i++];
    while (j < hi) tmp[k++] = v[j++];
    std::copy(tmp.begin() + static_cast<long>(lo), tmp.begin() + static_cast<long>(hi),
              v.begin() + static_cast<long>(lo));
    return inv;
}

} // namespace

double kendall_tau(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    const std::size_t n = a.size();
    if (n < 2) throw std::invalid_argument("kendall_tau needs at least 2 items");
    if (b.size() != n) throw std::invalid_argument("kendall_tau: different id sets");
    std::map<std::string, std::uint32_t> pos_in_b;
    for (std::size_t i = 0; i < n; ++i) {
        if (!pos_in_b.emplace(b[i], static_cast<std::uint32_t>(i)).second)
            throw std::invalid_argument("kendall_tau: duplicate id '" + b[i] + "'");
    }
    std::vector<std::uint32_t> ranks(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto it = pos_in_b.find(a[i]);
        if (it == pos_in_b.end())
            throw std::invalid_argument("kendall_tau: id '" + a[i] + "' missing from second list");
        ranks[i] = it->second;
    }
    std::vector<std::uint32_t> tmp(n);
    const std::uint64_t inversions = count_inversions(ranks, tmp, 0, n);
    const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    // C - D = total - 2*inversions
    return (static_cast<double>(total) - 2.0 * static_cast<double>(inversions)) /
           static_cast<double>(total);
}

SystemRanking make_ranking(std::vector<std::pair<std::string, double>> scored, Measure measure) {
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    SystemRanking r;
    r.entries = std::move(scored);
    r.measure = measure;
    return r;
}

SystemRanking rank_systems(const RunSet& runs, const Qrels& qrels,
                           const std::vector<TopicId>& topics, int cutoff) {
    if (topics.empty()) throw std::invalid_argument("rank_systems: empty topic set");
    std::vector<std::pair<std::string, double>> scored;
    scored.reserve(runs.runs.size());
    for (const auto& run : runs.runs) {
        double sum = 0.0;
        for (const auto& t : topics) {
            const auto* list = run.list_for(t);
            if (!list) continue;
            std::vector<std::string> docs;
            docs.reserve(list->size());
            for (const auto& e : *list) docs.push_back(e.doc_id);
            sum += average_precision(docs, qrels, t, cutoff);
        }
        scored.emplace_back(run.system_id, sum / static_cast<double>(topics.size()));
    }
    return make_ranking(std::move(scored), Measure::MapAtCutoff);
}

ApTable::ApTable(const RunSet& runs, const Qrels& qrels, int cutoff) : topics_(runs.topics) {
    system_ids_.reserve(runs.runs.size());
    for (const auto& run : runs.runs) system_ids_.push_back(run.system_id);
    ap_.assign(runs.runs.size(), std::vector<double>(topics_.size(), 0.0));
    parallel_for(runs.runs.size(), [&](std::size_t s) {
        for (std::size_t t = 0; t < topics_.size(); ++t) {
            const auto* list = runs.runs[s].list_for(topics_[t]);
            if (!list) continue;
            std::vector<std::string> docs;
            docs.reserve(list->size());
            for (const auto& e : *list) docs.push_back(e.doc_id);
            ap_[s][t] = average_precision(docs, qrels, topics_[t], cutoff);
        }
    });
    truth_order_ = rank_all().order();
}

std::size_t ApTable::topic_index(const TopicId& t) const {
    auto it = std::lower_bound(topics_.begin(), topics_.end(), t);
    if (it == topics_.end() || *it != t) throw DataError("unknown topic '" + t + "'");
    return static_cast<std::size_t>(it - topics_.begin());
}

SystemRanking ApTable::rank(const std::vector<std::size_t>& topic_indices) const {
    if (topic_indices.empty()) throw std::invalid_argument("rank: empty topic set");
    std::vector<std::pair<std::string, double>> scored;
    scored.reserve(ap_.size());
    for (std::size_t s = 0; s < ap_.size(); ++s) {
        double sum = 0.0;
        for (std::size_t t : topic_indices) sum += ap_[s][t];
        scored.emplace_back(system_ids_[s], sum / static_cast<double>(topic_indices.size()));
    }
    return make_ranking(std::move(scored), Measure::MapAtCutoff);
}

SystemRanking ApTable::rank_all() const {
    std::vector<std::size_t> all(topics_.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return rank(all);
}

double ApTable::tau_vs_truth(const std::vector<std::size_t>& topic_indices) const {
    return kendall_tau(rank(topic_indices).order(), truth_order_);
}

} // namespace tsel
