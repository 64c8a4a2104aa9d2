#include "tsel/statap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tsel/errors.hpp"
#include "tsel/rng.hpp"

namespace tsel {

std::map<std::string, double> statap_weights(const RunSet& runs, const TopicId& topic,
                                             int depth) {
    if (!runs.has_topic(topic)) throw DataError("unknown topic '" + topic + "'");
    if (depth < 1) throw ConfigError("depth must be >= 1");

    // harmonic prefix sums: hsum[k] = 1 + 1/2 + ... + 1/k
    std::vector<double> hsum(static_cast<std::size_t>(depth) + 1, 0.0);
    for (int k = 1; k <= depth; ++k)
        hsum[static_cast<std::size_t>(k)] = hsum[static_cast<std::size_t>(k) - 1] + 1.0 / k;

    std::map<std::string, double> acc;
    for (const auto& run : runs.runs) {
        const auto* list = run.list_for(topic);
        if (!list) continue;
        const std::size_t n = std::min<std::size_t>(list->size(), static_cast<std::size_t>(depth));
        for (std::size_t i = 0; i < n; ++i) {
            // rank i+1: (H_depth - H_rank-1) / depth
            acc[(*list)[i].doc_id] +=
                (hsum[static_cast<std::size_t>(depth)] - hsum[i]) / static_cast<double>(depth);
        }
    }
    if (acc.empty()) throw DataError("empty pool for topic '" + topic + "'");

    const double n_systems = static_cast<double>(runs.runs.size());
    double total = 0.0;
    for (auto& [doc, w] : acc) {
        w /= n_systems;
        total += w;
    }
    for (auto& [doc, w] : acc) w /= total;
    return acc;
}

SampleDesign statap_sample(const TopicId& topic, const std::map<std::string, double>& weights,
                           std::size_t m, std::uint64_t seed) {
    if (weights.empty()) throw DataError("statap_sample: empty pool");
    if (m < 1 || m > weights.size())
        throw std::invalid_argument("statap_sample: m must be in [1, pool size]");

    SampleDesign design;
    design.topic = topic;
    design.weights = weights;

    struct Unit {
        const std::string* doc;
        double w;
    };
    std::vector<Unit> remaining;
    remaining.reserve(weights.size());
    double w_rem = 0.0;
    for (const auto& [doc, w] : weights) {
        remaining.push_back({&doc, w});
        w_rem += w;
    }

    // Certainty extraction: any unit with m_rem * w / W_rem >= 1 is always
    // selected; repeat because extraction raises the scale of the rest.
    std::size_t m_rem = m;
    std::vector<const std::string*> certain;
    bool changed = true;
    while (changed && m_rem > 0) {
        changed = false;
        for (std::size_t i = 0; i < remaining.size();) {
            if (static_cast<double>(m_rem) * remaining[i].w >= w_rem) {
                certain.push_back(remaining[i].doc);
                w_rem -= remaining[i].w;
                --m_rem;
                remaining[i] = remaining.back();
                remaining.pop_back();
                changed = true;
                if (m_rem == 0) break;
            } else {
                ++i;
            }
        }
    }

    for (const auto* doc : certain) design.inclusion_prob[*doc] = 1.0;

    if (m_rem > 0) {
        // Systematic pass over units ordered by descending weight.
        std::sort(remaining.begin(), remaining.end(), [](const Unit& a, const Unit& b) {
            if (a.w != b.w) return a.w > b.w;
            return *a.doc < *b.doc;
        });
        std::vector<double> pi(remaining.size());
        for (std::size_t i = 0; i < remaining.size(); ++i)
            pi[i] = std::min(1.0, static_cast<double>(m_rem) * remaining[i].w / w_rem);

        std::vector<double> cum(remaining.size());
        double c = 0.0;
        for (std::size_t i = 0; i < remaining.size(); ++i) {
            c += pi[i];
            cum[i] = c;
        }

        Rng rng(derive_seed(seed, 0x5A3Cull));
        const double start = rng.uniform();
        std::vector<bool> picked(remaining.size(), false);
        std::size_t picked_count = 0;
        for (std::size_t k = 0; k < m_rem; ++k) {
            const double p = start + static_cast<double>(k);
            auto it = std::upper_bound(cum.begin(), cum.end(), p);
            std::size_t idx = it == cum.end() ? remaining.size() - 1
                                              : static_cast<std::size_t>(it - cum.begin());
            if (!picked[idx]) {
                picked[idx] = true;
                ++picked_count;
            }
        }
        // Floating-point boundary collisions are possible in principle;
        // top up from the heaviest unpicked units to keep |sample| = m.
        for (std::size_t i = 0; i < remaining.size() && picked_count < m_rem; ++i) {
            if (!picked[i]) {
                picked[i] = true;
                ++picked_count;
            }
        }
        for (std::size_t i = 0; i < remaining.size(); ++i)
            if (picked[i]) design.inclusion_prob[*remaining[i].doc] = pi[i];
    }

    design.sample.reserve(design.inclusion_prob.size());
    for (const auto& [doc, p] : design.inclusion_prob) design.sample.push_back(doc);
    return design;
}

double statap_score(const std::vector<std::string>& run_list, const Qrels& qrels,
                    const SampleDesign& design) {
    double r_hat = 0.0;
    for (const auto& [doc, pi] : design.inclusion_prob)
        if (qrels.get(design.topic, doc) == 1) r_hat += 1.0 / pi;
    if (r_hat == 0.0) return 0.0;

    double running = 0.0; // HT-weighted relevant mass among sampled docs up to rank k
    double sum = 0.0;
    for (std::size_t k = 0; k < run_list.size(); ++k) {
        auto it = design.inclusion_prob.find(run_list[k]);
        if (it == design.inclusion_prob.end()) continue;
        if (qrels.get(design.topic, run_list[k]) != 1) continue;
        const double inv_pi = 1.0 / it->second;
        running += inv_pi;
        const double prec_hat = running / static_cast<double>(k + 1);
        sum += prec_hat * inv_pi;
    }
    return sum / r_hat;
}

} // namespace tsel
