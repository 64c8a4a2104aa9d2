#include "tsel/budget.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include "tsel/errors.hpp"
#include "tsel/metrics.hpp"
#include "tsel/parallel.hpp"
#include "tsel/rng.hpp"
#include "tsel/statap.hpp"

namespace tsel {

double judging_time_per_doc(int judgments_per_topic) {
    if (judgments_per_topic < 1)
        throw std::invalid_argument("judging_time_per_doc: x must be >= 1");
    const int x = judgments_per_topic;
    if (x <= 32) return 15.0;
    if (x < 127) return 8.761 + 16.856 * std::exp(-0.0316 * static_cast<double>(x));
    return 9.0;
}

Quota judgments_per_topic(long budget_seconds, int n_topics, long tdc_seconds,
                          SpeedModel model) {
    if (n_topics < 1) throw std::invalid_argument("judgments_per_topic: n_topics must be >= 1");
    if (tdc_seconds < 0) throw std::invalid_argument("judgments_per_topic: negative tdc");
    Quota q;
    const double development = static_cast<double>(n_topics) * static_cast<double>(tdc_seconds);
    if (static_cast<double>(budget_seconds) < development) {
        q.insufficient = true;
        return q;
    }
    const double per_topic =
        (static_cast<double>(budget_seconds) - development) / static_cast<double>(n_topics);
    if (model == SpeedModel::Constant) {
        q.judgments = static_cast<int>(std::floor(per_topic / 15.0));
        return q;
    }
    // Variable speed: largest j with j * f(j) <= per-topic seconds. Total
    // time dips slightly across the 126/127 boundary, so scan the curved
    // piece and close with the 9 s/doc tail.
    int best = 0;
    for (int j = 1; j <= 126; ++j)
        if (static_cast<double>(j) * judging_time_per_doc(j) <= per_topic) best = j;
    const int tail = static_cast<int>(std::floor(per_topic / 9.0));
    if (tail >= 127) best = std::max(best, tail);
    q.judgments = best;
    return q;
}

double accuracy_for_tdc(long tdc_seconds) {
    if (tdc_seconds < 76)
        throw std::invalid_argument("accuracy_for_tdc: no data below 76 seconds");
    const double acc = 0.92 + 0.02 * std::log2(static_cast<double>(tdc_seconds) / 76.0);
    return std::min(1.0, acc);
}

Qrels flip_judgments(const Qrels& qrels, double accuracy, std::uint64_t seed) {
    if (accuracy < 0.0 || accuracy > 1.0)
        throw std::invalid_argument("flip_judgments: accuracy must be in [0, 1]");
    const double p_flip = 1.0 - accuracy;
    Rng rng(derive_seed(seed, 0xF11Bull));
    Qrels out;
    for (const auto& [topic, docs] : qrels.by_topic())
        for (const auto& [doc, rel] : docs)
            out.set(topic, doc, rng.uniform() < p_flip ? 1 - rel : rel);
    return out;
}

namespace {

struct TopicArtifacts {
    std::map<std::string, double> weights;
    std::vector<std::vector<std::string>> run_docs; // [system] -> depth-truncated list
};

std::vector<CurveRow> simulate_impl(const RunSet& runs, const Qrels& qrels,
                                    const BudgetScenario& scenario,
                                    const SelectionTrace* trace, std::size_t random_trials,
                                    const std::vector<int>& topic_counts) {
    const std::size_t n_all = runs.topics.size();
    for (int n : topic_counts)
        if (n < 1 || static_cast<std::size_t>(n) > n_all)
            throw std::invalid_argument("simulate_curve: topic count out of range");
    if (trace) {
        for (int n : topic_counts)
            if (static_cast<std::size_t>(n) > trace->selected.size())
                throw std::invalid_argument("simulate_curve: trace shorter than topic count");
        for (const auto& t : trace->selected)
            if (!runs.has_topic(t)) throw DataError("trace topic '" + t + "' not in run set");
    }

    const ApTable ap(runs, qrels, scenario.map_cutoff);
    const std::vector<std::string> truth_order = ap.rank_all().order();

    // Per-topic pools, weights and truncated lists are shared by every row.
    std::vector<TopicArtifacts> artifacts(n_all);
    {
        std::vector<std::string> failures(n_all);
        parallel_for(n_all, [&](std::size_t t) {
            try {
                TopicArtifacts& a = artifacts[t];
                a.weights = statap_weights(runs, runs.topics[t], scenario.pool_depth);
                a.run_docs.resize(runs.runs.size());
                for (std::size_t s = 0; s < runs.runs.size(); ++s) {
                    const auto* list = runs.runs[s].list_for(runs.topics[t]);
                    if (!list) continue;
                    const std::size_t depth = std::min<std::size_t>(
                        list->size(), static_cast<std::size_t>(scenario.pool_depth));
                    for (std::size_t i = 0; i < depth; ++i)
                        a.run_docs[s].push_back((*list)[i].doc_id);
                }
            } catch (const std::exception& e) {
                failures[t] = e.what();
            }
        });
        for (const auto& f : failures)
            if (!f.empty()) throw DataError(f);
    }

    double accuracy = 1.0;
    bool flipping = scenario.error_model == ErrorModel::TdcLinked;
    if (flipping) {
        accuracy = accuracy_for_tdc(scenario.tdc_seconds);
        if (accuracy >= 1.0) flipping = false; // identical qrels; same path as no-error
    }

    std::vector<CurveRow> rows;
    for (int n : topic_counts) {
        CurveRow row;
        row.n_topics = n;
        const Quota quota = judgments_per_topic(scenario.total_budget_seconds, n,
                                                scenario.tdc_seconds, scenario.speed_model);
        row.quota = quota.judgments;
        row.insufficient = quota.insufficient;
        if (quota.insufficient || quota.judgments == 0) {
            row.insufficient = true;
            row.mean_tau = std::nan("");
            row.std_tau = std::nan("");
            rows.push_back(row);
            continue;
        }

        const std::size_t n_flip = flipping ? static_cast<std::size_t>(scenario.flip_repeats) : 1;
        const std::size_t n_subsets = trace ? 1 : random_trials;
        const std::size_t n_samp = static_cast<std::size_t>(scenario.judgments_repeats);

        std::vector<Qrels> flipped_sets;
        if (flipping) {
            flipped_sets.resize(n_flip);
            parallel_for(n_flip, [&](std::size_t f) {
                flipped_sets[f] = flip_judgments(
                    qrels, accuracy,
                    derive_seed(scenario.seed, 0xF11Full, static_cast<std::uint64_t>(n), f));
            });
        }

        std::vector<double> taus(n_flip * n_subsets * n_samp);
        parallel_for(taus.size(), [&](std::size_t unit) {
            const std::size_t f = unit / (n_subsets * n_samp);
            const std::size_t sub = (unit / n_samp) % n_subsets;
            const std::size_t rep = unit % n_samp;
            const Qrels& judged = flipping ? flipped_sets[f] : qrels;

            std::vector<std::size_t> chosen;
            chosen.reserve(static_cast<std::size_t>(n));
            if (trace) {
                for (int i = 0; i < n; ++i)
                    chosen.push_back(
                        ap.topic_index(trace->selected[static_cast<std::size_t>(i)]));
            } else {
                Rng subset_rng(
                    derive_seed(scenario.seed, 0x5EBull, static_cast<std::uint64_t>(n), sub));
                chosen = subset_rng.sample_indices(n_all, static_cast<std::size_t>(n));
            }

            std::vector<std::pair<std::string, double>> scored;
            scored.reserve(runs.runs.size());
            std::vector<SampleDesign> designs;
            designs.reserve(chosen.size());
            for (std::size_t t = 0; t < chosen.size(); ++t) {
                const TopicArtifacts& a = artifacts[chosen[t]];
                const std::size_t m =
                    std::min<std::size_t>(a.weights.size(),
                                          static_cast<std::size_t>(quota.judgments));
                designs.push_back(statap_sample(
                    runs.topics[chosen[t]], a.weights, m,
                    derive_seed(scenario.seed, static_cast<std::uint64_t>(n), f, sub, rep, t)));
            }
            for (std::size_t s = 0; s < runs.runs.size(); ++s) {
                double sum = 0.0;
                for (std::size_t t = 0; t < chosen.size(); ++t)
                    sum += statap_score(artifacts[chosen[t]].run_docs[s], judged, designs[t]);
                scored.emplace_back(runs.runs[s].system_id,
                                    sum / static_cast<double>(chosen.size()));
            }
            taus[unit] = kendall_tau(make_ranking(std::move(scored), Measure::StatAP).order(),
                                     truth_order);
        });

        double mean = 0.0;
        for (double t : taus) mean += t;
        mean /= static_cast<double>(taus.size());
        double ss = 0.0;
        for (double t : taus) ss += (t - mean) * (t - mean);
        row.mean_tau = mean;
        row.std_tau = std::sqrt(ss / static_cast<double>(taus.size()));
        rows.push_back(row);
    }
    return rows;
}

} // namespace

std::vector<CurveRow> simulate_curve(const RunSet& runs, const Qrels& qrels,
                                     const BudgetScenario& scenario, const SelectionTrace& trace,
                                     const std::vector<int>& topic_counts) {
    return simulate_impl(runs, qrels, scenario, &trace, 0, topic_counts);
}

std::vector<CurveRow> simulate_curve_random(const RunSet& runs, const Qrels& qrels,
                                            const BudgetScenario& scenario, std::size_t trials,
                                            const std::vector<int>& topic_counts) {
    if (trials < 1) throw std::invalid_argument("simulate_curve_random: trials must be >= 1");
    return simulate_impl(runs, qrels, scenario, nullptr, trials, topic_counts);
}

void write_curve_csv(const std::vector<CurveRow>& rows, const std::string& path,
                     const std::string& header) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    if (!header.empty()) out << header;
    out << "n_topics,mean_tau,std_tau,quota,insufficient\n";
    char buf[32];
    for (const auto& r : rows) {
        out << r.n_topics << ',';
        if (!std::isnan(r.mean_tau)) {
            std::snprintf(buf, sizeof(buf), "%.17g", r.mean_tau);
            out << buf;
        }
        out << ',';
        if (!std::isnan(r.std_tau)) {
            std::snprintf(buf, sizeof(buf), "%.17g", r.std_tau);
            out << buf;
        }
        out << ',' << r.quota << ',' << (r.insufficient ? 1 : 0) << '\n';
    }
}

} // namespace tsel
