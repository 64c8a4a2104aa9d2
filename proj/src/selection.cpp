#include "tsel/selection.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tsel/errors.hpp"
#include "tsel/parallel.hpp"
#include "tsel/rng.hpp"

namespace tsel {

SelectionTrace greedy_oracle_select(const RunSet& runs, const Qrels& qrels, std::size_t m,
                                    int map_cutoff) {
    const std::size_t n = runs.topics.size();
    if (m < 1 || m > n) throw std::invalid_argument("greedy_oracle_select: M out of range");
    const ApTable ap(runs, qrels, map_cutoff);

    SelectionTrace trace;
    trace.strategy_id = "oracle";

    std::vector<std::size_t> selected;
    std::vector<std::size_t> candidates(n);
    for (std::size_t i = 0; i < n; ++i) candidates[i] = i;

    while (selected.size() < m) {
        std::vector<double> taus(candidates.size());
        parallel_for(candidates.size(), [&](std::size_t c) {
            auto with_t = selected;
            with_t.push_back(candidates[c]);
            taus[c] = ap.tau_vs_truth(with_t);
        });
        std::size_t best = 0;
        for (std::size_t c = 1; c < candidates.size(); ++c)
            if (taus[c] > taus[best]) best = c; // candidates ascend, so ties keep smallest id
        selected.push_back(candidates[best]);
        trace.selected.push_back(runs.topics[candidates[best]]);
        trace.tau_after_step.push_back(taus[best]);
        candidates.erase(candidates.begin() + static_cast<long>(best));
    }
    return trace;
}

SelectionTrace l2r_select(const FeatureTable& features, const MartModel& model, std::size_t m) {
    const auto& topics = features.topics();
    const std::size_t n = topics.size();
    if (m < 1 || m > n) throw std::invalid_argument("l2r_select: M out of range");

    SelectionTrace trace;
    trace.strategy_id = "l2r";

    std::set<TopicId> selected;
    std::set<TopicId> candidates(topics.begin(), topics.end());

    while (selected.size() < m) {
        std::vector<TopicId> order(candidates.begin(), candidates.end());
        std::vector<double> scores(order.size());
        parallel_for(order.size(), [&](std::size_t c) {
            scores[c] = predict(model, features.assemble(order[c], selected, candidates));
        });
        std::size_t best = 0;
        for (std::size_t c = 1; c < order.size(); ++c)
            if (scores[c] > scores[best]) best = c; // order ascends, ties keep smallest id
        trace.selected.push_back(order[best]);
        selected.insert(order[best]);
        candidates.erase(order[best]);
    }
    return trace;
}

std::vector<double> evaluate_trace(const ApTable& ap, const std::vector<TopicId>& selected) {
    std::vector<double> taus(selected.size());
    std::vector<std::size_t> prefix;
    prefix.reserve(selected.size());
    for (std::size_t i = 0; i < selected.size(); ++i) {
        prefix.push_back(ap.topic_index(selected[i]));
        taus[i] = ap.tau_vs_truth(prefix);
    }
    return taus;
}

std::vector<double> evaluate_trace(const RunSet& runs, const Qrels& qrels,
                                   const std::vector<TopicId>& selected, int map_cutoff) {
    const ApTable ap(runs, qrels, map_cutoff);
    return evaluate_trace(ap, selected);
}

RandomBaseline random_select(const ApTable& ap, std::size_t m, std::size_t trials,
                             std::uint64_t seed) {
    const std::size_t n = ap.topics().size();
    if (m < 1 || m > n) throw std::invalid_argument("random_select: M out of range");
    if (trials < 1) throw std::invalid_argument("random_select: trials must be >= 1");

    std::vector<double> taus(trials);
    parallel_for(trials, [&](std::size_t t) {
        Rng rng(derive_seed(seed, m, t));
        taus[t] = ap.tau_vs_truth(rng.sample_indices(n, m));
    });
    RandomBaseline out;
    for (double t : taus) out.mean_tau += t;
    out.mean_tau /= static_cast<double>(trials);
    double ss = 0.0;
    for (double t : taus) ss += (t - out.mean_tau) * (t - out.mean_tau);
    out.std_tau = std::sqrt(ss / static_cast<double>(trials));
    return out;
}

RandomBaseline random_select(const RunSet& runs, const Qrels& qrels, std::size_t m,
                             std::size_t trials, std::uint64_t seed, int map_cutoff) {
    const ApTable ap(runs, qrels, map_cutoff);
    return random_select(ap, m, trials, seed);
}

void write_trace_csv(const SelectionTrace& trace, const std::string& path,
                     const std::string& header) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    if (!header.empty()) out << header;
    out << "step,topic,tau\n";
    char buf[32];
    for (std::size_t i = 0; i < trace.selected.size(); ++i) {
        out << (i + 1) << ',' << trace.selected[i] << ',';
        if (i < trace.tau_after_step.size()) {
            std::snprintf(buf, sizeof(buf), "%.17g", trace.tau_after_step[i]);
            out << buf;
        }
        out << '\n';
    }
}

void write_trace_json(const SelectionTrace& trace, const std::string& path,
                      const std::string& provenance_json) {
    nlohmann::json j;
    j["strategy"] = trace.strategy_id;
    j["seed"] = trace.seed;
    j["selected"] = trace.selected;
    j["tau_after_step"] = trace.tau_after_step;
    if (!provenance_json.empty()) j["provenance"] = nlohmann::json::parse(provenance_json);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << j.dump(2) << '\n';
}

SelectionTrace read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    SelectionTrace trace;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        std::istringstream ss(line);
        std::string step, topic, tau;
        if (!std::getline(ss, step, ',') || !std::getline(ss, topic, ','))
            throw ParseError(path, line_no, "expected step,topic,tau");
        std::getline(ss, tau, ',');
        if (topic.empty()) throw ParseError(path, line_no, "empty topic id");
        trace.selected.push_back(topic);
        if (!tau.empty()) trace.tau_after_step.push_back(std::stod(tau));
    }
    return trace;
}

} // namespace tsel
