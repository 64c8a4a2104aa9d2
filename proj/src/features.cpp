#include "tsel/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "tsel/errors.hpp"
#include "tsel/metrics.hpp"
#include "tsel/parallel.hpp"
#include "tsel/statap.hpp"

namespace tsel {

const std::array<const char*, kNumCoreFeatures> kCoreFeatureNames = {
    "avg_weight", "std_weight", "avg_tau", "std_tau", "cost", "std_cost", "std_qpp"};

std::vector<std::string> feature_slot_names() {
    std::vector<std::string> names;
    names.reserve(kFeatureVectorSize);
    for (auto* f : kCoreFeatureNames) names.push_back(std::string("tc_") + f);
    for (const char* group : {"P", "Pbar", "PplusTc", "PbarMinusTc"}) {
        for (auto* f : kCoreFeatureNames) {
            names.push_back(std::string(group) + "_mean_" + f);
            names.push_back(std::string(group) + "_std_" + f);
        }
    }
    return names;
}

namespace {

double pop_mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double pop_std(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    const double m = pop_mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
}

std::vector<std::string> top_docs(const std::vector<RunEntry>& list, int depth) {
    std::vector<std::string> docs;
    const std::size_t n = std::min<std::size_t>(list.size(), static_cast<std::size_t>(depth));
    docs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) docs.push_back(list[i].doc_id);
    return docs;
}

// Completes two ranked lists to a common id set: documents that appear in
// one list but not the other are appended to the other list, preserving
// their original order.
std::pair<std::vector<std::string>, std::vector<std::string>> concat_complete(
    const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::unordered_set<std::string> in_a(a.begin(), a.end());
    std::unordered_set<std::string> in_b(b.begin(), b.end());
    auto a2 = a;
    for (const auto& d : b)
        if (!in_a.count(d)) a2.push_back(d);
    auto b2 = b;
    for (const auto& d : a)
        if (!in_b.count(d)) b2.push_back(d);
    return {std::move(a2), std::move(b2)};
}

} // namespace

double qpp(const std::vector<RunEntry>& run_list, int k) {
    if (run_list.empty()) throw std::invalid_argument("qpp: empty run list");
    double lo = run_list.front().score, hi = lo;
    for (const auto& e : run_list) {
        lo = std::min(lo, e.score);
        hi = std::max(hi, e.score);
    }
    if (hi == lo) return 0.0; // degenerate min-max: all scores map to 0.5
    const std::size_t n = std::min<std::size_t>(run_list.size(), static_cast<std::size_t>(k));
    std::vector<double> norm(n);
    for (std::size_t i = 0; i < n; ++i) norm[i] = (run_list[i].score - lo) / (hi - lo);
    return pop_std(norm);
}

CoreFeatures core_features(const RunSet& runs, const TopicId& topic, int depth) {
    const std::size_t n_systems = runs.runs.size();
    if (n_systems < 2)
        throw std::invalid_argument("core_features: pairwise statistics need >= 2 systems");

    CoreFeatures f;

    const auto weights = statap_weights(runs, topic, depth);
    std::vector<double> w;
    w.reserve(weights.size());
    for (const auto& [doc, wd] : weights) w.push_back(wd);
    f.avg_weight = pop_mean(w);
    f.std_weight = pop_std(w);

    std::vector<std::vector<std::string>> lists(n_systems);
    for (std::size_t s = 0; s < n_systems; ++s) {
        const auto* list = runs.runs[s].list_for(topic);
        if (list) lists[s] = top_docs(*list, depth);
    }

    std::vector<double> taus;
    std::vector<double> union_sizes;
    taus.reserve(n_systems * (n_systems - 1) / 2);
    union_sizes.reserve(taus.capacity());
    for (std::size_t i = 0; i < n_systems; ++i) {
        for (std::size_t j = i + 1; j < n_systems; ++j) {
            auto [a, b] = concat_complete(lists[i], lists[j]);
            taus.push_back(a.size() < 2 ? 1.0 : kendall_tau(a, b));
            union_sizes.push_back(static_cast<double>(a.size()));
        }
    }
    f.avg_tau = pop_mean(taus);
    f.std_tau = pop_std(taus);

    f.cost = static_cast<double>(weights.size()) /
             (static_cast<double>(n_systems) * static_cast<double>(depth));
    f.std_cost = pop_std(union_sizes);

    std::vector<double> qpps;
    qpps.reserve(n_systems);
    for (std::size_t s = 0; s < n_systems; ++s) {
        const auto* list = runs.runs[s].list_for(topic);
        qpps.push_back(list && !list->empty() ? qpp(*list, depth) : 0.0);
    }
    f.std_qpp = pop_std(qpps);
    return f;
}

std::array<double, 2 * kNumCoreFeatures> aggregate(const std::vector<CoreFeatures>& features) {
    std::array<double, 2 * kNumCoreFeatures> out{};
    if (features.empty()) return out; // documented sentinel: all zeros
    for (std::size_t k = 0; k < kNumCoreFeatures; ++k) {
        std::vector<double> vals;
        vals.reserve(features.size());
        for (const auto& f : features) vals.push_back(f.to_array()[k]);
        out[2 * k] = pop_mean(vals);
        out[2 * k + 1] = pop_std(vals);
    }
    return out;
}

FeatureTable::FeatureTable(const RunSet& runs, int depth) : topics_(runs.topics) {
    std::vector<CoreFeatures> computed(topics_.size());
    std::vector<std::string> failures(topics_.size());
    parallel_for(topics_.size(), [&](std::size_t i) {
        try {
            computed[i] = core_features(runs, topics_[i], depth);
        } catch (const std::exception& e) {
            failures[i] = e.what();
        }
    });
    for (const auto& msg : failures)
        if (!msg.empty()) throw DataError(msg);
    for (std::size_t i = 0; i < topics_.size(); ++i) core_[topics_[i]] = computed[i];
}

const CoreFeatures& FeatureTable::core(const TopicId& topic) const {
    auto it = core_.find(topic);
    if (it == core_.end()) throw DataError("feature table: unknown topic '" + topic + "'");
    return it->second;
}

FeatureVector FeatureTable::assemble(const TopicId& t_c, const std::set<TopicId>& selected,
                                     const std::set<TopicId>& candidates) const {
    if (!candidates.count(t_c))
        throw std::invalid_argument("assemble: candidate topic not in P_bar");
    if (selected.count(t_c)) throw std::invalid_argument("assemble: candidate already selected");
    if (selected.size() + candidates.size() != topics_.size())
        throw std::invalid_argument("assemble: P and P_bar do not partition the topic set");
    for (const auto& t : selected)
        if (candidates.count(t))
            throw std::invalid_argument("assemble: P and P_bar overlap on '" + t + "'");

    auto collect = [&](const std::set<TopicId>& ts, const TopicId* plus,
                       const TopicId* minus) {
        std::vector<CoreFeatures> fs;
        fs.reserve(ts.size() + 1);
        for (const auto& t : ts) {
            if (minus && t == *minus) continue;
            fs.push_back(core(t));
        }
        if (plus) fs.push_back(core(*plus));
        return fs;
    };

    FeatureVector v{};
    const auto tc = core(t_c).to_array();
    std::copy(tc.begin(), tc.end(), v.begin());

    const auto agg_p = aggregate(collect(selected, nullptr, nullptr));
    const auto agg_pbar = aggregate(collect(candidates, nullptr, nullptr));
    const auto agg_p_plus = aggregate(collect(selected, &t_c, nullptr));
    const auto agg_pbar_minus = aggregate(collect(candidates, nullptr, &t_c));
    std::copy(agg_p.begin(), agg_p.end(), v.begin() + 7);
    std::copy(agg_pbar.begin(), agg_pbar.end(), v.begin() + 21);
    std::copy(agg_p_plus.begin(), agg_p_plus.end(), v.begin() + 35);
    std::copy(agg_pbar_minus.begin(), agg_pbar_minus.end(), v.begin() + 49);

    for (std::size_t core_idx : masked_) {
        if (core_idx >= kNumCoreFeatures) continue;
        v[core_idx] = 0.0;
        for (std::size_t g = 0; g < 4; ++g) {
            v[7 + 14 * g + 2 * core_idx] = 0.0;
            v[7 + 14 * g + 2 * core_idx + 1] = 0.0;
        }
    }

    for (double x : v)
        if (!std::isfinite(x)) throw DataError("assemble: non-finite feature value");
    return v;
}

void FeatureTable::write_csv(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << "topic";
    for (auto* f : kCoreFeatureNames) out << ',' << f;
    out << '\n';
    char buf[32];
    for (const auto& t : topics_) {
        out << t;
        for (double x : core_.at(t).to_array()) {
            std::snprintf(buf, sizeof(buf), "%.17g", x);
            out << ',' << buf;
        }
        out << '\n';
    }
}

FeatureTable FeatureTable::read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    FeatureTable table;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true; // column names are fixed; content validated by field count
            continue;
        }
        std::istringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 1 + kNumCoreFeatures)
            throw ParseError(path, line_no, "expected 8 columns");
        CoreFeatures f;
        f.avg_weight = std::stod(fields[1]);
        f.std_weight = std::stod(fields[2]);
        f.avg_tau = std::stod(fields[3]);
        f.std_tau = std::stod(fields[4]);
        f.cost = std::stod(fields[5]);
        f.std_cost = std::stod(fields[6]);
        f.std_qpp = std::stod(fields[7]);
        table.core_[fields[0]] = f;
        table.topics_.push_back(fields[0]);
    }
    std::sort(table.topics_.begin(), table.topics_.end());
    return table;
}

} // namespace tsel
