#include "tsel/mart.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "tsel/errors.hpp"

namespace tsel {

namespace {

constexpr double kMinGain = 1e-12;

struct SplitChoice {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
};

// One open leaf during construction: its samples kept in per-feature
// sorted order so split search is a linear scan.
struct BuildLeaf {
    std::vector<std::vector<std::uint32_t>> sorted; // [feature][rank] -> sample index
    int node_index = -1;
    SplitChoice best;
};

SplitChoice find_best_split(const BuildLeaf& leaf,
                            const std::vector<TrainingRecord>& data,
                            const std::vector<double>& residual, int min_leaf) {
    SplitChoice best;
    const std::size_t n = leaf.sorted[0].size();
    if (n < 2 * static_cast<std::size_t>(min_leaf)) return best;

    double total = 0.0;
    for (std::uint32_t i : leaf.sorted[0]) total += residual[i];
    const double parent_term = total * total / static_cast<double>(n);

    for (std::size_t f = 0; f < kFeatureVectorSize; ++f) {
        const auto& order = leaf.sorted[f];
        double left_sum = 0.0;
        for (std::size_t pos = 0; pos + 1 < n; ++pos) {
            left_sum += residual[order[pos]];
            const double v = data[order[pos]].features[f];
            const double next = data[order[pos + 1]].features[f];
            if (!(v < next)) continue;
            const std::size_t n_left = pos + 1;
            const std::size_t n_right = n - n_left;
            if (n_left < static_cast<std::size_t>(min_leaf) ||
                n_right < static_cast<std::size_t>(min_leaf))
                continue;
            const double right_sum = total - left_sum;
            const double gain = left_sum * left_sum / static_cast<double>(n_left) +
                                right_sum * right_sum / static_cast<double>(n_right) -
                                parent_term;
            const double threshold = (v + next) * 0.5;
            if (!(v < threshold && threshold <= next)) continue; // degenerate midpoint
            if (gain > best.gain) {
                best = {gain, static_cast<int>(f), threshold};
            }
            // scan order is (feature asc, threshold asc), so strictly-greater
            // comparison keeps the lowest feature/threshold on exact ties
        }
    }
    return best;
}

RegressionTree build_tree(const std::vector<TrainingRecord>& data,
                          const std::vector<double>& residual,
                          const std::vector<std::vector<std::uint32_t>>& global_sorted,
                          const MartOptions& opts, std::vector<int>& leaf_of_sample) {
    RegressionTree tree;
    auto leaf_mean = [&](const std::vector<std::uint32_t>& samples) {
        double s = 0.0;
        for (std::uint32_t i : samples) s += residual[i];
        return samples.empty() ? 0.0 : s / static_cast<double>(samples.size());
    };

    std::vector<BuildLeaf> open;
    {
        BuildLeaf root;
        root.sorted = global_sorted;
        root.node_index = 0;
        tree.nodes.push_back({-1, 0.0, -1, -1, leaf_mean(root.sorted[0])});
        root.best = find_best_split(root, data, residual, opts.min_leaf);
        open.push_back(std::move(root));
    }

    int leaf_count = 1;
    while (leaf_count < opts.num_leaves) {
        // split the open leaf with the largest gain; first created wins ties
        std::size_t pick = open.size();
        for (std::size_t i = 0; i < open.size(); ++i) {
            if (open[i].best.feature < 0 || open[i].best.gain <= kMinGain) continue;
            if (pick == open.size() || open[i].best.gain > open[pick].best.gain) pick = i;
        }
        if (pick == open.size()) break;

        BuildLeaf parent = std::move(open[pick]);
        open.erase(open.begin() + static_cast<long>(pick));

        const int f = parent.best.feature;
        const double thr = parent.best.threshold;
        BuildLeaf left, right;
        left.sorted.resize(kFeatureVectorSize);
        right.sorted.resize(kFeatureVectorSize);
        for (std::size_t g = 0; g < kFeatureVectorSize; ++g) {
            for (std::uint32_t idx : parent.sorted[g]) {
                if (data[idx].features[static_cast<std::size_t>(f)] < thr)
                    left.sorted[g].push_back(idx);
                else
                    right.sorted[g].push_back(idx);
            }
        }

        left.node_index = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back({-1, 0.0, -1, -1, leaf_mean(left.sorted[0])});
        right.node_index = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back({-1, 0.0, -1, -1, leaf_mean(right.sorted[0])});

        TreeNode& p = tree.nodes[static_cast<std::size_t>(parent.node_index)];
        p.feature = f;
        p.threshold = thr;
        p.left = left.node_index;
        p.right = right.node_index;

        left.best = find_best_split(left, data, residual, opts.min_leaf);
        right.best = find_best_split(right, data, residual, opts.min_leaf);
        open.push_back(std::move(left));
        open.push_back(std::move(right));
        ++leaf_count;
    }

    for (const auto& leaf : open)
        for (std::uint32_t idx : leaf.sorted[0]) leaf_of_sample[idx] = leaf.node_index;
    return tree;
}

} // namespace

MartModel train_mart(const std::vector<TrainingRecord>& data, const MartOptions& opts) {
    if (data.empty()) throw std::invalid_argument("train_mart: empty training data");
    if (opts.num_leaves < 2) throw std::invalid_argument("train_mart: num_leaves must be >= 2");
    if (opts.shrinkage <= 0.0 || opts.shrinkage > 1.0)
        throw std::invalid_argument("train_mart: shrinkage must be in (0, 1]");

    const std::size_t n = data.size();
    MartModel model;
    model.shrinkage = opts.shrinkage;
    model.num_leaves = opts.num_leaves;

    double label_sum = 0.0;
    for (const auto& r : data) label_sum += r.label;
    model.base_score = label_sum / static_cast<double>(n);

    std::vector<double> pred(n, model.base_score);
    auto mse = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = static_cast<double>(data[i].label) - pred[i];
            s += d * d;
        }
        return s / static_cast<double>(n);
    };
    model.training_mse.push_back(mse());

    // per-feature sample order, computed once: value asc, index asc on ties
    std::vector<std::vector<std::uint32_t>> global_sorted(kFeatureVectorSize);
    for (std::size_t f = 0; f < kFeatureVectorSize; ++f) {
        auto& order = global_sorted[f];
        order.resize(n);
        std::iota(order.begin(), order.end(), 0u);
        std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            return data[a].features[f] < data[b].features[f];
        });
    }

    std::vector<double> residual(n);
    std::vector<int> leaf_of_sample(n, 0);
    for (int t = 0; t < opts.num_trees; ++t) {
        for (std::size_t i = 0; i < n; ++i)
            residual[i] = static_cast<double>(data[i].label) - pred[i];
        RegressionTree tree = build_tree(data, residual, global_sorted, opts, leaf_of_sample);
        for (std::size_t i = 0; i < n; ++i)
            pred[i] += opts.shrinkage *
                       tree.nodes[static_cast<std::size_t>(leaf_of_sample[i])].value;
        model.trees.push_back(std::move(tree));
        model.training_mse.push_back(mse());
    }

    bool any_split = false;
    for (const auto& tree : model.trees)
        if (tree.nodes.size() > 1) any_split = true;
    if (!any_split && model.training_mse.back() > 0.0)
        model.notes.push_back("no usable split found; model predicts the label mean");
    return model;
}

double predict(const MartModel& model, const FeatureVector& v) {
    for (double x : v)
        if (!std::isfinite(x)) throw std::invalid_argument("predict: non-finite feature");
    double sum = 0.0;
    for (const auto& tree : model.trees) sum += tree.eval(v);
    return model.base_score + model.shrinkage * sum;
}

std::string MartModel::to_json() const {
    nlohmann::json j;
    j["format"] = "tsel-mart";
    j["version"] = 1;
    j["base_score"] = base_score;
    j["shrinkage"] = shrinkage;
    j["num_leaves"] = num_leaves;
    j["training_mse"] = training_mse;
    j["notes"] = notes;
    nlohmann::json jtrees = nlohmann::json::array();
    for (const auto& tree : trees) {
        nlohmann::json jnodes = nlohmann::json::array();
        for (const auto& node : tree.nodes)
            jnodes.push_back({node.feature, node.threshold, node.left, node.right, node.value});
        jtrees.push_back(jnodes);
    }
    j["trees"] = jtrees;
    return j.dump();
}

MartModel MartModel::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (j.value("format", "") != "tsel-mart")
        throw DataError("model file: unexpected format tag");
    if (j.value("version", 0) != 1)
        throw DataError("model file: unsupported version");
    MartModel m;
    m.base_score = j.at("base_score").get<double>();
    m.shrinkage = j.at("shrinkage").get<double>();
    m.num_leaves = j.at("num_leaves").get<int>();
    m.training_mse = j.at("training_mse").get<std::vector<double>>();
    m.notes = j.value("notes", std::vector<std::string>{});
    for (const auto& jnodes : j.at("trees")) {
        RegressionTree tree;
        for (const auto& jn : jnodes) {
            TreeNode node;
            node.feature = jn.at(0).get<int>();
            node.threshold = jn.at(1).get<double>();
            node.left = jn.at(2).get<int>();
            node.right = jn.at(3).get<int>();
            node.value = jn.at(4).get<double>();
            tree.nodes.push_back(node);
        }
        m.trees.push_back(std::move(tree));
    }
    return m;
}

void MartModel::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << to_json() << '\n';
}

MartModel MartModel::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

} // namespace tsel
