#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsel/features.hpp"

namespace tsel {

// Axis-aligned regression tree stored as a flat node array; node 0 is the
// root, leaves have feature == -1.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0; // leaf output (raw, shrinkage applied at predict time)
};

struct RegressionTree {
    std::vector<TreeNode> nodes;

    double eval(const FeatureVector& v) const {
        int i = 0;
        while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
            const TreeNode& n = nodes[static_cast<std::size_t>(i)];
            i = v[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right;
        }
        return nodes[static_cast<std::size_t>(i)].value;
    }
};

struct MartModel {
    double base_score = 0.0;
    double shrinkage = 0.1;
    int num_leaves = 2;
    std::vector<RegressionTree> trees;
    std::vector<double> training_mse; // [0] = base-only, then one entry per tree
    std::vector<std::string> notes;   // training warnings (degenerate data etc.)

    std::string to_json() const;
    static MartModel from_json(const std::string& text);

    void save(const std::string& path) const;
    static MartModel load(const std::string& path);
};

struct TrainingRecord {
    int label = 0;
    FeatureVector features{};
    // provenance: where the record came from
    std::string collection_id;
    int scenario = 0;    // trial index within the subset size
    int subset_size = 0; // |P| when the record was generated
};

struct MartOptions {
    int num_trees = 50;
    int num_leaves = 10;
    double shrinkage = 0.1;
    int min_leaf = 1;
};

// Pointwise least-squares gradient boosting: base score is the label mean,
// each tree greedily fits residuals with variance-reduction splits, split
// ties broken by lowest feature index then lowest threshold.
MartModel train_mart(const std::vector<TrainingRecord>& data, const MartOptions& opts);

double predict(const MartModel& model, const FeatureVector& v);

} // namespace tsel
