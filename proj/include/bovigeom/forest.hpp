#pragma once

#include "bovigeom/error.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bovigeom {

/// Body condition score: 10 ordered classes from 2.00 to 4.25 in steps of 0.25.
class BcsLabel {
public:
    static constexpr int kNumClasses = 10;
    static constexpr double kMin = 2.0;
    static constexpr double kStep = 0.25;

    BcsLabel() = default;
    static BcsLabel from_index(int index);
    static BcsLabel from_value(double value); // throws ConfigError off the grid

    int index() const { return index_; }
    double value() const { return kMin + kStep * index_; }
    friend bool operator==(BcsLabel a, BcsLabel b) { return a.index_ == b.index_; }
    friend bool operator!=(BcsLabel a, BcsLabel b) { return a.index_ != b.index_; }
    friend bool operator<(BcsLabel a, BcsLabel b) { return a.index_ < b.index_; }

private:
    int index_ = 0;
};

enum class MaxFeaturesRule { sqrt_rule, log2_rule, fraction };

struct ForestHyperparams {
    int n_estimators = 400;
    std::optional<int> max_depth;       // nullopt = grow to purity
    int min_samples_split = 2;
    int min_samples_leaf = 1;
    MaxFeaturesRule max_features = MaxFeaturesRule::sqrt_rule;
    double max_features_fraction = 0.5; // only for MaxFeaturesRule::fraction
    bool balanced_class_weight = false;
    bool bootstrap = true; // false trains every tree on the full data (diagnostics)
    std::uint64_t seed = 0;

    int resolve_max_features(int n_features) const;
    std::string describe() const;
};

/// The full "table1" search grid: n_estimators {200,400,800} x
/// max_depth {none,8,12,16,24} x min_samples_split {2,5,10} x
/// min_samples_leaf {1,2,4} x max_features {sqrt,log2,0.5} x
/// class_weight {none,balanced}; 810 configurations in row-major order.
std::vector<ForestHyperparams> table1_grid(std::uint64_t seed);

/// Row-major sample matrix with named feature columns.
struct FeatureMatrix {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<double> data; // row-major
    std::vector<std::string> feature_names;

    double at(std::size_t row, std::size_t col) const { return data[row * n_cols + col]; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * n_cols, n_cols}; }
    void validate() const; // throws ConfigError on non-finite values / shape mismatch
};

struct TreeNode {
    std::int32_t feature = -1; // -1 = leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::array<double, BcsLabel::kNumClasses> leaf_dist{}; // normalized, leaves only
};

struct DecisionTree {
    std::vector<TreeNode> nodes;
    const std::array<double, BcsLabel::kNumClasses>& predict_dist(std::span<const double> x) const;
};

struct ForestModel {
    std::vector<DecisionTree> trees;
    std::vector<std::string> feature_names;
    std::vector<double> importances; // normalized mean impurity decrease
    ForestHyperparams hyperparams;
    double oob_accuracy = 0.0; // exact-match accuracy over out-of-bag votes

    std::string to_json() const;
    static ForestModel from_json(std::istream& in);
};

/// Grow a seeded bootstrap ensemble of Gini CART trees. Each tree's random
/// stream derives from (hp.seed, tree index), so serial and parallel
/// training produce identical models.
ForestModel train_forest(const FeatureMatrix& x, const std::vector<BcsLabel>& y,
                         const ForestHyperparams& hp, int n_jobs = 1);

struct Prediction {
    BcsLabel label;
    std::array<double, BcsLabel::kNumClasses> probabilities{};
};

/// Mean of per-tree leaf distributions; label ties resolve to the lower BCS.
Prediction predict(const ForestModel& m, std::span<const double> x);

struct GridSearchEntry {
    ForestHyperparams hyperparams;
    double val_accuracy = 0.0;
};

struct GridSearchResult {
    ForestHyperparams best;
    double best_accuracy = 0.0;
    std::vector<GridSearchEntry> table;
};

/// Exhaustive search over `grid`, scored by exact-match accuracy on the
/// validation set. Ties prefer fewer trees, then shallower depth, then
/// grid order. The caller retrains on train+val with the winner.
GridSearchResult grid_search(const FeatureMatrix& train_x, const std::vector<BcsLabel>& train_y,
                             const FeatureMatrix& val_x, const std::vector<BcsLabel>& val_y,
                             const std::vector<ForestHyperparams>& grid, int n_jobs = 1);

} // namespace bovigeom
