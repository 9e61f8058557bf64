#include "bovigeom/forest.hpp"

#include "bovigeom/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <istream>
#include <numeric>
#include <sstream>
#include <thread>

namespace bovigeom {

BcsLabel BcsLabel::from_index(int index) {
    if (index < 0 || index >= kNumClasses)
        throw ConfigError("bcs label: index " + std::to_string(index) + " outside 0.." +
                          std::to_string(kNumClasses - 1));
    BcsLabel l;
    l.index_ = index;
    return l;
}

BcsLabel BcsLabel::from_value(double value) {
    const double steps = (value - kMin) / kStep;
    const int index = static_cast<int>(std::lround(steps));
    if (index < 0 || index >= kNumClasses || std::abs(steps - index) > 1e-6)
        throw ConfigError("bcs label: value " + std::to_string(value) + " is not on the 2.00..4.25/0.25 grid");
    return from_index(index);
}

int ForestHyperparams::resolve_max_features(int n_features) const {
    int k = 0;
    switch (max_features) {
    case MaxFeaturesRule::sqrt_rule:
        k = static_cast<int>(std::sqrt(static_cast<double>(n_features)));
        break;
    case MaxFeaturesRule::log2_rule:
        k = static_cast<int>(std::log2(static_cast<double>(n_features)));
        break;
    case MaxFeaturesRule::fraction:
        k = static_cast<int>(max_features_fraction * n_features);
        break;
    }
    return std::clamp(k, 1, n_features);
}

std::string ForestHyperparams::describe() const {
    std::ostringstream os;
    os << "trees=" << n_estimators << " depth=";
    if (max_depth) os << *max_depth;
    else os << "none";
    os << " split=" << min_samples_split << " leaf=" << min_samples_leaf << " feats=";
    switch (max_features) {
    case MaxFeaturesRule::sqrt_rule: os << "sqrt"; break;
    case MaxFeaturesRule::log2_rule: os << "log2"; break;
    case MaxFeaturesRule::fraction: os << max_features_fraction; break;
    }
    os << " weight=" << (balanced_class_weight ? "balanced" : "none");
    return os.str();
}

std::vector<ForestHyperparams> table1_grid(std::uint64_t seed) {
    const int estimators[] = {200, 400, 800};
    const std::optional<int> depths[] = {std::nullopt, 8, 12, 16, 24};
    const int splits[] = {2, 5, 10};
    const int leaves[] = {1, 2, 4};
    struct FeatRule {
        MaxFeaturesRule rule;
        double fraction;
    };
    const FeatRule feats[] = {{MaxFeaturesRule::sqrt_rule, 0.0},
                              {MaxFeaturesRule::log2_rule, 0.0},
                              {MaxFeaturesRule::fraction, 0.5}};
    const bool weights[] = {false, true};

    std::vector<ForestHyperparams> grid;
    grid.reserve(810);
    for (const int n : estimators)
        for (const auto& d : depths)
            for (const int s : splits)
                for (const int l : leaves)
                    for (const auto& f : feats)
                        for (const bool w : weights) {
                            ForestHyperparams hp;
                            hp.n_estimators = n;
                            hp.max_depth = d;
                            hp.min_samples_split = s;
                            hp.min_samples_leaf = l;
                            hp.max_features = f.rule;
                            hp.max_features_fraction = f.fraction;
                            hp.balanced_class_weight = w;
                            hp.seed = seed;
                            grid.push_back(hp);
                        }
    return grid;
}

void FeatureMatrix::validate() const {
    if (data.size() != n_rows * n_cols)
        throw ConfigError("feature matrix: data size does not match shape");
    if (!feature_names.empty() && feature_names.size() != n_cols)
        throw ConfigError("feature matrix: feature_names size does not match n_cols");
    for (const double v : data)
        if (!std::isfinite(v))
            throw ConfigError("feature matrix: non-finite feature value");
}

const std::array<double, BcsLabel::kNumClasses>& DecisionTree::predict_dist(
    std::span<const double> x) const {
    std::int32_t node = 0;
    while (nodes[node].feature >= 0)
        node = x[nodes[node].feature] <= nodes[node].threshold ? nodes[node].left : nodes[node].right;
    return nodes[node].leaf_dist;
}

namespace {

constexpr int kClasses = BcsLabel::kNumClasses;

// Shared per-forest training view: column-major values plus per-column
// sorted sample orderings (ties by sample index).
struct TrainView {
    std::size_t n = 0;
    int n_features = 0;
    std::vector<std::vector<double>> cols;
    std::vector<std::vector<std::uint32_t>> order;
    std::vector<std::uint8_t> labels;
    std::array<double, kClasses> class_weight{};

    TrainView(const FeatureMatrix& x, const std::vector<BcsLabel>& y, bool balanced) {
        n = x.n_rows;
        n_features = static_cast<int>(x.n_cols);
        cols.assign(n_features, std::vector<double>(n));
        for (std::size_t r = 0; r < n; ++r)
            for (int f = 0; f < n_features; ++f) cols[f][r] = x.at(r, f);
        order.assign(n_features, {});
        for (int f = 0; f < n_features; ++f) {
            auto& ord = order[f];
            ord.resize(n);
            std::iota(ord.begin(), ord.end(), 0u);
            const auto& col = cols[f];
            std::stable_sort(ord.begin(), ord.end(),
                             [&](std::uint32_t a, std::uint32_t b) { return col[a] < col[b]; });
        }
        labels.resize(n);
        std::array<std::size_t, kClasses> counts{};
        for (std::size_t i = 0; i < n; ++i) {
            labels[i] = static_cast<std::uint8_t>(y[i].index());
            ++counts[labels[i]];
        }
        int present = 0;
        for (const auto c : counts)
            if (c > 0) ++present;
        class_weight.fill(1.0);
        if (balanced)
            for (int c = 0; c < kClasses; ++c)
                if (counts[c] > 0)
                    class_weight[c] = static_cast<double>(n) / (static_cast<double>(present) * counts[c]);
    }
};

std::vector<std::uint32_t> bootstrap_counts(const TrainView& view, Rng& rng, bool bootstrap) {
    std::vector<std::uint32_t> counts(view.n, bootstrap ? 0 : 1);
    if (bootstrap)
        for (std::size_t k = 0; k < view.n; ++k) ++counts[rng.next_below(view.n)];
    return counts;
}

class TreeBuilder {
public:
    TreeBuilder(const TrainView& view, const ForestHyperparams& hp, std::uint64_t tree_seed,
                std::vector<double>& importance_acc)
        : view_(view), hp_(hp), rng_(tree_seed), importance_(importance_acc) {
        mtry_ = hp.resolve_max_features(view.n_features);
    }

    DecisionTree build() {
        const auto counts = bootstrap_counts(view_, rng_, hp_.bootstrap);
        weight_.resize(view_.n);
        raw_.resize(view_.n);
        for (std::size_t i = 0; i < view_.n; ++i) {
            raw_[i] = counts[i];
            weight_[i] = counts[i] * view_.class_weight[view_.labels[i]];
        }

        seg_.assign(view_.n_features, {});
        std::size_t m = 0;
        for (int f = 0; f < view_.n_features; ++f) {
            seg_[f].reserve(view_.n);
            for (const std::uint32_t i : view_.order[f])
                if (counts[i] > 0) seg_[f].push_back(i);
            m = seg_[f].size();
        }
        scratch_.resize(m);
        goes_left_.assign(view_.n, 0);
        feat_pool_.resize(view_.n_features);
        std::iota(feat_pool_.begin(), feat_pool_.end(), 0);

        tree_.nodes.clear();
        root_weight_ = 0.0;
        for (const std::uint32_t i : seg_[0]) root_weight_ += weight_[i];
        grow(0, m, 0);
        return std::move(tree_);
    }

private:
    struct NodeStats {
        std::array<double, kClasses> counts{};
        double weight = 0.0;
        double sumsq = 0.0;
        std::uint64_t raw = 0;
        int distinct = 0;
    };

    NodeStats segment_stats(std::size_t start, std::size_t end) const {
        NodeStats s;
        for (std::size_t k = start; k < end; ++k) {
            const std::uint32_t i = seg_[0][k];
            s.counts[view_.labels[i]] += weight_[i];
            s.weight += weight_[i];
            s.raw += raw_[i];
        }
        for (const double c : s.counts) {
            s.sumsq += c * c;
            if (c > 0.0) ++s.distinct;
        }
        return s;
    }

    std::int32_t make_leaf(const NodeStats& stats) {
        TreeNode leaf;
        if (stats.weight > 0.0)
            for (int c = 0; c < kClasses; ++c) leaf.leaf_dist[c] = stats.counts[c] / stats.weight;
        tree_.nodes.push_back(leaf);
        return static_cast<std::int32_t>(tree_.nodes.size() - 1);
    }

    std::int32_t grow(std::size_t start, std::size_t end, int depth) {
        const NodeStats stats = segment_stats(start, end);
        const std::size_t m = end - start;
        const bool depth_capped = hp_.max_depth && depth >= *hp_.max_depth;
        if (m <= 1 || stats.distinct <= 1 || depth_capped ||
            stats.raw < static_cast<std::uint64_t>(hp_.min_samples_split))
            return make_leaf(stats);

        // Per-node feature subset, evaluated in ascending index order.
        for (int k = 0; k < mtry_; ++k) {
            const int j = k + static_cast<int>(rng_.next_below(
                                  static_cast<std::uint64_t>(view_.n_features - k)));
            std::swap(feat_pool_[k], feat_pool_[j]);
        }
        std::sort(feat_pool_.begin(), feat_pool_.begin() + mtry_);

        int best_feature = -1;
        double best_score = -1.0;
        double best_threshold = 0.0;
        std::array<double, kClasses> left_counts{};
        for (int k = 0; k < mtry_; ++k) {
            const int f = feat_pool_[k];
            const auto& col = view_.cols[f];
            const auto& seg = seg_[f];
            left_counts.fill(0.0);
            double wl = 0.0, sumsq_l = 0.0;
            double wr = stats.weight, sumsq_r = stats.sumsq;
            std::array<double, kClasses> right_counts = stats.counts;
            std::uint64_t raw_l = 0;
            for (std::size_t p = start; p + 1 < end; ++p) {
                const std::uint32_t i = seg[p];
                const double w = weight_[i];
                const int c = view_.labels[i];
                sumsq_l += w * (w + 2.0 * left_counts[c]);
                left_counts[c] += w;
                wl += w;
                sumsq_r += w * (w - 2.0 * right_counts[c]);
                right_counts[c] -= w;
                wr -= w;
                raw_l += raw_[i];
                const double v = col[i];
                const double v_next = col[seg[p + 1]];
                if (!(v < v_next)) continue;
                if (raw_l < static_cast<std::uint64_t>(hp_.min_samples_leaf)) continue;
                if (stats.raw - raw_l < static_cast<std::uint64_t>(hp_.min_samples_leaf)) continue;
                if (wl <= 0.0 || wr <= 0.0) continue;
                const double score = sumsq_l / wl + sumsq_r / wr;
                if (score > best_score) {
                    best_score = score;
                    best_feature = f;
                    // The midpoint of two adjacent representable doubles can
                    // round up to v_next, which would leave the right child
                    // empty under the <= predicate; fall back to v.
                    const double mid = 0.5 * (v + v_next);
                    best_threshold = mid < v_next ? mid : v;
                }
            }
        }

        if (best_feature < 0) return make_leaf(stats);
        importance_[best_feature] += (best_score - stats.sumsq / stats.weight) / root_weight_;

        // Stable partition of every feature segment by the chosen predicate.
        const auto& split_col = view_.cols[best_feature];
        for (std::size_t k = start; k < end; ++k) {
            const std::uint32_t i = seg_[0][k];
            goes_left_[i] = split_col[i] <= best_threshold ? 1 : 0;
        }
        std::size_t n_left = 0;
        for (int f = 0; f < view_.n_features; ++f) {
            auto& seg = seg_[f];
            std::size_t l = 0, r = 0;
            for (std::size_t k = start; k < end; ++k) {
                const std::uint32_t i = seg[k];
                if (goes_left_[i]) seg[start + l++] = i;
                else scratch_[r++] = i;
            }
            std::copy(scratch_.begin(), scratch_.begin() + r, seg.begin() + start + l);
            n_left = l;
        }

        tree_.nodes.emplace_back();
        const auto node_index = static_cast<std::int32_t>(tree_.nodes.size() - 1);
        tree_.nodes[node_index].feature = best_feature;
        tree_.nodes[node_index].threshold = best_threshold;
        const std::int32_t left = grow(start, start + n_left, depth + 1);
        const std::int32_t right = grow(start + n_left, end, depth + 1);
        tree_.nodes[node_index].left = left;
        tree_.nodes[node_index].right = right;
        return node_index;
    }

    const TrainView& view_;
    const ForestHyperparams& hp_;
    Rng rng_;
    std::vector<double>& importance_;
    int mtry_ = 0;
    DecisionTree tree_;
    std::vector<double> weight_;
    std::vector<std::uint32_t> raw_;
    std::vector<std::vector<std::uint32_t>> seg_;
    std::vector<std::uint32_t> scratch_;
    std::vector<std::uint8_t> goes_left_;
    std::vector<int> feat_pool_;
    double root_weight_ = 0.0;
};

} // namespace

ForestModel train_forest(const FeatureMatrix& x, const std::vector<BcsLabel>& y,
                         const ForestHyperparams& hp, int n_jobs) {
    x.validate();
    if (x.n_rows < 2)
        throw ConfigError("train_forest: need at least 2 samples");
    if (y.size() != x.n_rows)
        throw ConfigError("train_forest: label count does not match sample count");
    if (hp.n_estimators < 1 || hp.min_samples_split < 1 || hp.min_samples_leaf < 1)
        throw ConfigError("train_forest: counts must be >= 1");
    {
        bool multi = false;
        for (std::size_t i = 1; i < y.size(); ++i)
            if (y[i] != y[0]) multi = true;
        if (!multi)
            throw ConfigError("train_forest: degenerate training set with a single class");
    }

    const TrainView view(x, y, hp.balanced_class_weight);

    ForestModel model;
    model.hyperparams = hp;
    model.feature_names = x.feature_names;
    model.trees.resize(static_cast<std::size_t>(hp.n_estimators));
    std::vector<std::vector<double>> tree_importance(
        static_cast<std::size_t>(hp.n_estimators), std::vector<double>(x.n_cols, 0.0));

    const auto build_range = [&](int lo, int hi) {
        for (int t = lo; t < hi; ++t) {
            TreeBuilder builder(view, hp, derive_seed(hp.seed, static_cast<std::uint64_t>(t)),
                                tree_importance[static_cast<std::size_t>(t)]);
            model.trees[static_cast<std::size_t>(t)] = builder.build();
        }
    };

    const int jobs = std::max(1, std::min(n_jobs, hp.n_estimators));
    if (jobs == 1) {
        build_range(0, hp.n_estimators);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(jobs));
        for (int j = 0; j < jobs; ++j)
            pool.emplace_back([&] {
                while (true) {
                    const int t = next.fetch_add(1);
                    if (t >= hp.n_estimators) break;
                    build_range(t, t + 1);
                }
            });
        for (auto& th : pool) th.join();
    }

    // Mean per-tree impurity decrease, normalized to sum to one.
    model.importances.assign(x.n_cols, 0.0);
    for (const auto& imp : tree_importance)
        for (std::size_t f = 0; f < x.n_cols; ++f) model.importances[f] += imp[f];
    double total = 0.0;
    for (const double v : model.importances) total += v;
    if (total > 0.0)
        for (double& v : model.importances) v /= total;

    // Out-of-bag accuracy, accumulated in tree order for determinism.
    std::vector<std::array<double, kClasses>> oob(x.n_rows, std::array<double, kClasses>{});
    std::vector<std::uint32_t> oob_votes(x.n_rows, 0);
    for (int t = 0; t < hp.n_estimators; ++t) {
        Rng rng(derive_seed(hp.seed, static_cast<std::uint64_t>(t)));
        const auto counts = bootstrap_counts(view, rng, hp.bootstrap);
        for (std::size_t i = 0; i < x.n_rows; ++i) {
            if (counts[i] != 0) continue;
            const auto& dist = model.trees[static_cast<std::size_t>(t)].predict_dist(x.row(i));
            for (int c = 0; c < kClasses; ++c) oob[i][c] += dist[c];
            ++oob_votes[i];
        }
    }
    std::size_t scored = 0, correct = 0;
    for (std::size_t i = 0; i < x.n_rows; ++i) {
        if (oob_votes[i] == 0) continue;
        int arg = 0;
        for (int c = 1; c < kClasses; ++c)
            if (oob[i][c] > oob[i][arg]) arg = c;
        ++scored;
        if (arg == y[i].index()) ++correct;
    }
    model.oob_accuracy = scored > 0 ? static_cast<double>(correct) / scored : 0.0;
    return model;
}

Prediction predict(const ForestModel& m, std::span<const double> x) {
    if (m.trees.empty())
        throw ConfigError("predict: empty model");
    if (!m.feature_names.empty() && x.size() != m.feature_names.size())
        throw ConfigError("predict: feature count " + std::to_string(x.size()) +
                          " does not match model schema (" + std::to_string(m.feature_names.size()) + ")");
    Prediction out;
    for (const DecisionTree& tree : m.trees) {
        const auto& dist = tree.predict_dist(x);
        for (int c = 0; c < kClasses; ++c) out.probabilities[c] += dist[c];
    }
    const double inv = 1.0 / static_cast<double>(m.trees.size());
    for (double& p : out.probabilities) p *= inv;
    int arg = 0;
    for (int c = 1; c < kClasses; ++c)
        if (out.probabilities[c] > out.probabilities[arg]) arg = c;
    out.label = BcsLabel::from_index(arg);
    return out;
}

GridSearchResult grid_search(const FeatureMatrix& train_x, const std::vector<BcsLabel>& train_y,
                             const FeatureMatrix& val_x, const std::vector<BcsLabel>& val_y,
                             const std::vector<ForestHyperparams>& grid, int n_jobs) {
    if (grid.empty())
        throw ConfigError("grid_search: empty hyperparameter grid");
    if (val_x.n_rows == 0 || val_y.size() != val_x.n_rows)
        throw ConfigError("grid_search: invalid validation set");

    std::vector<std::size_t> correct(grid.size(), 0);
    const auto evaluate = [&](std::size_t g) {
        const ForestModel model = train_forest(train_x, train_y, grid[g], 1);
        std::size_t ok = 0;
        for (std::size_t i = 0; i < val_x.n_rows; ++i)
            if (predict(model, val_x.row(i)).label == val_y[i]) ++ok;
        correct[g] = ok;
    };

    const int jobs = std::max(1, std::min<int>(n_jobs, static_cast<int>(grid.size())));
    if (jobs == 1) {
        for (std::size_t g = 0; g < grid.size(); ++g) evaluate(g);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j)
            pool.emplace_back([&] {
                while (true) {
                    const std::size_t g = next.fetch_add(1);
                    if (g >= grid.size()) break;
                    evaluate(g);
                }
            });
        for (auto& th : pool) th.join();
    }

    // Max accuracy; ties prefer fewer trees, then shallower depth, then
    // earlier grid position.
    std::size_t best = 0;
    const auto depth_rank = [](const ForestHyperparams& hp) {
        return hp.max_depth ? *hp.max_depth : std::numeric_limits<int>::max();
    };
    for (std::size_t g = 1; g < grid.size(); ++g) {
        if (correct[g] > correct[best]) {
            best = g;
        } else if (correct[g] == correct[best]) {
            if (grid[g].n_estimators < grid[best].n_estimators ||
                (grid[g].n_estimators == grid[best].n_estimators &&
                 depth_rank(grid[g]) < depth_rank(grid[best])))
                best = g;
        }
    }

    GridSearchResult result;
    result.best = grid[best];
    result.best_accuracy = static_cast<double>(correct[best]) / val_x.n_rows;
    result.table.reserve(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g)
        result.table.push_back({grid[g], static_cast<double>(correct[g]) / val_x.n_rows});
    return result;
}

std::string ForestModel::to_json() const {
    nlohmann::json doc;
    doc["format"] = "bovigeom-forest";
    doc["version"] = 1;
    doc["feature_names"] = feature_names;
    nlohmann::json hp;
    hp["n_estimators"] = hyperparams.n_estimators;
    if (hyperparams.max_depth) hp["max_depth"] = *hyperparams.max_depth;
    else hp["max_depth"] = nullptr;
    hp["min_samples_split"] = hyperparams.min_samples_split;
    hp["min_samples_leaf"] = hyperparams.min_samples_leaf;
    switch (hyperparams.max_features) {
    case MaxFeaturesRule::sqrt_rule: hp["max_features"] = "sqrt"; break;
    case MaxFeaturesRule::log2_rule: hp["max_features"] = "log2"; break;
    case MaxFeaturesRule::fraction: hp["max_features"] = hyperparams.max_features_fraction; break;
    }
    hp["class_weight"] = hyperparams.balanced_class_weight ? "balanced" : "none";
    hp["bootstrap"] = hyperparams.bootstrap;
    hp["seed"] = hyperparams.seed;
    doc["hyperparams"] = hp;
    doc["importances"] = importances;
    doc["oob_accuracy"] = oob_accuracy;
    nlohmann::json trees = nlohmann::json::array();
    for (const DecisionTree& tree : this->trees) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const TreeNode& n : tree.nodes) {
            if (n.feature >= 0) {
                nodes.push_back({{"f", n.feature}, {"t", n.threshold}, {"l", n.left}, {"r", n.right}});
            } else {
                nodes.push_back({{"p", n.leaf_dist}});
            }
        }
        trees.push_back({{"nodes", std::move(nodes)}});
    }
    doc["trees"] = std::move(trees);
    return doc.dump();
}

ForestModel ForestModel::from_json(std::istream& in) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("forest model: invalid json: ") + e.what());
    }
    if (!doc.is_object() || doc.value("format", "") != "bovigeom-forest")
        throw DataError("forest model: not a bovigeom-forest document");
    if (doc.value("version", 0) != 1)
        throw DataError("forest model: unsupported version");

    ForestModel model;
    model.feature_names = doc.value("feature_names", std::vector<std::string>{});
    model.importances = doc.value("importances", std::vector<double>{});
    model.oob_accuracy = doc.value("oob_accuracy", 0.0);
    const auto& hp = doc.at("hyperparams");
    model.hyperparams.n_estimators = hp.at("n_estimators").get<int>();
    if (!hp.at("max_depth").is_null()) model.hyperparams.max_depth = hp.at("max_depth").get<int>();
    model.hyperparams.min_samples_split = hp.at("min_samples_split").get<int>();
    model.hyperparams.min_samples_leaf = hp.at("min_samples_leaf").get<int>();
    if (hp.at("max_features").is_string()) {
        const std::string rule = hp.at("max_features").get<std::string>();
        model.hyperparams.max_features =
            rule == "sqrt" ? MaxFeaturesRule::sqrt_rule : MaxFeaturesRule::log2_rule;
    } else {
        model.hyperparams.max_features = MaxFeaturesRule::fraction;
        model.hyperparams.max_features_fraction = hp.at("max_features").get<double>();
    }
    model.hyperparams.balanced_class_weight = hp.at("class_weight").get<std::string>() == "balanced";
    model.hyperparams.bootstrap = hp.value("bootstrap", true);
    model.hyperparams.seed = hp.at("seed").get<std::uint64_t>();

    for (const auto& tree_doc : doc.at("trees")) {
        DecisionTree tree;
        for (const auto& node_doc : tree_doc.at("nodes")) {
            TreeNode n;
            if (node_doc.contains("f")) {
                n.feature = node_doc.at("f").get<std::int32_t>();
                n.threshold = node_doc.at("t").get<double>();
                n.left = node_doc.at("l").get<std::int32_t>();
                n.right = node_doc.at("r").get<std::int32_t>();
            } else {
                const auto dist = node_doc.at("p").get<std::vector<double>>();
                if (dist.size() != kClasses)
                    throw DataError("forest model: leaf distribution has wrong arity");
                std::copy(dist.begin(), dist.end(), n.leaf_dist.begin());
            }
            tree.nodes.push_back(n);
        }
        if (tree.nodes.empty())
            throw DataError("forest model: empty tree");
        model.trees.push_back(std::move(tree));
    }
    if (model.trees.empty())
        throw DataError("forest model: no trees");
    return model;
}

} // namespace bovigeom
