#include <algorithm>
#include <cmath>

#include "ltuprof/common.hpp"
#include "ltuprof/models.hpp"
#include "ltuprof/parallel.hpp"
#include "ltuprof/rng.hpp"

namespace ltuprof {

int max_features_count(MaxFeaturesRule rule, std::size_t n_features) {
    const double p = static_cast<double>(n_features);
    int k = static_cast<int>(n_features);
    switch (rule) {
        case MaxFeaturesRule::Sqrt: k = static_cast<int>(std::floor(std::sqrt(p))); break;
        case MaxFeaturesRule::Log2: k = static_cast<int>(std::floor(std::log2(p))); break;
        case MaxFeaturesRule::All: break;
    }
    if (k < 1) k = 1;
    if (k > static_cast<int>(n_features)) k = static_cast<int>(n_features);
    return k;
}

namespace {

enum class SplitCriterion { Gini, Variance };

struct GrowParams {
    SplitCriterion criterion = SplitCriterion::Gini;
    int max_depth = 0;  // 0 = unlimited
    int min_samples_leaf = 1;
    int max_features = 1;
};

struct NodeTask {
    std::size_t begin = 0;
    std::size_t end = 0;
    int depth = 0;
    std::int32_t node_id = 0;
};

// Best split for one feature over rows [begin,end): values sorted ascending,
// thresholds are midpoints between distinct neighbors, children respect
// min_samples_leaf. Gain is compared with strict '>' by the caller, so the
// first (lowest feature index, lowest threshold) candidate wins ties.
struct SplitResult {
    bool found = false;
    double gain = -1.0;
    std::int32_t feature = -1;
    double threshold = 0.0;
};

class TreeGrower {
  public:
    TreeGrower(const FeatureMatrix& x, std::span<const double> target, const GrowParams& params)
        : x_(x), target_(target), params_(params) {}

    Tree grow(std::vector<std::uint32_t>& rows, Rng& rng) {
        Tree tree;
        if (rows.empty()) {
            tree.nodes.push_back(TreeNode{});
            return tree;
        }
        tree.nodes.push_back(TreeNode{});
        std::vector<NodeTask> stack;
        stack.push_back({0, rows.size(), 0, 0});
        std::vector<std::pair<double, double>> sorted;  // (value, target)
        std::vector<std::int32_t> feature_pool(x_.n_cols);

        while (!stack.empty()) {
            const NodeTask task = stack.back();
            stack.pop_back();
            const std::size_t n = task.end - task.begin;

            double sum = 0.0, sum_sq = 0.0;
            for (std::size_t r = task.begin; r < task.end; ++r) {
                const double t = target_[rows[r]];
                sum += t;
                sum_sq += t * t;
            }
            const double mean = sum / static_cast<double>(n);
            const bool pure = sum_sq - sum * mean <= 1e-12;
            const bool depth_capped = params_.max_depth > 0 && task.depth >= params_.max_depth;
            TreeNode& node = tree.nodes[static_cast<std::size_t>(task.node_id)];
            if (pure || depth_capped ||
                n < 2 * static_cast<std::size_t>(params_.min_samples_leaf) || n < 2) {
                node.value = mean;
                continue;
            }

            // Candidate features, ascending so the tie order is stable.
            for (std::size_t j = 0; j < x_.n_cols; ++j) {
                feature_pool[j] = static_cast<std::int32_t>(j);
            }
            int n_candidates = params_.max_features;
            if (n_candidates < static_cast<int>(x_.n_cols)) {
                for (int i = 0; i < n_candidates; ++i) {
                    const auto j = i + static_cast<int>(rng.uniform_int(x_.n_cols - static_cast<std::size_t>(i)));
                    std::swap(feature_pool[static_cast<std::size_t>(i)],
                              feature_pool[static_cast<std::size_t>(j)]);
                }
                std::sort(feature_pool.begin(), feature_pool.begin() + n_candidates);
            } else {
                n_candidates = static_cast<int>(x_.n_cols);
            }

            SplitResult best;
            for (int f = 0; f < n_candidates; ++f) {
                const auto feature = feature_pool[static_cast<std::size_t>(f)];
                sorted.clear();
                sorted.reserve(n);
                for (std::size_t r = task.begin; r < task.end; ++r) {
                    sorted.emplace_back(x_.at(rows[r], static_cast<std::size_t>(feature)),
                                        target_[rows[r]]);
                }
                std::sort(sorted.begin(), sorted.end(),
                          [](const auto& a, const auto& b) { return a.first < b.first; });
                scan_feature(sorted, sum, feature, best);
            }

            if (!best.found) {
                node.value = mean;
                continue;
            }

            const auto mid = std::stable_partition(
                rows.begin() + static_cast<std::ptrdiff_t>(task.begin),
                rows.begin() + static_cast<std::ptrdiff_t>(task.end), [&](std::uint32_t r) {
                    return x_.at(r, static_cast<std::size_t>(best.feature)) <= best.threshold;
                });
            const std::size_t split_at =
                static_cast<std::size_t>(mid - rows.begin());

            const auto left_id = static_cast<std::int32_t>(tree.nodes.size());
            tree.nodes.push_back(TreeNode{});
            tree.nodes.push_back(TreeNode{});
            TreeNode& parent = tree.nodes[static_cast<std::size_t>(task.node_id)];
            parent.feature = best.feature;
            parent.threshold = best.threshold;
            parent.left = left_id;
            parent.right = left_id + 1;
            stack.push_back({split_at, task.end, task.depth + 1, left_id + 1});
            stack.push_back({task.begin, split_at, task.depth + 1, left_id});
        }
        return tree;
    }

  private:
    void scan_feature(const std::vector<std::pair<double, double>>& sorted, double total_sum,
                      std::int32_t feature, SplitResult& best) const {
        const std::size_t n = sorted.size();
        const auto msl = static_cast<std::size_t>(params_.min_samples_leaf);
        double left_sum = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            left_sum += sorted[i].second;
            if (sorted[i].first == sorted[i + 1].first) continue;
            const std::size_t n_left = i + 1;
            const std::size_t n_right = n - n_left;
            if (n_left < msl || n_right < msl) continue;
            const double right_sum = total_sum - left_sum;
            double gain;
            if (params_.criterion == SplitCriterion::Gini) {
                // Decrease in weighted Gini impurity; the parent term is
                // constant per node, so p_l^2/n_l + p_r^2/n_r ranks equally.
                const double nl = static_cast<double>(n_left);
                const double nr = static_cast<double>(n_right);
                gain = left_sum * left_sum / nl + right_sum * right_sum / nr +
                       (nl - left_sum) * (nl - left_sum) / nl +
                       (nr - right_sum) * (nr - right_sum) / nr;
            } else {
                gain = left_sum * left_sum / static_cast<double>(n_left) +
                       right_sum * right_sum / static_cast<double>(n_right);
            }
            if (gain > best.gain || !best.found) {
                best.found = true;
                best.gain = gain;
                best.feature = feature;
                best.threshold = 0.5 * (sorted[i].first + sorted[i + 1].first);
            }
        }
    }

    const FeatureMatrix& x_;
    std::span<const double> target_;
    GrowParams params_;
};

void check_tree_input(const FeatureMatrix& x, std::span<const std::uint8_t> y) {
    if (x.n_rows == 0 || x.n_cols == 0) throw DataError("train: empty design matrix");
    if (x.n_rows != y.size()) throw DataError("train: label length mismatch");
}

}  // namespace

TrainedModel train_rf(const FeatureMatrix& x, std::span<const std::uint8_t> y, const RfParams& hp,
                      std::uint64_t seed) {
    check_tree_input(x, y);
    if (hp.n_estimators < 1) throw UsageError("rf: n_estimators must be >= 1");
    if (hp.min_samples_leaf < 1) throw UsageError("rf: min_samples_leaf must be >= 1");
    const std::size_t n = x.n_rows;

    std::vector<double> target(n);
    for (std::size_t i = 0; i < n; ++i) target[i] = static_cast<double>(y[i]);

    GrowParams gp;
    gp.criterion = SplitCriterion::Gini;
    gp.max_depth = 0;
    gp.min_samples_leaf = hp.min_samples_leaf;
    gp.max_features = max_features_count(hp.max_features, x.n_cols);

    TrainedModel model;
    model.trees.resize(static_cast<std::size_t>(hp.n_estimators));
    // Per-tree sub-seeded randomness keeps the forest identical for every
    // worker count.
    parallel_for(static_cast<std::size_t>(hp.n_estimators), [&](std::size_t t) {
        Rng rng(sub_seed(seed, t));
        std::vector<std::uint32_t> rows(n);
        for (auto& r : rows) r = static_cast<std::uint32_t>(rng.uniform_int(n));
        std::sort(rows.begin(), rows.end());
        TreeGrower grower(x, target, gp);
        model.trees[t] = grower.grow(rows, rng);
    });

    model.method = Method::RF;
    model.feature_names = x.names;
    model.schema_hash = x.schema_hash();
    model.seed = seed;
    model.n_train_rows = n;
    model.params.method = Method::RF;
    model.params.rf = hp;
    return model;
}

TrainedModel train_gbm(const FeatureMatrix& x, std::span<const std::uint8_t> y,
                       const GbmParams& hp, std::uint64_t seed) {
    check_tree_input(x, y);
    if (!(hp.learning_rate > 0.0)) throw UsageError("gbm: learning_rate must be positive");
    if (hp.n_estimators < 0) throw UsageError("gbm: n_estimators must be >= 0");
    if (!(hp.subsample > 0.0 && hp.subsample <= 1.0)) {
        throw UsageError("gbm: subsample must be in (0,1]");
    }
    const std::size_t n = x.n_rows;

    double base_rate = 0.0;
    for (auto v : y) base_rate += v;
    base_rate /= static_cast<double>(n);
    const double clamped = std::min(1.0 - 1e-12, std::max(1e-12, base_rate));
    const double f0 = std::log(clamped / (1.0 - clamped));

    TrainedModel model;
    model.init_log_odds = f0;

    std::vector<double> f(n, f0);
    std::vector<double> prob(n);
    std::vector<double> residual(n);

    GrowParams gp;
    gp.criterion = SplitCriterion::Variance;
    gp.max_depth = hp.max_depth;
    gp.min_samples_leaf = 1;
    gp.max_features = max_features_count(hp.max_features, x.n_cols);

    auto deviance = [&]() {
        double d = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double pr = std::min(1.0 - 1e-12, std::max(1e-12, sigmoid(f[i])));
            d += y[i] ? -std::log(pr) : -std::log(1.0 - pr);
        }
        return 2.0 * d / static_cast<double>(n);
    };

    model.trees.reserve(static_cast<std::size_t>(hp.n_estimators));
    for (int t = 0; t < hp.n_estimators; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            prob[i] = sigmoid(f[i]);
            residual[i] = static_cast<double>(y[i]) - prob[i];
        }
        Rng rng(sub_seed(seed, static_cast<std::uint64_t>(t)));
        std::vector<std::uint32_t> rows;
        if (hp.subsample < 1.0) {
            const auto k = static_cast<std::uint32_t>(
                std::max<double>(1.0, std::floor(hp.subsample * static_cast<double>(n))));
            rows = rng.sample_without_replacement(static_cast<std::uint32_t>(n), k);
            std::sort(rows.begin(), rows.end());
        } else {
            rows.resize(n);
            for (std::size_t i = 0; i < n; ++i) rows[i] = static_cast<std::uint32_t>(i);
        }

        TreeGrower grower(x, residual, gp);
        Tree tree = grower.grow(rows, rng);

        // One Newton step per leaf on the binomial deviance, shrunk by the
        // learning rate and baked into the stored leaf values.
        std::vector<double> num(tree.nodes.size(), 0.0), den(tree.nodes.size(), 0.0);
        for (auto r : rows) {
            std::int32_t id = 0;
            while (tree.nodes[static_cast<std::size_t>(id)].feature >= 0) {
                const TreeNode& nd = tree.nodes[static_cast<std::size_t>(id)];
                id = x.at(r, static_cast<std::size_t>(nd.feature)) <= nd.threshold ? nd.left
                                                                                   : nd.right;
            }
            num[static_cast<std::size_t>(id)] += residual[r];
            den[static_cast<std::size_t>(id)] += prob[r] * (1.0 - prob[r]);
        }
        for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
            if (tree.nodes[i].feature < 0) {
                const double d = std::max(den[i], 1e-12);
                tree.nodes[i].value = hp.learning_rate * num[i] / d;
            }
        }

        for (std::size_t i = 0; i < n; ++i) f[i] += tree.predict_row(x.row(i));
        model.trees.push_back(std::move(tree));
        model.train_deviance.push_back(deviance());
    }

    model.method = Method::GBM;
    model.feature_names = x.names;
    model.schema_hash = x.schema_hash();
    model.seed = seed;
    model.n_train_rows = n;
    model.params.method = Method::GBM;
    model.params.gbm = hp;
    return model;
}

TrainedModel train(const FeatureMatrix& x, std::span<const std::uint8_t> y, const HyperParams& hp,
                   std::uint64_t seed) {
    switch (hp.method) {
        case Method::LR: return train_lr(x, y);
        case Method::PLR: return train_plr(x, y, hp.plr.penalty, hp.plr.c);
        case Method::RF: return train_rf(x, y, hp.rf, seed);
        case Method::GBM: return train_gbm(x, y, hp.gbm, seed);
    }
    throw NumericError("train: unknown method");
}

std::string HyperParams::describe() const {
    switch (method) {
        case Method::LR: return "lr";
        case Method::PLR:
            return std::string("plr penalty=") + (plr.penalty == PenaltyKind::L1 ? "l1" : "l2") +
                   " c=" + format_double(plr.c);
        case Method::RF:
            return std::string("rf max_features=") +
                   (rf.max_features == MaxFeaturesRule::Sqrt ? "sqrt"
                    : rf.max_features == MaxFeaturesRule::Log2 ? "log2"
                                                               : "all") +
                   " min_samples_leaf=" + std::to_string(rf.min_samples_leaf) +
                   " n_estimators=" + std::to_string(rf.n_estimators);
        case Method::GBM:
            return std::string("gbm max_depth=") + std::to_string(gbm.max_depth) +
                   " max_features=" +
                   (gbm.max_features == MaxFeaturesRule::Sqrt ? "sqrt"
                    : gbm.max_features == MaxFeaturesRule::Log2 ? "log2"
                                                                : "all") +
                   " n_estimators=" + std::to_string(gbm.n_estimators) +
                   " learning_rate=" + format_double(gbm.learning_rate) +
                   " subsample=" + format_double(gbm.subsample);
    }
    return "?";
}

std::vector<HyperParams> default_grid(Method m) {
    std::vector<HyperParams> grid;
    switch (m) {
        case Method::LR: break;  // no hyperparameters
        case Method::PLR:
            for (auto pen : {PenaltyKind::L1, PenaltyKind::L2}) {
                for (double c : {0.001, 0.01, 0.1, 1.0, 10.0, 100.0, 1000.0}) {
                    HyperParams hp;
                    hp.method = m;
                    hp.plr = {pen, c};
                    grid.push_back(hp);
                }
            }
            break;
        case Method::RF:
            for (auto mf : {MaxFeaturesRule::Sqrt, MaxFeaturesRule::Log2}) {
                for (int msl : {1, 5, 10}) {
                    for (int ne : {500, 750}) {
                        HyperParams hp;
                        hp.method = m;
                        hp.rf = {mf, msl, ne};
                        grid.push_back(hp);
                    }
                }
            }
            break;
        case Method::GBM:
            for (int depth : {3, 5, 7}) {
                for (auto mf : {MaxFeaturesRule::Sqrt, MaxFeaturesRule::Log2}) {
                    for (int ne : {250, 500, 750}) {
                        for (double lr : {0.01, 0.025, 0.05}) {
                            for (double sub : {0.6, 0.8}) {
                                HyperParams hp;
                                hp.method = m;
                                hp.gbm = {depth, mf, ne, lr, sub};
                                grid.push_back(hp);
                            }
                        }
                    }
                }
            }
            break;
    }
    return grid;
}

}  // namespace ltuprof
