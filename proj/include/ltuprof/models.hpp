#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ltuprof/dataset.hpp"

namespace ltuprof {

enum class Method { LR, PLR, RF, GBM };

const char* method_name(Method m);
std::optional<Method> parse_method(const std::string& s);

enum class PenaltyKind { L1, L2 };
enum class MaxFeaturesRule { Sqrt, Log2, All };

struct PlrParams {
    PenaltyKind penalty = PenaltyKind::L1;
    double c = 1.0;  // inverse penalty weight: loss + (1/c) * norm
};

struct RfParams {
    MaxFeaturesRule max_features = MaxFeaturesRule::Sqrt;
    int min_samples_leaf = 1;
    int n_estimators = 500;
};

struct GbmParams {
    int max_depth = 3;
    MaxFeaturesRule max_features = MaxFeaturesRule::Sqrt;
    int n_estimators = 250;
    double learning_rate = 0.1;
    double subsample = 1.0;
};

struct HyperParams {
    Method method = Method::LR;
    PlrParams plr;
    RfParams rf;
    GbmParams gbm;

    std::string describe() const;
};

// Canonical tuning grids; enumeration order is the documented tie-break
// order for grid search (fields cycle slowest-first as declared above).
std::vector<HyperParams> default_grid(Method m);

struct FitOptions {
    int max_iter = 200;
    double tol = 1e-10;
};

struct TreeNode {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;
};

struct Tree {
    std::vector<TreeNode> nodes;

    double predict_row(std::span<const double> row) const {
        std::int32_t id = 0;
        while (nodes[static_cast<std::size_t>(id)].feature >= 0) {
            const TreeNode& nd = nodes[static_cast<std::size_t>(id)];
            id = row[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right;
        }
        return nodes[static_cast<std::size_t>(id)].value;
    }
};

struct TrainedModel {
    Method method = Method::LR;
    std::vector<std::string> feature_names;
    std::uint64_t schema_hash = 0;
    std::uint64_t seed = 0;
    std::size_t n_train_rows = 0;

    // Linear members (LR/PLR); coefficients on the original feature scale.
    double intercept = 0.0;
    std::vector<double> coefficients;
    bool converged = true;
    bool separation_warning = false;

    // Ensemble members (RF/GBM).
    std::vector<Tree> trees;
    double init_log_odds = 0.0;       // GBM
    std::vector<double> train_deviance;  // GBM, per completed iteration

    HyperParams params;
};

// Value and gradient of the summed logistic negative log-likelihood with an
// optional ridge term on the non-intercept coefficients. beta[0] is the
// intercept. Shared by the solvers and by the finite-difference checks.
double logistic_nll_grad(const FeatureMatrix& x, std::span<const std::uint8_t> y,
                         std::span<const double> beta, double l2_weight,
                         std::span<double> grad_out);

TrainedModel train_lr(const FeatureMatrix& x, std::span<const std::uint8_t> y,
                      const FitOptions& opts = {});

TrainedModel train_plr(const FeatureMatrix& x, std::span<const std::uint8_t> y,
                       PenaltyKind penalty, double c, const FitOptions& opts = {});

TrainedModel train_rf(const FeatureMatrix& x, std::span<const std::uint8_t> y,
                      const RfParams& hp, std::uint64_t seed);

TrainedModel train_gbm(const FeatureMatrix& x, std::span<const std::uint8_t> y,
                       const GbmParams& hp, std::uint64_t seed);

TrainedModel train(const FeatureMatrix& x, std::span<const std::uint8_t> y,
                   const HyperParams& hp, std::uint64_t seed);

// Risk scores in [0,1]; throws DataError naming the first mismatched column
// when the matrix schema differs from the training schema.
std::vector<double> predict_risk(const TrainedModel& model, const FeatureMatrix& x);

std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const std::string& text);
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

int max_features_count(MaxFeaturesRule rule, std::size_t n_features);
double sigmoid(double z);

}  // namespace ltuprof
