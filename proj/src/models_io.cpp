#include <fstream>

#include <json.hpp>

#include "ltuprof/common.hpp"
#include "ltuprof/models.hpp"

namespace ltuprof {

namespace {

using json = nlohmann::ordered_json;

constexpr int kModelFormatVersion = 1;

const char* max_features_name(MaxFeaturesRule r) {
    switch (r) {
        case MaxFeaturesRule::Sqrt: return "sqrt";
        case MaxFeaturesRule::Log2: return "log2";
        case MaxFeaturesRule::All: return "all";
    }
    return "?";
}

MaxFeaturesRule parse_max_features(const std::string& s) {
    if (s == "sqrt") return MaxFeaturesRule::Sqrt;
    if (s == "log2") return MaxFeaturesRule::Log2;
    if (s == "all") return MaxFeaturesRule::All;
    throw DataError("model file: bad max_features '" + s + "'");
}

json params_to_json(const HyperParams& hp) {
    json j;
    switch (hp.method) {
        case Method::LR: break;
        case Method::PLR:
            j["penalty"] = hp.plr.penalty == PenaltyKind::L1 ? "l1" : "l2";
            j["c"] = hp.plr.c;
            break;
        case Method::RF:
            j["max_features"] = max_features_name(hp.rf.max_features);
            j["min_samples_leaf"] = hp.rf.min_samples_leaf;
            j["n_estimators"] = hp.rf.n_estimators;
            break;
        case Method::GBM:
            j["max_depth"] = hp.gbm.max_depth;
            j["max_features"] = max_features_name(hp.gbm.max_features);
            j["n_estimators"] = hp.gbm.n_estimators;
            j["learning_rate"] = hp.gbm.learning_rate;
            j["subsample"] = hp.gbm.subsample;
            break;
    }
    return j;
}

void params_from_json(const json& j, HyperParams& hp) {
    switch (hp.method) {
        case Method::LR: break;
        case Method::PLR:
            hp.plr.penalty = j.at("penalty").get<std::string>() == "l1" ? PenaltyKind::L1
                                                                        : PenaltyKind::L2;
            hp.plr.c = j.at("c").get<double>();
            break;
        case Method::RF:
            hp.rf.max_features = parse_max_features(j.at("max_features").get<std::string>());
            hp.rf.min_samples_leaf = j.at("min_samples_leaf").get<int>();
            hp.rf.n_estimators = j.at("n_estimators").get<int>();
            break;
        case Method::GBM:
            hp.gbm.max_depth = j.at("max_depth").get<int>();
            hp.gbm.max_features = parse_max_features(j.at("max_features").get<std::string>());
            hp.gbm.n_estimators = j.at("n_estimators").get<int>();
            hp.gbm.learning_rate = j.at("learning_rate").get<double>();
            hp.gbm.subsample = j.at("subsample").get<double>();
            break;
    }
}

}  // namespace

std::string model_to_json(const TrainedModel& model) {
    json j;
    j["format_version"] = kModelFormatVersion;
    j["method"] = method_name(model.method);
    j["feature_names"] = model.feature_names;
    j["schema_hash"] = hex64(model.schema_hash);
    j["seed"] = model.seed;
    j["n_train_rows"] = model.n_train_rows;
    j["params"] = params_to_json(model.params);
    if (model.method == Method::LR || model.method == Method::PLR) {
        j["linear"] = {{"intercept", model.intercept},
                       {"coefficients", model.coefficients},
                       {"converged", model.converged},
                       {"separation_warning", model.separation_warning}};
    } else {
        json trees = json::array();
        for (const auto& t : model.trees) {
            json tj;
            std::vector<std::int32_t> feature, left, right;
            std::vector<double> threshold, value;
            feature.reserve(t.nodes.size());
            for (const auto& nd : t.nodes) {
                feature.push_back(nd.feature);
                threshold.push_back(nd.threshold);
                left.push_back(nd.left);
                right.push_back(nd.right);
                value.push_back(nd.value);
            }
            tj["feature"] = feature;
            tj["threshold"] = threshold;
            tj["left"] = left;
            tj["right"] = right;
            tj["value"] = value;
            trees.push_back(std::move(tj));
        }
        j["ensemble"] = {{"init_log_odds", model.init_log_odds},
                         {"train_deviance", model.train_deviance},
                         {"trees", std::move(trees)}};
    }
    return j.dump(2) + "\n";
}

TrainedModel model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw DataError(std::string("model file: invalid JSON: ") + e.what());
    }
    if (j.at("format_version").get<int>() != kModelFormatVersion) {
        throw DataError("model file: unsupported format_version");
    }
    TrainedModel m;
    const auto method = parse_method(j.at("method").get<std::string>());
    if (!method) throw DataError("model file: unknown method");
    m.method = *method;
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.n_train_rows = j.at("n_train_rows").get<std::size_t>();
    m.params.method = m.method;
    params_from_json(j.at("params"), m.params);
    {
        FeatureMatrix tmp;
        tmp.names = m.feature_names;
        m.schema_hash = tmp.schema_hash();
        if (hex64(m.schema_hash) != j.at("schema_hash").get<std::string>()) {
            throw DataError("model file: schema_hash does not match feature_names");
        }
    }
    if (m.method == Method::LR || m.method == Method::PLR) {
        const auto& lin = j.at("linear");
        m.intercept = lin.at("intercept").get<double>();
        m.coefficients = lin.at("coefficients").get<std::vector<double>>();
        m.converged = lin.at("converged").get<bool>();
        m.separation_warning = lin.at("separation_warning").get<bool>();
        if (m.coefficients.size() != m.feature_names.size()) {
            throw DataError("model file: coefficient count mismatch");
        }
    } else {
        const auto& ens = j.at("ensemble");
        m.init_log_odds = ens.at("init_log_odds").get<double>();
        m.train_deviance = ens.at("train_deviance").get<std::vector<double>>();
        for (const auto& tj : ens.at("trees")) {
            const auto feature = tj.at("feature").get<std::vector<std::int32_t>>();
            const auto threshold = tj.at("threshold").get<std::vector<double>>();
            const auto left = tj.at("left").get<std::vector<std::int32_t>>();
            const auto right = tj.at("right").get<std::vector<std::int32_t>>();
            const auto value = tj.at("value").get<std::vector<double>>();
            const std::size_t n = feature.size();
            if (threshold.size() != n || left.size() != n || right.size() != n ||
                value.size() != n) {
                throw DataError("model file: ragged tree arrays");
            }
            Tree t;
            t.nodes.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                t.nodes[i] = {feature[i], threshold[i], left[i], right[i], value[i]};
                const auto nn = static_cast<std::int32_t>(n);
                if (feature[i] >= 0 &&
                    (left[i] < 0 || right[i] < 0 || left[i] >= nn || right[i] >= nn)) {
                    throw DataError("model file: bad child index in tree");
                }
            }
            m.trees.push_back(std::move(t));
        }
    }
    return m;
}

void save_model(const TrainedModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out << model_to_json(model);
    if (!out) throw DataError("write failed for " + path);
}

TrainedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return model_from_json(text);
}

}  // namespace ltuprof
