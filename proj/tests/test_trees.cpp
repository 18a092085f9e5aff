#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ltuprof/common.hpp"
#include "ltuprof/metrics.hpp"
#include "ltuprof/models.hpp"
#include "ltuprof/parallel.hpp"
#include "ltuprof/rng.hpp"

using namespace ltuprof;

namespace {

FeatureMatrix make_matrix(std::size_t n, std::size_t p, const std::vector<double>& values) {
    FeatureMatrix m;
    m.n_rows = n;
    m.n_cols = p;
    m.values = values;
    for (std::size_t j = 0; j < p; ++j) m.names.push_back("f" + std::to_string(j));
    return m;
}

// XOR-structured data: label depends on the sign interaction of two
// features, which no main-effects model can express.
void xor_data(std::size_t n, std::uint64_t seed, FeatureMatrix& x, std::vector<std::uint8_t>& y) {
    Rng rng(seed);
    std::vector<double> values;
    y.clear();
    for (std::size_t i = 0; i < n; ++i) {
        const double a = rng.normal();
        const double b = rng.normal();
        values.push_back(a);
        values.push_back(b);
        y.push_back((a > 0.0) != (b > 0.0) ? 1 : 0);
    }
    x = make_matrix(n, 2, values);
}

// From-scratch reference boosting loop: depth-1 trees over all features,
// exhaustive midpoint splits chosen by SSE reduction computed from prefix
// sums, binomial Newton leaf values, shrinkage 0.1.
std::vector<double> reference_stump_boost(const FeatureMatrix& x,
                                          const std::vector<std::uint8_t>& y, int n_trees,
                                          double lr) {
    const std::size_t n = x.n_rows;
    double ybar = 0.0;
    for (auto v : y) ybar += v;
    ybar /= static_cast<double>(n);
    const double f0 = std::log(ybar / (1.0 - ybar));
    std::vector<double> f(n, f0);

    for (int t = 0; t < n_trees; ++t) {
        std::vector<double> resid(n), hess(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double p = 1.0 / (1.0 + std::exp(-f[i]));
            resid[i] = static_cast<double>(y[i]) - p;
            hess[i] = p * (1.0 - p);
        }
        // exhaustive stump search
        double best_gain = -1.0;
        std::size_t best_feature = 0;
        double best_threshold = 0.0;
        bool found = false;
        double total = 0.0, total_sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            total += resid[i];
            total_sq += resid[i] * resid[i];
        }
        const double parent_sse = total_sq - total * total / static_cast<double>(n);
        for (std::size_t j = 0; j < x.n_cols; ++j) {
            std::vector<std::pair<double, double>> vals;
            for (std::size_t i = 0; i < n; ++i) vals.emplace_back(x.at(i, j), resid[i]);
            std::sort(vals.begin(), vals.end());
            double left = 0.0, left_sq = 0.0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                left += vals[i].second;
                left_sq += vals[i].second * vals[i].second;
                if (vals[i].first == vals[i + 1].first) continue;
                const double nl = static_cast<double>(i + 1);
                const double nr = static_cast<double>(n - i - 1);
                const double right = total - left;
                const double right_sq = total_sq - left_sq;
                const double sse =
                    (left_sq - left * left / nl) + (right_sq - right * right / nr);
                const double gain = parent_sse - sse;
                if (!found || gain > best_gain) {
                    found = true;
                    best_gain = gain;
                    best_feature = j;
                    best_threshold = 0.5 * (vals[i].first + vals[i + 1].first);
                }
            }
        }
        if (!found) continue;
        double num_l = 0, den_l = 0, num_r = 0, den_r = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (x.at(i, best_feature) <= best_threshold) {
                num_l += resid[i];
                den_l += hess[i];
            } else {
                num_r += resid[i];
                den_r += hess[i];
            }
        }
        const double val_l = lr * num_l / std::max(den_l, 1e-12);
        const double val_r = lr * num_r / std::max(den_r, 1e-12);
        for (std::size_t i = 0; i < n; ++i) {
            f[i] += x.at(i, best_feature) <= best_threshold ? val_l : val_r;
        }
    }
    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i) scores[i] = 1.0 / (1.0 + std::exp(-f[i]));
    return scores;
}

}  // namespace

TEST_CASE("rf: constant labels produce constant scores") {
    Rng rng(51);
    std::vector<double> values;
    for (int i = 0; i < 60; ++i) values.push_back(rng.normal());
    const auto x = make_matrix(30, 2, values);
    std::vector<std::uint8_t> ones(30, 1);
    RfParams hp{MaxFeaturesRule::Sqrt, 1, 20};
    const auto m = train_rf(x, ones, hp, 7);
    for (double s : predict_risk(m, x)) CHECK(s == 1.0);
}

TEST_CASE("rf and gbm capture the xor interaction that lr cannot") {
    FeatureMatrix train_x, test_x;
    std::vector<std::uint8_t> train_y, test_y;
    xor_data(2000, 52, train_x, train_y);
    xor_data(1000, 53, test_x, test_y);

    const auto lr = train_lr(train_x, train_y);
    const double lr_auc = roc_auc(predict_risk(lr, test_x), test_y).value();
    CHECK(lr_auc <= 0.6);

    RfParams rf_hp{MaxFeaturesRule::Sqrt, 5, 100};
    const auto rf = train_rf(train_x, train_y, rf_hp, 7);
    const double rf_auc = roc_auc(predict_risk(rf, test_x), test_y).value();
    CHECK(rf_auc > 0.95);

    GbmParams gbm_hp{3, MaxFeaturesRule::All, 150, 0.1, 1.0};
    const auto gbm = train_gbm(train_x, train_y, gbm_hp, 7);
    const double gbm_auc = roc_auc(predict_risk(gbm, test_x), test_y).value();
    CHECK(gbm_auc > 0.95);
}

TEST_CASE("rf: identical forests for every worker count") {
    FeatureMatrix x;
    std::vector<std::uint8_t> y;
    xor_data(400, 54, x, y);
    RfParams hp{MaxFeaturesRule::Sqrt, 5, 24};
    std::vector<std::string> dumps;
    for (unsigned workers : {1u, 4u, 8u}) {
        set_max_threads(workers);
        dumps.push_back(model_to_json(train_rf(x, y, hp, 99)));
    }
    set_max_threads(0);
    CHECK(dumps[0] == dumps[1]);
    CHECK(dumps[0] == dumps[2]);
}

TEST_CASE("gbm: zero trees predict the base rate everywhere") {
    Rng rng(55);
    std::vector<double> values;
    std::vector<std::uint8_t> y;
    for (int i = 0; i < 200; ++i) {
        values.push_back(rng.normal());
        y.push_back(rng.bernoulli(0.3));
    }
    const auto x = make_matrix(200, 1, values);
    double base = 0.0;
    for (auto v : y) base += v;
    base /= 200.0;
    GbmParams hp{3, MaxFeaturesRule::All, 0, 0.1, 1.0};
    const auto m = train_gbm(x, y, hp, 1);
    for (double s : predict_risk(m, x)) CHECK(s == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("gbm: training deviance is non-increasing on full-data fits") {
    FeatureMatrix x;
    std::vector<std::uint8_t> y;
    xor_data(500, 56, x, y);
    GbmParams hp{3, MaxFeaturesRule::All, 60, 0.05, 1.0};
    const auto m = train_gbm(x, y, hp, 3);
    REQUIRE(m.train_deviance.size() == 60);
    for (std::size_t t = 1; t < m.train_deviance.size(); ++t) {
        CHECK(m.train_deviance[t] <= m.train_deviance[t - 1] + 1e-12);
    }
}

TEST_CASE("gbm: matches the from-scratch stump boosting reference to 1e-9") {
    Rng rng(57);
    const std::size_t n = 100, p = 3;
    std::vector<double> values;
    std::vector<std::uint8_t> y;
    for (std::size_t i = 0; i < n; ++i) {
        double eta = -0.4;
        for (std::size_t j = 0; j < p; ++j) {
            const double v = rng.normal();
            values.push_back(v);
            eta += (j == 0 ? 1.2 : (j == 1 ? -0.8 : 0.0)) * v;
        }
        y.push_back(rng.uniform() < 1.0 / (1.0 + std::exp(-eta)) ? 1 : 0);
    }
    const auto x = make_matrix(n, p, values);
    GbmParams hp{1, MaxFeaturesRule::All, 10, 0.1, 1.0};
    const auto m = train_gbm(x, y, hp, 11);
    const auto lib = predict_risk(m, x);
    const auto ref = reference_stump_boost(x, y, 10, 0.1);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::abs(lib[i] - ref[i]) < 1e-9);
    }
}

TEST_CASE("gbm: subsampled fits are deterministic across worker counts") {
    FeatureMatrix x;
    std::vector<std::uint8_t> y;
    xor_data(300, 58, x, y);
    GbmParams hp{3, MaxFeaturesRule::Sqrt, 20, 0.05, 0.6};
    set_max_threads(1);
    const auto a = model_to_json(train_gbm(x, y, hp, 5));
    set_max_threads(8);
    const auto b = model_to_json(train_gbm(x, y, hp, 5));
    set_max_threads(0);
    CHECK(a == b);
}

TEST_CASE("gbm: invalid hyperparameters are rejected") {
    FeatureMatrix x;
    std::vector<std::uint8_t> y;
    xor_data(50, 59, x, y);
    GbmParams bad{3, MaxFeaturesRule::All, 10, 0.0, 1.0};
    CHECK_THROWS_AS(train_gbm(x, y, bad, 1), UsageError);
    GbmParams bad2{3, MaxFeaturesRule::All, 10, 0.1, 0.0};
    CHECK_THROWS_AS(train_gbm(x, y, bad2, 1), UsageError);
}

TEST_CASE("predict_risk: contracts") {
    FeatureMatrix x;
    std::vector<std::uint8_t> y;
    xor_data(300, 60, x, y);
    GbmParams hp{3, MaxFeaturesRule::Sqrt, 25, 0.1, 0.8};
    const auto m = train_gbm(x, y, hp, 2);

    SUBCASE("scores are finite and in [0,1]") {
        for (double s : predict_risk(m, x)) {
            CHECK(std::isfinite(s));
            CHECK(s >= 0.0);
            CHECK(s <= 1.0);
        }
    }
    SUBCASE("duplicate rows score identically, permutations permute scores") {
        const auto scores = predict_risk(m, x);
        FeatureMatrix dup = x;
        for (std::size_t j = 0; j < x.n_cols; ++j) dup.values[j] = x.at(7, j);
        const auto dup_scores = predict_risk(m, dup);
        CHECK(dup_scores[0] == scores[7]);

        std::vector<std::uint32_t> perm(x.n_rows);
        for (std::uint32_t i = 0; i < perm.size(); ++i) perm[i] = perm.size() - 1 - i;
        const auto permuted = predict_risk(m, x.select_rows(perm));
        for (std::size_t i = 0; i < perm.size(); ++i) {
            CHECK(permuted[i] == scores[perm[i]]);
        }
    }
    SUBCASE("schema mismatch names the offending column") {
        FeatureMatrix wrong = x;
        wrong.names[1] = "something_else";
        try {
            predict_risk(m, wrong);
            FAIL("expected schema error");
        } catch (const DataError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("column 1") != std::string::npos);
            CHECK(msg.find("something_else") != std::string::npos);
        }
    }
}

TEST_CASE("ensemble serialization round trip") {
    FeatureMatrix x;
    std::vector<std::uint8_t> y;
    xor_data(200, 61, x, y);
    RfParams hp{MaxFeaturesRule::Log2, 5, 10};
    const auto m = train_rf(x, y, hp, 8);
    const auto text = model_to_json(m);
    const auto back = model_from_json(text);
    CHECK(model_to_json(back) == text);
    CHECK(predict_risk(back, x) == predict_risk(m, x));
}

TEST_CASE("default grids match the documented tuning space") {
    CHECK(default_grid(Method::LR).empty());
    CHECK(default_grid(Method::PLR).size() == 2 * 7);
    CHECK(default_grid(Method::RF).size() == 2 * 3 * 2);
    CHECK(default_grid(Method::GBM).size() == 3 * 2 * 3 * 3 * 2);
    // canonical enumeration order: first PLR cell is l1 with the smallest c
    const auto plr = default_grid(Method::PLR);
    CHECK(plr[0].plr.penalty == PenaltyKind::L1);
    CHECK(plr[0].plr.c == 0.001);
    CHECK(plr[7].plr.penalty == PenaltyKind::L2);
}
