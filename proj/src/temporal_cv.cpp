#include "ltuprof/temporal_cv.hpp"

#include <algorithm>
#include <map>

#include "ltuprof/common.hpp"
#include "ltuprof/metrics.hpp"
#include "ltuprof/rng.hpp"

namespace ltuprof {

std::vector<TemporalFold> make_folds(std::span<const int> row_years, int first_year,
                                     int last_year) {
    std::vector<int> distinct;
    for (int y : row_years) {
        if (y >= first_year && y <= last_year &&
            std::find(distinct.begin(), distinct.end(), y) == distinct.end()) {
            distinct.push_back(y);
        }
    }
    if (distinct.size() < 2) {
        throw DataError("make_folds: need at least 2 distinct years in range " +
                        std::to_string(first_year) + ".." + std::to_string(last_year));
    }
    std::vector<TemporalFold> folds;
    for (int test = first_year + 1; test <= last_year; ++test) {
        folds.push_back({first_year, test - 1, test});
    }
    return folds;
}

std::vector<std::uint32_t> subsample_per_year(std::span<const int> row_years,
                                              std::size_t n_per_year, std::uint64_t seed) {
    if (n_per_year == 0) throw UsageError("subsample_per_year: n_per_year must be positive");
    std::map<int, std::vector<std::uint32_t>> by_year;
    for (std::uint32_t i = 0; i < row_years.size(); ++i) {
        by_year[row_years[i]].push_back(i);
    }
    std::vector<std::uint32_t> kept;
    for (auto& [year, rows] : by_year) {
        if (rows.size() <= n_per_year) {
            kept.insert(kept.end(), rows.begin(), rows.end());
            continue;
        }
        Rng rng(sub_seed(seed, static_cast<std::uint64_t>(year)));
        const auto picks = rng.sample_without_replacement(
            static_cast<std::uint32_t>(rows.size()), static_cast<std::uint32_t>(n_per_year));
        for (auto p : picks) kept.push_back(rows[p]);
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

namespace {

std::vector<std::uint32_t> rows_in_years(std::span<const int> row_years, int first, int last) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < row_years.size(); ++i) {
        if (row_years[i] >= first && row_years[i] <= last) out.push_back(i);
    }
    return out;
}

template <typename T>
std::vector<T> gather(std::span<const T> src, std::span<const std::uint32_t> rows) {
    std::vector<T> out;
    out.reserve(rows.size());
    for (auto r : rows) out.push_back(src[r]);
    return out;
}

}  // namespace

GridSearchOutcome grid_search(Method method, std::span<const HyperParams> grid,
                              const FeatureMatrix& x, std::span<const std::uint8_t> y,
                              std::span<const int> row_years,
                              std::span<const TemporalFold> folds, std::uint64_t seed) {
    GridSearchOutcome out;
    if (grid.empty()) {
        // LR has nothing to tune.
        out.best.method = method;
        return out;
    }
    if (folds.empty()) throw DataError("grid_search: no folds");

    // Materialize fold datasets once; cells share them.
    struct FoldData {
        FeatureMatrix fit_x;
        std::vector<std::uint8_t> fit_y;
        FeatureMatrix test_x;
        std::vector<std::uint8_t> test_y;
        bool test_single_class = false;
    };
    std::vector<FoldData> data;
    data.reserve(folds.size());
    for (const auto& fold : folds) {
        const auto fit_rows = rows_in_years(row_years, fold.fit_first_year, fold.fit_last_year);
        const auto test_rows = rows_in_years(row_years, fold.test_year, fold.test_year);
        if (fit_rows.empty() || test_rows.empty()) {
            throw DataError("grid_search: empty fit or test set for test year " +
                            std::to_string(fold.test_year));
        }
        // Temporal hygiene: nothing from the test year or later may be fit.
        for (auto r : fit_rows) {
            if (row_years[r] >= fold.test_year) {
                throw NumericError("grid_search: leakage, fit row from year " +
                                   std::to_string(row_years[r]) + " in fold testing " +
                                   std::to_string(fold.test_year));
            }
        }
        FoldData fd;
        fd.fit_x = x.select_rows(fit_rows);
        fd.fit_y = gather(y, fit_rows);
        fd.test_x = x.select_rows(test_rows);
        fd.test_y = gather(y, test_rows);
        std::size_t pos = 0;
        for (auto v : fd.test_y) pos += v;
        fd.test_single_class = pos == 0 || pos == fd.test_y.size();
        data.push_back(std::move(fd));
    }

    out.results.reserve(grid.size());
    std::size_t best_idx = 0;
    bool have_best = false;
    for (std::size_t cell = 0; cell < grid.size(); ++cell) {
        GridResult res;
        res.hp = grid[cell];
        double sum = 0.0;
        std::size_t defined = 0;
        for (std::size_t fi = 0; fi < data.size(); ++fi) {
            const auto& fd = data[fi];
            if (fd.test_single_class) {
                res.fold_auc.push_back(std::nullopt);
                res.warnings.push_back("fold " + std::to_string(folds[fi].test_year) +
                                       ": single-class test year, AUC undefined");
                continue;
            }
            const auto model = train(fd.fit_x, fd.fit_y, grid[cell], seed);
            const auto scores = predict_risk(model, fd.test_x);
            const auto auc = roc_auc(scores, fd.test_y);
            res.fold_auc.push_back(auc);
            if (auc) {
                sum += *auc;
                ++defined;
            }
        }
        if (defined > 0) res.mean_auc = sum / static_cast<double>(defined);
        if (res.mean_auc && (!have_best || *res.mean_auc > *out.results[best_idx].mean_auc)) {
            best_idx = cell;
            have_best = true;
        }
        out.results.push_back(std::move(res));
    }
    if (!have_best) throw NumericError("grid_search: no fold produced a defined AUC");
    out.results[best_idx].selected = true;
    out.best = out.results[best_idx].hp;
    return out;
}

const char* history_name(TrainingHistory h) {
    return h == TrainingHistory::Full ? "full" : "last_year_only";
}

TrainedModel fit_final(Method method, const HyperParams& hp, const FeatureMatrix& x,
                       std::span<const std::uint8_t> y, std::span<const int> row_years,
                       TrainingHistory history, std::uint64_t seed) {
    if (row_years.empty()) throw DataError("fit_final: no rows");
    std::vector<std::uint32_t> rows;
    if (history == TrainingHistory::Full) {
        rows.resize(row_years.size());
        for (std::uint32_t i = 0; i < rows.size(); ++i) rows[i] = i;
    } else {
        int max_year = row_years[0];
        for (int yr : row_years) max_year = std::max(max_year, yr);
        rows = rows_in_years(row_years, max_year, max_year);
    }
    const auto fit_x = x.select_rows(rows);
    std::vector<std::uint8_t> fit_y = gather(y, std::span<const std::uint32_t>(rows));
    HyperParams use = hp;
    use.method = method;
    return train(fit_x, fit_y, use, seed);
}

}  // namespace ltuprof
