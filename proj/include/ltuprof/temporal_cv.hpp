#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ltuprof/models.hpp"

namespace ltuprof {

// Expanding-window temporal cross-validation: fit on years [first..t], test
// on the single year t+1, selection by mean test ROC-AUC.

struct TemporalFold {
    int fit_first_year = 0;
    int fit_last_year = 0;
    int test_year = 0;
};

std::vector<TemporalFold> make_folds(std::span<const int> row_years, int first_year,
                                     int last_year);

// Uniform without-replacement sample of at most n_per_year rows per year;
// undersized years keep all rows. Returned indices are ascending.
std::vector<std::uint32_t> subsample_per_year(std::span<const int> row_years,
                                              std::size_t n_per_year, std::uint64_t seed);

struct GridResult {
    HyperParams hp;
    std::vector<std::optional<double>> fold_auc;  // nullopt: single-class test year
    std::optional<double> mean_auc;
    bool selected = false;
    std::vector<std::string> warnings;
};

struct GridSearchOutcome {
    HyperParams best;
    std::vector<GridResult> results;  // grid enumeration order
};

// Trains each grid cell on each fold and picks the cell with the highest
// mean test-year ROC-AUC; ties go to the earlier cell. An empty grid (LR)
// bypasses the search. Throws NumericError if no fold of any cell produced
// a defined AUC.
GridSearchOutcome grid_search(Method method, std::span<const HyperParams> grid,
                              const FeatureMatrix& x, std::span<const std::uint8_t> y,
                              std::span<const int> row_years,
                              std::span<const TemporalFold> folds, std::uint64_t seed);

enum class TrainingHistory { Full, LastYearOnly };
const char* history_name(TrainingHistory h);

TrainedModel fit_final(Method method, const HyperParams& hp, const FeatureMatrix& x,
                       std::span<const std::uint8_t> y, std::span<const int> row_years,
                       TrainingHistory history, std::uint64_t seed);

}  // namespace ltuprof
