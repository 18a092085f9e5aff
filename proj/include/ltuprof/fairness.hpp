#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ltuprof {

// Group and individual fairness metrics on class predictions. The audited
// group definitions: the unprivileged mask marks members; the privileged
// group is its complement.

struct GroupRates {
    std::size_t n_unprivileged = 0;
    std::size_t n_privileged = 0;
    double rate_unprivileged = 0.0;
    double rate_privileged = 0.0;
};

// Pr(y_hat=1 | unprivileged) - Pr(y_hat=1 | privileged); negative means the
// unprivileged group is selected less often. nullopt when a group is empty.
std::optional<double> spd(std::span<const std::uint8_t> y_hat,
                          std::span<const std::uint8_t> unprivileged,
                          GroupRates* rates = nullptr);

// SPD restricted to rows with cond = 1.
std::optional<double> conditional_spd(std::span<const std::uint8_t> y_hat,
                                      std::span<const std::uint8_t> unprivileged,
                                      std::span<const std::uint8_t> cond,
                                      GroupRates* rates = nullptr);

// Exact k-nearest-neighbor sets under Euclidean distance on min-max scaled
// features (self excluded, distance ties broken by lowest row index).
// Computed once per feature matrix and reused across prediction vectors.
std::vector<std::vector<std::uint32_t>> knn_neighbors(std::span<const double> x,
                                                      std::size_t n_rows, std::size_t n_cols,
                                                      std::size_t n_neighbors,
                                                      bool min_max_scale = true);

double consistency_from_neighbors(std::span<const std::uint8_t> y_hat,
                                  const std::vector<std::vector<std::uint32_t>>& neighbors);

// 1 - mean_i |y_hat_i - mean(y_hat over i's n_neighbors nearest rows)|.
double consistency(std::span<const std::uint8_t> y_hat, std::span<const double> x,
                   std::size_t n_rows, std::size_t n_cols, std::size_t n_neighbors,
                   bool min_max_scale = true);

struct PrevalenceRow {
    int year = 0;
    std::string stratum;  // overall, ltu, no_ltu
    std::size_t count = 0;
    double frac_female = 0.0;
    double frac_non_german = 0.0;
    double frac_non_german_male = 0.0;
    double frac_non_german_female = 0.0;
};

struct GroupColumns {
    std::vector<int> year;
    std::vector<std::uint8_t> female;
    std::vector<std::uint8_t> non_german;
};

// Per year x {overall, ltu, no_ltu}: group shares and counts.
std::vector<PrevalenceRow> group_prevalence_table(const GroupColumns& cols,
                                                  std::span<const std::uint8_t> outcome);

}  // namespace ltuprof
