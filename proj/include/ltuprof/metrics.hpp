#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ltuprof/policy.hpp"

namespace ltuprof {

// Performance metrics over class predictions and risk scores. Metrics that
// are undefined for a degenerate input (single-class labels, zero positives)
// return nullopt rather than a silent zero.

double accuracy(std::span<const std::uint8_t> y_hat, std::span<const std::uint8_t> y);

double precision_at_k(std::span<const double> scores, std::span<const std::uint8_t> y,
                      std::size_t k);
std::optional<double> recall_at_k(std::span<const double> scores,
                                  std::span<const std::uint8_t> y, std::size_t k);

double f1_from(double precision, double recall);

// Pairwise concordance probability (ties count 0.5), computed by rank sums.
std::optional<double> roc_auc(std::span<const double> scores, std::span<const std::uint8_t> y);

// Average precision: mean over positives (in score order) of the precision
// at that positive's rank. Ties are resolved by the (score desc, index asc)
// order shared with the policy engine.
std::optional<double> pr_auc(std::span<const double> scores, std::span<const std::uint8_t> y);

struct PerfReport {
    std::string model;
    std::string history;
    std::string policy;
    std::size_t k = 0;
    double accuracy = 0.0;
    double precision = 0.0;
    std::optional<double> recall;
    double f1 = 0.0;
    std::optional<double> roc_auc;
    std::optional<double> pr_auc;
};

PerfReport evaluate_policy(std::span<const double> scores, std::span<const std::uint8_t> y,
                           const Policy& policy);

struct SweepRow {
    double fraction = 0.0;
    double threshold = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    // SPD per protected-group definition, same order as fairness::group_names.
    std::vector<double> spd;
};

struct GroupMasks {
    // One unprivileged-membership mask per audited group definition.
    std::vector<std::string> names;
    std::vector<std::vector<std::uint8_t>> unprivileged;
};

// Top-fraction sweep over the grid: per fraction, precision / recall / F1 of
// the top-k classification plus SPD per group. Backs the threshold-curve
// report tables.
std::vector<SweepRow> threshold_sweep(std::span<const double> scores,
                                      std::span<const std::uint8_t> y, const GroupMasks& groups,
                                      std::span<const double> fractions);

}  // namespace ltuprof
