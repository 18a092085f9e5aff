#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ltuprof/features.hpp"
#include "ltuprof/metrics.hpp"
#include "ltuprof/policy.hpp"
#include "ltuprof/synthgen.hpp"
#include "ltuprof/temporal_cv.hpp"

namespace ltuprof {

// Config-driven orchestration of the full experiment: data -> spells ->
// rows -> tuning -> final models (full + restricted histories) -> scoring
// of the evaluation year -> policies -> performance/fairness/sweep reports.

struct IngestPaths {
    std::string records;
    std::string persons;
    std::string education;
    std::string moves;
};

struct RunConfig {
    std::uint64_t seed = 1;
    // Exactly one data source.
    std::optional<SynthConfig> synthetic;
    std::optional<IngestPaths> ingest;

    int year_start = 2010;
    int year_end = 2016;
    int evaluation_year = 2016;
    std::size_t per_year_sample = 20000;
    int gap_tolerance_days = kDefaultGapToleranceDays;
    int horizon_days = kDefaultHorizonDays;

    FeatureConfig features;
    std::vector<Method> methods = {Method::LR, Method::PLR, Method::RF, Method::GBM};
    // Empty grid for a method = canonical default grid (LR never has one).
    std::map<Method, std::vector<HyperParams>> grids;
    std::vector<TrainingHistory> histories = {TrainingHistory::Full,
                                              TrainingHistory::LastYearOnly};
    std::vector<Policy> policies = {Policy::p1a(), Policy::p1b(), Policy::p2()};

    double sweep_start = 0.01;
    double sweep_stop = 0.99;
    double sweep_step = 0.01;
    std::size_t consistency_neighbors = 5;
    bool consistency_scaled = true;
    int histogram_bins = 50;

    std::string to_json() const;
    static RunConfig from_json(const std::string& text);
    void validate() const;
    std::uint64_t config_hash() const;
};

struct GridReportRow {
    std::string method;
    std::size_t cell = 0;
    std::string params;
    std::vector<std::optional<double>> fold_auc;
    std::optional<double> mean_auc;
    bool selected = false;
};

struct FairnessRow {
    std::string model;    // method name or "observed"
    std::string history;  // training-history tag or "-"
    std::string policy;   // policy name or "-"
    std::vector<std::optional<double>> spd;   // per kGroupNames
    std::vector<std::optional<double>> cspd;  // conditional on high education
    double consistency = 0.0;
};

struct AuditReport {
    std::vector<GridReportRow> grid_rows;
    std::vector<PerfReport> performance;
    std::vector<FairnessRow> fairness;
    std::vector<PrevalenceRow> prevalence;
    std::vector<int> fold_test_years;
    std::uint64_t config_hash = 0;
    std::map<std::string, double> synth_calibration;  // empty for ingest runs
};

// Runs the full audit and writes the report bundle into out_dir. Partial
// outputs are removed when any stage fails.
AuditReport run_audit(const RunConfig& config, const std::string& out_dir);

}  // namespace ltuprof
