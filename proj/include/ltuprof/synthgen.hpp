#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ltuprof/records.hpp"

namespace ltuprof {

// Seeded synthetic population generator. Structurally faithful to the
// production pipeline's inputs: longitudinal episode records with a
// controlled latent-risk model, calibrated to a target LTU rate and group
// prevalences. Per-person randomness is sub-seeded, so generation is
// order-free and parallel-safe.

struct GroupPrevalence {
    double female = 0.425;
    double non_german_male = 0.127;
    double non_german_female = 0.078;
};

struct RiskModel {
    double intercept = -2.1;
    double coef_age = 0.45;
    // U-shaped age effect on the logit scale: coef_age_sq * (a_age^2 - 1).
    double coef_age_sq = 0.55;
    double coef_education = -0.55;
    double coef_stability = -0.85;
    double coef_frailty = 1.05;
    // Sharp AND-interaction: high frailty plus low stability.
    double coef_interaction = 1.8;
    double noise_sd = 0.55;

    // Non-German covariate adjustments (applied to latent covariates).
    double shift_education = 0.0;
    double shift_stability = 0.0;
    double shift_frailty = 0.0;
    // Spread compression of non-German latent covariates toward their
    // (shifted) center; 0 keeps groups exchangeable.
    double group_skew = 0.0;
    // Direct logit offset for non-German episodes.
    double group_eta_shift = 0.0;
    // Mild female covariate adjustment (part-time heavy histories).
    double female_shift_stability = 0.0;
    // Observable-history length: the latent is shift_history (non-German
    // only) + history_edu_coupling * a_edu + noise; it caps how far back a
    // person's records reach. Shorter histories leave models less evidence,
    // concentrating predicted risk mid-distribution.
    double shift_history = 0.0;
    double history_edu_coupling = 0.8;
};

struct SynthConfig {
    std::size_t n_persons = 10000;
    int year_start = 2010;
    int year_end = 2016;
    GroupPrevalence prevalence;                   // applies to every year
    std::map<int, GroupPrevalence> prevalence_by_year;  // optional overrides
    double target_ltu_rate = 0.152;
    bool calibrate_intercept = true;
    RiskModel risk;
    std::uint64_t seed = 1;

    std::string to_json() const;
    static SynthConfig from_json(const std::string& text);
    void validate() const;
};

// Baseline config (groups exchangeable) and the skewed scenario whose
// non-German score mass concentrates mid-distribution.
SynthConfig default_synth_config();
SynthConfig scenario_skew(const SynthConfig& base, double skew_strength = 0.45);

struct SynthEpisodeTruth {
    std::uint32_t person_index = 0;
    int year = 0;
    Date start;
    int duration_days = 0;
    std::uint8_t y = 0;
    double latent_p = 0.0;
    std::uint8_t female = 0;
    std::uint8_t non_german = 0;
};

struct SynthResult {
    std::vector<RawRecord> records;  // sorted by (person_id, start)
    std::vector<PersonStatic> persons;
    std::vector<SynthEpisodeTruth> truth;
    double realized_ltu_rate = 0.0;
    double intercept_adjustment = 0.0;
    std::map<std::string, double> realized_prevalence;  // overall episode shares
};

SynthResult generate(const SynthConfig& config);

// Writes records/persons/education/moves CSVs plus a truth diagnostic table
// into out_dir, and returns the generation result.
SynthResult generate_to_files(const SynthConfig& config, const std::string& out_dir);

}  // namespace ltuprof
