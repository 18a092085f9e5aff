#include "ltuprof/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include <json.hpp>

#include "ltuprof/common.hpp"
#include "ltuprof/csv.hpp"
#include "ltuprof/episode_store.hpp"
#include "ltuprof/models.hpp"
#include "ltuprof/parallel.hpp"
#include "ltuprof/rng.hpp"

namespace ltuprof {

using json = nlohmann::ordered_json;

namespace {

json prevalence_to_json(const GroupPrevalence& p) {
    return json{{"female", p.female},
                {"non_german_male", p.non_german_male},
                {"non_german_female", p.non_german_female}};
}

GroupPrevalence prevalence_from_json(const json& j) {
    GroupPrevalence p;
    p.female = j.value("female", 0.425);
    p.non_german_male = j.value("non_german_male", 0.127);
    p.non_german_female = j.value("non_german_female", 0.078);
    return p;
}

}  // namespace

std::string SynthConfig::to_json() const {
    json j;
    j["n_persons"] = n_persons;
    j["year_start"] = year_start;
    j["year_end"] = year_end;
    j["prevalence"] = prevalence_to_json(prevalence);
    if (!prevalence_by_year.empty()) {
        json by_year = json::object();
        for (const auto& [year, p] : prevalence_by_year) {
            by_year[std::to_string(year)] = prevalence_to_json(p);
        }
        j["prevalence_by_year"] = by_year;
    }
    j["target_ltu_rate"] = target_ltu_rate;
    j["calibrate_intercept"] = calibrate_intercept;
    j["risk"] = {{"intercept", risk.intercept},
                 {"coef_age", risk.coef_age},
                 {"coef_age_sq", risk.coef_age_sq},
                 {"coef_education", risk.coef_education},
                 {"coef_stability", risk.coef_stability},
                 {"coef_frailty", risk.coef_frailty},
                 {"coef_interaction", risk.coef_interaction},
                 {"noise_sd", risk.noise_sd},
                 {"shift_education", risk.shift_education},
                 {"shift_stability", risk.shift_stability},
                 {"shift_frailty", risk.shift_frailty},
                 {"group_skew", risk.group_skew},
                 {"group_eta_shift", risk.group_eta_shift},
                 {"female_shift_stability", risk.female_shift_stability},
                 {"shift_history", risk.shift_history},
                 {"history_edu_coupling", risk.history_edu_coupling}};
    j["seed"] = seed;
    return j.dump(2) + "\n";
}

SynthConfig SynthConfig::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw DataError(std::string("synth config: invalid JSON: ") + e.what());
    }
    SynthConfig cfg;
    cfg.n_persons = j.value("n_persons", static_cast<std::size_t>(10000));
    cfg.year_start = j.value("year_start", 2010);
    cfg.year_end = j.value("year_end", 2016);
    if (j.contains("prevalence")) cfg.prevalence = prevalence_from_json(j["prevalence"]);
    if (j.contains("prevalence_by_year")) {
        for (const auto& [key, value] : j["prevalence_by_year"].items()) {
            cfg.prevalence_by_year[std::stoi(key)] = prevalence_from_json(value);
        }
    }
    cfg.target_ltu_rate = j.value("target_ltu_rate", 0.152);
    cfg.calibrate_intercept = j.value("calibrate_intercept", true);
    if (j.contains("risk")) {
        const auto& r = j["risk"];
        cfg.risk.intercept = r.value("intercept", cfg.risk.intercept);
        cfg.risk.coef_age = r.value("coef_age", cfg.risk.coef_age);
        cfg.risk.coef_age_sq = r.value("coef_age_sq", cfg.risk.coef_age_sq);
        cfg.risk.coef_education = r.value("coef_education", cfg.risk.coef_education);
        cfg.risk.coef_stability = r.value("coef_stability", cfg.risk.coef_stability);
        cfg.risk.coef_frailty = r.value("coef_frailty", cfg.risk.coef_frailty);
        cfg.risk.coef_interaction = r.value("coef_interaction", cfg.risk.coef_interaction);
        cfg.risk.noise_sd = r.value("noise_sd", cfg.risk.noise_sd);
        cfg.risk.shift_education = r.value("shift_education", 0.0);
        cfg.risk.shift_stability = r.value("shift_stability", 0.0);
        cfg.risk.shift_frailty = r.value("shift_frailty", 0.0);
        cfg.risk.group_skew = r.value("group_skew", 0.0);
        cfg.risk.group_eta_shift = r.value("group_eta_shift", 0.0);
        cfg.risk.female_shift_stability = r.value("female_shift_stability", 0.0);
        cfg.risk.shift_history = r.value("shift_history", 0.0);
        cfg.risk.history_edu_coupling = r.value("history_edu_coupling", 0.8);
    }
    cfg.seed = j.value("seed", static_cast<std::uint64_t>(1));
    cfg.validate();
    return cfg;
}

void SynthConfig::validate() const {
    if (n_persons == 0) throw DataError("synth config: n_persons must be positive");
    if (year_start > year_end) throw DataError("synth config: year_start > year_end");
    if (!(target_ltu_rate > 0.0 && target_ltu_rate < 1.0)) {
        throw DataError("synth config: target_ltu_rate must be in (0,1)");
    }
    auto check = [](const GroupPrevalence& p, const std::string& where) {
        const double ger_female = p.female - p.non_german_female;
        const double ger_male = 1.0 - p.female - p.non_german_male;
        if (p.female < 0 || p.female > 1 || p.non_german_male < 0 || p.non_german_female < 0 ||
            ger_female < -1e-12 || ger_male < -1e-12) {
            throw DataError("synth config: inconsistent prevalences (" + where + ")");
        }
    };
    check(prevalence, "default");
    for (const auto& [year, p] : prevalence_by_year) check(p, std::to_string(year));
    if (risk.noise_sd < 0.0) throw DataError("synth config: noise_sd must be >= 0");
    if (risk.group_skew < 0.0 || risk.group_skew >= 1.0) {
        throw DataError("synth config: group_skew must be in [0,1)");
    }
}

SynthConfig default_synth_config() { return SynthConfig{}; }

SynthConfig scenario_skew(const SynthConfig& base, double skew_strength) {
    SynthConfig cfg = base;
    const double s = skew_strength / 0.45;
    cfg.risk.group_skew = 0.30 * s;
    // Three channels concentrate the non-German score mass toward the
    // middle of the distribution: compressed work-history latents, a skew
    // toward lower education, and shorter visible histories (education-
    // coupled) that starve models of the evidence needed for extreme
    // scores. Conditioning on high education removes the composition and
    // part of the visibility gap.
    cfg.risk.shift_education = -0.6 * s;
    cfg.risk.shift_stability = 0.15 * s;
    cfg.risk.shift_frailty = -0.15 * s;
    cfg.risk.group_eta_shift = -0.10 * s;
    cfg.risk.female_shift_stability = -0.12;
    cfg.risk.shift_history = -2.0 * s;
    cfg.risk.history_edu_coupling = 0.85;
    return cfg;
}

namespace {

constexpr int kEpisodeSpacingDays = 900;
constexpr double kIndustryWeights[kNumIndustries] = {14, 13, 12, 11, 10, 9, 8,
                                                     7,  6,  5,  2.5, 1.4, 0.6, 0.25};

struct PersonLatents {
    bool female = false;
    bool non_german = false;
    int home_year = 0;
    double a_age = 0, a_edu = 0, a_frail = 0, a_stab = 0;
    int age_home = 40;
};

struct EpisodePlan {
    Date start;
    double eta = 0.0;
};

struct PersonDraft {
    PersonLatents latents;
    std::vector<EpisodePlan> episodes;
};

struct PersonOutput {
    std::vector<RawRecord> records;
    PersonStatic person;
    std::vector<SynthEpisodeTruth> truth;
};

std::string make_person_id(std::uint32_t index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "p%07u", index);
    return buf;
}

const GroupPrevalence& prevalence_for_year(const SynthConfig& cfg, int year) {
    const auto it = cfg.prevalence_by_year.find(year);
    return it == cfg.prevalence_by_year.end() ? cfg.prevalence : it->second;
}

// Phase A: everything that feeds the latent risk. The draw sequence here is
// a strict prefix of the full generation, so the calibration pass and the
// final pass see identical latents.
PersonDraft draw_person_plan(const SynthConfig& cfg, std::uint32_t index, Rng& rng) {
    PersonDraft draft;
    auto& L = draft.latents;

    // Home years are stratified over the index and groups come from a
    // golden-ratio sequence, so realized cohort sizes and prevalences track
    // the config at O(1/n) instead of binomial noise.
    const int n_years = cfg.year_end - cfg.year_start + 1;
    L.home_year = cfg.year_start + static_cast<int>(index % static_cast<std::uint32_t>(n_years));
    const auto& prev = prevalence_for_year(cfg, L.home_year);
    const double ger_female = prev.female - prev.non_german_female;
    const double phase = Rng(sub_seed(cfg.seed, 0x67726f7570ULL)).uniform();
    constexpr double kGoldenRatioFrac = 0.6180339887498949;
    double u = phase + kGoldenRatioFrac * static_cast<double>(index);
    u -= std::floor(u);
    if (u < prev.non_german_male) {
        L.non_german = true;
        L.female = false;
    } else if (u < prev.non_german_male + prev.non_german_female) {
        L.non_german = true;
        L.female = true;
    } else if (u < prev.non_german_male + prev.non_german_female + ger_female) {
        L.non_german = false;
        L.female = true;
    } else {
        L.non_german = false;
        L.female = false;
    }

    L.a_age = rng.normal();
    L.a_edu = rng.normal();
    L.a_frail = rng.normal();
    L.a_stab = rng.normal();
    if (L.non_german) {
        // Compression applies to the work-history latents only; education
        // keeps its spread so the high-education stratum stays populated.
        const double keep = 1.0 - cfg.risk.group_skew;
        L.a_edu = cfg.risk.shift_education + L.a_edu;
        L.a_stab = cfg.risk.shift_stability + keep * L.a_stab;
        L.a_frail = cfg.risk.shift_frailty + keep * L.a_frail;
    }
    if (L.female) L.a_stab += cfg.risk.female_shift_stability;
    L.age_home = static_cast<int>(
        std::clamp(std::lround(40.0 + 11.0 * L.a_age), 20L, 60L));

    const double u_k = rng.uniform();
    const int k = u_k < 0.50 ? 1 : (u_k < 0.85 ? 2 : 3);
    const Date window_end(cfg.year_end, 12, 31);
    Date start = Date(L.home_year, 1, 1) + static_cast<int>(rng.uniform_int(365));
    for (int e = 0; e < k; ++e) {
        const double eta_noise = rng.normal(0.0, cfg.risk.noise_sd);
        const int spacing = kEpisodeSpacingDays +
                            static_cast<int>(std::min(2400.0, rng.exponential(1.0 / 240.0)));
        if (start <= window_end) {
            const auto& r = cfg.risk;
            double eta = r.intercept + r.coef_age * L.a_age +
                         r.coef_age_sq * (L.a_age * L.a_age - 1.0) +
                         r.coef_education * L.a_edu + r.coef_stability * L.a_stab +
                         r.coef_frailty * L.a_frail;
            if (L.a_frail > 0.35 && L.a_stab < -0.35) eta += r.coef_interaction;
            if (L.non_german) eta += r.group_eta_shift;
            eta += eta_noise;
            draft.episodes.push_back({start, eta});
        }
        start = start + spacing;
    }
    (void)index;
    return draft;
}

int draw_industry(Rng& rng) {
    static const std::vector<double> weights(kIndustryWeights, kIndustryWeights + kNumIndustries);
    return static_cast<int>(rng.categorical(weights));
}

TriState draw_tri(Rng& rng, double p_yes, double p_missing) {
    const double u = rng.uniform();
    if (u < p_missing) return TriState::Missing;
    return rng.uniform() < p_yes ? TriState::Yes : TriState::No;
}

RawRecord make_employment(const std::string& pid, Date start, Date end, const PersonLatents& L,
                          int home_industry, Rng& rng) {
    RawRecord r;
    r.person_id = pid;
    r.type = RecordType::Employment;
    r.start = start;
    r.end = end;
    if (rng.uniform() >= 0.07) {
        double wage = std::exp(rng.normal(4.0 + 0.22 * L.a_stab + 0.18 * L.a_edu, 0.5));
        if (rng.uniform() < 0.02) wage *= 6.0;  // executive tail
        r.daily_wage = wage;
    }
    r.industry = rng.uniform() < 0.75 ? home_industry : draw_industry(rng);
    r.part_time = draw_tri(rng, sigmoid(-1.4 + 1.5 * (L.female ? 1.0 : 0.0) - 0.35 * L.a_stab),
                           0.06);
    r.fixed_term = draw_tri(rng, sigmoid(-1.3 - 0.5 * L.a_stab), 0.06);
    r.temp_work = draw_tri(rng, sigmoid(-2.0 - 0.4 * L.a_stab), 0.06);
    if (rng.uniform() >= 0.05) {
        const double s = L.a_edu + rng.normal(0.0, 0.45);
        r.skill_level = s < -0.7 ? 0 : (s < 0.4 ? 1 : (s < 1.3 ? 2 : 3));
    }
    if (rng.uniform() >= 0.20) r.more_than_one_job = rng.uniform() < 0.07;
    return r;
}

void emit_unemployment_cluster(std::vector<RawRecord>& records, const std::string& pid,
                               Date start, Date end, const PersonLatents& L, Rng& rng) {
    RawRecord unemp;
    unemp.person_id = pid;
    unemp.type = RecordType::Unemployment;
    unemp.start = start;
    unemp.end = end;
    records.push_back(unemp);

    RawRecord seeking = unemp;
    seeking.type = RecordType::JobSeeking;
    records.push_back(seeking);

    const int dur = end - start + 1;
    RawRecord st = unemp;
    st.type = RecordType::BenefitShortTerm;
    st.end = start + std::min(dur - 1, 359);
    records.push_back(st);

    if (rng.uniform() < sigmoid(-1.1 + 0.8 * L.a_frail)) {
        RawRecord lt = unemp;
        lt.type = RecordType::BenefitLongTerm;
        records.push_back(lt);
    }
    if (dur >= 150 && rng.uniform() < 0.25) {
        RawRecord prog = unemp;
        prog.type = RecordType::ProgramParticipation;
        prog.start = start + 40;
        prog.end = std::min(end, start + 110);
        records.push_back(prog);
    }
}

PersonOutput generate_person(const SynthConfig& cfg, std::uint32_t index, double delta) {
    Rng rng(sub_seed(cfg.seed, index));
    PersonDraft draft = draw_person_plan(cfg, index, rng);
    const auto& L = draft.latents;
    const std::string pid = make_person_id(index);

    PersonOutput out;
    out.person.person_id = pid;
    out.person.birth_year = L.home_year - L.age_home;
    out.person.gender = L.female ? Gender::Female : Gender::Male;
    out.person.nationality = L.non_german ? Nationality::NonGerman : Nationality::German;

    // Static observations: education, school, residence.
    const int entry_year = out.person.birth_year + 18;
    {
        const double e = L.a_edu + rng.normal(0.0, 0.35);
        const int edu = e < -1.0 ? 0 : (e < -0.3 ? 1 : (e < 0.4 ? 2 : (e < 1.0 ? 3 : (e < 1.6 ? 4 : 5))));
        out.person.education_observations.push_back(
            {Date(entry_year, 1 + static_cast<unsigned>(rng.uniform_int(12)), 15), edu});
        if (rng.uniform() < 0.55 && edu < kNumEducationLevels - 1) {
            out.person.education_observations.push_back(
                {Date(entry_year + 3 + static_cast<int>(rng.uniform_int(4)), 6, 1), edu + 1});
        }
        // Occasional inconsistent later report of a lower level.
        if (rng.uniform() < 0.15 && edu > 0) {
            out.person.education_observations.push_back(
                {Date(entry_year + 8 + static_cast<int>(rng.uniform_int(4)), 3, 1), edu - 1});
        }
        const double s = L.a_edu + rng.normal(0.0, 0.40);
        const int school =
            s < -1.2 ? 0 : (s < -0.6 ? 1 : (s < -0.1 ? 2 : (s < 0.3 ? 3 : (s < 0.5 ? 4 : (s < 1.55 ? 5 : 6)))));
        out.person.school_observations.push_back(
            {Date(entry_year - 1, 7, 1 + static_cast<unsigned>(rng.uniform_int(28))), school});
    }
    {
        const int state = static_cast<int>(rng.uniform_int(kNumStates));
        out.person.residence_moves.push_back({Date(entry_year, 1, 2), state});
        const int extra = L.a_frail > 0.8 ? static_cast<int>(rng.uniform_int(3))
                                          : static_cast<int>(rng.uniform_int(2));
        for (int m = 0; m < extra; ++m) {
            const int move_year = entry_year + 2 + static_cast<int>(rng.uniform_int(
                                                       std::max(1, L.age_home - 20)));
            out.person.residence_moves.push_back(
                {Date(move_year, 1 + static_cast<unsigned>(rng.uniform_int(12)), 10),
                 static_cast<int>(rng.uniform_int(kNumStates))});
        }
    }

    const int home_industry = draw_industry(rng);
    const bool never_employed = rng.uniform() < 0.08;
    // Observable-history depth; short histories mean sparse features.
    const double richness = (L.non_german ? cfg.risk.shift_history : 0.0) +
                            cfg.risk.history_edu_coupling * L.a_edu +
                            rng.normal(0.0, 0.6);
    const int history_span_days =
        static_cast<int>((1.5 + 11.0 * sigmoid(richness)) * 365.25);

    // Pre-entry history anchored backwards from the first episode (or from
    // the home year if no episode survived the window).
    const Date anchor = draft.episodes.empty() ? Date(L.home_year, 1, 1) : draft.episodes[0].start;
    {
        int n_jobs = never_employed
                         ? 0
                         : static_cast<int>(std::clamp(
                               std::lround(2.5 - 1.0 * L.a_stab + 1.2 * rng.uniform()), 1L, 7L));
        int n_pre_unemp = static_cast<int>(
            std::clamp(std::lround(0.9 + 1.1 * L.a_frail + 0.8 * rng.uniform()), 0L, 4L));
        Date cursor = anchor - (1 + static_cast<int>(std::min(120.0, rng.exponential(1.0 / 25.0))));
        Date earliest(out.person.birth_year + 18, 1, 1);
        if (anchor - history_span_days > earliest) earliest = anchor - history_span_days;
        // Historic unemployment stays strictly before the observation
        // window (and clear of the first episode by more than the merge
        // tolerance), so it can never surface as an extra labeled spell.
        const Date unemp_limit =
            std::min(anchor, Date(cfg.year_start, 1, 1)) - 60;
        for (int jb = 0; jb < n_jobs && cursor > earliest; ++jb) {
            const int dur = static_cast<int>(
                std::clamp(std::exp(rng.normal(5.3 + 0.55 * L.a_stab, 0.6)), 30.0, 2800.0));
            Date end = cursor;
            Date start = end - (dur - 1);
            if (start < earliest) start = earliest;
            out.records.push_back(make_employment(pid, start, end, L, home_industry, rng));
            cursor = start - (10 + static_cast<int>(std::min(200.0, rng.exponential(1.0 / 60.0))));
            if (n_pre_unemp > 0 && rng.uniform() < 0.6) {
                Date u_end = cursor;
                if (u_end > unemp_limit) u_end = unemp_limit;
                const int udur = static_cast<int>(
                    std::clamp(std::exp(rng.normal(4.3 + 0.3 * L.a_frail, 0.7)), 20.0, 350.0));
                Date u_start = u_end - (udur - 1);
                if (u_start > earliest && u_end >= u_start) {
                    emit_unemployment_cluster(out.records, pid, u_start, u_end, L, rng);
                    --n_pre_unemp;
                    cursor = u_start - (45 + static_cast<int>(std::min(150.0, rng.exponential(1.0 / 40.0))));
                }
            }
        }
    }

    // Labels, durations and in-window records need the calibrated intercept.
    const Date window_end(cfg.year_end, 12, 31);
    for (std::size_t e = 0; e < draft.episodes.size(); ++e) {
        const auto& plan = draft.episodes[e];
        const double p = sigmoid(plan.eta + delta);
        const std::uint8_t y = rng.uniform() < p ? 1 : 0;
        int duration;
        if (y) {
            duration = 366 + static_cast<int>(std::min(480.0, rng.exponential(1.0 / 140.0)));
        } else {
            duration = static_cast<int>(
                std::clamp(std::exp(rng.normal(4.35, 0.85)), 12.0, 360.0));
        }
        const Date end = plan.start + (duration - 1);
        emit_unemployment_cluster(out.records, pid, plan.start, end, L, rng);

        SynthEpisodeTruth t;
        t.person_index = index;
        t.year = plan.start.year();
        t.start = plan.start;
        t.duration_days = duration;
        t.y = y;
        t.latent_p = p;
        t.female = L.female ? 1 : 0;
        t.non_german = L.non_german ? 1 : 0;
        out.truth.push_back(t);

        // Continued long-term benefit receipt after an LTU spell.
        if (y && rng.uniform() < 0.5) {
            RawRecord lt;
            lt.person_id = pid;
            lt.type = RecordType::BenefitLongTerm;
            lt.start = end + 1;
            lt.end = end + 1 + static_cast<int>(std::min(420.0, rng.exponential(1.0 / 180.0)));
            out.records.push_back(lt);
        }
        // Re-employment until the next episode (or past the labeling
        // horizon after the last one).
        if (!never_employed && rng.uniform() < 0.75) {
            const Date emp_start = end + 1 + static_cast<int>(rng.uniform_int(60));
            Date emp_end;
            if (e + 1 < draft.episodes.size()) {
                emp_end = draft.episodes[e + 1].start - (1 + static_cast<int>(rng.uniform_int(30)));
            } else {
                const int dur = static_cast<int>(
                    std::clamp(std::exp(rng.normal(5.3 + 0.55 * L.a_stab, 0.6)), 60.0, 2800.0));
                emp_end = emp_start + dur;
            }
            if (emp_end >= emp_start) {
                out.records.push_back(
                    make_employment(pid, emp_start, emp_end, L, home_industry, rng));
            }
        }
    }

    // Corpus coverage record: person 0 carries one employment record that
    // ends past the labeling horizon, so the censor window check never
    // depends on which random episodes ran long.
    if (index == 0) {
        RawRecord cover;
        cover.person_id = pid;
        cover.type = RecordType::Employment;
        cover.start = window_end + 1;
        cover.end = window_end + 400;
        out.records.push_back(cover);
    }
    return out;
}

}  // namespace

SynthResult generate(const SynthConfig& config) {
    config.validate();
    const auto n = config.n_persons;

    // Calibration pass: latent logits only.
    std::vector<std::vector<double>> etas(n);
    parallel_for(n, [&](std::size_t i) {
        Rng rng(sub_seed(config.seed, i));
        const auto draft = draw_person_plan(config, static_cast<std::uint32_t>(i), rng);
        etas[i].reserve(draft.episodes.size());
        for (const auto& ep : draft.episodes) etas[i].push_back(ep.eta);
    });
    std::vector<double> all_etas;
    for (const auto& v : etas) all_etas.insert(all_etas.end(), v.begin(), v.end());
    if (all_etas.empty()) throw DataError("synthgen: no episodes generated, widen the year range");

    double delta = 0.0;
    if (config.calibrate_intercept) {
        auto mean_rate = [&](double d) {
            double s = 0.0;
            for (double e : all_etas) s += sigmoid(e + d);
            return s / static_cast<double>(all_etas.size());
        };
        double lo = -30.0, hi = 30.0;
        if (mean_rate(lo) > config.target_ltu_rate || mean_rate(hi) < config.target_ltu_rate) {
            throw DataError("synthgen: target LTU rate " + format_double(config.target_ltu_rate) +
                            " unreachable under the configured risk model");
        }
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mean_rate(mid) < config.target_ltu_rate) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        delta = 0.5 * (lo + hi);
    }

    std::vector<PersonOutput> outputs(n);
    parallel_for(n, [&](std::size_t i) {
        outputs[i] = generate_person(config, static_cast<std::uint32_t>(i), delta);
    });

    SynthResult result;
    result.intercept_adjustment = delta;
    std::size_t n_records = 0, n_truth = 0;
    for (const auto& o : outputs) {
        n_records += o.records.size();
        n_truth += o.truth.size();
    }
    result.records.reserve(n_records);
    result.persons.reserve(n);
    result.truth.reserve(n_truth);
    for (auto& o : outputs) {
        result.records.insert(result.records.end(), o.records.begin(), o.records.end());
        result.persons.push_back(std::move(o.person));
        result.truth.insert(result.truth.end(), o.truth.begin(), o.truth.end());
    }
    std::sort(result.records.begin(), result.records.end(),
              [](const RawRecord& a, const RawRecord& b) {
                  if (a.person_id != b.person_id) return a.person_id < b.person_id;
                  if (a.start != b.start) return a.start < b.start;
                  if (a.end != b.end) return a.end < b.end;
                  return static_cast<int>(a.type) < static_cast<int>(b.type);
              });

    std::size_t ltu = 0, fem = 0, ng = 0, ngm = 0, ngf = 0;
    for (const auto& t : result.truth) {
        ltu += t.y;
        fem += t.female;
        ng += t.non_german;
        if (t.non_german && !t.female) ++ngm;
        if (t.non_german && t.female) ++ngf;
    }
    const double total = static_cast<double>(result.truth.size());
    result.realized_ltu_rate = static_cast<double>(ltu) / total;
    result.realized_prevalence["female"] = static_cast<double>(fem) / total;
    result.realized_prevalence["non_german"] = static_cast<double>(ng) / total;
    result.realized_prevalence["non_german_male"] = static_cast<double>(ngm) / total;
    result.realized_prevalence["non_german_female"] = static_cast<double>(ngf) / total;
    return result;
}

SynthResult generate_to_files(const SynthConfig& config, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    SynthResult result = generate(config);
    const std::string base = out_dir + "/";
    write_records_csv(base + "records.csv", result.records);
    write_persons_csv(base + "persons.csv", base + "education.csv", base + "moves.csv",
                      result.persons);
    {
        CsvWriter w(base + "truth.csv");
        w.write_row({"person_id", "year", "start_date", "duration_days", "y_ltu", "latent_p",
                     "female", "non_german"});
        for (const auto& t : result.truth) {
            w.write_row({make_person_id(t.person_index), std::to_string(t.year),
                         t.start.to_iso(), std::to_string(t.duration_days), std::to_string(t.y),
                         format_double(t.latent_p), std::to_string(t.female),
                         std::to_string(t.non_german)});
        }
        w.close();
    }
    return result;
}

}  // namespace ltuprof
