#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "ltuprof/common.hpp"
#include "ltuprof/features.hpp"
#include "ltuprof/rng.hpp"

using namespace ltuprof;

namespace {

RawRecord rec(const std::string& pid, RecordType t, const std::string& start,
              const std::string& end) {
    RawRecord r;
    r.person_id = pid;
    r.type = t;
    r.start = Date::parse_iso(start);
    r.end = Date::parse_iso(end);
    return r;
}

PersonStatic person(const std::string& pid, int birth_year, Gender g, Nationality nat) {
    PersonStatic p;
    p.person_id = pid;
    p.birth_year = birth_year;
    p.gender = g;
    p.nationality = nat;
    p.school_observations.push_back({Date(birth_year + 17, 7, 1), 3});
    return p;
}

UnemploymentSpell spell(const std::string& pid, const std::string& start, const std::string& end) {
    UnemploymentSpell s;
    s.person_id = pid;
    s.spell_id = pid + "#0";
    s.start = Date::parse_iso(start);
    s.end = Date::parse_iso(end);
    s.duration_days = s.end - s.start + 1;
    s.y_ltu = s.duration_days > 365 ? 1 : 0;
    s.year = s.start.year();
    return s;
}

double get(const EpisodeRow& row, const FeatureSchema& schema, const std::string& name) {
    return row.x[schema.index_of(name)];
}

}  // namespace

TEST_CASE("feature schema covers the three groups and builds deterministically") {
    FeatureConfig cfg;
    const auto schema = make_schema(cfg);
    CHECK(schema.size() > 100);
    std::set<std::string> groups(schema.groups.begin(), schema.groups.end());
    CHECK(groups == std::set<std::string>{"sociodemo", "history", "last_job"});
    // no protected attribute leaks into the feature namespace
    for (const auto& name : schema.names) {
        CHECK(name.find("female") == std::string::npos);
        CHECK(name.find("gender") == std::string::npos);
        CHECK(name.find("german") == std::string::npos);
        CHECK(name.find("nationality") == std::string::npos);
    }
    // group toggles shrink the schema
    FeatureConfig no_lastjob = cfg;
    no_lastjob.last_job = false;
    CHECK(make_schema(no_lastjob).size() < schema.size());
}

TEST_CASE("no prior employment: last-job block is missing-flagged") {
    FeatureConfig cfg;
    const auto schema = make_schema(cfg);
    const auto p = person("p1", 1980, Gender::Male, Nationality::German);
    std::vector<RawRecord> history = {rec("p1", RecordType::Unemployment, "2014-01-01", "2014-03-01")};
    const auto s = spell("p1", "2015-06-01", "2015-08-01");
    const auto row = build_row(history, p, s, cfg, schema);
    CHECK(get(row, schema, "no_prior_job") == 1.0);
    CHECK(get(row, schema, "last_job_wage_missing") == 1.0);
    CHECK(get(row, schema, "last_job_industry_missing") == 1.0);
    CHECK(get(row, schema, "last_job_part_time_missing") == 1.0);
    CHECK(get(row, schema, "last_job_days") == 0.0);
    CHECK(get(row, schema, "days_since_last_employment_never") == 1.0);
}

TEST_CASE("records after spell entry contribute to no feature") {
    FeatureConfig cfg;
    const auto schema = make_schema(cfg);
    const auto p = person("p1", 1975, Gender::Female, Nationality::German);
    std::vector<RawRecord> history = {
        rec("p1", RecordType::Employment, "2010-01-01", "2013-12-31"),
        rec("p1", RecordType::Unemployment, "2014-02-01", "2014-04-01"),
    };
    const auto s = spell("p1", "2015-06-01", "2015-09-01");
    const auto base_row = build_row(history, p, s, cfg, schema);

    SUBCASE("future record is ignored entirely") {
        auto with_future = history;
        auto future = rec("p1", RecordType::Employment, "2015-06-02", "2016-06-01");
        future.daily_wage = 500.0;
        future.industry = 5;
        with_future.push_back(future);
        const auto row = build_row(with_future, p, s, cfg, schema);
        CHECK(row.x == base_row.x);
    }
    SUBCASE("perturbing the end of a straddling record changes nothing") {
        auto straddle = history;
        straddle.push_back(rec("p1", RecordType::BenefitLongTerm, "2015-01-01", "2015-12-31"));
        const auto row_a = build_row(straddle, p, s, cfg, schema);
        straddle.back().end = Date::parse_iso("2016-12-31");
        const auto row_b = build_row(straddle, p, s, cfg, schema);
        CHECK(row_a.x == row_b.x);
        // ... and the straddling record itself is visible up to entry
        CHECK(get(row_a, schema, "active_6w_before_benefit_long_term") == 1.0);
    }
}

TEST_CASE("history aggregates: three prior unemployment spells of 10/20/30 days") {
    FeatureConfig cfg;
    const auto schema = make_schema(cfg);
    const auto p = person("p1", 1980, Gender::Male, Nationality::NonGerman);
    std::vector<RawRecord> history = {
        rec("p1", RecordType::Unemployment, "2011-01-01", "2011-01-10"),  // 10 days
        rec("p1", RecordType::Unemployment, "2012-01-01", "2012-01-20"),  // 20 days
        rec("p1", RecordType::Unemployment, "2013-01-01", "2013-01-30"),  // 30 days
    };
    const auto s = spell("p1", "2015-06-01", "2015-08-01");
    const auto row = build_row(history, p, s, cfg, schema);
    CHECK(get(row, schema, "n_unemployment") == 3.0);
    CHECK(get(row, schema, "total_days_unemployment") == 60.0);
    CHECK(get(row, schema, "mean_days_unemployment") == 20.0);
    CHECK(get(row, schema, "mean_days_unemployment_missing") == 0.0);
    // the current spell's own records never count as history
    CHECK(get(row, schema, "n_job_seeking") == 0.0);
}

TEST_CASE("degenerate aggregates carry missing indicators, not silent zeros") {
    FeatureConfig cfg;
    const auto schema = make_schema(cfg);
    const auto p = person("p1", 1980, Gender::Male, Nationality::German);
    std::vector<RawRecord> history;
    const auto s = spell("p1", "2015-06-01", "2015-08-01");
    const auto row = build_row(history, p, s, cfg, schema);
    CHECK(get(row, schema, "n_benefit_long_term") == 0.0);
    CHECK(get(row, schema, "total_days_benefit_long_term") == 0.0);
    CHECK(get(row, schema, "mean_days_benefit_long_term") == 0.0);
    CHECK(get(row, schema, "mean_days_benefit_long_term_missing") == 1.0);
    CHECK(get(row, schema, "no_info_6w_before") == 1.0);
    CHECK(get(row, schema, "industry_most_worked_none") == 1.0);
}

TEST_CASE("education takes the highest level observed at or before entry") {
    FeatureConfig cfg;
    const auto schema = make_schema(cfg);
    auto p = person("p1", 1980, Gender::Female, Nationality::German);
    p.education_observations = {
        {Date(2011, 5, 1), 2}, {Date(2013, 5, 1), 4}, {Date(2014, 5, 1), 3}};
    const auto s = spell("p1", "2015-06-01", "2015-08-01");
    const auto row = build_row({}, p, s, cfg, schema);
    CHECK(get(row, schema, "education_level_4") == 1.0);
    CHECK(get(row, schema, "education_level_3") == 0.0);
    CHECK(get(row, schema, "education_missing") == 0.0);

    SUBCASE("a single observation is used as-is") {
        p.education_observations = {{Date(2012, 1, 1), 1}};
        const auto r2 = build_row({}, p, s, cfg, schema);
        CHECK(get(r2, schema, "education_level_1") == 1.0);
    }
    SUBCASE("observations after entry do not count") {
        p.education_observations = {{Date(2012, 1, 1), 1}, {Date(2015, 7, 1), 5}};
        const auto r2 = build_row({}, p, s, cfg, schema);
        CHECK(get(r2, schema, "education_level_1") == 1.0);
        CHECK(get(r2, schema, "education_level_5") == 0.0);
    }
    SUBCASE("no observation sets the missing indicator") {
        p.education_observations.clear();
        const auto r2 = build_row({}, p, s, cfg, schema);
        CHECK(get(r2, schema, "education_missing") == 1.0);
    }
    SUBCASE("randomized observation sets equal a max-scan oracle") {
        Rng rng(81);
        for (int rep = 0; rep < 30; ++rep) {
            p.education_observations.clear();
            const int k = static_cast<int>(rng.uniform_int(6));
            int expected = -1;
            for (int i = 0; i < k; ++i) {
                DatedLevel o{Date(2008 + static_cast<int>(rng.uniform_int(10)), 3, 1),
                             static_cast<int>(rng.uniform_int(kNumEducationLevels))};
                p.education_observations.push_back(o);
                if (o.date <= s.start) expected = std::max(expected, o.level);
            }
            const auto r2 = build_row({}, p, s, cfg, schema);
            if (expected < 0) {
                CHECK(get(r2, schema, "education_missing") == 1.0);
            } else {
                CHECK(get(r2, schema, "education_level_" + std::to_string(expected)) == 1.0);
            }
        }
    }
}

TEST_CASE("age-scaled totals use age in days") {
    FeatureConfig cfg;
    const auto schema = make_schema(cfg);
    const auto p = person("p1", 1975, Gender::Male, Nationality::German);  // age 40 in 2015
    std::vector<RawRecord> history = {
        rec("p1", RecordType::JobSeeking, "2011-01-01", "2011-12-31"),  // 365 days
        rec("p1", RecordType::JobSeeking, "2013-01-01", "2013-12-31"),  // 365 days
    };
    const auto s = spell("p1", "2015-06-01", "2015-08-01");
    const auto row = build_row(history, p, s, cfg, schema);
    CHECK(get(row, schema, "total_days_job_seeking") == 730.0);
    CHECK(get(row, schema, "total_days_job_seeking_per_age") ==
          doctest::Approx(730.0 / (40.0 * 365.25)).epsilon(1e-12));
}

TEST_CASE("status six weeks before entry") {
    FeatureConfig cfg;
    const auto schema = make_schema(cfg);
    const auto p = person("p1", 1980, Gender::Male, Nationality::German);
    const auto s = spell("p1", "2015-06-01", "2015-08-01");
    const Date probe = s.start - 42;

    std::vector<RawRecord> history = {
        rec("p1", RecordType::Employment, (probe - 100).to_iso(), probe.to_iso())};
    auto row = build_row(history, p, s, cfg, schema);
    CHECK(get(row, schema, "active_6w_before_employment") == 1.0);
    CHECK(get(row, schema, "no_info_6w_before") == 0.0);

    // one day short of covering the probe date
    history = {rec("p1", RecordType::Employment, (probe - 100).to_iso(), (probe - 1).to_iso())};
    row = build_row(history, p, s, cfg, schema);
    CHECK(get(row, schema, "active_6w_before_employment") == 0.0);
    CHECK(get(row, schema, "no_info_6w_before") == 1.0);
}

TEST_CASE("last job features") {
    FeatureConfig cfg;
    cfg.base_year = 2015;
    const auto schema = make_schema(cfg);
    const auto p = person("p1", 1980, Gender::Male, Nationality::German);
    const auto s = spell("p1", "2015-06-01", "2015-08-01");

    SUBCASE("identity deflator keeps the wage") {
        auto job = rec("p1", RecordType::Employment, "2014-01-01", "2014-06-30");
        job.daily_wage = 100.0;
        const auto row = build_row({job}, p, s, cfg, schema);
        CHECK(get(row, schema, "last_job_wage_deflated") == 100.0);
        CHECK(get(row, schema, "last_job_days") == 181.0);
    }
    SUBCASE("recency rule picks the later of two jobs") {
        auto early = rec("p1", RecordType::Employment, "2010-01-01", "2011-01-01");
        early.industry = 2;
        early.daily_wage = 50.0;
        auto late = rec("p1", RecordType::Employment, "2013-01-01", "2013-06-01");
        late.industry = 7;
        late.daily_wage = 80.0;
        const auto row = build_row({early, late}, p, s, cfg, schema);
        CHECK(get(row, schema, "last_job_industry_7") == 1.0);
        CHECK(get(row, schema, "last_job_industry_2") == 0.0);
        CHECK(get(row, schema, "last_job_wage_deflated") == 80.0);
    }
    SUBCASE("deflator scales by base over record-year index") {
        cfg.deflator = {{2013, 105.0}, {2014, 105.0}, {2015, 100.0}};
        auto job = rec("p1", RecordType::Employment, "2014-01-01", "2014-06-30");
        job.daily_wage = 100.0;
        const auto row = build_row({job}, p, s, cfg, schema);
        CHECK(get(row, schema, "last_job_wage_deflated") ==
              doctest::Approx(100.0 * 100.0 / 105.0).epsilon(1e-12));
    }
    SUBCASE("tri-state pairs are never contradictory") {
        auto job = rec("p1", RecordType::Employment, "2014-01-01", "2014-06-30");
        job.part_time = TriState::Missing;
        job.fixed_term = TriState::Yes;
        job.temp_work = TriState::No;
        const auto row = build_row({job}, p, s, cfg, schema);
        CHECK(get(row, schema, "last_job_part_time_missing") == 1.0);
        CHECK(get(row, schema, "last_job_part_time") == 0.0);  // neutral default
        CHECK(get(row, schema, "last_job_fixed_term") == 1.0);
        CHECK(get(row, schema, "last_job_fixed_term_missing") == 0.0);
        CHECK(get(row, schema, "last_job_temp_work") == 0.0);
        CHECK(get(row, schema, "last_job_temp_work_missing") == 0.0);
    }
}

TEST_CASE("rows are deterministic under record input order") {
    FeatureConfig cfg;
    const auto schema = make_schema(cfg);
    const auto p = person("p1", 1982, Gender::Female, Nationality::NonGerman);
    Rng rng(82);
    std::vector<RawRecord> history;
    for (int i = 0; i < 12; ++i) {
        auto r = rec("p1", static_cast<RecordType>(rng.uniform_int(kNumRecordTypes)),
                     "2010-01-01", "2010-01-01");
        r.start = Date(2008, 1, 1) + static_cast<int>(rng.uniform_int(2000));
        r.end = r.start + static_cast<int>(rng.uniform_int(400));
        if (is_employment_family(r.type)) {
            r.daily_wage = 40.0 + rng.uniform() * 60.0;
            r.industry = static_cast<int>(rng.uniform_int(kNumIndustries));
        }
        history.push_back(std::move(r));
    }
    const auto s = spell("p1", "2015-06-01", "2015-08-01");
    const auto base_row = build_row(history, p, s, cfg, schema);
    for (int rep = 0; rep < 5; ++rep) {
        auto shuffled = history;
        for (std::size_t i = shuffled.size(); i > 1; --i) {
            std::swap(shuffled[i - 1], shuffled[rng.uniform_int(i)]);
        }
        const auto row = build_row(shuffled, p, s, cfg, schema);
        CHECK(row.x == base_row.x);
    }
}

TEST_CASE("protected attributes live outside x and the spell owner is checked") {
    FeatureConfig cfg;
    const auto schema = make_schema(cfg);
    const auto p_f = person("p1", 1980, Gender::Female, Nationality::NonGerman);
    auto p_m = p_f;
    p_m.gender = Gender::Male;
    p_m.nationality = Nationality::German;
    const auto s = spell("p1", "2015-06-01", "2015-08-01");
    const auto row_f = build_row({}, p_f, s, cfg, schema);
    const auto row_m = build_row({}, p_m, s, cfg, schema);
    CHECK(row_f.x == row_m.x);  // S does not touch X
    CHECK(row_f.s.female);
    CHECK(row_f.s.non_german);
    CHECK(row_f.s.non_german_female());
    CHECK_FALSE(row_m.s.female);

    const auto other = person("p2", 1980, Gender::Male, Nationality::German);
    CHECK_THROWS_AS(build_row({}, other, s, cfg, schema), DataError);
}

TEST_CASE("high education flag follows the configured school level") {
    FeatureConfig cfg;
    cfg.high_school_level = 5;
    const auto schema = make_schema(cfg);
    auto p = person("p1", 1980, Gender::Male, Nationality::German);
    const auto s = spell("p1", "2015-06-01", "2015-08-01");
    p.school_observations = {{Date(1997, 7, 1), 5}};
    CHECK(build_row({}, p, s, cfg, schema).high_education);
    p.school_observations = {{Date(1997, 7, 1), 4}};
    CHECK_FALSE(build_row({}, p, s, cfg, schema).high_education);
}

TEST_CASE("rows csv round trip preserves schema and values") {
    FeatureConfig cfg;
    const auto schema = make_schema(cfg);
    EpisodeDataset data;
    data.schema = schema;
    const auto p = person("p1", 1980, Gender::Female, Nationality::German);
    auto job = rec("p1", RecordType::Employment, "2013-01-01", "2014-06-30");
    job.daily_wage = 77.25;
    job.industry = 3;
    data.rows.push_back(build_row({job}, p, spell("p1", "2015-06-01", "2015-08-01"), cfg, schema));
    data.rows.push_back(build_row({job}, p, spell("p1", "2016-06-01", "2016-07-01"), cfg, schema));

    namespace fs = std::filesystem;
    const std::string rows_path = (fs::temp_directory_path() / "ltuprof_rows.csv").string();
    const std::string schema_path = (fs::temp_directory_path() / "ltuprof_rows.schema.json").string();
    write_rows_csv(rows_path, schema_path, data, cfg);
    const auto back = read_rows_csv(rows_path, schema_path);
    REQUIRE(back.rows.size() == 2);
    CHECK(back.schema.names == schema.names);
    CHECK(back.rows[0].x == data.rows[0].x);
    CHECK(back.rows[1].year == 2016);
    CHECK(back.rows[0].s.female);
    std::remove(rows_path.c_str());
    std::remove(schema_path.c_str());
}
