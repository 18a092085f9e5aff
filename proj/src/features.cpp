#include "ltuprof/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "ltuprof/common.hpp"
#include "ltuprof/csv.hpp"

namespace ltuprof {

using json = nlohmann::ordered_json;

const std::vector<std::string> kGroupNames = {"female", "non_german", "non_german_male",
                                              "non_german_female"};

std::string FeatureConfig::to_json() const {
    json j;
    j["sociodemo"] = sociodemo;
    j["history"] = history;
    j["last_job"] = last_job;
    j["days_since_buckets"] = days_since_buckets;
    j["high_school_level"] = high_school_level;
    j["base_year"] = base_year;
    json defl = json::object();
    for (const auto& [year, index] : deflator) defl[std::to_string(year)] = index;
    j["deflator"] = defl;
    return j.dump(2) + "\n";
}

FeatureConfig FeatureConfig::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw DataError(std::string("feature config: invalid JSON: ") + e.what());
    }
    FeatureConfig cfg;
    cfg.sociodemo = j.value("sociodemo", true);
    cfg.history = j.value("history", true);
    cfg.last_job = j.value("last_job", true);
    if (j.contains("days_since_buckets")) {
        cfg.days_since_buckets = j["days_since_buckets"].get<std::vector<int>>();
    }
    cfg.high_school_level = j.value("high_school_level", 5);
    cfg.base_year = j.value("base_year", 2015);
    if (j.contains("deflator")) {
        for (const auto& [key, value] : j["deflator"].items()) {
            cfg.deflator[std::stoi(key)] = value.get<double>();
        }
    }
    return cfg;
}

std::size_t FeatureSchema::index_of(const std::string& name) const {
    if (!index_.empty()) {
        const auto it = index_.find(name);
        if (it == index_.end()) {
            throw DataError("feature schema: no feature named '" + name + "'");
        }
        return it->second;
    }
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw DataError("feature schema: no feature named '" + name + "'");
    return static_cast<std::size_t>(it - names.begin());
}

void FeatureSchema::build_index() {
    index_.clear();
    for (std::size_t i = 0; i < names.size(); ++i) index_[names[i]] = i;
}

namespace {

void add(FeatureSchema& s, const std::string& group, const std::string& name) {
    s.names.push_back(name);
    s.groups.push_back(group);
}

std::vector<std::string> record_type_keys() {
    std::vector<std::string> keys;
    for (int t = 0; t < kNumRecordTypes; ++t) {
        keys.push_back(record_type_name(static_cast<RecordType>(t)));
    }
    return keys;
}

void add_bucket_names(FeatureSchema& s, const std::string& group, const std::string& stem,
                      const std::vector<int>& cuts) {
    for (std::size_t b = 0; b < cuts.size(); ++b) {
        add(s, group, stem + "_le_" + std::to_string(cuts[b]));
    }
    add(s, group, stem + "_gt_" + std::to_string(cuts.back()));
    add(s, group, stem + "_never");
}

}  // namespace

FeatureSchema make_schema(const FeatureConfig& cfg) {
    FeatureSchema s;
    if (cfg.sociodemo) {
        const std::string g = "sociodemo";
        add(s, g, "age_years");
        for (int l = 0; l < kNumEducationLevels; ++l) {
            add(s, g, "education_level_" + std::to_string(l));
        }
        add(s, g, "education_missing");
        for (int l = 0; l < kNumSchoolLevels; ++l) add(s, g, "school_level_" + std::to_string(l));
        add(s, g, "school_missing");
        for (int st = 0; st < kNumStates; ++st) add(s, g, "state_" + std::to_string(st));
        add(s, g, "state_missing");
        add(s, g, "n_moves");
    }
    if (cfg.history) {
        const std::string g = "history";
        for (const auto& key : record_type_keys()) {
            add(s, g, "n_" + key);
            add(s, g, "total_days_" + key);
            add(s, g, "mean_days_" + key);
            add(s, g, "mean_days_" + key + "_missing");
            add(s, g, "total_days_" + key + "_per_age");
        }
        for (const auto& key : record_type_keys()) add(s, g, "active_6w_before_" + key);
        add(s, g, "no_info_6w_before");
        for (int ind = 0; ind < kNumIndustries; ++ind) {
            add(s, g, "industry_most_worked_" + std::to_string(ind));
        }
        add(s, g, "industry_most_worked_none");
        add_bucket_names(s, g, "days_since_last_employment", cfg.days_since_buckets);
        add_bucket_names(s, g, "days_since_last_unemployment", cfg.days_since_buckets);
        add(s, g, "total_days_part_time");
        add(s, g, "total_days_fixed_term");
        add(s, g, "total_days_temp_work");
        add(s, g, "total_days_more_than_one_job");
        for (int l = 0; l < kNumSkillLevels; ++l) add(s, g, "max_skill_level_" + std::to_string(l));
        add(s, g, "max_skill_missing");
    }
    if (cfg.last_job) {
        const std::string g = "last_job";
        add(s, g, "no_prior_job");
        add(s, g, "last_job_days");
        add(s, g, "last_job_wage_deflated");
        add(s, g, "last_job_wage_missing");
        for (int ind = 0; ind < kNumIndustries; ++ind) {
            add(s, g, "last_job_industry_" + std::to_string(ind));
        }
        add(s, g, "last_job_industry_missing");
        add(s, g, "last_job_part_time");
        add(s, g, "last_job_part_time_missing");
        add(s, g, "last_job_fixed_term");
        add(s, g, "last_job_fixed_term_missing");
        add(s, g, "last_job_temp_work");
        add(s, g, "last_job_temp_work_missing");
        for (int l = 0; l < kNumSkillLevels; ++l) {
            add(s, g, "last_job_skill_" + std::to_string(l));
        }
        add(s, g, "last_job_skill_missing");
        add(s, g, "last_job_more_than_one_job");
    }
    s.build_index();
    return s;
}

namespace {

int record_days(const RawRecord& r) { return r.end - r.start + 1; }

void set(const FeatureSchema& schema, std::span<double> out, const std::string& name, double v) {
    out[schema.index_of(name)] = v;
}

void set_bucketed(const FeatureSchema& schema, std::span<double> out, const std::string& stem,
                  const std::vector<int>& cuts, std::optional<int> days) {
    if (!days) {
        set(schema, out, stem + "_never", 1.0);
        return;
    }
    for (int cut : cuts) {
        if (*days <= cut) {
            set(schema, out, stem + "_le_" + std::to_string(cut), 1.0);
            return;
        }
    }
    set(schema, out, stem + "_gt_" + std::to_string(cuts.back()), 1.0);
}

}  // namespace

void sociodemo_features(const PersonStatic& person, Date as_of, const FeatureConfig& cfg,
                        const FeatureSchema& schema, std::span<double> out) {
    if (!cfg.sociodemo) return;
    set(schema, out, "age_years", static_cast<double>(as_of.year() - person.birth_year));

    // Education: highest level observed at or before entry.
    int best_edu = -1;
    for (const auto& o : person.education_observations) {
        if (o.date <= as_of) best_edu = std::max(best_edu, o.level);
    }
    if (best_edu >= 0) {
        set(schema, out, "education_level_" + std::to_string(best_edu), 1.0);
    } else {
        set(schema, out, "education_missing", 1.0);
    }

    int best_school = -1;
    for (const auto& o : person.school_observations) {
        if (o.date <= as_of) best_school = std::max(best_school, o.level);
    }
    if (best_school >= 0) {
        set(schema, out, "school_level_" + std::to_string(best_school), 1.0);
    } else {
        set(schema, out, "school_missing", 1.0);
    }

    // State: most recent observation; moves: count observed so far.
    int state = -1;
    int n_moves = 0;
    for (const auto& o : person.residence_moves) {
        if (o.date <= as_of) {
            state = o.level;
            ++n_moves;
        }
    }
    if (state >= 0) {
        set(schema, out, "state_" + std::to_string(state), 1.0);
    } else {
        set(schema, out, "state_missing", 1.0);
    }
    set(schema, out, "n_moves", static_cast<double>(n_moves));
}

void history_aggregates(const std::vector<RawRecord>& clipped_history, double age_years,
                        Date as_of, const FeatureConfig& cfg, const FeatureSchema& schema,
                        std::span<double> out) {
    if (!cfg.history) return;
    if (!(age_years > 0.0)) throw DataError("history_aggregates: age must be positive");
    const double age_days = age_years * 365.25;

    for (int t = 0; t < kNumRecordTypes; ++t) {
        const auto type = static_cast<RecordType>(t);
        const std::string key = record_type_name(type);
        int count = 0;
        double total = 0.0;
        for (const auto& r : clipped_history) {
            if (r.type != type) continue;
            ++count;
            total += record_days(r);
        }
        set(schema, out, "n_" + key, count);
        set(schema, out, "total_days_" + key, total);
        if (count > 0) {
            set(schema, out, "mean_days_" + key, total / count);
        } else {
            set(schema, out, "mean_days_" + key + "_missing", 1.0);
        }
        set(schema, out, "total_days_" + key + "_per_age", total / age_days);
    }

    // Status exactly six weeks before entry.
    const Date six_weeks_before = as_of - kDefaultGapToleranceDays;
    bool any_active = false;
    for (int t = 0; t < kNumRecordTypes; ++t) {
        const auto type = static_cast<RecordType>(t);
        bool active = false;
        for (const auto& r : clipped_history) {
            if (r.type == type && r.start <= six_weeks_before && six_weeks_before <= r.end) {
                active = true;
                break;
            }
        }
        if (active) {
            set(schema, out, "active_6w_before_" + std::string(record_type_name(type)), 1.0);
            any_active = true;
        }
    }
    if (!any_active) set(schema, out, "no_info_6w_before", 1.0);

    // Industry with the most employment days; ties to the lowest index.
    double industry_days[kNumIndustries] = {};
    bool any_industry = false;
    for (const auto& r : clipped_history) {
        if (is_employment_family(r.type) && r.industry) {
            industry_days[*r.industry] += record_days(r);
            any_industry = true;
        }
    }
    if (any_industry) {
        int best = 0;
        for (int ind = 1; ind < kNumIndustries; ++ind) {
            if (industry_days[ind] > industry_days[best]) best = ind;
        }
        set(schema, out, "industry_most_worked_" + std::to_string(best), 1.0);
    } else {
        set(schema, out, "industry_most_worked_none", 1.0);
    }

    std::optional<int> since_employment, since_unemployment;
    for (const auto& r : clipped_history) {
        if (is_employment_family(r.type)) {
            const int d = as_of - r.end;
            if (!since_employment || d < *since_employment) since_employment = d;
        } else if (r.type == RecordType::Unemployment) {
            const int d = as_of - r.end;
            if (!since_unemployment || d < *since_unemployment) since_unemployment = d;
        }
    }
    set_bucketed(schema, out, "days_since_last_employment", cfg.days_since_buckets,
                 since_employment);
    set_bucketed(schema, out, "days_since_last_unemployment", cfg.days_since_buckets,
                 since_unemployment);

    double part_time = 0.0, fixed_term = 0.0, temp_work = 0.0, multi_job = 0.0;
    int max_skill = -1;
    for (const auto& r : clipped_history) {
        if (!is_employment_family(r.type)) continue;
        const double days = record_days(r);
        if (r.part_time == TriState::Yes) part_time += days;
        if (r.fixed_term == TriState::Yes) fixed_term += days;
        if (r.temp_work == TriState::Yes) temp_work += days;
        if (r.more_than_one_job && *r.more_than_one_job) multi_job += days;
        if (r.skill_level) max_skill = std::max(max_skill, *r.skill_level);
    }
    set(schema, out, "total_days_part_time", part_time);
    set(schema, out, "total_days_fixed_term", fixed_term);
    set(schema, out, "total_days_temp_work", temp_work);
    set(schema, out, "total_days_more_than_one_job", multi_job);
    if (max_skill >= 0) {
        set(schema, out, "max_skill_level_" + std::to_string(max_skill), 1.0);
    } else {
        set(schema, out, "max_skill_missing", 1.0);
    }
}

void last_job_features(const std::vector<RawRecord>& clipped_history, const FeatureConfig& cfg,
                       const FeatureSchema& schema, std::span<double> out) {
    if (!cfg.last_job) return;
    const RawRecord* last = nullptr;
    for (const auto& r : clipped_history) {
        if (!is_employment_family(r.type)) continue;
        if (!last || r.end > last->end || (r.end == last->end && r.start > last->start)) {
            last = &r;
        }
    }
    if (!last) {
        set(schema, out, "no_prior_job", 1.0);
        set(schema, out, "last_job_wage_missing", 1.0);
        set(schema, out, "last_job_industry_missing", 1.0);
        set(schema, out, "last_job_part_time_missing", 1.0);
        set(schema, out, "last_job_fixed_term_missing", 1.0);
        set(schema, out, "last_job_temp_work_missing", 1.0);
        set(schema, out, "last_job_skill_missing", 1.0);
        return;
    }
    set(schema, out, "last_job_days", record_days(*last));
    if (last->daily_wage) {
        double wage = *last->daily_wage;
        if (!cfg.deflator.empty()) {
            const int year = last->start.year();
            const auto base = cfg.deflator.find(cfg.base_year);
            const auto cur = cfg.deflator.find(year);
            if (base == cfg.deflator.end()) {
                throw DataError("deflator table misses base year " + std::to_string(cfg.base_year));
            }
            if (cur == cfg.deflator.end()) {
                throw DataError("deflator table misses year " + std::to_string(year));
            }
            wage *= base->second / cur->second;
        }
        set(schema, out, "last_job_wage_deflated", wage);
    } else {
        set(schema, out, "last_job_wage_missing", 1.0);
    }
    if (last->industry) {
        set(schema, out, "last_job_industry_" + std::to_string(*last->industry), 1.0);
    } else {
        set(schema, out, "last_job_industry_missing", 1.0);
    }
    auto tri = [&](TriState v, const std::string& stem) {
        if (v == TriState::Missing) {
            set(schema, out, stem + "_missing", 1.0);
        } else {
            set(schema, out, stem, v == TriState::Yes ? 1.0 : 0.0);
        }
    };
    tri(last->part_time, "last_job_part_time");
    tri(last->fixed_term, "last_job_fixed_term");
    tri(last->temp_work, "last_job_temp_work");
    if (last->skill_level) {
        set(schema, out, "last_job_skill_" + std::to_string(*last->skill_level), 1.0);
    } else {
        set(schema, out, "last_job_skill_missing", 1.0);
    }
    if (last->more_than_one_job && *last->more_than_one_job) {
        set(schema, out, "last_job_more_than_one_job", 1.0);
    }
}

std::vector<RawRecord> visible_history(const std::vector<RawRecord>& person_records,
                                       const UnemploymentSpell& spell) {
    std::vector<RawRecord> out;
    for (const auto& r : person_records) {
        if (r.start > spell.start) continue;
        const bool unemployment_family = r.type == RecordType::Unemployment ||
                                         r.type == RecordType::JobSeeking ||
                                         r.type == RecordType::ProgramParticipation;
        if (unemployment_family && r.end >= spell.start && r.start <= spell.end) continue;
        RawRecord clipped = r;
        if (clipped.end > spell.start) clipped.end = spell.start;
        out.push_back(std::move(clipped));
    }
    return out;
}

EpisodeRow build_row(const std::vector<RawRecord>& person_records, const PersonStatic& person,
                     const UnemploymentSpell& spell, const FeatureConfig& cfg,
                     const FeatureSchema& schema) {
    if (person.person_id != spell.person_id) {
        throw DataError("build_row: spell " + spell.spell_id + " does not belong to person " +
                        person.person_id);
    }
    for (const auto& r : person_records) {
        if (r.person_id != person.person_id) {
            throw DataError("build_row: record for '" + r.person_id + "' in history of '" +
                            person.person_id + "'");
        }
    }
    EpisodeRow row;
    row.person_id = person.person_id;
    row.spell_id = spell.spell_id;
    row.year = spell.year;
    row.y = static_cast<std::uint8_t>(spell.y_ltu);
    row.s.female = person.gender == Gender::Female;
    row.s.non_german = person.nationality == Nationality::NonGerman;

    int best_school = -1;
    for (const auto& o : person.school_observations) {
        if (o.date <= spell.start) best_school = std::max(best_school, o.level);
    }
    row.high_education = best_school >= cfg.high_school_level;

    const auto history = visible_history(person_records, spell);
    row.x.assign(schema.size(), 0.0);
    sociodemo_features(person, spell.start, cfg, schema, row.x);
    const double age_years = static_cast<double>(spell.year - person.birth_year);
    history_aggregates(history, age_years, spell.start, cfg, schema, row.x);
    last_job_features(history, cfg, schema, row.x);
    return row;
}

FeatureMatrix EpisodeDataset::to_matrix() const {
    FeatureMatrix m;
    m.n_rows = rows.size();
    m.n_cols = schema.size();
    m.names = schema.names;
    m.values.resize(m.n_rows * m.n_cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::copy(rows[i].x.begin(), rows[i].x.end(), m.values.begin() + i * m.n_cols);
    }
    return m;
}

std::vector<std::uint8_t> EpisodeDataset::labels() const {
    std::vector<std::uint8_t> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.y);
    return out;
}

std::vector<int> EpisodeDataset::years() const {
    std::vector<int> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.year);
    return out;
}

std::vector<std::uint8_t> EpisodeDataset::high_education_mask() const {
    std::vector<std::uint8_t> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.high_education ? 1 : 0);
    return out;
}

GroupColumns EpisodeDataset::group_columns() const {
    GroupColumns cols;
    cols.year.reserve(rows.size());
    cols.female.reserve(rows.size());
    cols.non_german.reserve(rows.size());
    for (const auto& r : rows) {
        cols.year.push_back(r.year);
        cols.female.push_back(r.s.female ? 1 : 0);
        cols.non_german.push_back(r.s.non_german ? 1 : 0);
    }
    return cols;
}

GroupMasks EpisodeDataset::group_masks() const {
    GroupMasks masks;
    masks.names = kGroupNames;
    masks.unprivileged.assign(4, std::vector<std::uint8_t>(rows.size(), 0));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        masks.unprivileged[0][i] = rows[i].s.female ? 1 : 0;
        masks.unprivileged[1][i] = rows[i].s.non_german ? 1 : 0;
        masks.unprivileged[2][i] = rows[i].s.non_german_male() ? 1 : 0;
        masks.unprivileged[3][i] = rows[i].s.non_german_female() ? 1 : 0;
    }
    return masks;
}

EpisodeDataset build_dataset(const std::vector<RawRecord>& records,
                             const std::map<std::string, PersonStatic>& persons,
                             const std::vector<UnemploymentSpell>& spells,
                             const FeatureConfig& cfg) {
    EpisodeDataset data;
    data.schema = make_schema(cfg);

    // Index record ranges per person (records are sorted by person).
    std::map<std::string, std::pair<std::size_t, std::size_t>> ranges;
    std::size_t i = 0;
    while (i < records.size()) {
        std::size_t j = i;
        while (j < records.size() && records[j].person_id == records[i].person_id) ++j;
        ranges[records[i].person_id] = {i, j};
        i = j;
    }

    data.rows.reserve(spells.size());
    for (const auto& spell : spells) {
        const auto pit = persons.find(spell.person_id);
        if (pit == persons.end()) {
            throw DataError("build_dataset: no person record for '" + spell.person_id + "'");
        }
        const auto rit = ranges.find(spell.person_id);
        std::vector<RawRecord> person_records;
        if (rit != ranges.end()) {
            person_records.assign(records.begin() + static_cast<std::ptrdiff_t>(rit->second.first),
                                  records.begin() + static_cast<std::ptrdiff_t>(rit->second.second));
        }
        data.rows.push_back(build_row(person_records, pit->second, spell, cfg, data.schema));
    }
    return data;
}

void write_rows_csv(const std::string& rows_path, const std::string& schema_path,
                    const EpisodeDataset& data, const FeatureConfig& cfg) {
    {
        json j;
        j["config"] = json::parse(cfg.to_json());
        j["config_hash"] = hex64(fnv1a64(cfg.to_json()));
        json cols = json::array();
        for (std::size_t k = 0; k < data.schema.size(); ++k) {
            cols.push_back({{"name", data.schema.names[k]}, {"group", data.schema.groups[k]}});
        }
        j["columns"] = std::move(cols);
        std::ofstream out(schema_path, std::ios::binary);
        if (!out) throw DataError("cannot write " + schema_path);
        out << j.dump(2) << "\n";
    }
    CsvWriter w(rows_path);
    std::vector<std::string> header = {"person_id", "spell_id",   "year",          "y_ltu",
                                       "female",    "non_german", "high_education"};
    header.insert(header.end(), data.schema.names.begin(), data.schema.names.end());
    w.write_row(header);
    std::vector<std::string> fields;
    for (const auto& r : data.rows) {
        fields.clear();
        fields.push_back(r.person_id);
        fields.push_back(r.spell_id);
        fields.push_back(std::to_string(r.year));
        fields.push_back(std::to_string(static_cast<int>(r.y)));
        fields.push_back(r.s.female ? "1" : "0");
        fields.push_back(r.s.non_german ? "1" : "0");
        fields.push_back(r.high_education ? "1" : "0");
        for (double v : r.x) fields.push_back(format_double(v));
        w.write_row(fields);
    }
    w.close();
}

EpisodeDataset read_rows_csv(const std::string& rows_path, const std::string& schema_path) {
    EpisodeDataset data;
    {
        std::ifstream in(schema_path, std::ios::binary);
        if (!in) throw DataError("cannot open " + schema_path);
        json j;
        try {
            in >> j;
        } catch (const std::exception& e) {
            throw DataError(std::string("schema sidecar: invalid JSON: ") + e.what());
        }
        for (const auto& col : j.at("columns")) {
            data.schema.names.push_back(col.at("name").get<std::string>());
            data.schema.groups.push_back(col.at("group").get<std::string>());
        }
        data.schema.build_index();
    }
    CsvReader reader(rows_path);
    std::vector<std::string> expect = {"person_id", "spell_id",   "year",          "y_ltu",
                                       "female",    "non_german", "high_education"};
    expect.insert(expect.end(), data.schema.names.begin(), data.schema.names.end());
    reader.require_header(expect);
    std::vector<std::string> f;
    while (reader.next(f)) {
        const std::size_t line = reader.line_number();
        if (f.size() != expect.size()) {
            throw DataError("line " + std::to_string(line) + ": field count mismatch");
        }
        EpisodeRow r;
        r.person_id = f[0];
        r.spell_id = f[1];
        r.year = parse_int_field(f[2], "year", line);
        r.y = static_cast<std::uint8_t>(parse_int_field(f[3], "y_ltu", line));
        r.s.female = f[4] == "1";
        r.s.non_german = f[5] == "1";
        r.high_education = f[6] == "1";
        r.x.reserve(data.schema.size());
        for (std::size_t k = 7; k < f.size(); ++k) {
            r.x.push_back(parse_double_field(f[k], "feature", line));
        }
        data.rows.push_back(std::move(r));
    }
    return data;
}

}  // namespace ltuprof
