#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "ltuprof/dataset.hpp"
#include "ltuprof/episode_store.hpp"
#include "ltuprof/fairness.hpp"
#include "ltuprof/metrics.hpp"
#include "ltuprof/records.hpp"

namespace ltuprof {

// Turns one unemployment spell plus the person's earlier records into a
// prediction row. Only information dated at or before spell entry is used:
// records starting later are dropped, straddling records are clipped at the
// entry date, and the unemployment-family records that form the spell itself
// are excluded from history aggregates.

struct FeatureConfig {
    bool sociodemo = true;
    bool history = true;
    bool last_job = true;
    // Upper cut points for "days since last ..." buckets; a final open
    // bucket and a "never" flag are added automatically.
    std::vector<int> days_since_buckets = {180, 365, 730};
    // School level at or above this counts as high education.
    int high_school_level = 5;
    int base_year = 2015;
    std::map<int, double> deflator;  // year -> price index; empty = identity

    std::string to_json() const;
    static FeatureConfig from_json(const std::string& text);
};

struct FeatureSchema {
    std::vector<std::string> names;
    std::vector<std::string> groups;  // parallel to names

    std::size_t size() const { return names.size(); }
    // Index of a named feature; throws DataError if absent.
    std::size_t index_of(const std::string& name) const;
    void build_index();

  private:
    std::map<std::string, std::size_t> index_;
};

FeatureSchema make_schema(const FeatureConfig& cfg);

struct ProtectedAttributes {
    bool female = false;
    bool non_german = false;

    bool non_german_female() const { return female && non_german; }
    bool non_german_male() const { return !female && non_german; }
};

struct EpisodeRow {
    std::string person_id;
    std::string spell_id;
    int year = 0;
    std::vector<double> x;
    ProtectedAttributes s;
    std::uint8_t y = 0;
    bool high_education = false;
};

// Group-level partial builders; each fills only its own columns of `out`.
void sociodemo_features(const PersonStatic& person, Date as_of, const FeatureConfig& cfg,
                        const FeatureSchema& schema, std::span<double> out);
void history_aggregates(const std::vector<RawRecord>& clipped_history, double age_years,
                        Date as_of, const FeatureConfig& cfg, const FeatureSchema& schema,
                        std::span<double> out);
void last_job_features(const std::vector<RawRecord>& clipped_history, const FeatureConfig& cfg,
                       const FeatureSchema& schema, std::span<double> out);

// History visible at spell entry: records starting after entry are dropped,
// ends are clipped to entry, and unemployment-family records overlapping the
// spell interval are removed.
std::vector<RawRecord> visible_history(const std::vector<RawRecord>& person_records,
                                       const UnemploymentSpell& spell);

EpisodeRow build_row(const std::vector<RawRecord>& person_records, const PersonStatic& person,
                     const UnemploymentSpell& spell, const FeatureConfig& cfg,
                     const FeatureSchema& schema);

struct EpisodeDataset {
    FeatureSchema schema;
    std::vector<EpisodeRow> rows;

    FeatureMatrix to_matrix() const;
    std::vector<std::uint8_t> labels() const;
    std::vector<int> years() const;
    std::vector<std::uint8_t> high_education_mask() const;
    GroupColumns group_columns() const;
    GroupMasks group_masks() const;
};

// Canonical audited group order: female, non_german, non_german_male,
// non_german_female.
extern const std::vector<std::string> kGroupNames;

// records must be sorted by (person_id, start); spells grouped per person.
EpisodeDataset build_dataset(const std::vector<RawRecord>& records,
                             const std::map<std::string, PersonStatic>& persons,
                             const std::vector<UnemploymentSpell>& spells,
                             const FeatureConfig& cfg);

void write_rows_csv(const std::string& rows_path, const std::string& schema_path,
                    const EpisodeDataset& data, const FeatureConfig& cfg);
EpisodeDataset read_rows_csv(const std::string& rows_path, const std::string& schema_path);

}  // namespace ltuprof
