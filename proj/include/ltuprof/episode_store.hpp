#pragma once

#include <map>
#include <string>
#include <vector>

#include "ltuprof/records.hpp"

namespace ltuprof {

// Continuous registered unemployment for more than one year.
constexpr int kLtuThresholdDays = 365;
// "Up to six weeks" of interruption keeps a spell alive; gap <= 42 merges.
constexpr int kDefaultGapToleranceDays = 42;
constexpr int kDefaultHorizonDays = 365;

struct IngestReject {
    std::size_t line = 0;
    std::string reason;
};

struct IngestResult {
    std::vector<RawRecord> records;  // sorted by (person_id, start, end, type)
    std::vector<IngestReject> rejects;
};

// Record CSV schema (External interface; empty field = missing).
extern const std::vector<std::string> kRecordCsvHeader;
extern const std::vector<std::string> kPersonCsvHeader;
extern const std::vector<std::string> kEducationCsvHeader;
extern const std::vector<std::string> kMoveCsvHeader;
extern const std::vector<std::string> kSpellCsvHeader;

IngestResult ingest_records(const std::string& records_csv_path);
void write_records_csv(const std::string& path, const std::vector<RawRecord>& records);

// Person-static data: persons.csv plus long-format education and move files
// (either path may be empty when that information is absent).
std::map<std::string, PersonStatic> ingest_persons(const std::string& persons_csv_path,
                                                   const std::string& education_csv_path,
                                                   const std::string& moves_csv_path);
void write_persons_csv(const std::string& persons_path, const std::string& education_path,
                       const std::string& moves_path,
                       const std::vector<PersonStatic>& persons);

// Merges one person's unemployment-family records into spells. Unemployment
// records seed spells; JobSeeking records that run parallel to a program or
// to unemployment, and ProgramParticipation records, act as bridge material
// that keeps a spell alive across gaps of up to gap_tolerance_days. A fused
// interval with no unemployment record in it is not a spell.
std::vector<UnemploymentSpell> merge_unemployment_spells(
    const std::vector<RawRecord>& person_records,
    int gap_tolerance_days = kDefaultGapToleranceDays);

// Spells for a whole corpus, grouped by person internally; spell_ids are
// "<person_id>#<k>" with k counting that person's spells in date order.
std::vector<UnemploymentSpell> merge_all_spells(const std::vector<RawRecord>& records,
                                                int gap_tolerance_days = kDefaultGapToleranceDays);

int label_ltu(const UnemploymentSpell& spell);

// Keeps spells starting inside [window_start, window_end]. Requires the
// record corpus to extend at least horizon_days past window_end so every
// kept spell could be labeled without right-censoring.
std::vector<UnemploymentSpell> censor_window(const std::vector<UnemploymentSpell>& spells,
                                             const std::vector<RawRecord>& records,
                                             Date window_start, Date window_end,
                                             int horizon_days = kDefaultHorizonDays);

void write_spells_csv(const std::string& path, const std::vector<UnemploymentSpell>& spells);
std::vector<UnemploymentSpell> read_spells_csv(const std::string& path);

}  // namespace ltuprof
