#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ltuprof/dates.hpp"

namespace ltuprof {

enum class RecordType {
    Employment,
    Unemployment,
    JobSeeking,
    BenefitShortTerm,
    BenefitLongTerm,
    ProgramParticipation,
    SubsidizedEmployment,
};

constexpr int kNumRecordTypes = 7;

const char* record_type_name(RecordType t);
std::optional<RecordType> parse_record_type(const std::string& s);

// Employment and SubsidizedEmployment carry job attributes; other types must
// leave them empty.
bool is_employment_family(RecordType t);

enum class TriState { No = 0, Yes = 1, Missing = 2 };

constexpr int kNumIndustries = 14;
constexpr int kNumSkillLevels = 4;
constexpr int kNumEducationLevels = 6;
constexpr int kNumSchoolLevels = 7;
constexpr int kNumStates = 16;

// One dated labor-market episode line for one person.
struct RawRecord {
    std::string person_id;
    RecordType type = RecordType::Unemployment;
    Date start;
    Date end;

    std::optional<double> daily_wage;
    std::optional<int> industry;  // 0..13
    TriState part_time = TriState::Missing;
    TriState fixed_term = TriState::Missing;
    TriState temp_work = TriState::Missing;
    std::optional<int> skill_level;  // 0..3
    std::optional<bool> more_than_one_job;
};

enum class Gender { Male, Female };
enum class Nationality { German, NonGerman };

struct DatedLevel {
    Date date;
    int level = 0;
};

struct PersonStatic {
    std::string person_id;
    int birth_year = 0;
    Gender gender = Gender::Male;
    Nationality nationality = Nationality::German;
    std::vector<DatedLevel> education_observations;  // levels 0..5, ordered
    std::vector<DatedLevel> school_observations;     // levels 0..6, ordered
    std::vector<DatedLevel> residence_moves;         // level = state 0..15
};

struct UnemploymentSpell {
    std::string person_id;
    std::string spell_id;
    Date start;
    Date end;
    int duration_days = 0;  // end - start + 1
    int y_ltu = 0;
    int year = 0;  // calendar year of start
};

}  // namespace ltuprof
