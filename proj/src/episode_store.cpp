#include "ltuprof/episode_store.hpp"

#include <algorithm>
#include <cassert>

#include "ltuprof/common.hpp"
#include "ltuprof/csv.hpp"

namespace ltuprof {

const char* record_type_name(RecordType t) {
    switch (t) {
        case RecordType::Employment: return "employment";
        case RecordType::Unemployment: return "unemployment";
        case RecordType::JobSeeking: return "job_seeking";
        case RecordType::BenefitShortTerm: return "benefit_short_term";
        case RecordType::BenefitLongTerm: return "benefit_long_term";
        case RecordType::ProgramParticipation: return "program_participation";
        case RecordType::SubsidizedEmployment: return "subsidized_employment";
    }
    return "?";
}

std::optional<RecordType> parse_record_type(const std::string& s) {
    for (int i = 0; i < kNumRecordTypes; ++i) {
        const auto t = static_cast<RecordType>(i);
        if (s == record_type_name(t)) return t;
    }
    return std::nullopt;
}

bool is_employment_family(RecordType t) {
    return t == RecordType::Employment || t == RecordType::SubsidizedEmployment;
}

const std::vector<std::string> kRecordCsvHeader = {
    "person_id", "record_type", "start_date",  "end_date",    "daily_wage",        "industry",
    "part_time", "fixed_term",  "temp_work",   "skill_level", "more_than_one_job"};
const std::vector<std::string> kPersonCsvHeader = {"person_id", "birth_year", "gender",
                                                   "nationality"};
const std::vector<std::string> kEducationCsvHeader = {"person_id", "date", "kind", "level"};
const std::vector<std::string> kMoveCsvHeader = {"person_id", "date", "state"};
const std::vector<std::string> kSpellCsvHeader = {
    "person_id", "spell_id", "start_date", "end_date", "duration_days", "y_ltu", "year"};

namespace {

std::string tri_to_field(TriState t) {
    switch (t) {
        case TriState::Yes: return "yes";
        case TriState::No: return "no";
        case TriState::Missing: return "";
    }
    return "";
}

TriState tri_from_field(const std::string& s, const std::string& what, std::size_t line) {
    if (s.empty()) return TriState::Missing;
    if (s == "yes") return TriState::Yes;
    if (s == "no") return TriState::No;
    throw DataError("line " + std::to_string(line) + ": bad " + what + " '" + s +
                    "' (expect yes/no/empty)");
}

void sort_records(std::vector<RawRecord>& records) {
    std::sort(records.begin(), records.end(), [](const RawRecord& a, const RawRecord& b) {
        if (a.person_id != b.person_id) return a.person_id < b.person_id;
        if (a.start != b.start) return a.start < b.start;
        if (a.end != b.end) return a.end < b.end;
        return static_cast<int>(a.type) < static_cast<int>(b.type);
    });
}

RawRecord parse_record_row(const std::vector<std::string>& f, std::size_t line) {
    if (f.size() != kRecordCsvHeader.size()) {
        throw DataError("line " + std::to_string(line) + ": expected " +
                        std::to_string(kRecordCsvHeader.size()) + " fields, got " +
                        std::to_string(f.size()));
    }
    RawRecord r;
    r.person_id = f[0];
    if (r.person_id.empty()) throw DataError("line " + std::to_string(line) + ": empty person_id");
    const auto type = parse_record_type(f[1]);
    if (!type) {
        throw DataError("line " + std::to_string(line) + ": unknown record_type '" + f[1] + "'");
    }
    r.type = *type;
    try {
        r.start = Date::parse_iso(f[2]);
        r.end = Date::parse_iso(f[3]);
    } catch (const DataError& e) {
        throw DataError("line " + std::to_string(line) + ": " + e.what());
    }
    if (r.start > r.end) {
        throw DataError("line " + std::to_string(line) + ": start_date " + f[2] +
                        " after end_date " + f[3]);
    }
    const bool employmentish = is_employment_family(r.type);
    const bool has_attrs = !f[4].empty() || !f[5].empty() || !f[6].empty() || !f[7].empty() ||
                           !f[8].empty() || !f[9].empty() || !f[10].empty();
    if (has_attrs && !employmentish) {
        throw DataError("line " + std::to_string(line) + ": job attributes not allowed on " +
                        std::string(record_type_name(r.type)) + " record");
    }
    if (!f[4].empty()) {
        const double w = parse_double_field(f[4], "daily_wage", line);
        if (w < 0.0) throw DataError("line " + std::to_string(line) + ": negative daily_wage");
        r.daily_wage = w;
    }
    if (!f[5].empty()) {
        const int ind = parse_int_field(f[5], "industry", line);
        if (ind < 0 || ind >= kNumIndustries) {
            throw DataError("line " + std::to_string(line) + ": industry out of range 0.." +
                            std::to_string(kNumIndustries - 1));
        }
        r.industry = ind;
    }
    r.part_time = tri_from_field(f[6], "part_time", line);
    r.fixed_term = tri_from_field(f[7], "fixed_term", line);
    r.temp_work = tri_from_field(f[8], "temp_work", line);
    if (!f[9].empty()) {
        const int sk = parse_int_field(f[9], "skill_level", line);
        if (sk < 0 || sk >= kNumSkillLevels) {
            throw DataError("line " + std::to_string(line) + ": skill_level out of range 0.." +
                            std::to_string(kNumSkillLevels - 1));
        }
        r.skill_level = sk;
    }
    if (!f[10].empty()) {
        if (f[10] == "1") {
            r.more_than_one_job = true;
        } else if (f[10] == "0") {
            r.more_than_one_job = false;
        } else {
            throw DataError("line " + std::to_string(line) + ": bad more_than_one_job '" + f[10] +
                            "' (expect 1/0/empty)");
        }
    }
    return r;
}

}  // namespace

IngestResult ingest_records(const std::string& records_csv_path) {
    CsvReader reader(records_csv_path);
    reader.require_header(kRecordCsvHeader);
    IngestResult out;
    std::vector<std::string> fields;
    while (reader.next(fields)) {
        try {
            out.records.push_back(parse_record_row(fields, reader.line_number()));
        } catch (const DataError& e) {
            out.rejects.push_back({reader.line_number(), e.what()});
        }
    }
    sort_records(out.records);
    return out;
}

void write_records_csv(const std::string& path, const std::vector<RawRecord>& records) {
    std::vector<RawRecord> sorted = records;
    sort_records(sorted);
    CsvWriter w(path);
    w.write_row(kRecordCsvHeader);
    for (const auto& r : sorted) {
        w.write_row({r.person_id, record_type_name(r.type), r.start.to_iso(), r.end.to_iso(),
                     r.daily_wage ? format_double(*r.daily_wage) : "",
                     r.industry ? std::to_string(*r.industry) : "", tri_to_field(r.part_time),
                     tri_to_field(r.fixed_term), tri_to_field(r.temp_work),
                     r.skill_level ? std::to_string(*r.skill_level) : "",
                     r.more_than_one_job ? std::string(*r.more_than_one_job ? "1" : "0") : ""});
    }
    w.close();
}

std::map<std::string, PersonStatic> ingest_persons(const std::string& persons_csv_path,
                                                   const std::string& education_csv_path,
                                                   const std::string& moves_csv_path) {
    std::map<std::string, PersonStatic> out;
    {
        CsvReader reader(persons_csv_path);
        reader.require_header(kPersonCsvHeader);
        std::vector<std::string> f;
        while (reader.next(f)) {
            const std::size_t line = reader.line_number();
            if (f.size() != 4) throw DataError("line " + std::to_string(line) + ": bad person row");
            PersonStatic p;
            p.person_id = f[0];
            p.birth_year = parse_int_field(f[1], "birth_year", line);
            if (f[2] == "male") {
                p.gender = Gender::Male;
            } else if (f[2] == "female") {
                p.gender = Gender::Female;
            } else {
                throw DataError("line " + std::to_string(line) + ": bad gender '" + f[2] + "'");
            }
            if (f[3] == "german") {
                p.nationality = Nationality::German;
            } else if (f[3] == "non_german") {
                p.nationality = Nationality::NonGerman;
            } else {
                throw DataError("line " + std::to_string(line) + ": bad nationality '" + f[3] +
                                "'");
            }
            out[p.person_id] = std::move(p);
        }
    }
    if (!education_csv_path.empty()) {
        CsvReader reader(education_csv_path);
        reader.require_header(kEducationCsvHeader);
        std::vector<std::string> f;
        while (reader.next(f)) {
            const std::size_t line = reader.line_number();
            auto it = out.find(f[0]);
            if (it == out.end()) {
                throw DataError("line " + std::to_string(line) + ": unknown person '" + f[0] +
                                "' in education file");
            }
            DatedLevel obs{Date::parse_iso(f[1]), parse_int_field(f[3], "level", line)};
            if (f[2] == "education") {
                if (obs.level < 0 || obs.level >= kNumEducationLevels)
                    throw DataError("line " + std::to_string(line) + ": education level range");
                it->second.education_observations.push_back(obs);
            } else if (f[2] == "school") {
                if (obs.level < 0 || obs.level >= kNumSchoolLevels)
                    throw DataError("line " + std::to_string(line) + ": school level range");
                it->second.school_observations.push_back(obs);
            } else {
                throw DataError("line " + std::to_string(line) + ": bad kind '" + f[2] + "'");
            }
        }
    }
    if (!moves_csv_path.empty()) {
        CsvReader reader(moves_csv_path);
        reader.require_header(kMoveCsvHeader);
        std::vector<std::string> f;
        while (reader.next(f)) {
            const std::size_t line = reader.line_number();
            auto it = out.find(f[0]);
            if (it == out.end()) {
                throw DataError("line " + std::to_string(line) + ": unknown person '" + f[0] +
                                "' in moves file");
            }
            const int state = parse_int_field(f[2], "state", line);
            if (state < 0 || state >= kNumStates)
                throw DataError("line " + std::to_string(line) + ": state out of range");
            it->second.residence_moves.push_back({Date::parse_iso(f[1]), state});
        }
    }
    for (auto& [id, p] : out) {
        auto by_date = [](const DatedLevel& a, const DatedLevel& b) {
            return a.date != b.date ? a.date < b.date : a.level < b.level;
        };
        std::sort(p.education_observations.begin(), p.education_observations.end(), by_date);
        std::sort(p.school_observations.begin(), p.school_observations.end(), by_date);
        std::sort(p.residence_moves.begin(), p.residence_moves.end(), by_date);
    }
    return out;
}

void write_persons_csv(const std::string& persons_path, const std::string& education_path,
                       const std::string& moves_path, const std::vector<PersonStatic>& persons) {
    std::vector<const PersonStatic*> sorted;
    sorted.reserve(persons.size());
    for (const auto& p : persons) sorted.push_back(&p);
    std::sort(sorted.begin(), sorted.end(),
              [](const PersonStatic* a, const PersonStatic* b) { return a->person_id < b->person_id; });

    CsvWriter pw(persons_path);
    pw.write_row(kPersonCsvHeader);
    for (const auto* p : sorted) {
        pw.write_row({p->person_id, std::to_string(p->birth_year),
                      p->gender == Gender::Female ? "female" : "male",
                      p->nationality == Nationality::NonGerman ? "non_german" : "german"});
    }
    pw.close();

    CsvWriter ew(education_path);
    ew.write_row(kEducationCsvHeader);
    for (const auto* p : sorted) {
        for (const auto& o : p->education_observations) {
            ew.write_row({p->person_id, o.date.to_iso(), "education", std::to_string(o.level)});
        }
        for (const auto& o : p->school_observations) {
            ew.write_row({p->person_id, o.date.to_iso(), "school", std::to_string(o.level)});
        }
    }
    ew.close();

    CsvWriter mw(moves_path);
    mw.write_row(kMoveCsvHeader);
    for (const auto* p : sorted) {
        for (const auto& o : p->residence_moves) {
            mw.write_row({p->person_id, o.date.to_iso(), std::to_string(o.level)});
        }
    }
    mw.close();
}

namespace {

struct SpellInterval {
    Date start;
    Date end;
    bool material;  // contributes to spell bounds
    bool unemployment;
};

bool overlaps(const RawRecord& a, const RawRecord& b) {
    return a.start <= b.end && b.start <= a.end;
}

}  // namespace

std::vector<UnemploymentSpell> merge_unemployment_spells(
    const std::vector<RawRecord>& person_records, int gap_tolerance_days) {
    // Spell material: unemployment records, plus job-seeking records running
    // parallel (any overlap) to a program or to unemployment. Bare program
    // records glue gaps but never extend spell bounds.
    std::vector<SpellInterval> intervals;
    for (const auto& r : person_records) {
        switch (r.type) {
            case RecordType::Unemployment:
                intervals.push_back({r.start, r.end, true, true});
                break;
            case RecordType::ProgramParticipation:
                intervals.push_back({r.start, r.end, false, false});
                break;
            case RecordType::JobSeeking: {
                bool qualifies = false;
                for (const auto& other : person_records) {
                    if ((other.type == RecordType::ProgramParticipation ||
                         other.type == RecordType::Unemployment) &&
                        overlaps(r, other)) {
                        qualifies = true;
                        break;
                    }
                }
                if (qualifies) intervals.push_back({r.start, r.end, true, false});
                break;
            }
            default:
                break;
        }
    }
    if (intervals.empty()) return {};
    std::sort(intervals.begin(), intervals.end(), [](const SpellInterval& a, const SpellInterval& b) {
        return a.start != b.start ? a.start < b.start : a.end < b.end;
    });

    std::vector<UnemploymentSpell> spells;
    const std::string& person = person_records.front().person_id;

    Date cluster_end = intervals.front().end;
    bool has_unemp = false;
    bool has_material = false;
    Date mat_start, mat_end;

    auto flush = [&]() {
        if (has_unemp && has_material) {
            UnemploymentSpell s;
            s.person_id = person;
            s.start = mat_start;
            s.end = mat_end;
            s.duration_days = mat_end - mat_start + 1;
            s.y_ltu = s.duration_days > kLtuThresholdDays ? 1 : 0;
            s.year = mat_start.year();
            spells.push_back(std::move(s));
        }
        has_unemp = false;
        has_material = false;
    };

    auto absorb = [&](const SpellInterval& iv) {
        if (iv.end > cluster_end) cluster_end = iv.end;
        if (iv.material) {
            if (!has_material) {
                mat_start = iv.start;
                mat_end = iv.end;
                has_material = true;
            } else {
                if (iv.start < mat_start) mat_start = iv.start;
                if (iv.end > mat_end) mat_end = iv.end;
            }
        }
        if (iv.unemployment) has_unemp = true;
    };

    absorb(intervals.front());
    for (std::size_t i = 1; i < intervals.size(); ++i) {
        const auto& iv = intervals[i];
        const int gap = iv.start - cluster_end - 1;
        if (gap > gap_tolerance_days) {
            flush();
            cluster_end = iv.end;
        }
        absorb(iv);
    }
    flush();

    for (std::size_t i = 0; i < spells.size(); ++i) {
        spells[i].spell_id = person + "#" + std::to_string(i);
    }
    return spells;
}

std::vector<UnemploymentSpell> merge_all_spells(const std::vector<RawRecord>& records,
                                                int gap_tolerance_days) {
    std::vector<UnemploymentSpell> out;
    std::size_t i = 0;
    while (i < records.size()) {
        std::size_t j = i;
        while (j < records.size() && records[j].person_id == records[i].person_id) ++j;
        std::vector<RawRecord> group(records.begin() + static_cast<std::ptrdiff_t>(i),
                                     records.begin() + static_cast<std::ptrdiff_t>(j));
        auto spells = merge_unemployment_spells(group, gap_tolerance_days);
        out.insert(out.end(), spells.begin(), spells.end());
        i = j;
    }
    return out;
}

int label_ltu(const UnemploymentSpell& spell) {
    return spell.duration_days > kLtuThresholdDays ? 1 : 0;
}

std::vector<UnemploymentSpell> censor_window(const std::vector<UnemploymentSpell>& spells,
                                             const std::vector<RawRecord>& records,
                                             Date window_start, Date window_end,
                                             int horizon_days) {
    if (records.empty()) throw DataError("censor_window: no records");
    Date max_end = records.front().end;
    for (const auto& r : records) {
        if (r.end > max_end) max_end = r.end;
    }
    const Date needed = window_end + horizon_days;
    if (max_end < needed) {
        throw DataError("censor_window: records end at " + max_end.to_iso() +
                        " but labeling needs coverage through " + needed.to_iso() + " (" +
                        std::to_string(needed - max_end) + " days short)");
    }
    std::vector<UnemploymentSpell> kept;
    for (const auto& s : spells) {
        if (s.start >= window_start && s.start <= window_end) kept.push_back(s);
    }
    return kept;
}

void write_spells_csv(const std::string& path, const std::vector<UnemploymentSpell>& spells) {
    CsvWriter w(path);
    w.write_row(kSpellCsvHeader);
    for (const auto& s : spells) {
        w.write_row({s.person_id, s.spell_id, s.start.to_iso(), s.end.to_iso(),
                     std::to_string(s.duration_days), std::to_string(s.y_ltu),
                     std::to_string(s.year)});
    }
    w.close();
}

std::vector<UnemploymentSpell> read_spells_csv(const std::string& path) {
    CsvReader reader(path);
    reader.require_header(kSpellCsvHeader);
    std::vector<UnemploymentSpell> out;
    std::vector<std::string> f;
    while (reader.next(f)) {
        const std::size_t line = reader.line_number();
        UnemploymentSpell s;
        s.person_id = f[0];
        s.spell_id = f[1];
        s.start = Date::parse_iso(f[2]);
        s.end = Date::parse_iso(f[3]);
        s.duration_days = parse_int_field(f[4], "duration_days", line);
        s.y_ltu = parse_int_field(f[5], "y_ltu", line);
        s.year = parse_int_field(f[6], "year", line);
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace ltuprof
