#include "ltuprof/audit.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "ltuprof/common.hpp"
#include "ltuprof/csv.hpp"

namespace ltuprof {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

const char* penalty_name(PenaltyKind p) { return p == PenaltyKind::L1 ? "l1" : "l2"; }

const char* mf_name(MaxFeaturesRule r) {
    switch (r) {
        case MaxFeaturesRule::Sqrt: return "sqrt";
        case MaxFeaturesRule::Log2: return "log2";
        case MaxFeaturesRule::All: return "all";
    }
    return "?";
}

MaxFeaturesRule mf_parse(const std::string& s) {
    if (s == "sqrt") return MaxFeaturesRule::Sqrt;
    if (s == "log2") return MaxFeaturesRule::Log2;
    if (s == "all") return MaxFeaturesRule::All;
    throw DataError("run config: bad max_features '" + s + "'");
}

json hp_to_json(const HyperParams& hp) {
    json j;
    switch (hp.method) {
        case Method::LR: break;
        case Method::PLR:
            j["penalty"] = penalty_name(hp.plr.penalty);
            j["c"] = hp.plr.c;
            break;
        case Method::RF:
            j["max_features"] = mf_name(hp.rf.max_features);
            j["min_samples_leaf"] = hp.rf.min_samples_leaf;
            j["n_estimators"] = hp.rf.n_estimators;
            break;
        case Method::GBM:
            j["max_depth"] = hp.gbm.max_depth;
            j["max_features"] = mf_name(hp.gbm.max_features);
            j["n_estimators"] = hp.gbm.n_estimators;
            j["learning_rate"] = hp.gbm.learning_rate;
            j["subsample"] = hp.gbm.subsample;
            break;
    }
    return j;
}

HyperParams hp_from_json(Method m, const json& j) {
    HyperParams hp;
    hp.method = m;
    switch (m) {
        case Method::LR: break;
        case Method::PLR:
            hp.plr.penalty =
                j.value("penalty", std::string("l1")) == "l1" ? PenaltyKind::L1 : PenaltyKind::L2;
            hp.plr.c = j.value("c", 1.0);
            break;
        case Method::RF:
            hp.rf.max_features = mf_parse(j.value("max_features", std::string("sqrt")));
            hp.rf.min_samples_leaf = j.value("min_samples_leaf", 1);
            hp.rf.n_estimators = j.value("n_estimators", 500);
            break;
        case Method::GBM:
            hp.gbm.max_depth = j.value("max_depth", 3);
            hp.gbm.max_features = mf_parse(j.value("max_features", std::string("sqrt")));
            hp.gbm.n_estimators = j.value("n_estimators", 250);
            hp.gbm.learning_rate = j.value("learning_rate", 0.05);
            hp.gbm.subsample = j.value("subsample", 1.0);
            break;
    }
    return hp;
}

json policy_to_json(const Policy& p) {
    json j;
    j["name"] = p.name;
    if (p.kind == Policy::Kind::TopFraction) {
        j["kind"] = "top_fraction";
        j["q"] = p.q;
    } else {
        j["kind"] = "middle_band";
        j["upper_q"] = p.upper_q;
        j["lower_q"] = p.lower_q;
    }
    return j;
}

Policy policy_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    const std::string name = j.at("name").get<std::string>();
    if (kind == "top_fraction") return Policy::top_fraction(j.at("q").get<double>(), name);
    if (kind == "middle_band") {
        return Policy::middle_band(j.at("upper_q").get<double>(), j.at("lower_q").get<double>(),
                                   name);
    }
    throw DataError("run config: unknown policy kind '" + kind + "'");
}

std::string opt_field(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

template <typename Fn>
auto with_stage(const char* stage, Fn&& fn) {
    try {
        return fn();
    } catch (const UsageError& e) {
        throw UsageError(std::string(stage) + ": " + e.what());
    } catch (const DataError& e) {
        throw DataError(std::string(stage) + ": " + e.what());
    } catch (const NumericError& e) {
        throw NumericError(std::string(stage) + ": " + e.what());
    } catch (const std::exception& e) {
        throw NumericError(std::string(stage) + ": " + e.what());
    }
}

}  // namespace

std::string RunConfig::to_json() const {
    json j;
    j["seed"] = seed;
    if (synthetic) j["data"]["synthetic"] = json::parse(synthetic->to_json());
    if (ingest) {
        j["data"]["ingest"] = {{"records", ingest->records},
                               {"persons", ingest->persons},
                               {"education", ingest->education},
                               {"moves", ingest->moves}};
    }
    j["year_start"] = year_start;
    j["year_end"] = year_end;
    j["evaluation_year"] = evaluation_year;
    j["per_year_sample"] = per_year_sample;
    j["gap_tolerance_days"] = gap_tolerance_days;
    j["horizon_days"] = horizon_days;
    j["features"] = json::parse(features.to_json());
    json methods_json = json::array();
    for (auto m : methods) methods_json.push_back(method_name(m));
    j["methods"] = methods_json;
    json grids_json = json::object();
    for (const auto& [m, cells] : grids) {
        json arr = json::array();
        for (const auto& hp : cells) arr.push_back(hp_to_json(hp));
        grids_json[method_name(m)] = arr;
    }
    j["grids"] = grids_json;
    json hist = json::array();
    for (auto h : histories) hist.push_back(history_name(h));
    j["histories"] = hist;
    json pol = json::array();
    for (const auto& p : policies) pol.push_back(policy_to_json(p));
    j["policies"] = pol;
    j["sweep"] = {{"start", sweep_start}, {"stop", sweep_stop}, {"step", sweep_step}};
    j["consistency_neighbors"] = consistency_neighbors;
    j["consistency_scaled"] = consistency_scaled;
    j["histogram_bins"] = histogram_bins;
    return j.dump(2) + "\n";
}

RunConfig RunConfig::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw DataError(std::string("run config: invalid JSON: ") + e.what());
    }
    RunConfig cfg;
    if (!j.contains("seed")) throw DataError("run config: seed is mandatory");
    cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("data")) {
        const auto& d = j["data"];
        if (d.contains("synthetic")) {
            cfg.synthetic = SynthConfig::from_json(d["synthetic"].dump());
        }
        if (d.contains("ingest")) {
            IngestPaths p;
            p.records = d["ingest"].value("records", "");
            p.persons = d["ingest"].value("persons", "");
            p.education = d["ingest"].value("education", "");
            p.moves = d["ingest"].value("moves", "");
            cfg.ingest = p;
        }
    }
    cfg.year_start = j.value("year_start", 2010);
    cfg.year_end = j.value("year_end", 2016);
    cfg.evaluation_year = j.value("evaluation_year", cfg.year_end);
    cfg.per_year_sample = j.value("per_year_sample", static_cast<std::size_t>(20000));
    cfg.gap_tolerance_days = j.value("gap_tolerance_days", kDefaultGapToleranceDays);
    cfg.horizon_days = j.value("horizon_days", kDefaultHorizonDays);
    if (j.contains("features")) cfg.features = FeatureConfig::from_json(j["features"].dump());
    if (j.contains("methods")) {
        cfg.methods.clear();
        for (const auto& m : j["methods"]) {
            const auto parsed = parse_method(m.get<std::string>());
            if (!parsed) throw DataError("run config: unknown method '" + m.get<std::string>() + "'");
            cfg.methods.push_back(*parsed);
        }
    }
    if (j.contains("grids")) {
        for (const auto& [key, cells] : j["grids"].items()) {
            const auto m = parse_method(key);
            if (!m) throw DataError("run config: unknown grid method '" + key + "'");
            std::vector<HyperParams> grid;
            for (const auto& cell : cells) grid.push_back(hp_from_json(*m, cell));
            cfg.grids[*m] = std::move(grid);
        }
    }
    if (j.contains("histories")) {
        cfg.histories.clear();
        for (const auto& h : j["histories"]) {
            const std::string s = h.get<std::string>();
            if (s == "full") {
                cfg.histories.push_back(TrainingHistory::Full);
            } else if (s == "last_year_only") {
                cfg.histories.push_back(TrainingHistory::LastYearOnly);
            } else {
                throw DataError("run config: unknown history '" + s + "'");
            }
        }
    }
    if (j.contains("policies")) {
        cfg.policies.clear();
        for (const auto& p : j["policies"]) cfg.policies.push_back(policy_from_json(p));
    }
    if (j.contains("sweep")) {
        cfg.sweep_start = j["sweep"].value("start", 0.01);
        cfg.sweep_stop = j["sweep"].value("stop", 0.99);
        cfg.sweep_step = j["sweep"].value("step", 0.01);
    }
    cfg.consistency_neighbors = j.value("consistency_neighbors", static_cast<std::size_t>(5));
    cfg.consistency_scaled = j.value("consistency_scaled", true);
    cfg.histogram_bins = j.value("histogram_bins", 50);
    cfg.validate();
    return cfg;
}

void RunConfig::validate() const {
    if (synthetic.has_value() == ingest.has_value()) {
        throw DataError("run config: exactly one of data.synthetic / data.ingest required");
    }
    if (evaluation_year != year_end) {
        throw DataError("run config: evaluation_year must equal year_end");
    }
    if (year_start >= evaluation_year) {
        throw DataError("run config: need at least one training year before evaluation_year");
    }
    if (methods.empty()) throw DataError("run config: methods must not be empty");
    if (histories.empty()) throw DataError("run config: histories must not be empty");
    if (policies.empty()) throw DataError("run config: policies must not be empty");
    if (per_year_sample == 0) throw DataError("run config: per_year_sample must be positive");
    if (!(sweep_step > 0.0) || !(sweep_start > 0.0) || !(sweep_stop < 1.0) ||
        sweep_start > sweep_stop) {
        throw DataError("run config: bad sweep grid");
    }
}

std::uint64_t RunConfig::config_hash() const { return fnv1a64(to_json()); }

namespace {

// Tracks files created by the run; on failure everything is removed so a
// broken run leaves no partial bundle behind.
class OutputTransaction {
  public:
    std::string reg(const std::string& path) {
        created_.push_back(path);
        return path;
    }
    void commit() { committed_ = true; }
    ~OutputTransaction() {
        if (committed_) return;
        for (const auto& p : created_) {
            std::error_code ec;
            fs::remove(p, ec);
        }
    }

  private:
    std::vector<std::string> created_;
    bool committed_ = false;
};

struct ScoredModel {
    Method method = Method::LR;
    TrainingHistory history = TrainingHistory::Full;
    std::vector<double> eval_scores;
};

void write_grid_report(const std::string& path, const std::vector<GridReportRow>& rows,
                       const std::vector<int>& fold_years, std::uint64_t config_hash,
                       std::uint64_t seed) {
    CsvWriter w(path);
    std::vector<std::string> header = {"method", "cell", "params"};
    for (int y : fold_years) header.push_back("auc_" + std::to_string(y));
    header.insert(header.end(), {"mean_auc", "selected", "config_hash", "seed"});
    w.write_row(header);
    for (const auto& r : rows) {
        std::vector<std::string> f = {r.method, std::to_string(r.cell), r.params};
        for (const auto& a : r.fold_auc) f.push_back(opt_field(a));
        for (std::size_t pad = r.fold_auc.size(); pad < fold_years.size(); ++pad) f.emplace_back();
        f.push_back(opt_field(r.mean_auc));
        f.push_back(r.selected ? "1" : "0");
        f.push_back(hex64(config_hash));
        f.push_back(std::to_string(seed));
        w.write_row(f);
    }
    w.close();
}

}  // namespace

AuditReport run_audit(const RunConfig& config, const std::string& out_dir) {
    config.validate();
    AuditReport report;
    report.config_hash = config.config_hash();
    const std::uint64_t seed_synth = sub_seed(config.seed, 1);
    const std::uint64_t seed_sample = sub_seed(config.seed, 2);
    const std::uint64_t seed_train = sub_seed(config.seed, 3);

    fs::create_directories(out_dir);
    fs::create_directories(out_dir + "/models");
    fs::create_directories(out_dir + "/sweeps");
    fs::create_directories(out_dir + "/classifications");
    OutputTransaction tx;
    const std::string base = out_dir + "/";

    // --- data ---
    std::vector<RawRecord> records;
    std::map<std::string, PersonStatic> persons;
    with_stage("stage data", [&] {
        if (config.synthetic) {
            SynthConfig sc = *config.synthetic;
            sc.seed = seed_synth;
            fs::create_directories(base + "data");
            for (const char* f : {"records.csv", "persons.csv", "education.csv", "moves.csv",
                                  "truth.csv"}) {
                tx.reg(base + "data/" + f);
            }
            auto synth = generate_to_files(sc, base + "data");
            report.synth_calibration["realized_ltu_rate"] = synth.realized_ltu_rate;
            report.synth_calibration["intercept_adjustment"] = synth.intercept_adjustment;
            for (const auto& [k, v] : synth.realized_prevalence) {
                report.synth_calibration["prevalence_" + k] = v;
            }
            records = std::move(synth.records);
            for (auto& p : synth.persons) persons[p.person_id] = std::move(p);
        } else {
            auto ing = ingest_records(config.ingest->records);
            if (!ing.rejects.empty()) {
                throw DataError("ingest: " + std::to_string(ing.rejects.size()) +
                                " rejected rows, first at line " +
                                std::to_string(ing.rejects.front().line) + ": " +
                                ing.rejects.front().reason);
            }
            records = std::move(ing.records);
            persons = ingest_persons(config.ingest->persons, config.ingest->education,
                                     config.ingest->moves);
        }
    });

    // --- spells ---
    std::vector<UnemploymentSpell> spells;
    with_stage("stage label", [&] {
        auto merged = merge_all_spells(records, config.gap_tolerance_days);
        spells = censor_window(merged, records, Date(config.year_start, 1, 1),
                               Date(config.year_end, 12, 31), config.horizon_days);
        write_spells_csv(tx.reg(base + "spells.csv"), spells);
    });

    // --- features ---
    EpisodeDataset data;
    with_stage("stage features", [&] {
        data = build_dataset(records, persons, spells, config.features);
        write_rows_csv(tx.reg(base + "rows.csv"), tx.reg(base + "rows.schema.json"), data,
                       config.features);
    });

    // --- partitions ---
    const auto all_years = data.years();
    const auto all_labels = data.labels();
    const auto matrix = data.to_matrix();

    std::vector<std::uint32_t> train_rows, eval_rows;
    for (std::uint32_t i = 0; i < data.rows.size(); ++i) {
        if (all_years[i] == config.evaluation_year) {
            eval_rows.push_back(i);
        } else if (all_years[i] >= config.year_start && all_years[i] < config.evaluation_year) {
            train_rows.push_back(i);
        }
    }
    if (eval_rows.empty()) throw DataError("stage partition: no evaluation-year rows");
    if (train_rows.empty()) throw DataError("stage partition: no training rows");

    // Per-year training subsample; the evaluation partition is never sampled.
    std::vector<int> train_years_all;
    for (auto r : train_rows) train_years_all.push_back(all_years[r]);
    const auto sampled_local =
        subsample_per_year(train_years_all, config.per_year_sample, seed_sample);
    std::vector<std::uint32_t> sampled_rows;
    sampled_rows.reserve(sampled_local.size());
    for (auto li : sampled_local) sampled_rows.push_back(train_rows[li]);

    const FeatureMatrix train_x = matrix.select_rows(sampled_rows);
    std::vector<std::uint8_t> train_y;
    std::vector<int> train_years;
    for (auto r : sampled_rows) {
        train_y.push_back(all_labels[r]);
        train_years.push_back(all_years[r]);
    }
    const FeatureMatrix eval_x = matrix.select_rows(eval_rows);
    std::vector<std::uint8_t> eval_y;
    for (auto r : eval_rows) eval_y.push_back(all_labels[r]);

    // Evaluation-year group masks and conditioning attribute.
    const auto masks_all = data.group_masks();
    GroupMasks eval_masks;
    eval_masks.names = masks_all.names;
    eval_masks.unprivileged.resize(masks_all.unprivileged.size());
    for (std::size_t g = 0; g < masks_all.unprivileged.size(); ++g) {
        for (auto r : eval_rows) eval_masks.unprivileged[g].push_back(masks_all.unprivileged[g][r]);
    }
    const auto high_edu_all = data.high_education_mask();
    std::vector<std::uint8_t> eval_high_edu;
    for (auto r : eval_rows) eval_high_edu.push_back(high_edu_all[r]);

    // --- temporal CV + final models ---
    const auto folds = with_stage("stage tune", [&] {
        return make_folds(train_years, config.year_start, config.evaluation_year - 1);
    });
    for (const auto& f : folds) report.fold_test_years.push_back(f.test_year);

    std::vector<ScoredModel> scored;
    with_stage("stage train", [&] {
        for (auto method : config.methods) {
            std::vector<HyperParams> grid;
            const auto git = config.grids.find(method);
            if (git != config.grids.end()) {
                grid = git->second;
            } else {
                grid = default_grid(method);
            }
            const auto outcome =
                grid_search(method, grid, train_x, train_y, train_years, folds, seed_train);
            for (std::size_t cell = 0; cell < outcome.results.size(); ++cell) {
                const auto& res = outcome.results[cell];
                GridReportRow row;
                row.method = method_name(method);
                row.cell = cell;
                row.params = res.hp.describe();
                row.fold_auc = res.fold_auc;
                row.mean_auc = res.mean_auc;
                row.selected = res.selected;
                report.grid_rows.push_back(std::move(row));
            }
            for (auto history : config.histories) {
                auto model = fit_final(method, outcome.best, train_x, train_y, train_years,
                                       history, seed_train);
                const std::string model_path = base + "models/" + method_name(method) + "_" +
                                               history_name(history) + ".json";
                save_model(model, tx.reg(model_path));
                ScoredModel sm;
                sm.method = method;
                sm.history = history;
                sm.eval_scores = predict_risk(model, eval_x);
                scored.push_back(std::move(sm));
            }
        }
    });

    // --- metrics, fairness, sweeps, histograms ---
    with_stage("stage audit", [&] {
        const auto neighbors =
            knn_neighbors(eval_x.values, eval_x.n_rows, eval_x.n_cols,
                          config.consistency_neighbors, config.consistency_scaled);

        std::vector<double> fractions;
        for (double f = config.sweep_start; f <= config.sweep_stop + 1e-12;
             f += config.sweep_step) {
            fractions.push_back(f);
        }

        // Observed-outcome fairness baseline (identical code paths).
        {
            FairnessRow obs;
            obs.model = "observed";
            obs.history = "-";
            obs.policy = "-";
            for (std::size_t g = 0; g < eval_masks.unprivileged.size(); ++g) {
                obs.spd.push_back(spd(eval_y, eval_masks.unprivileged[g]));
                obs.cspd.push_back(
                    conditional_spd(eval_y, eval_masks.unprivileged[g], eval_high_edu));
            }
            obs.consistency = consistency_from_neighbors(eval_y, neighbors);
            report.fairness.push_back(std::move(obs));
        }

        for (const auto& sm : scored) {
            const std::string tag =
                std::string(method_name(sm.method)) + "_" + history_name(sm.history);

            CsvWriter cw(tx.reg(base + "classifications/" + tag + ".csv"));
            cw.write_row({"spell_id", "score", "policy", "y_hat"});

            for (const auto& policy : config.policies) {
                auto perf = evaluate_policy(sm.eval_scores, eval_y, policy);
                perf.model = method_name(sm.method);
                perf.history = history_name(sm.history);
                report.performance.push_back(perf);

                const auto y_hat = classify(sm.eval_scores, policy);
                for (std::size_t i = 0; i < eval_rows.size(); ++i) {
                    cw.write_row({data.rows[eval_rows[i]].spell_id,
                                  format_double(sm.eval_scores[i]), policy.name,
                                  std::to_string(static_cast<int>(y_hat[i]))});
                }

                FairnessRow fr;
                fr.model = method_name(sm.method);
                fr.history = history_name(sm.history);
                fr.policy = policy.name;
                for (std::size_t g = 0; g < eval_masks.unprivileged.size(); ++g) {
                    fr.spd.push_back(spd(y_hat, eval_masks.unprivileged[g]));
                    fr.cspd.push_back(
                        conditional_spd(y_hat, eval_masks.unprivileged[g], eval_high_edu));
                }
                fr.consistency = consistency_from_neighbors(y_hat, neighbors);
                report.fairness.push_back(std::move(fr));
            }
            cw.close();

            const auto sweep = threshold_sweep(sm.eval_scores, eval_y, eval_masks, fractions);
            CsvWriter sw(tx.reg(base + "sweeps/sweep_" + tag + ".csv"));
            sw.write_row({"fraction", "threshold", "precision", "recall", "f1", "spd_female",
                          "spd_nonger", "spd_nonger_m", "spd_nonger_f"});
            for (const auto& row : sweep) {
                sw.write_row({format_double(row.fraction), format_double(row.threshold),
                              format_double(row.precision), format_double(row.recall),
                              format_double(row.f1), format_double(row.spd[0]),
                              format_double(row.spd[1]), format_double(row.spd[2]),
                              format_double(row.spd[3])});
            }
            sw.close();
        }

        // Risk-score histograms per group (German / non-German analog).
        {
            CsvWriter hw(tx.reg(base + "hist_scores.csv"));
            hw.write_row({"model", "history", "group", "bin_lo", "bin_hi", "count", "density"});
            const int bins = config.histogram_bins;
            for (const auto& sm : scored) {
                const auto& ng_mask = eval_masks.unprivileged[1];  // non_german
                for (int grp = 0; grp < 2; ++grp) {
                    std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
                    std::size_t total = 0;
                    for (std::size_t i = 0; i < sm.eval_scores.size(); ++i) {
                        if (static_cast<int>(ng_mask[i]) != grp) continue;
                        auto b = static_cast<std::size_t>(sm.eval_scores[i] *
                                                          static_cast<double>(bins));
                        if (b >= static_cast<std::size_t>(bins)) {
                            b = static_cast<std::size_t>(bins) - 1;
                        }
                        ++counts[b];
                        ++total;
                    }
                    for (int b = 0; b < bins; ++b) {
                        const double lo = static_cast<double>(b) / bins;
                        const double hi = static_cast<double>(b + 1) / bins;
                        const double dens =
                            total ? static_cast<double>(counts[static_cast<std::size_t>(b)]) /
                                        (static_cast<double>(total) * (hi - lo))
                                  : 0.0;
                        hw.write_row({std::string(method_name(sm.method)) + "_" +
                                          history_name(sm.history),
                                      history_name(sm.history), grp ? "non_german" : "german",
                                      format_double(lo), format_double(hi),
                                      std::to_string(counts[static_cast<std::size_t>(b)]),
                                      format_double(dens)});
                    }
                }
            }
            hw.close();
        }

        // Prevalence table over all censored rows.
        report.prevalence = group_prevalence_table(data.group_columns(), all_labels);
        {
            CsvWriter pw(tx.reg(base + "prevalence.csv"));
            pw.write_row({"year", "stratum", "count", "female", "non_german", "non_german_male",
                          "non_german_female"});
            for (const auto& row : report.prevalence) {
                pw.write_row({std::to_string(row.year), row.stratum, std::to_string(row.count),
                              format_double(row.frac_female), format_double(row.frac_non_german),
                              format_double(row.frac_non_german_male),
                              format_double(row.frac_non_german_female)});
            }
            pw.close();
        }
    });

    // --- report files ---
    with_stage("stage report", [&] {
        write_grid_report(tx.reg(base + "grid_report.csv"), report.grid_rows,
                          report.fold_test_years, report.config_hash, config.seed);

        CsvWriter pw(tx.reg(base + "performance.csv"));
        pw.write_row({"model", "history", "policy", "k", "accuracy", "precision", "recall", "f1",
                      "roc_auc", "pr_auc", "config_hash", "seed"});
        for (const auto& r : report.performance) {
            pw.write_row({r.model, r.history, r.policy, std::to_string(r.k),
                          format_double(r.accuracy), format_double(r.precision),
                          opt_field(r.recall), format_double(r.f1), opt_field(r.roc_auc),
                          opt_field(r.pr_auc), hex64(report.config_hash),
                          std::to_string(config.seed)});
        }
        pw.close();

        CsvWriter fw(tx.reg(base + "fairness.csv"));
        std::vector<std::string> fh = {"model", "history", "policy"};
        for (const auto& g : kGroupNames) fh.push_back("spd_" + g);
        for (const auto& g : kGroupNames) fh.push_back("cspd_" + g);
        fh.insert(fh.end(), {"consistency", "config_hash", "seed"});
        fw.write_row(fh);
        json fairness_json = json::array();
        for (const auto& r : report.fairness) {
            std::vector<std::string> f = {r.model, r.history, r.policy};
            for (const auto& v : r.spd) f.push_back(opt_field(v));
            for (const auto& v : r.cspd) f.push_back(opt_field(v));
            f.push_back(format_double(r.consistency));
            f.push_back(hex64(report.config_hash));
            f.push_back(std::to_string(config.seed));
            fw.write_row(f);

            json jr;
            jr["model"] = r.model;
            jr["history"] = r.history;
            jr["policy"] = r.policy;
            for (std::size_t g = 0; g < kGroupNames.size(); ++g) {
                jr["spd_" + kGroupNames[g]] = r.spd[g] ? json(*r.spd[g]) : json(nullptr);
            }
            for (std::size_t g = 0; g < kGroupNames.size(); ++g) {
                jr["cspd_" + kGroupNames[g]] = r.cspd[g] ? json(*r.cspd[g]) : json(nullptr);
            }
            jr["consistency"] = r.consistency;
            jr["config_hash"] = hex64(report.config_hash);
            jr["seed"] = config.seed;
            fairness_json.push_back(std::move(jr));
        }
        fw.close();
        {
            std::ofstream out(tx.reg(base + "fairness.json"), std::ios::binary);
            out << fairness_json.dump(2) << "\n";
            if (!out) throw DataError("write failed for fairness.json");
        }

        json meta;
        meta["config"] = json::parse(config.to_json());
        meta["config_hash"] = hex64(report.config_hash);
        meta["seed"] = config.seed;
        meta["n_spells"] = spells.size();
        meta["n_rows"] = data.rows.size();
        meta["n_train_sampled"] = train_x.n_rows;
        meta["n_eval"] = eval_x.n_rows;
        meta["fold_test_years"] = report.fold_test_years;
        json calib = json::object();
        for (const auto& [k, v] : report.synth_calibration) calib[k] = v;
        meta["synth_calibration"] = calib;
        std::ofstream out(tx.reg(base + "run_meta.json"), std::ios::binary);
        out << meta.dump(2) << "\n";
        if (!out) throw DataError("write failed for run_meta.json");
    });

    tx.commit();
    return report;
}

}  // namespace ltuprof
