// ltuprof: long-term-unemployment risk profiling and fairness audit pipeline.
//
// Subcommands mirror the pipeline stages and hand data off through files:
//   synth -> ingest -> label -> features -> tune -> train -> sweep
// `audit` composes all stages from one JSON config; `report` consolidates an
// audit bundle.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ltuprof/audit.hpp"
#include "ltuprof/common.hpp"
#include "ltuprof/csv.hpp"
#include "ltuprof/episode_store.hpp"
#include "ltuprof/features.hpp"
#include "ltuprof/metrics.hpp"
#include "ltuprof/models.hpp"
#include "ltuprof/parallel.hpp"
#include "ltuprof/policy.hpp"
#include "ltuprof/synthgen.hpp"
#include "ltuprof/temporal_cv.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace ltuprof;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void cmd_synth(const std::string& config_path, std::uint64_t seed, bool seed_set,
               const std::string& out_dir) {
    SynthConfig cfg =
        config_path.empty() ? default_synth_config() : SynthConfig::from_json(read_file(config_path));
    if (seed_set) cfg.seed = seed;
    const auto result = generate_to_files(cfg, out_dir);
    std::cout << "persons: " << result.persons.size() << "\n"
              << "records: " << result.records.size() << "\n"
              << "episodes: " << result.truth.size() << "\n"
              << "realized_ltu_rate: " << format_double(result.realized_ltu_rate) << "\n"
              << "intercept_adjustment: " << format_double(result.intercept_adjustment) << "\n";
    for (const auto& [k, v] : result.realized_prevalence) {
        std::cout << "prevalence_" << k << ": " << format_double(v) << "\n";
    }
}

void cmd_ingest(const std::string& records, const std::string& persons,
                const std::string& education, const std::string& moves,
                const std::string& out_dir) {
    fs::create_directories(out_dir);
    const auto result = ingest_records(records);
    write_records_csv(out_dir + "/records.csv", result.records);
    {
        CsvWriter w(out_dir + "/rejects.csv");
        w.write_row({"line", "reason"});
        for (const auto& rej : result.rejects) {
            w.write_row({std::to_string(rej.line), "\"" + rej.reason + "\""});
        }
        w.close();
    }
    if (!persons.empty()) {
        const auto ps = ingest_persons(persons, education, moves);
        std::vector<PersonStatic> list;
        list.reserve(ps.size());
        for (const auto& [id, p] : ps) list.push_back(p);
        write_persons_csv(out_dir + "/persons.csv", out_dir + "/education.csv",
                          out_dir + "/moves.csv", list);
        std::cout << "persons: " << list.size() << "\n";
    }
    std::cout << "records: " << result.records.size() << "\n"
              << "rejects: " << result.rejects.size() << "\n";
}

void cmd_label(const std::string& records_path, const std::string& out_path,
               const std::string& window_start, const std::string& window_end, int horizon,
               int gap_tolerance) {
    const auto ing = ingest_records(records_path);
    if (!ing.rejects.empty()) {
        throw DataError("records contain " + std::to_string(ing.rejects.size()) +
                        " invalid rows; first at line " + std::to_string(ing.rejects.front().line) +
                        ": " + ing.rejects.front().reason);
    }
    auto spells = merge_all_spells(ing.records, gap_tolerance);
    spells = censor_window(spells, ing.records, Date::parse_iso(window_start),
                           Date::parse_iso(window_end), horizon);
    write_spells_csv(out_path, spells);
    std::size_t ltu = 0;
    for (const auto& s : spells) ltu += static_cast<std::size_t>(s.y_ltu);
    std::cout << "spells: " << spells.size() << "\n"
              << "ltu: " << ltu << "\n";
}

void cmd_features(const std::string& records_path, const std::string& persons_path,
                  const std::string& education_path, const std::string& moves_path,
                  const std::string& spells_path, const std::string& config_path,
                  const std::string& out_path, const std::string& schema_path) {
    const auto ing = ingest_records(records_path);
    if (!ing.rejects.empty()) {
        throw DataError("records contain " + std::to_string(ing.rejects.size()) +
                        " invalid rows; run `ingest` for details");
    }
    const auto persons = ingest_persons(persons_path, education_path, moves_path);
    const auto spells = read_spells_csv(spells_path);
    const FeatureConfig cfg =
        config_path.empty() ? FeatureConfig{} : FeatureConfig::from_json(read_file(config_path));
    const auto data = build_dataset(ing.records, persons, spells, cfg);
    write_rows_csv(out_path, schema_path, data, cfg);
    std::cout << "rows: " << data.rows.size() << "\n"
              << "features: " << data.schema.size() << "\n";
}

// Reuses the audit config parser for a standalone grid file.
std::vector<HyperParams> grid_from_json_file(Method method, const std::string& path) {
    json wrapper;
    wrapper["seed"] = 0;
    wrapper["data"]["synthetic"] = json::parse(default_synth_config().to_json());
    wrapper["grids"][method_name(method)] = json::parse(read_file(path));
    return RunConfig::from_json(wrapper.dump()).grids.at(method);
}

void cmd_tune(const std::string& rows_path, const std::string& schema_path,
              const std::string& method_str, const std::string& grid_path, int first_year,
              int last_year, std::size_t per_year, std::uint64_t seed, const std::string& out_path,
              const std::string& best_out) {
    const auto method = parse_method(method_str);
    if (!method) throw UsageError("unknown method '" + method_str + "'");
    const auto data = read_rows_csv(rows_path, schema_path);
    const auto years_all = data.years();
    const auto labels_all = data.labels();
    const auto matrix = data.to_matrix();

    std::vector<std::uint32_t> in_range;
    for (std::uint32_t i = 0; i < years_all.size(); ++i) {
        if (years_all[i] >= first_year && years_all[i] <= last_year) in_range.push_back(i);
    }
    std::vector<int> years_r;
    for (auto r : in_range) years_r.push_back(years_all[r]);
    const auto sampled_local = subsample_per_year(years_r, per_year, sub_seed(seed, 2));
    std::vector<std::uint32_t> rows;
    for (auto li : sampled_local) rows.push_back(in_range[li]);
    const auto x = matrix.select_rows(rows);
    std::vector<std::uint8_t> y;
    std::vector<int> years;
    for (auto r : rows) {
        y.push_back(labels_all[r]);
        years.push_back(years_all[r]);
    }

    const auto folds = make_folds(years, first_year, last_year);
    std::vector<HyperParams> grid =
        grid_path.empty() ? default_grid(*method) : grid_from_json_file(*method, grid_path);
    const auto outcome = grid_search(*method, grid, x, y, years, folds, sub_seed(seed, 3));

    CsvWriter w(out_path);
    std::vector<std::string> header = {"method", "cell", "params"};
    for (const auto& f : folds) header.push_back("auc_" + std::to_string(f.test_year));
    header.insert(header.end(), {"mean_auc", "selected"});
    w.write_row(header);
    for (std::size_t cell = 0; cell < outcome.results.size(); ++cell) {
        const auto& res = outcome.results[cell];
        std::vector<std::string> f = {method_str, std::to_string(cell), res.hp.describe()};
        for (const auto& a : res.fold_auc) f.push_back(a ? format_double(*a) : "");
        f.push_back(res.mean_auc ? format_double(*res.mean_auc) : "");
        f.push_back(res.selected ? "1" : "0");
        w.write_row(f);
    }
    w.close();

    if (!best_out.empty()) {
        json j;
        j["method"] = method_str;
        json params = json::object();
        switch (*method) {
            case Method::LR: break;
            case Method::PLR:
                params["penalty"] = outcome.best.plr.penalty == PenaltyKind::L1 ? "l1" : "l2";
                params["c"] = outcome.best.plr.c;
                break;
            case Method::RF:
                params["max_features"] =
                    outcome.best.rf.max_features == MaxFeaturesRule::Sqrt   ? "sqrt"
                    : outcome.best.rf.max_features == MaxFeaturesRule::Log2 ? "log2"
                                                                            : "all";
                params["min_samples_leaf"] = outcome.best.rf.min_samples_leaf;
                params["n_estimators"] = outcome.best.rf.n_estimators;
                break;
            case Method::GBM:
                params["max_depth"] = outcome.best.gbm.max_depth;
                params["max_features"] =
                    outcome.best.gbm.max_features == MaxFeaturesRule::Sqrt   ? "sqrt"
                    : outcome.best.gbm.max_features == MaxFeaturesRule::Log2 ? "log2"
                                                                             : "all";
                params["n_estimators"] = outcome.best.gbm.n_estimators;
                params["learning_rate"] = outcome.best.gbm.learning_rate;
                params["subsample"] = outcome.best.gbm.subsample;
                break;
        }
        j["params"] = params;
        std::ofstream out(best_out, std::ios::binary);
        if (!out) throw DataError("cannot write " + best_out);
        out << j.dump(2) << "\n";
    }
    std::cout << "cells: " << outcome.results.size() << "\n"
              << "best: " << outcome.best.describe() << "\n";
}

void cmd_train(const std::string& rows_path, const std::string& schema_path,
               const std::string& method_str, const std::string& hp_path,
               const std::string& history_str, int first_year, int last_year, std::size_t per_year,
               std::uint64_t seed, const std::string& out_path) {
    const auto method = parse_method(method_str);
    if (!method) throw UsageError("unknown method '" + method_str + "'");
    TrainingHistory history;
    if (history_str == "full") {
        history = TrainingHistory::Full;
    } else if (history_str == "last_year_only") {
        history = TrainingHistory::LastYearOnly;
    } else {
        throw UsageError("history must be full or last_year_only");
    }
    HyperParams hp;
    hp.method = *method;
    if (!hp_path.empty()) {
        json j = json::parse(read_file(hp_path));
        json wrapper;
        wrapper["seed"] = 0;
        wrapper["data"]["synthetic"] = json::parse(default_synth_config().to_json());
        wrapper["grids"][method_str] = json::array({j.contains("params") ? j["params"] : j});
        hp = RunConfig::from_json(wrapper.dump()).grids.at(*method)[0];
    }

    const auto data = read_rows_csv(rows_path, schema_path);
    const auto years_all = data.years();
    const auto labels_all = data.labels();
    const auto matrix = data.to_matrix();
    std::vector<std::uint32_t> in_range;
    for (std::uint32_t i = 0; i < years_all.size(); ++i) {
        if (years_all[i] >= first_year && years_all[i] <= last_year) in_range.push_back(i);
    }
    std::vector<int> years_r;
    for (auto r : in_range) years_r.push_back(years_all[r]);
    const auto sampled_local = subsample_per_year(years_r, per_year, sub_seed(seed, 2));
    std::vector<std::uint32_t> rows;
    for (auto li : sampled_local) rows.push_back(in_range[li]);
    const auto x = matrix.select_rows(rows);
    std::vector<std::uint8_t> y;
    std::vector<int> years;
    for (auto r : rows) {
        y.push_back(labels_all[r]);
        years.push_back(years_all[r]);
    }
    const auto model = fit_final(*method, hp, x, y, years, history, sub_seed(seed, 3));
    save_model(model, out_path);
    std::cout << "trained " << method_str << " (" << history_str << ") on " << x.n_rows
              << " rows\n";
}

void cmd_sweep(const std::string& model_path, const std::string& rows_path,
               const std::string& schema_path, int eval_year, double start, double stop,
               double step, const std::string& out_path) {
    const auto model = load_model(model_path);
    const auto data = read_rows_csv(rows_path, schema_path);
    const auto years = data.years();
    std::vector<std::uint32_t> rows;
    for (std::uint32_t i = 0; i < years.size(); ++i) {
        if (years[i] == eval_year) rows.push_back(i);
    }
    if (rows.empty()) throw DataError("no rows in evaluation year " + std::to_string(eval_year));
    const auto x = data.to_matrix().select_rows(rows);
    const auto labels = data.labels();
    std::vector<std::uint8_t> y;
    for (auto r : rows) y.push_back(labels[r]);
    const auto masks_all = data.group_masks();
    GroupMasks masks;
    masks.names = masks_all.names;
    masks.unprivileged.resize(masks_all.unprivileged.size());
    for (std::size_t g = 0; g < masks.unprivileged.size(); ++g) {
        for (auto r : rows) masks.unprivileged[g].push_back(masks_all.unprivileged[g][r]);
    }
    const auto scores = predict_risk(model, x);
    std::vector<double> fractions;
    for (double f = start; f <= stop + 1e-12; f += step) fractions.push_back(f);
    const auto sweep = threshold_sweep(scores, y, masks, fractions);
    CsvWriter w(out_path);
    w.write_row({"fraction", "threshold", "precision", "recall", "f1", "spd_female", "spd_nonger",
                 "spd_nonger_m", "spd_nonger_f"});
    for (const auto& row : sweep) {
        w.write_row({format_double(row.fraction), format_double(row.threshold),
                     format_double(row.precision), format_double(row.recall),
                     format_double(row.f1), format_double(row.spd[0]), format_double(row.spd[1]),
                     format_double(row.spd[2]), format_double(row.spd[3])});
    }
    w.close();
    std::cout << "sweep rows: " << sweep.size() << "\n";
}

struct ReportTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

ReportTable consolidate_audit_dir(const std::string& dir) {
    CsvReader perf(dir + "/performance.csv");
    CsvReader fair(dir + "/fairness.csv");
    // Key: model|history|policy -> fairness fields.
    std::map<std::string, std::vector<std::string>> fairness_by_key;
    std::vector<std::string> fair_cols;
    for (std::size_t c = 3; c < fair.header().size(); ++c) {
        if (fair.header()[c] == "config_hash") break;
        fair_cols.push_back(fair.header()[c]);
    }
    std::vector<std::string> f;
    std::vector<std::vector<std::string>> observed_rows;
    while (fair.next(f)) {
        const std::string key = f[0] + "|" + f[1] + "|" + f[2];
        fairness_by_key[key] =
            std::vector<std::string>(f.begin() + 3, f.begin() + 3 + static_cast<std::ptrdiff_t>(fair_cols.size()));
        if (f[0] == "observed") {
            std::vector<std::string> row = {f[0], f[1], f[2]};
            for (std::size_t c = 0; c < 6; ++c) row.emplace_back();  // no perf metrics
            row.insert(row.end(), fairness_by_key[key].begin(), fairness_by_key[key].end());
            observed_rows.push_back(std::move(row));
        }
    }

    ReportTable table;
    table.columns = {"model", "policy",  "history", "accuracy", "precision",
                     "recall", "f1", "roc_auc", "pr_auc"};
    table.columns.insert(table.columns.end(), fair_cols.begin(), fair_cols.end());

    const auto c_model = perf.col("model");
    const auto c_hist = perf.col("history");
    const auto c_policy = perf.col("policy");
    const auto c_acc = perf.col("accuracy");
    const auto c_prec = perf.col("precision");
    const auto c_rec = perf.col("recall");
    const auto c_f1 = perf.col("f1");
    const auto c_roc = perf.col("roc_auc");
    const auto c_pr = perf.col("pr_auc");
    while (perf.next(f)) {
        const std::string key = f[c_model] + "|" + f[c_hist] + "|" + f[c_policy];
        std::vector<std::string> row = {f[c_model], f[c_policy], f[c_hist], f[c_acc],
                                        f[c_prec],  f[c_rec],    f[c_f1],   f[c_roc],
                                        f[c_pr]};
        const auto it = fairness_by_key.find(key);
        if (it != fairness_by_key.end()) {
            row.insert(row.end(), it->second.begin(), it->second.end());
        } else {
            for (std::size_t c = 0; c < fair_cols.size(); ++c) row.emplace_back();
        }
        table.rows.push_back(std::move(row));
    }
    // Observed-outcome baseline rows come first, matching the table layout.
    table.rows.insert(table.rows.begin(), observed_rows.begin(), observed_rows.end());
    return table;
}

void cmd_report(const std::string& dir, const std::string& format, const std::string& out_path) {
    const auto table = consolidate_audit_dir(dir);
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path, std::ios::binary);
        if (!file) throw DataError("cannot write " + out_path);
        out = &file;
    }
    if (format == "csv") {
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            if (c) *out << ',';
            *out << table.columns[c];
        }
        *out << '\n';
        for (const auto& row : table.rows) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (c) *out << ',';
                *out << row[c];
            }
            *out << '\n';
        }
    } else if (format == "json") {
        json arr = json::array();
        for (const auto& row : table.rows) {
            json jr = json::object();
            for (std::size_t c = 0; c < table.columns.size(); ++c) {
                if (row[c].empty()) {
                    jr[table.columns[c]] = nullptr;
                } else if (table.columns[c] == "model" || table.columns[c] == "policy" ||
                           table.columns[c] == "history") {
                    jr[table.columns[c]] = row[c];
                } else {
                    jr[table.columns[c]] = std::stod(row[c]);
                }
            }
            arr.push_back(std::move(jr));
        }
        *out << arr.dump(2) << "\n";
    } else {
        throw UsageError("format must be csv or json");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"long-term-unemployment risk profiling and fairness audit pipeline"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "worker thread cap (0 = hardware)");

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic record corpus");
    std::string synth_config, synth_out = "synth_out";
    std::uint64_t synth_seed = 0;
    bool synth_seed_set = false;
    synth->add_option("--config", synth_config, "SynthConfig JSON path");
    auto* seed_opt = synth->add_option("--seed", synth_seed, "seed override");
    synth->add_option("--out", synth_out, "output directory")->required();

    // ingest
    auto* ingest = app.add_subcommand("ingest", "validate and normalize raw CSVs");
    std::string in_records, in_persons, in_education, in_moves, ingest_out = "ingest_out";
    ingest->add_option("--records", in_records)->required();
    ingest->add_option("--persons", in_persons);
    ingest->add_option("--education", in_education);
    ingest->add_option("--moves", in_moves);
    ingest->add_option("--out", ingest_out)->required();

    // label
    auto* label = app.add_subcommand("label", "merge spells and apply the LTU label");
    std::string lab_records, lab_out, lab_ws = "2010-01-01", lab_we = "2016-12-31";
    int lab_horizon = kDefaultHorizonDays, lab_gap = kDefaultGapToleranceDays;
    label->add_option("--records", lab_records)->required();
    label->add_option("--out", lab_out)->required();
    label->add_option("--window-start", lab_ws);
    label->add_option("--window-end", lab_we);
    label->add_option("--horizon", lab_horizon);
    label->add_option("--gap-tolerance", lab_gap);

    // features
    auto* feat = app.add_subcommand("features", "build prediction rows from spells");
    std::string ft_records, ft_persons, ft_education, ft_moves, ft_spells, ft_config, ft_out,
        ft_schema;
    feat->add_option("--records", ft_records)->required();
    feat->add_option("--persons", ft_persons)->required();
    feat->add_option("--education", ft_education);
    feat->add_option("--moves", ft_moves);
    feat->add_option("--spells", ft_spells)->required();
    feat->add_option("--config", ft_config, "FeatureConfig JSON path");
    feat->add_option("--out", ft_out)->required();
    feat->add_option("--schema-out", ft_schema)->required();

    // tune
    auto* tune = app.add_subcommand("tune", "temporal-CV grid search");
    std::string tn_rows, tn_schema, tn_method, tn_grid, tn_out, tn_best;
    int tn_first = 2010, tn_last = 2015;
    std::size_t tn_per_year = 20000;
    std::uint64_t tn_seed = 1;
    tune->add_option("--rows", tn_rows)->required();
    tune->add_option("--schema", tn_schema)->required();
    tune->add_option("--method", tn_method)->required();
    tune->add_option("--grid", tn_grid, "grid JSON (array of cells)");
    tune->add_option("--first-year", tn_first);
    tune->add_option("--last-year", tn_last);
    tune->add_option("--per-year-sample", tn_per_year);
    tune->add_option("--seed", tn_seed);
    tune->add_option("--out", tn_out)->required();
    tune->add_option("--best-out", tn_best);

    // train
    auto* train = app.add_subcommand("train", "fit a final model");
    std::string tr_rows, tr_schema, tr_method, tr_hp, tr_history = "full", tr_out;
    int tr_first = 2010, tr_last = 2015;
    std::size_t tr_per_year = 20000;
    std::uint64_t tr_seed = 1;
    train->add_option("--rows", tr_rows)->required();
    train->add_option("--schema", tr_schema)->required();
    train->add_option("--method", tr_method)->required();
    train->add_option("--hp", tr_hp, "hyperparameter JSON (tune --best-out)");
    train->add_option("--history", tr_history, "full | last_year_only");
    train->add_option("--first-year", tr_first);
    train->add_option("--last-year", tr_last);
    train->add_option("--per-year-sample", tr_per_year);
    train->add_option("--seed", tr_seed);
    train->add_option("--out", tr_out)->required();

    // audit
    auto* audit = app.add_subcommand("audit", "run the full experiment from one config");
    std::string au_config, au_out = "audit_out";
    audit->add_option("--config", au_config)->required();
    audit->add_option("--out", au_out);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "threshold sweep for a trained model");
    std::string sw_model, sw_rows, sw_schema, sw_out;
    int sw_year = 2016;
    double sw_start = 0.01, sw_stop = 0.99, sw_step = 0.01;
    sweep->add_option("--model", sw_model)->required();
    sweep->add_option("--rows", sw_rows)->required();
    sweep->add_option("--schema", sw_schema)->required();
    sweep->add_option("--eval-year", sw_year);
    sweep->add_option("--start", sw_start);
    sweep->add_option("--stop", sw_stop);
    sweep->add_option("--step", sw_step);
    sweep->add_option("--out", sw_out)->required();

    // report
    auto* rep = app.add_subcommand("report", "consolidate an audit bundle");
    std::string rp_dir, rp_format = "csv", rp_out;
    rep->add_option("--audit-dir", rp_dir)->required();
    rep->add_option("--format", rp_format, "csv | json");
    rep->add_option("--out", rp_out, "write to file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    set_max_threads(threads);
    try {
        if (*synth) {
            synth_seed_set = seed_opt->count() > 0;
            cmd_synth(synth_config, synth_seed, synth_seed_set, synth_out);
        } else if (*ingest) {
            cmd_ingest(in_records, in_persons, in_education, in_moves, ingest_out);
        } else if (*label) {
            cmd_label(lab_records, lab_out, lab_ws, lab_we, lab_horizon, lab_gap);
        } else if (*feat) {
            cmd_features(ft_records, ft_persons, ft_education, ft_moves, ft_spells, ft_config,
                         ft_out, ft_schema);
        } else if (*tune) {
            cmd_tune(tn_rows, tn_schema, tn_method, tn_grid, tn_first, tn_last, tn_per_year,
                     tn_seed, tn_out, tn_best);
        } else if (*train) {
            cmd_train(tr_rows, tr_schema, tr_method, tr_hp, tr_history, tr_first, tr_last,
                      tr_per_year, tr_seed, tr_out);
        } else if (*audit) {
            const auto cfg = RunConfig::from_json(read_file(au_config));
            const auto report = run_audit(cfg, au_out);
            std::cout << "audit complete: " << report.performance.size()
                      << " performance rows, " << report.fairness.size() << " fairness rows\n"
                      << "config_hash: " << hex64(report.config_hash) << "\n";
        } else if (*sweep) {
            cmd_sweep(sw_model, sw_rows, sw_schema, sw_year, sw_start, sw_stop, sw_step, sw_out);
        } else if (*rep) {
            cmd_report(rp_dir, rp_format, rp_out);
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
