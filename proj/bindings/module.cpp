#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ltuprof/audit.hpp"
#include "ltuprof/common.hpp"
#include "ltuprof/fairness.hpp"
#include "ltuprof/metrics.hpp"
#include "ltuprof/models.hpp"
#include "ltuprof/parallel.hpp"
#include "ltuprof/policy.hpp"
#include "ltuprof/synthgen.hpp"

namespace py = pybind11;
using namespace ltuprof;

namespace {

FeatureMatrix matrix_from_numpy(const py::array_t<double, py::array::c_style | py::array::forcecast>& x,
                                const std::vector<std::string>& names) {
    if (x.ndim() != 2) throw DataError("x must be a 2-d array");
    FeatureMatrix m;
    m.n_rows = static_cast<std::size_t>(x.shape(0));
    m.n_cols = static_cast<std::size_t>(x.shape(1));
    if (names.empty()) {
        for (std::size_t j = 0; j < m.n_cols; ++j) m.names.push_back("f" + std::to_string(j));
    } else {
        if (names.size() != m.n_cols) throw DataError("feature_names length mismatch");
        m.names = names;
    }
    m.values.assign(x.data(), x.data() + m.n_rows * m.n_cols);
    return m;
}

std::vector<std::uint8_t> labels_from_numpy(
    const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& y) {
    if (y.ndim() != 1) throw DataError("y must be a 1-d array");
    return std::vector<std::uint8_t>(y.data(), y.data() + y.shape(0));
}

std::vector<double> scores_from_numpy(
    const py::array_t<double, py::array::c_style | py::array::forcecast>& s) {
    if (s.ndim() != 1) throw DataError("scores must be a 1-d array");
    return std::vector<double>(s.data(), s.data() + s.shape(0));
}

py::array_t<double> to_numpy(const std::vector<double>& v) {
    py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

py::array_t<std::uint8_t> to_numpy_u8(const std::vector<std::uint8_t>& v) {
    py::array_t<std::uint8_t> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

Policy policy_from_args(const std::string& kind, double q, double upper_q, double lower_q,
                        const std::string& name) {
    if (kind == "top_fraction") return Policy::top_fraction(q, name);
    if (kind == "middle_band") return Policy::middle_band(upper_q, lower_q, name);
    throw UsageError("policy kind must be top_fraction or middle_band");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "LTU risk profiling and fairness audit pipeline (native core)";

    py::register_exception<UsageError>(m, "UsageError");
    py::register_exception<DataError>(m, "DataError");
    py::register_exception<NumericError>(m, "NumericError");

    m.def("set_max_threads", &set_max_threads, py::arg("n"));

    py::class_<TrainedModel>(m, "Model")
        .def_property_readonly("method",
                               [](const TrainedModel& mm) { return std::string(method_name(mm.method)); })
        .def_property_readonly("feature_names",
                               [](const TrainedModel& mm) { return mm.feature_names; })
        .def_property_readonly("intercept", [](const TrainedModel& mm) { return mm.intercept; })
        .def_property_readonly("coefficients",
                               [](const TrainedModel& mm) { return to_numpy(mm.coefficients); })
        .def_property_readonly("converged", [](const TrainedModel& mm) { return mm.converged; })
        .def_property_readonly("train_deviance",
                               [](const TrainedModel& mm) { return to_numpy(mm.train_deviance); })
        .def("predict",
             [](const TrainedModel& mm, const py::array_t<double, py::array::c_style | py::array::forcecast>& x,
                const std::vector<std::string>& names) {
                 return to_numpy(predict_risk(mm, matrix_from_numpy(x, names)));
             },
             py::arg("x"), py::arg("feature_names") = std::vector<std::string>{})
        .def("save", &save_model, py::arg("path"))
        .def("to_json", &model_to_json);

    m.def("load_model", &load_model, py::arg("path"));

    m.def(
        "train_lr",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x,
           const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& y,
           const std::vector<std::string>& names) {
            return train_lr(matrix_from_numpy(x, names), labels_from_numpy(y));
        },
        py::arg("x"), py::arg("y"), py::arg("feature_names") = std::vector<std::string>{});

    m.def(
        "train_plr",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x,
           const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& y,
           const std::string& penalty, double c, const std::vector<std::string>& names) {
            return train_plr(matrix_from_numpy(x, names), labels_from_numpy(y),
                             penalty == "l1" ? PenaltyKind::L1 : PenaltyKind::L2, c);
        },
        py::arg("x"), py::arg("y"), py::arg("penalty") = "l1", py::arg("c") = 1.0,
        py::arg("feature_names") = std::vector<std::string>{});

    m.def(
        "train_rf",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x,
           const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& y,
           const std::string& max_features, int min_samples_leaf, int n_estimators,
           std::uint64_t seed, const std::vector<std::string>& names) {
            RfParams hp;
            hp.max_features = max_features == "sqrt"   ? MaxFeaturesRule::Sqrt
                              : max_features == "log2" ? MaxFeaturesRule::Log2
                                                       : MaxFeaturesRule::All;
            hp.min_samples_leaf = min_samples_leaf;
            hp.n_estimators = n_estimators;
            return train_rf(matrix_from_numpy(x, names), labels_from_numpy(y), hp, seed);
        },
        py::arg("x"), py::arg("y"), py::arg("max_features") = "sqrt",
        py::arg("min_samples_leaf") = 1, py::arg("n_estimators") = 100, py::arg("seed") = 1,
        py::arg("feature_names") = std::vector<std::string>{});

    m.def(
        "train_gbm",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x,
           const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& y,
           int max_depth, const std::string& max_features, int n_estimators, double learning_rate,
           double subsample, std::uint64_t seed, const std::vector<std::string>& names) {
            GbmParams hp;
            hp.max_depth = max_depth;
            hp.max_features = max_features == "sqrt"   ? MaxFeaturesRule::Sqrt
                              : max_features == "log2" ? MaxFeaturesRule::Log2
                                                       : MaxFeaturesRule::All;
            hp.n_estimators = n_estimators;
            hp.learning_rate = learning_rate;
            hp.subsample = subsample;
            return train_gbm(matrix_from_numpy(x, names), labels_from_numpy(y), hp, seed);
        },
        py::arg("x"), py::arg("y"), py::arg("max_depth") = 3, py::arg("max_features") = "all",
        py::arg("n_estimators") = 100, py::arg("learning_rate") = 0.1, py::arg("subsample") = 1.0,
        py::arg("seed") = 1, py::arg("feature_names") = std::vector<std::string>{});

    // metrics
    m.def("accuracy", [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& y_hat,
                         const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& y) {
        return accuracy(labels_from_numpy(y_hat), labels_from_numpy(y));
    });
    m.def("roc_auc", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& s,
                        const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& y) {
        const auto v = roc_auc(scores_from_numpy(s), labels_from_numpy(y));
        return v ? py::cast(*v) : py::none().cast<py::object>();
    });
    m.def("pr_auc", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& s,
                       const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& y) {
        const auto v = pr_auc(scores_from_numpy(s), labels_from_numpy(y));
        return v ? py::cast(*v) : py::none().cast<py::object>();
    });
    m.def("precision_at_k",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& s,
             const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& y,
             std::size_t k) { return precision_at_k(scores_from_numpy(s), labels_from_numpy(y), k); });
    m.def("recall_at_k",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& s,
             const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& y,
             std::size_t k) {
              const auto v = recall_at_k(scores_from_numpy(s), labels_from_numpy(y), k);
              return v ? py::cast(*v) : py::none().cast<py::object>();
          });

    // policies
    m.def(
        "quantile_threshold",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& s, double q) {
            return quantile_threshold(scores_from_numpy(s), q);
        },
        py::arg("scores"), py::arg("fraction"));
    m.def(
        "classify",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& s,
           const std::string& kind, double q, double upper_q, double lower_q) {
            return to_numpy_u8(
                classify(scores_from_numpy(s), policy_from_args(kind, q, upper_q, lower_q, "py")));
        },
        py::arg("scores"), py::arg("kind") = "top_fraction", py::arg("q") = 0.1,
        py::arg("upper_q") = 0.25, py::arg("lower_q") = 0.75);

    // fairness
    m.def("spd", [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& y_hat,
                    const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& grp) {
        const auto v = spd(labels_from_numpy(y_hat), labels_from_numpy(grp));
        return v ? py::cast(*v) : py::none().cast<py::object>();
    });
    m.def("conditional_spd",
          [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& y_hat,
             const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& grp,
             const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& cond) {
              const auto v =
                  conditional_spd(labels_from_numpy(y_hat), labels_from_numpy(grp), labels_from_numpy(cond));
              return v ? py::cast(*v) : py::none().cast<py::object>();
          });
    m.def(
        "consistency",
        [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& y_hat,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& x,
           std::size_t n_neighbors, bool scale) {
            if (x.ndim() != 2) throw DataError("x must be a 2-d array");
            const std::vector<double> values(x.data(), x.data() + x.shape(0) * x.shape(1));
            return consistency(labels_from_numpy(y_hat), values,
                               static_cast<std::size_t>(x.shape(0)),
                               static_cast<std::size_t>(x.shape(1)), n_neighbors, scale);
        },
        py::arg("y_hat"), py::arg("x"), py::arg("n_neighbors") = 5, py::arg("scale") = true);

    // pipeline entry points
    m.def(
        "generate",
        [](const std::string& config_json, const std::string& out_dir) {
            const auto cfg = SynthConfig::from_json(config_json);
            const auto result = generate_to_files(cfg, out_dir);
            py::dict summary;
            summary["persons"] = result.persons.size();
            summary["records"] = result.records.size();
            summary["episodes"] = result.truth.size();
            summary["realized_ltu_rate"] = result.realized_ltu_rate;
            summary["intercept_adjustment"] = result.intercept_adjustment;
            for (const auto& [k, v] : result.realized_prevalence) {
                summary[("prevalence_" + k).c_str()] = v;
            }
            return summary;
        },
        py::arg("config_json"), py::arg("out_dir"));
    m.def("default_synth_config", []() { return default_synth_config().to_json(); });
    m.def(
        "scenario_skew_config",
        [](double strength) { return scenario_skew(default_synth_config(), strength).to_json(); },
        py::arg("strength") = 0.45);

    m.def(
        "run_audit",
        [](const std::string& config_json, const std::string& out_dir) {
            const auto cfg = RunConfig::from_json(config_json);
            const auto report = run_audit(cfg, out_dir);
            py::dict summary;
            summary["performance_rows"] = report.performance.size();
            summary["fairness_rows"] = report.fairness.size();
            summary["config_hash"] = hex64(report.config_hash);
            return summary;
        },
        py::arg("config_json"), py::arg("out_dir"));
}
