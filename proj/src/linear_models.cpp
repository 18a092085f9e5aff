#include <algorithm>
#include <cmath>

#include "ltuprof/common.hpp"
#include "ltuprof/models.hpp"

namespace ltuprof {

const char* method_name(Method m) {
    switch (m) {
        case Method::LR: return "lr";
        case Method::PLR: return "plr";
        case Method::RF: return "rf";
        case Method::GBM: return "gbm";
    }
    return "?";
}

std::optional<Method> parse_method(const std::string& s) {
    if (s == "lr") return Method::LR;
    if (s == "plr") return Method::PLR;
    if (s == "rf") return Method::RF;
    if (s == "gbm") return Method::GBM;
    return std::nullopt;
}

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

namespace {

constexpr double kProbFloor = 1e-12;

double log1pexp(double z) {
    // log(1 + exp(z)) without overflow
    if (z > 35.0) return z;
    if (z < -35.0) return std::exp(z);
    return std::log1p(std::exp(z));
}

void check_training_input(const FeatureMatrix& x, std::span<const std::uint8_t> y) {
    if (x.n_rows == 0 || x.n_cols == 0) throw DataError("train: empty design matrix");
    if (x.n_rows != y.size()) throw DataError("train: label length mismatch");
    for (double v : x.values) {
        if (!std::isfinite(v)) throw DataError("train: non-finite feature value");
    }
}

// Solves A x = b in place for a symmetric positive definite A (dim p),
// adding a small ridge jitter if the factorization stalls.
bool cholesky_solve(std::vector<double>& a, std::vector<double>& b, std::size_t p) {
    for (int attempt = 0; attempt < 4; ++attempt) {
        std::vector<double> l(a);
        bool ok = true;
        for (std::size_t i = 0; i < p && ok; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                double sum = l[i * p + j];
                for (std::size_t k = 0; k < j; ++k) sum -= l[i * p + k] * l[j * p + k];
                if (i == j) {
                    if (sum <= 0.0) {
                        ok = false;
                        break;
                    }
                    l[i * p + i] = std::sqrt(sum);
                } else {
                    l[i * p + j] = sum / l[j * p + j];
                }
            }
        }
        if (!ok) {
            const double jitter = std::pow(10.0, attempt - 8);
            for (std::size_t i = 0; i < p; ++i) a[i * p + i] += jitter;
            continue;
        }
        // forward then backward substitution
        std::vector<double> z(p);
        for (std::size_t i = 0; i < p; ++i) {
            double sum = b[i];
            for (std::size_t k = 0; k < i; ++k) sum -= l[i * p + k] * z[k];
            z[i] = sum / l[i * p + i];
        }
        for (std::size_t ii = p; ii-- > 0;) {
            double sum = z[ii];
            for (std::size_t k = ii + 1; k < p; ++k) sum -= l[k * p + ii] * b[k];
            b[ii] = sum / l[ii * p + ii];
        }
        return true;
    }
    return false;
}

}  // namespace

double logistic_nll_grad(const FeatureMatrix& x, std::span<const std::uint8_t> y,
                         std::span<const double> beta, double l2_weight,
                         std::span<double> grad_out) {
    const std::size_t n = x.n_rows;
    const std::size_t p = x.n_cols;
    if (beta.size() != p + 1) throw DataError("logistic_nll_grad: beta size mismatch");
    std::fill(grad_out.begin(), grad_out.end(), 0.0);
    double nll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = x.values.data() + i * p;
        double eta = beta[0];
        for (std::size_t j = 0; j < p; ++j) eta += beta[j + 1] * row[j];
        nll += log1pexp(eta) - (y[i] ? eta : 0.0);
        const double resid = sigmoid(eta) - static_cast<double>(y[i]);
        grad_out[0] += resid;
        for (std::size_t j = 0; j < p; ++j) grad_out[j + 1] += resid * row[j];
    }
    if (l2_weight > 0.0) {
        for (std::size_t j = 1; j <= p; ++j) {
            nll += l2_weight * beta[j] * beta[j];
            grad_out[j] += 2.0 * l2_weight * beta[j];
        }
    }
    return nll;
}

TrainedModel train_lr(const FeatureMatrix& x, std::span<const std::uint8_t> y,
                      const FitOptions& opts) {
    check_training_input(x, y);
    const std::size_t n = x.n_rows;
    const std::size_t p = x.n_cols;
    const std::size_t dim = p + 1;

    std::vector<double> beta(dim, 0.0);
    std::vector<double> grad(dim, 0.0);
    double nll = logistic_nll_grad(x, y, beta, 0.0, grad);

    bool converged = false;
    for (int iter = 0; iter < opts.max_iter; ++iter) {
        // Newton direction from the weighted normal equations.
        std::vector<double> hess(dim * dim, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double* row = x.values.data() + i * p;
            double eta = beta[0];
            for (std::size_t j = 0; j < p; ++j) eta += beta[j + 1] * row[j];
            const double pr = sigmoid(eta);
            const double w = std::max(pr * (1.0 - pr), 1e-10);
            hess[0] += w;
            for (std::size_t j = 0; j < p; ++j) {
                const double wx = w * row[j];
                hess[(j + 1) * dim] += wx;
                for (std::size_t k = 0; k <= j; ++k) {
                    hess[(j + 1) * dim + (k + 1)] += wx * row[k];
                }
            }
        }
        for (std::size_t a = 0; a < dim; ++a) {
            for (std::size_t b = a + 1; b < dim; ++b) hess[a * dim + b] = hess[b * dim + a];
        }
        std::vector<double> step(grad.begin(), grad.end());
        if (!cholesky_solve(hess, step, dim)) break;

        // Backtracking on the NLL.
        double scale = 1.0;
        std::vector<double> trial(dim);
        double trial_nll = nll;
        bool improved = false;
        for (int half = 0; half < 30; ++half) {
            for (std::size_t j = 0; j < dim; ++j) trial[j] = beta[j] - scale * step[j];
            trial_nll = logistic_nll_grad(x, y, trial, 0.0, grad);
            if (trial_nll <= nll) {
                improved = true;
                break;
            }
            scale *= 0.5;
        }
        if (!improved) {
            logistic_nll_grad(x, y, beta, 0.0, grad);  // restore gradient at beta
            break;
        }
        const double delta = nll - trial_nll;
        beta = trial;
        nll = trial_nll;
        if (delta <= opts.tol * (1.0 + std::abs(nll))) {
            converged = true;
            break;
        }
    }

    TrainedModel model;
    model.method = Method::LR;
    model.feature_names = x.names;
    model.schema_hash = x.schema_hash();
    model.n_train_rows = n;
    model.intercept = beta[0];
    model.coefficients.assign(beta.begin() + 1, beta.end());
    model.converged = converged;
    // Saturated fitted probabilities signal (quasi-)separation; coefficients
    // are whatever the iteration cap left.
    double max_abs_eta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = x.values.data() + i * p;
        double eta = beta[0];
        for (std::size_t j = 0; j < p; ++j) eta += beta[j + 1] * row[j];
        max_abs_eta = std::max(max_abs_eta, std::abs(eta));
    }
    model.separation_warning = !converged || max_abs_eta > 20.0;
    model.params.method = Method::LR;
    return model;
}

TrainedModel train_plr(const FeatureMatrix& x, std::span<const std::uint8_t> y,
                       PenaltyKind penalty, double c, const FitOptions& opts) {
    check_training_input(x, y);
    if (!(c > 0.0)) throw UsageError("plr: c must be positive");
    const std::size_t n = x.n_rows;
    const std::size_t p = x.n_cols;
    const double lam = 1.0 / c;

    // Standardize internally; penalization acts on the standardized scale.
    std::vector<double> mu(p, 0.0), sd(p, 1.0);
    for (std::size_t j = 0; j < p; ++j) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m += x.at(i, j);
        m /= static_cast<double>(n);
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = x.at(i, j) - m;
            v += d * d;
        }
        v /= static_cast<double>(n);
        mu[j] = m;
        sd[j] = v > 0.0 ? std::sqrt(v) : 1.0;
    }
    std::vector<double> xs(n * p);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) xs[i * p + j] = (x.at(i, j) - mu[j]) / sd[j];
    }

    std::vector<double> beta(p, 0.0);
    double beta0 = 0.0;
    std::vector<double> eta(n, 0.0);

    auto objective = [&]() {
        double f = 0.0;
        for (std::size_t i = 0; i < n; ++i) f += log1pexp(eta[i]) - (y[i] ? eta[i] : 0.0);
        double pen = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            pen += penalty == PenaltyKind::L1 ? std::abs(beta[j]) : beta[j] * beta[j];
        }
        return f + lam * pen;
    };

    double obj = objective();
    bool converged = false;
    std::vector<double> w(n), res(n);

    for (int outer = 0; outer < opts.max_iter; ++outer) {
        // IRLS quadratic approximation at the current linear predictor.
        for (std::size_t i = 0; i < n; ++i) {
            const double pr = sigmoid(eta[i]);
            const double wi = std::max(pr * (1.0 - pr), 1e-6);
            w[i] = wi;
            res[i] = (static_cast<double>(y[i]) - pr) / wi;  // z_i - eta_i
        }
        for (int inner = 0; inner < 1000; ++inner) {
            double max_delta = 0.0;
            {
                double num = 0.0, den = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    num += w[i] * res[i];
                    den += w[i];
                }
                const double d0 = num / den;
                beta0 += d0;
                for (std::size_t i = 0; i < n; ++i) res[i] -= d0;
                max_delta = std::max(max_delta, std::abs(d0));
            }
            for (std::size_t j = 0; j < p; ++j) {
                double num = 0.0, den = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double xij = xs[i * p + j];
                    num += w[i] * xij * res[i];
                    den += w[i] * xij * xij;
                }
                if (den <= 0.0) continue;
                const double old = beta[j];
                num += den * old;
                double next;
                if (penalty == PenaltyKind::L1) {
                    const double shrunk = std::abs(num) - lam;
                    next = shrunk > 0.0 ? std::copysign(shrunk, num) / den : 0.0;
                } else {
                    next = num / (den + 2.0 * lam);
                }
                const double delta = next - old;
                if (delta != 0.0) {
                    beta[j] = next;
                    for (std::size_t i = 0; i < n; ++i) res[i] -= delta * xs[i * p + j];
                    max_delta = std::max(max_delta, std::abs(delta));
                }
            }
            if (max_delta < 1e-11) break;
        }
        for (std::size_t i = 0; i < n; ++i) {
            double e = beta0;
            const double* row = xs.data() + i * p;
            for (std::size_t j = 0; j < p; ++j) e += beta[j] * row[j];
            eta[i] = e;
        }
        const double new_obj = objective();
        const double delta = obj - new_obj;
        obj = new_obj;
        if (std::abs(delta) <= opts.tol * (1.0 + std::abs(obj))) {
            converged = true;
            break;
        }
    }

    TrainedModel model;
    model.method = Method::PLR;
    model.feature_names = x.names;
    model.schema_hash = x.schema_hash();
    model.n_train_rows = n;
    model.converged = converged;
    model.coefficients.resize(p);
    double intercept = beta0;
    for (std::size_t j = 0; j < p; ++j) {
        model.coefficients[j] = beta[j] / sd[j];
        intercept -= beta[j] * mu[j] / sd[j];
    }
    model.intercept = intercept;
    model.params.method = Method::PLR;
    model.params.plr = {penalty, c};
    return model;
}

namespace {

std::vector<double> predict_linear(const TrainedModel& m, const FeatureMatrix& x) {
    std::vector<double> out(x.n_rows);
    const std::size_t p = x.n_cols;
    for (std::size_t i = 0; i < x.n_rows; ++i) {
        const double* row = x.values.data() + i * p;
        double eta = m.intercept;
        for (std::size_t j = 0; j < p; ++j) eta += m.coefficients[j] * row[j];
        double s = sigmoid(eta);
        s = std::min(1.0 - kProbFloor, std::max(kProbFloor, s));
        out[i] = s;
    }
    return out;
}

std::vector<double> predict_forest(const TrainedModel& m, const FeatureMatrix& x);
std::vector<double> predict_boosted(const TrainedModel& m, const FeatureMatrix& x);

}  // namespace

std::vector<double> predict_risk(const TrainedModel& model, const FeatureMatrix& x) {
    if (x.n_cols != model.feature_names.size() || x.schema_hash() != model.schema_hash) {
        const std::size_t upto = std::min(x.names.size(), model.feature_names.size());
        for (std::size_t j = 0; j < upto; ++j) {
            if (x.names[j] != model.feature_names[j]) {
                throw DataError("predict_risk: schema mismatch at column " + std::to_string(j) +
                                ": model has '" + model.feature_names[j] + "', matrix has '" +
                                x.names[j] + "'");
            }
        }
        throw DataError("predict_risk: schema mismatch: model has " +
                        std::to_string(model.feature_names.size()) + " features, matrix has " +
                        std::to_string(x.n_cols));
    }
    switch (model.method) {
        case Method::LR:
        case Method::PLR: return predict_linear(model, x);
        case Method::RF: return predict_forest(model, x);
        case Method::GBM: return predict_boosted(model, x);
    }
    throw NumericError("predict_risk: unknown method");
}

namespace {

std::vector<double> predict_forest(const TrainedModel& m, const FeatureMatrix& x) {
    std::vector<double> out(x.n_rows, 0.0);
    if (m.trees.empty()) return out;
    for (std::size_t i = 0; i < x.n_rows; ++i) {
        double sum = 0.0;
        for (const auto& t : m.trees) sum += t.predict_row(x.row(i));
        out[i] = sum / static_cast<double>(m.trees.size());
    }
    return out;
}

std::vector<double> predict_boosted(const TrainedModel& m, const FeatureMatrix& x) {
    std::vector<double> out(x.n_rows);
    for (std::size_t i = 0; i < x.n_rows; ++i) {
        double f = m.init_log_odds;
        for (const auto& t : m.trees) f += t.predict_row(x.row(i));
        out[i] = sigmoid(f);
    }
    return out;
}

}  // namespace

}  // namespace ltuprof
