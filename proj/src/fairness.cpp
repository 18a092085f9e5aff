#include "ltuprof/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ltuprof/common.hpp"
#include "ltuprof/parallel.hpp"

namespace ltuprof {

std::optional<double> spd(std::span<const std::uint8_t> y_hat,
                          std::span<const std::uint8_t> unprivileged, GroupRates* rates) {
    if (y_hat.size() != unprivileged.size()) throw DataError("spd: length mismatch");
    std::size_t n_u = 0, n_p = 0, pos_u = 0, pos_p = 0;
    for (std::size_t i = 0; i < y_hat.size(); ++i) {
        if (unprivileged[i]) {
            ++n_u;
            pos_u += y_hat[i];
        } else {
            ++n_p;
            pos_p += y_hat[i];
        }
    }
    if (n_u == 0 || n_p == 0) return std::nullopt;
    const double rate_u = static_cast<double>(pos_u) / static_cast<double>(n_u);
    const double rate_p = static_cast<double>(pos_p) / static_cast<double>(n_p);
    if (rates) *rates = {n_u, n_p, rate_u, rate_p};
    return rate_u - rate_p;
}

std::optional<double> conditional_spd(std::span<const std::uint8_t> y_hat,
                                      std::span<const std::uint8_t> unprivileged,
                                      std::span<const std::uint8_t> cond, GroupRates* rates) {
    if (y_hat.size() != cond.size()) throw DataError("conditional_spd: length mismatch");
    std::vector<std::uint8_t> yh, up;
    yh.reserve(y_hat.size());
    up.reserve(y_hat.size());
    for (std::size_t i = 0; i < y_hat.size(); ++i) {
        if (cond[i]) {
            yh.push_back(y_hat[i]);
            up.push_back(unprivileged[i]);
        }
    }
    if (yh.empty()) return std::nullopt;
    return spd(yh, up, rates);
}

std::vector<std::vector<std::uint32_t>> knn_neighbors(std::span<const double> x,
                                                      std::size_t n_rows, std::size_t n_cols,
                                                      std::size_t n_neighbors,
                                                      bool min_max_scale) {
    if (x.size() != n_rows * n_cols) throw DataError("knn_neighbors: bad matrix shape");
    if (n_rows <= n_neighbors) throw DataError("knn_neighbors: need n_rows > n_neighbors");

    std::vector<double> scaled;
    const double* data = x.data();
    if (min_max_scale) {
        scaled.assign(x.begin(), x.end());
        for (std::size_t j = 0; j < n_cols; ++j) {
            double lo = scaled[j], hi = scaled[j];
            for (std::size_t i = 1; i < n_rows; ++i) {
                const double v = scaled[i * n_cols + j];
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            const double range = hi - lo;
            if (range > 0.0) {
                const double inv = 1.0 / range;
                for (std::size_t i = 0; i < n_rows; ++i) {
                    scaled[i * n_cols + j] = (scaled[i * n_cols + j] - lo) * inv;
                }
            } else {
                for (std::size_t i = 0; i < n_rows; ++i) scaled[i * n_cols + j] = 0.0;
            }
        }
        data = scaled.data();
    }

    std::vector<std::vector<std::uint32_t>> neighbors(n_rows);
    parallel_for(n_rows, [&](std::size_t i) {
        // Exact top-k scan; ties on distance prefer the lower row index,
        // which the ascending scan gives for free with strict '<'.
        std::vector<std::pair<double, std::uint32_t>> best;
        best.reserve(n_neighbors + 1);
        const double* xi = data + i * n_cols;
        for (std::size_t r = 0; r < n_rows; ++r) {
            if (r == i) continue;
            const double* xr = data + r * n_cols;
            double d2 = 0.0;
            for (std::size_t j = 0; j < n_cols; ++j) {
                const double diff = xi[j] - xr[j];
                d2 += diff * diff;
            }
            if (best.size() == n_neighbors && d2 >= best.back().first) continue;
            const std::pair<double, std::uint32_t> cand{d2, static_cast<std::uint32_t>(r)};
            auto pos = std::upper_bound(
                best.begin(), best.end(), cand,
                [](const auto& a, const auto& b) { return a.first < b.first; });
            best.insert(pos, cand);
            if (best.size() > n_neighbors) best.pop_back();
        }
        auto& out = neighbors[i];
        out.reserve(n_neighbors);
        for (const auto& [d2, r] : best) out.push_back(r);
    });
    return neighbors;
}

double consistency_from_neighbors(std::span<const std::uint8_t> y_hat,
                                  const std::vector<std::vector<std::uint32_t>>& neighbors) {
    if (y_hat.size() != neighbors.size()) throw DataError("consistency: length mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < y_hat.size(); ++i) {
        double mean = 0.0;
        for (auto r : neighbors[i]) mean += y_hat[r];
        mean /= static_cast<double>(neighbors[i].size());
        total += std::abs(static_cast<double>(y_hat[i]) - mean);
    }
    return 1.0 - total / static_cast<double>(y_hat.size());
}

double consistency(std::span<const std::uint8_t> y_hat, std::span<const double> x,
                   std::size_t n_rows, std::size_t n_cols, std::size_t n_neighbors,
                   bool min_max_scale) {
    const auto neighbors = knn_neighbors(x, n_rows, n_cols, n_neighbors, min_max_scale);
    return consistency_from_neighbors(y_hat, neighbors);
}

std::vector<PrevalenceRow> group_prevalence_table(const GroupColumns& cols,
                                                  std::span<const std::uint8_t> outcome) {
    const std::size_t n = cols.year.size();
    if (cols.female.size() != n || cols.non_german.size() != n || outcome.size() != n) {
        throw DataError("group_prevalence_table: column length mismatch");
    }
    struct Acc {
        std::size_t count = 0;
        std::size_t female = 0;
        std::size_t nonger = 0;
        std::size_t nonger_m = 0;
        std::size_t nonger_f = 0;
    };
    std::map<std::pair<int, int>, Acc> cells;  // (year, stratum 0=overall 1=ltu 2=no_ltu)
    for (std::size_t i = 0; i < n; ++i) {
        const int strata[2] = {0, outcome[i] ? 1 : 2};
        for (int s : strata) {
            Acc& a = cells[{cols.year[i], s}];
            ++a.count;
            a.female += cols.female[i];
            a.nonger += cols.non_german[i];
            if (cols.non_german[i]) {
                if (cols.female[i]) {
                    ++a.nonger_f;
                } else {
                    ++a.nonger_m;
                }
            }
        }
    }
    std::vector<PrevalenceRow> out;
    static const char* stratum_names[3] = {"overall", "ltu", "no_ltu"};
    for (const auto& [key, a] : cells) {
        PrevalenceRow row;
        row.year = key.first;
        row.stratum = stratum_names[key.second];
        row.count = a.count;
        const double c = static_cast<double>(a.count);
        row.frac_female = static_cast<double>(a.female) / c;
        row.frac_non_german = static_cast<double>(a.nonger) / c;
        row.frac_non_german_male = static_cast<double>(a.nonger_m) / c;
        row.frac_non_german_female = static_cast<double>(a.nonger_f) / c;
        out.push_back(std::move(row));
    }
    return out;
}

}  // namespace ltuprof
