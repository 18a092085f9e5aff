#include "ltuprof/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "ltuprof/common.hpp"

namespace ltuprof {

namespace {

void check_lengths(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw DataError(std::string(what) + ": length mismatch " + std::to_string(a) + " vs " +
                        std::to_string(b));
    }
    if (a == 0) throw DataError(std::string(what) + ": empty input");
}

}  // namespace

double accuracy(std::span<const std::uint8_t> y_hat, std::span<const std::uint8_t> y) {
    check_lengths(y_hat.size(), y.size(), "accuracy");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < y.size(); ++i) hits += (y_hat[i] == y[i]);
    return static_cast<double>(hits) / static_cast<double>(y.size());
}

double precision_at_k(std::span<const double> scores, std::span<const std::uint8_t> y,
                      std::size_t k) {
    check_lengths(scores.size(), y.size(), "precision_at_k");
    if (k < 1 || k > scores.size()) throw DataError("precision_at_k: k out of range");
    const auto order = score_order(scores);
    std::size_t tp = 0;
    for (std::size_t r = 0; r < k; ++r) tp += y[order[r]];
    return static_cast<double>(tp) / static_cast<double>(k);
}

std::optional<double> recall_at_k(std::span<const double> scores,
                                  std::span<const std::uint8_t> y, std::size_t k) {
    check_lengths(scores.size(), y.size(), "recall_at_k");
    if (k < 1 || k > scores.size()) throw DataError("recall_at_k: k out of range");
    std::size_t positives = 0;
    for (auto v : y) positives += v;
    if (positives == 0) return std::nullopt;
    const auto order = score_order(scores);
    std::size_t tp = 0;
    for (std::size_t r = 0; r < k; ++r) tp += y[order[r]];
    return static_cast<double>(tp) / static_cast<double>(positives);
}

double f1_from(double precision, double recall) {
    const double denom = precision + recall;
    if (denom <= 0.0) return 0.0;
    return 2.0 * precision * recall / denom;
}

std::optional<double> roc_auc(std::span<const double> scores, std::span<const std::uint8_t> y) {
    check_lengths(scores.size(), y.size(), "roc_auc");
    const std::size_t n = scores.size();
    std::size_t n_pos = 0;
    for (auto v : y) n_pos += v;
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) return std::nullopt;

    std::vector<std::uint32_t> idx(n);
    for (std::uint32_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::uint32_t a, std::uint32_t b) { return scores[a] < scores[b]; });

    // Rank-sum with midranks for ties.
    double pos_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[idx[j]] == scores[idx[i]]) ++j;
        const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
        for (std::size_t t = i; t < j; ++t) {
            if (y[idx[t]]) pos_rank_sum += mid_rank;
        }
        i = j;
    }
    const double np = static_cast<double>(n_pos);
    const double u = pos_rank_sum - np * (np + 1.0) / 2.0;
    return u / (np * static_cast<double>(n_neg));
}

std::optional<double> pr_auc(std::span<const double> scores, std::span<const std::uint8_t> y) {
    check_lengths(scores.size(), y.size(), "pr_auc");
    std::size_t n_pos = 0;
    for (auto v : y) n_pos += v;
    if (n_pos == 0 || n_pos == y.size()) return std::nullopt;
    const auto order = score_order(scores);
    double ap = 0.0;
    std::size_t tp = 0;
    for (std::size_t r = 0; r < order.size(); ++r) {
        if (y[order[r]]) {
            ++tp;
            ap += static_cast<double>(tp) / static_cast<double>(r + 1);
        }
    }
    return ap / static_cast<double>(n_pos);
}

PerfReport evaluate_policy(std::span<const double> scores, std::span<const std::uint8_t> y,
                           const Policy& policy) {
    check_lengths(scores.size(), y.size(), "evaluate_policy");
    const auto y_hat = classify(scores, policy);
    PerfReport rep;
    rep.policy = policy.name;
    std::size_t selected = 0, tp = 0, positives = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        selected += y_hat[i];
        positives += y[i];
        tp += static_cast<std::size_t>(y_hat[i]) & static_cast<std::size_t>(y[i]);
    }
    rep.k = selected;
    rep.accuracy = accuracy(y_hat, y);
    rep.precision = selected > 0 ? static_cast<double>(tp) / static_cast<double>(selected) : 0.0;
    if (positives > 0) {
        rep.recall = static_cast<double>(tp) / static_cast<double>(positives);
        rep.f1 = f1_from(rep.precision, *rep.recall);
    }
    rep.roc_auc = roc_auc(scores, y);
    rep.pr_auc = pr_auc(scores, y);
    return rep;
}

std::vector<SweepRow> threshold_sweep(std::span<const double> scores,
                                      std::span<const std::uint8_t> y, const GroupMasks& groups,
                                      std::span<const double> fractions) {
    check_lengths(scores.size(), y.size(), "threshold_sweep");
    const std::size_t n = scores.size();
    const auto order = score_order(scores);

    std::vector<std::size_t> tp_prefix(n + 1, 0);
    const std::size_t n_groups = groups.unprivileged.size();
    std::vector<std::vector<std::size_t>> grp_prefix(n_groups, std::vector<std::size_t>(n + 1, 0));
    std::vector<std::size_t> grp_total(n_groups, 0);
    for (std::size_t g = 0; g < n_groups; ++g) {
        check_lengths(groups.unprivileged[g].size(), y.size(), "threshold_sweep groups");
        for (auto v : groups.unprivileged[g]) grp_total[g] += v;
    }
    std::size_t positives = 0;
    for (auto v : y) positives += v;
    for (std::size_t r = 0; r < n; ++r) {
        const auto row = order[r];
        tp_prefix[r + 1] = tp_prefix[r] + y[row];
        for (std::size_t g = 0; g < n_groups; ++g) {
            grp_prefix[g][r + 1] = grp_prefix[g][r] + groups.unprivileged[g][row];
        }
    }

    std::vector<SweepRow> out;
    out.reserve(fractions.size());
    for (double f : fractions) {
        const std::size_t k = rank_count(f, n);
        SweepRow row;
        row.fraction = f;
        row.threshold = scores[order[k - 1]];
        const double tp = static_cast<double>(tp_prefix[k]);
        row.precision = tp / static_cast<double>(k);
        row.recall = positives > 0 ? tp / static_cast<double>(positives) : 0.0;
        row.f1 = f1_from(row.precision, row.recall);
        row.spd.resize(n_groups, 0.0);
        for (std::size_t g = 0; g < n_groups; ++g) {
            const double n_u = static_cast<double>(grp_total[g]);
            const double n_p = static_cast<double>(n - grp_total[g]);
            const double sel_u = static_cast<double>(grp_prefix[g][k]);
            const double sel_p = static_cast<double>(k) - sel_u;
            if (n_u > 0 && n_p > 0) {
                row.spd[g] = sel_u / n_u - sel_p / n_p;
            } else {
                row.spd[g] = std::nan("");
            }
        }
        out.push_back(std::move(row));
    }
    return out;
}

}  // namespace ltuprof
