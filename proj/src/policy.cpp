#include "ltuprof/policy.hpp"

#include <algorithm>
#include <cmath>

#include "ltuprof/common.hpp"

namespace ltuprof {

Policy Policy::top_fraction(double q, std::string name) {
    if (!(q > 0.0 && q < 1.0)) throw UsageError("policy fraction must be in (0,1)");
    Policy p;
    p.kind = Kind::TopFraction;
    p.q = q;
    p.name = std::move(name);
    return p;
}

Policy Policy::middle_band(double upper_q, double lower_q, std::string name) {
    if (!(upper_q > 0.0 && upper_q < 1.0 && lower_q > 0.0 && lower_q < 1.0))
        throw UsageError("policy fractions must be in (0,1)");
    if (!(upper_q < lower_q)) throw UsageError("middle band needs upper_q < lower_q");
    Policy p;
    p.kind = Kind::MiddleBand;
    p.upper_q = upper_q;
    p.lower_q = lower_q;
    p.name = std::move(name);
    return p;
}

std::size_t rank_count(double fraction, std::size_t n) {
    const double raw = fraction * static_cast<double>(n);
    auto k = static_cast<std::size_t>(std::ceil(raw - 1e-9));
    if (k < 1) k = 1;
    if (k > n) k = n;
    return k;
}

std::vector<std::uint32_t> score_order(std::span<const double> scores) {
    std::vector<std::uint32_t> order(scores.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });
    return order;
}

double quantile_threshold(std::span<const double> scores, double fraction) {
    if (scores.empty()) throw DataError("quantile_threshold: empty score vector");
    const std::size_t k = rank_count(fraction, scores.size());
    std::vector<double> v(scores.begin(), scores.end());
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k - 1), v.end(),
                     std::greater<double>());
    return v[k - 1];
}

std::vector<std::uint8_t> classify(std::span<const double> scores, const Policy& policy) {
    const std::size_t n = scores.size();
    std::vector<std::uint8_t> y_hat(n, 0);
    if (n == 0) return y_hat;
    const auto order = score_order(scores);
    std::size_t lo = 0, hi = 0;  // selected ranks are [lo, hi)
    if (policy.kind == Policy::Kind::TopFraction) {
        hi = rank_count(policy.q, n);
    } else {
        lo = rank_count(policy.upper_q, n);
        hi = rank_count(policy.lower_q, n);
    }
    for (std::size_t r = lo; r < hi; ++r) y_hat[order[r]] = 1;
    return y_hat;
}

std::vector<std::uint8_t> classify_by_threshold(std::span<const double> scores,
                                                const Policy& policy) {
    const std::size_t n = scores.size();
    std::vector<std::uint8_t> y_hat(n, 0);
    if (n == 0) return y_hat;
    if (policy.kind == Policy::Kind::TopFraction) {
        const double c = quantile_threshold(scores, policy.q);
        for (std::size_t i = 0; i < n; ++i) y_hat[i] = scores[i] >= c ? 1 : 0;
    } else {
        const double c_upper = quantile_threshold(scores, policy.upper_q);
        const double c_lower = quantile_threshold(scores, policy.lower_q);
        for (std::size_t i = 0; i < n; ++i) {
            y_hat[i] = (scores[i] < c_upper && scores[i] >= c_lower) ? 1 : 0;
        }
    }
    return y_hat;
}

}  // namespace ltuprof
