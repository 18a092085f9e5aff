#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ltuprof {

// Quantile classification policies over risk scores. All selection uses the
// exact-count discipline: rows are ordered by (score desc, index asc) and a
// policy picks a fixed rank range, so group-composition audits are well
// defined under ties.
struct Policy {
    enum class Kind { TopFraction, MiddleBand };
    Kind kind = Kind::TopFraction;
    double q = 0.1;        // TopFraction: select top ceil(q*n)
    double upper_q = 0.0;  // MiddleBand: band starts below rank ceil(upper_q*n)
    double lower_q = 0.0;  // ... and ends at rank ceil(lower_q*n)
    std::string name;

    static Policy top_fraction(double q, std::string name);
    static Policy middle_band(double upper_q, double lower_q, std::string name);
    static Policy p1a() { return top_fraction(0.10, "P1a"); }
    static Policy p1b() { return top_fraction(0.25, "P1b"); }
    static Policy p2() { return middle_band(0.25, 0.75, "P2"); }
};

// Smallest integer >= fraction*n, guarded against the binary representation
// of decimal fractions (0.1*1000 must give 100, not 101).
std::size_t rank_count(double fraction, std::size_t n);

// The k-th largest score with k = ceil(fraction*n).
double quantile_threshold(std::span<const double> scores, double fraction);

// Row indices ordered by (score desc, index asc).
std::vector<std::uint32_t> score_order(std::span<const double> scores);

std::vector<std::uint8_t> classify(std::span<const double> scores, const Policy& policy);

// Variable-count alternative: y_hat = 1 iff score >= threshold (>= lower and
// < upper for bands). Kept behind a flag for comparison; audits use the
// exact-count form.
std::vector<std::uint8_t> classify_by_threshold(std::span<const double> scores,
                                                const Policy& policy);

}  // namespace ltuprof
