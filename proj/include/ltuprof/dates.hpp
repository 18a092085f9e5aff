#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace ltuprof {

// Calendar date as days since 1970-01-01. Day-exact arithmetic is the whole
// game for spell merging, so the representation is a plain integer.
class Date {
  public:
    Date() = default;
    explicit Date(std::int32_t days_since_epoch) : days_(days_since_epoch) {}
    Date(int year, unsigned month, unsigned day);

    static Date parse_iso(std::string_view text);  // throws DataError
    std::string to_iso() const;

    std::int32_t days() const { return days_; }
    int year() const;

    Date operator+(int d) const { return Date(days_ + d); }
    Date operator-(int d) const { return Date(days_ - d); }
    // Count of days from other to *this (positive when *this is later).
    int operator-(Date other) const { return days_ - other.days_; }

    auto operator<=>(const Date&) const = default;

  private:
    std::int32_t days_ = 0;
};

}  // namespace ltuprof
