#include "ltuprof/dates.hpp"

#include <chrono>

#include "ltuprof/common.hpp"

namespace ltuprof {

namespace {

namespace chr = std::chrono;

chr::year_month_day to_ymd(std::int32_t days) {
    return chr::year_month_day(chr::sys_days(chr::days(days)));
}

}  // namespace

Date::Date(int year, unsigned month, unsigned day) {
    const chr::year_month_day ymd{chr::year(year), chr::month(month), chr::day(day)};
    if (!ymd.ok()) {
        throw DataError("invalid calendar date " + std::to_string(year) + "-" +
                        std::to_string(month) + "-" + std::to_string(day));
    }
    days_ = static_cast<std::int32_t>(chr::sys_days(ymd).time_since_epoch().count());
}

Date Date::parse_iso(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        throw DataError("malformed date '" + std::string(text) + "' (expect YYYY-MM-DD)");
    }
    auto digits = [&](std::size_t pos, std::size_t len) -> int {
        int v = 0;
        for (std::size_t i = pos; i < pos + len; ++i) {
            const char c = text[i];
            if (c < '0' || c > '9') {
                throw DataError("malformed date '" + std::string(text) + "'");
            }
            v = v * 10 + (c - '0');
        }
        return v;
    };
    return Date(digits(0, 4), static_cast<unsigned>(digits(5, 2)),
                static_cast<unsigned>(digits(8, 2)));
}

std::string Date::to_iso() const {
    const auto ymd = to_ymd(days_);
    char buf[16];
    const int y = static_cast<int>(ymd.year());
    const unsigned m = static_cast<unsigned>(ymd.month());
    const unsigned d = static_cast<unsigned>(ymd.day());
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", y, m, d);
    return std::string(buf);
}

int Date::year() const { return static_cast<int>(to_ymd(days_).year()); }

}  // namespace ltuprof
