#pragma once
// Calendar math on plain day counts. All day/window binning in the pipeline
// runs on local time = utc_seconds + tz_offset_s, so dates are represented as
// days since 1970-01-01 and converted to y/m/d only at the I/O edges.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace evacuscope {

inline constexpr int64_t kSecondsPerDay = 86400;

// A local calendar date as days since 1970-01-01 (negative = before epoch).
struct LocalDate {
    int32_t days = 0;

    friend bool operator==(LocalDate a, LocalDate b) { return a.days == b.days; }
    friend bool operator!=(LocalDate a, LocalDate b) { return a.days != b.days; }
    friend bool operator<(LocalDate a, LocalDate b) { return a.days < b.days; }
    friend bool operator<=(LocalDate a, LocalDate b) { return a.days <= b.days; }
    friend bool operator>(LocalDate a, LocalDate b) { return a.days > b.days; }
    friend bool operator>=(LocalDate a, LocalDate b) { return a.days >= b.days; }

    LocalDate next() const { return LocalDate{days + 1}; }
    LocalDate prev() const { return LocalDate{days - 1}; }
    LocalDate plus(int n) const { return LocalDate{days + n}; }
};

inline int date_diff(LocalDate a, LocalDate b) { return a.days - b.days; }

struct CivilDate {
    int year = 1970;
    unsigned month = 1;  // 1..12
    unsigned day = 1;    // 1..31
};

// Days-from-civil and back, valid across the full int range (proleptic Gregorian).
inline int32_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);               // [0, 399]
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;     // [0, 365]
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;              // [0, 146096]
    return static_cast<int32_t>(era * 146097 + static_cast<int>(doe) - 719468);
}

inline CivilDate civil_from_days(int32_t z) {
    z += 719468;
    const int era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);            // [0, 146096]
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int y = static_cast<int>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);            // [0, 365]
    const unsigned mp = (5 * doy + 2) / 153;                                 // [0, 11]
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;                         // [1, 31]
    const unsigned m = mp + (mp < 10 ? 3 : -9);                              // [1, 12]
    return CivilDate{y + (m <= 2), m, d};
}

inline LocalDate make_date(int y, unsigned m, unsigned d) { return LocalDate{days_from_civil(y, m, d)}; }

inline CivilDate to_civil(LocalDate d) { return civil_from_days(d.days); }

// Floor division so pre-epoch timestamps land on the right day.
inline int64_t floor_div(int64_t a, int64_t b) {
    int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

// Calendar date of (ts + tz_offset_s) interpreted as UTC seconds.
inline LocalDate local_day(int64_t ts, int32_t tz_offset_s) {
    return LocalDate{static_cast<int32_t>(floor_div(ts + tz_offset_s, kSecondsPerDay))};
}

// Seconds past local midnight, in [0, 86400).
inline int local_seconds_of_day(int64_t ts, int32_t tz_offset_s) {
    int64_t t = ts + tz_offset_s;
    return static_cast<int>(t - floor_div(t, kSecondsPerDay) * kSecondsPerDay);
}

// Epoch seconds of local midnight + seconds-of-day for a given offset.
inline int64_t epoch_from_local(LocalDate day, int seconds_of_day, int32_t tz_offset_s) {
    return static_cast<int64_t>(day.days) * kSecondsPerDay + seconds_of_day - tz_offset_s;
}

inline std::string format_date(LocalDate d) {
    CivilDate c = to_civil(d);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", c.year, c.month, c.day);
    return buf;
}

inline std::optional<LocalDate> parse_date(std::string_view s) {
    int y = 0;
    unsigned m = 0, d = 0;
    if (std::sscanf(std::string(s).c_str(), "%d-%u-%u", &y, &m, &d) != 3) return std::nullopt;
    if (m < 1 || m > 12 || d < 1 || d > 31) return std::nullopt;
    return make_date(y, m, d);
}

inline unsigned days_in_month(int y, unsigned m) {
    static const unsigned lens[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && ((y % 4 == 0 && y % 100 != 0) || y % 400 == 0)) return 29;
    return lens[m - 1];
}

// Inclusive day range, e.g. one calendar month.
struct DateRange {
    LocalDate first;
    LocalDate last;

    bool contains(LocalDate d) const { return first <= d && d <= last; }
    int length() const { return date_diff(last, first) + 1; }
};

// "YYYY-MM" -> the whole month.
inline std::optional<DateRange> parse_month(std::string_view s) {
    int y = 0;
    unsigned m = 0;
    if (std::sscanf(std::string(s).c_str(), "%d-%u", &y, &m) != 2) return std::nullopt;
    if (m < 1 || m > 12) return std::nullopt;
    return DateRange{make_date(y, m, 1), make_date(y, m, days_in_month(y, m))};
}

}  // namespace evacuscope
