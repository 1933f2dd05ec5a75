#pragma once
// Evacuation detection: per-day minimum home distance over the study month,
// activity screening, and away-spell analysis yielding departure, reentry,
// duration, and shelter distance.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "evacuscope/civil.hpp"
#include "evacuscope/geo.hpp"
#include "evacuscope/store.hpp"

namespace evacuscope {

// Per-local-day minimum distance from home; a day without sightings is absent.
struct DailyDistanceSeries {
    LocalDate month_start{0};
    std::vector<std::optional<double>> min_distance_m;  // index d = month_start + d

    LocalDate date_at(size_t idx) const { return month_start.plus(static_cast<int32_t>(idx)); }
    size_t days() const { return min_distance_m.size(); }
};

inline DailyDistanceSeries daily_min_distance(const DeviceTrajectory& t, GeoPoint home,
                                              const DateRange& month) {
    DailyDistanceSeries s;
    s.month_start = month.first;
    s.min_distance_m.assign(static_cast<size_t>(month.length()), std::nullopt);
    for (size_t i = 0; i < t.size(); ++i) {
        LocalDate d = local_day(t.ts[i], t.tz_offset_s[i]);
        if (!month.contains(d)) continue;
        size_t idx = static_cast<size_t>(date_diff(d, month.first));
        double dist = haversine_m({t.lat[i], t.lon[i]}, home);
        auto& slot = s.min_distance_m[idx];
        if (!slot || dist < *slot) slot = dist;
    }
    return s;
}

// Active = seen within the radius of home on at least one day of the month.
inline bool activity_check(const DailyDistanceSeries& s, double home_radius_m = kMileM) {
    for (const auto& d : s.min_distance_m)
        if (d && *d <= home_radius_m) return true;
    return false;
}

struct EvacuationProfile {
    std::string device_id;
    bool active = false;
    bool evacuated = false;
    std::optional<LocalDate> departure_date;  // last at-home day before the spell
    std::optional<LocalDate> reentry_date;    // first at-home day after; absent = censored
    std::optional<int32_t> duration_days;     // reentry - departure when both present
    std::optional<double> shelter_distance_mi;
};

// An away-spell is a maximal run of days each absent or farther than the home
// radius, bounded by at-home days or the month edge. A spell evacuates iff it
// has at least one observed away day and touches the study window; the
// earliest such spell defines the profile. Callers must screen with
// activity_check first.
inline EvacuationProfile detect_evacuation(const DailyDistanceSeries& s, const DateRange& window,
                                           double home_radius_m = kMileM) {
    EvacuationProfile p;
    p.active = true;
    size_t n = s.days();
    auto at_home = [&](size_t i) { return s.min_distance_m[i] && *s.min_distance_m[i] <= home_radius_m; };
    size_t i = 0;
    while (i < n) {
        if (at_home(i)) {
            ++i;
            continue;
        }
        size_t j = i;
        while (j < n && !at_home(j)) ++j;  // spell covers [i, j)
        bool observed_away = false;
        double max_m = 0;
        for (size_t k = i; k < j; ++k)
            if (s.min_distance_m[k]) {
                observed_away = true;
                max_m = std::max(max_m, *s.min_distance_m[k]);
            }
        bool in_window = s.date_at(i) <= window.last && window.first <= s.date_at(j - 1);
        if (observed_away && in_window) {
            p.evacuated = true;
            if (i > 0) p.departure_date = s.date_at(i - 1);
            if (j < n) p.reentry_date = s.date_at(j);
            if (p.departure_date && p.reentry_date)
                p.duration_days = date_diff(*p.reentry_date, *p.departure_date);
            p.shelter_distance_mi = max_m / kMileM;
            return p;
        }
        i = j;
    }
    return p;
}

// Full per-device profile: distance series, activity screen, spell detection.
inline EvacuationProfile profile_device(const DeviceTrajectory& t, GeoPoint home,
                                        const DateRange& month, const DateRange& window,
                                        double home_radius_m = kMileM) {
    DailyDistanceSeries s = daily_min_distance(t, home, month);
    EvacuationProfile p;
    p.device_id = t.device_id;
    if (!activity_check(s, home_radius_m)) return p;  // inactive: everything absent
    p = detect_evacuation(s, window, home_radius_m);
    p.device_id = t.device_id;
    return p;
}

}  // namespace evacuscope
