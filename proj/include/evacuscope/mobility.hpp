#pragma once
// Baseline mobility: staypoint detection, recursive trip identification, and
// daily convex-hull metrics, averaged over the baseline month per device.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evacuscope/civil.hpp"
#include "evacuscope/geo.hpp"
#include "evacuscope/store.hpp"

namespace evacuscope {

struct TripParams {
    double roam_m = 300.0;  // staypoint radius and minimum trip displacement
    int64_t dwell_s = 300;  // minimum staypoint duration
    int64_t gap_s = 3600;   // silence longer than this can split a trip
};

struct Staypoint {
    GeoPoint centroid;
    int64_t arrival_ts = 0;
    int64_t departure_ts = 0;
    size_t first = 0;  // member sighting index range [first, last]
    size_t last = 0;

    size_t members() const { return last - first + 1; }
};

struct Trip {
    size_t first = 0;  // sighting index range [first, last], endpoints inclusive
    size_t last = 0;
    int64_t start_ts = 0;
    int64_t end_ts = 0;
    double displacement_m = 0;
};

// One day's time-sorted sightings.
struct DayTrace {
    std::vector<GeoPoint> pts;
    std::vector<int64_t> ts;

    size_t size() const { return pts.size(); }
};

namespace detail {

// Anchor scan: a maximal run of consecutive sightings within roam_m of the
// run's first sighting, spanning at least dwell_s, collapses to a staypoint.
inline void detect_staypoints(const DayTrace& d, size_t begin, size_t end, const TripParams& p,
                              std::vector<Staypoint>& out) {
    out.clear();
    size_t i = begin;
    while (i < end) {
        size_t j = i + 1;
        while (j < end && haversine_m(d.pts[j], d.pts[i]) <= p.roam_m) ++j;
        if (d.ts[j - 1] - d.ts[i] >= p.dwell_s) {
            Staypoint s;
            s.first = i;
            s.last = j - 1;
            s.arrival_ts = d.ts[i];
            s.departure_ts = d.ts[j - 1];
            double sl = 0, sn = 0;
            for (size_t k = i; k < j; ++k) {
                sl += d.pts[k].lat;
                sn += d.pts[k].lon;
            }
            s.centroid = {sl / static_cast<double>(j - i), sn / static_cast<double>(j - i)};
            out.push_back(s);
            i = j;
        } else {
            ++i;
        }
    }
}

inline void collect_trips(const DayTrace& d, size_t a, size_t b, const TripParams& p,
                          std::vector<Trip>& out);

// Candidate trip over [a, b]: split at the leftmost long silence whose
// endpoints actually moved, re-running staypoint detection on each side;
// otherwise keep it if it has >= 2 sightings and net displacement >= roam.
inline void split_segment(const DayTrace& d, size_t a, size_t b, const TripParams& p,
                          std::vector<Trip>& out) {
    if (a >= b) return;
    for (size_t g = a; g < b; ++g) {
        if (d.ts[g + 1] - d.ts[g] > p.gap_s && haversine_m(d.pts[g], d.pts[g + 1]) >= p.roam_m) {
            collect_trips(d, a, g, p, out);
            collect_trips(d, g + 1, b, p, out);
            return;
        }
    }
    double disp = haversine_m(d.pts[a], d.pts[b]);
    if (b - a + 1 >= 2 && disp >= p.roam_m) {
        out.push_back({a, b, d.ts[a], d.ts[b], disp});
    }
}

// Segment [a, b] with staypoint detection re-applied: candidate trips run
// between the side boundaries and any staypoints found inside.
inline void collect_trips(const DayTrace& d, size_t a, size_t b, const TripParams& p,
                          std::vector<Trip>& out) {
    if (a >= b) return;
    std::vector<Staypoint> stays;
    detect_staypoints(d, a, b + 1, p, stays);
    if (stays.empty()) {
        split_segment(d, a, b, p, out);
        return;
    }
    split_segment(d, a, stays.front().first, p, out);
    for (size_t k = 0; k + 1 < stays.size(); ++k)
        split_segment(d, stays[k].last, stays[k + 1].first, p, out);
    split_segment(d, stays.back().last, b, p, out);
}

}  // namespace detail

// Trips for one local day: segments between consecutive staypoints, with the
// recursive gap splitting applied to each. No staypoint pair, no trips.
inline std::vector<Trip> identify_trips(const DayTrace& d, const TripParams& p) {
    std::vector<Trip> out;
    if (d.size() < 2) return out;
    std::vector<Staypoint> stays;
    detail::detect_staypoints(d, 0, d.size(), p, stays);
    for (size_t k = 0; k + 1 < stays.size(); ++k)
        detail::split_segment(d, stays[k].last, stays[k + 1].first, p, out);
    return out;
}

struct HullMetricsDaily {
    double area_km2 = 0;
    double perimeter_km = 0;
};

// Daily hull metrics; undefined (nullopt) when the day has < 3 distinct
// coordinates. Collinear days are defined with zero area.
inline std::optional<HullMetricsDaily> daily_hull_metrics(const std::vector<GeoPoint>& pts) {
    std::vector<GeoPoint> distinct = pts;
    std::sort(distinct.begin(), distinct.end(), [](const GeoPoint& a, const GeoPoint& b) {
        return a.lat != b.lat ? a.lat < b.lat : a.lon < b.lon;
    });
    distinct.erase(std::unique(distinct.begin(), distinct.end(),
                               [](const GeoPoint& a, const GeoPoint& b) {
                                   return a.lat == b.lat && a.lon == b.lon;
                               }),
                   distinct.end());
    if (distinct.size() < 3) return std::nullopt;
    GeoPoint origin = centroid(pts);
    std::vector<PlanarPoint> planar;
    project_local(pts, origin, planar);
    std::vector<PlanarPoint> hull = convex_hull(planar);
    HullMetrics m = hull_area_perimeter(hull);
    return HullMetricsDaily{m.area_km2, m.perimeter_km};
}

struct MobilityBaseline {
    std::string device_id;
    double avg_daily_trips = 0;        // over days with >= 1 sighting
    double avg_daily_hull_area_km2 = 0;   // over days with a defined hull
    double avg_daily_hull_perimeter_km = 0;
    uint32_t observed_days = 0;
    uint32_t hull_days = 0;
};

enum class MobilityStatus { kOk, kNoBaselineData };

// Group a trajectory's baseline-month sightings by local day, in time order.
inline std::map<LocalDate, DayTrace> day_traces(const DeviceTrajectory& t, const DateRange& month) {
    std::map<LocalDate, DayTrace> days;
    for (size_t i = 0; i < t.size(); ++i) {
        LocalDate d = local_day(t.ts[i], t.tz_offset_s[i]);
        if (!month.contains(d)) continue;
        DayTrace& tr = days[d];
        tr.pts.push_back({t.lat[i], t.lon[i]});
        tr.ts.push_back(t.ts[i]);
    }
    return days;
}

// Monthly averages. Trip average divides by observed days; hull averages
// divide by days with a defined hull (zero such days leaves them 0).
inline MobilityStatus baseline_summary(const DeviceTrajectory& t, const DateRange& month,
                                       const TripParams& p, MobilityBaseline& out) {
    out = MobilityBaseline{};
    out.device_id = t.device_id;
    std::map<LocalDate, DayTrace> days = day_traces(t, month);
    if (days.empty()) return MobilityStatus::kNoBaselineData;
    uint64_t total_trips = 0;
    double area_sum = 0, perim_sum = 0;
    for (const auto& [day, trace] : days) {
        total_trips += identify_trips(trace, p).size();
        if (auto h = daily_hull_metrics(trace.pts)) {
            area_sum += h->area_km2;
            perim_sum += h->perimeter_km;
            ++out.hull_days;
        }
    }
    out.observed_days = static_cast<uint32_t>(days.size());
    out.avg_daily_trips = static_cast<double>(total_trips) / out.observed_days;
    if (out.hull_days > 0) {
        out.avg_daily_hull_area_km2 = area_sum / out.hull_days;
        out.avg_daily_hull_perimeter_km = perim_sum / out.hull_days;
    }
    return MobilityStatus::kOk;
}

}  // namespace evacuscope
