#pragma once
// Home inference: density-cluster a device's nighttime sightings over the
// baseline month and take the strongest cluster's centroid as home.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <unordered_map>
#include <vector>

#include "evacuscope/civil.hpp"
#include "evacuscope/geo.hpp"
#include "evacuscope/store.hpp"

namespace evacuscope {

struct DbscanParams {
    double eps_m = 150.0;
    size_t min_pts = 5;  // neighborhood size including the point itself
};

constexpr int kNoiseLabel = -1;

struct DbscanResult {
    std::vector<int> labels;  // cluster id per point, kNoiseLabel for noise
    int clusters = 0;         // ids are 0..clusters-1 in discovery order
};

namespace detail {

// Uniform lat/lon grid with cells at least eps wide everywhere in the data's
// latitude range, so an eps-ball is always covered by the 3x3 neighborhood.
class GeoGrid {
  public:
    GeoGrid(const std::vector<GeoPoint>& pts, double eps_m) : pts_(pts) {
        double max_abs_lat = 0;
        for (const auto& p : pts) max_abs_lat = std::max(max_abs_lat, std::abs(p.lat));
        constexpr double kMetersPerDegFloor = 111000.0;  // < pi*R/180, keeps cells >= eps tall
        cell_lat_ = eps_m / kMetersPerDegFloor;
        double cos_lat = std::max(0.05, std::cos(max_abs_lat * kDegToRad));
        cell_lon_ = eps_m / (kMetersPerDegFloor * cos_lat);
        for (size_t i = 0; i < pts.size(); ++i) cells_[key(pts[i])].push_back(i);
    }

    // All points within eps of pts[i] (self included), ascending index order.
    void neighbors(size_t i, double eps_m, std::vector<size_t>& out) const {
        out.clear();
        auto [cy, cx] = cell(pts_[i]);
        for (int64_t dy = -1; dy <= 1; ++dy)
            for (int64_t dx = -1; dx <= 1; ++dx) {
                auto it = cells_.find(pack(cy + dy, cx + dx));
                if (it == cells_.end()) continue;
                for (size_t j : it->second)
                    if (haversine_m(pts_[i], pts_[j]) <= eps_m) out.push_back(j);
            }
        std::sort(out.begin(), out.end());
    }

  private:
    std::pair<int64_t, int64_t> cell(const GeoPoint& p) const {
        return {static_cast<int64_t>(std::floor(p.lat / cell_lat_)),
                static_cast<int64_t>(std::floor(p.lon / cell_lon_))};
    }
    static uint64_t pack(int64_t cy, int64_t cx) {
        return (static_cast<uint64_t>(cy) << 32) ^ (static_cast<uint64_t>(cx) & 0xffffffffull);
    }
    uint64_t key(const GeoPoint& p) const {
        auto [cy, cx] = cell(p);
        return pack(cy, cx);
    }

    const std::vector<GeoPoint>& pts_;
    double cell_lat_ = 0, cell_lon_ = 0;
    std::unordered_map<uint64_t, std::vector<size_t>> cells_;
};

}  // namespace detail

// Haversine DBSCAN. Deterministic: points are seeded in index order and
// neighborhoods expand in index order, so labels depend only on the input
// sequence. A point first reached as a border member stays with that cluster.
inline DbscanResult dbscan(const std::vector<GeoPoint>& pts, const DbscanParams& params) {
    constexpr int kUnvisited = -2;
    DbscanResult res;
    res.labels.assign(pts.size(), kUnvisited);
    if (pts.empty()) return res;
    detail::GeoGrid grid(pts, params.eps_m);
    std::vector<size_t> nbr;
    std::deque<size_t> seeds;
    for (size_t i = 0; i < pts.size(); ++i) {
        if (res.labels[i] != kUnvisited) continue;
        grid.neighbors(i, params.eps_m, nbr);
        if (nbr.size() < params.min_pts) {
            res.labels[i] = kNoiseLabel;
            continue;
        }
        int cluster = res.clusters++;
        res.labels[i] = cluster;
        seeds.assign(nbr.begin(), nbr.end());
        while (!seeds.empty()) {
            size_t j = seeds.front();
            seeds.pop_front();
            if (res.labels[j] == kNoiseLabel) res.labels[j] = cluster;  // border point
            if (res.labels[j] != kUnvisited) continue;
            res.labels[j] = cluster;
            grid.neighbors(j, params.eps_m, nbr);
            if (nbr.size() >= params.min_pts) seeds.insert(seeds.end(), nbr.begin(), nbr.end());
        }
    }
    return res;
}

struct NightWindow {
    int32_t start_s = 19 * 3600;  // local seconds of day, inclusive
    int32_t end_s = 7 * 3600;     // exclusive; start > end wraps past midnight

    bool contains(int32_t sec) const {
        return start_s <= end_s ? (sec >= start_s && sec < end_s) : (sec >= start_s || sec < end_s);
    }
};

enum class HomeStatus { kOk, kInsufficientData };

struct HomeResult {
    HomeStatus status = HomeStatus::kInsufficientData;
    double home_lat = 0;
    double home_lon = 0;
    uint64_t night_sightings = 0;
    int clusters = 0;
    double confidence = 0;  // winning cluster share of night sightings
};

// Night sightings of one device inside `baseline`, in time order.
inline void collect_night_sightings(const DeviceTrajectory& t, const DateRange& baseline,
                                    const NightWindow& window, std::vector<GeoPoint>& pts,
                                    std::vector<int64_t>& ts) {
    pts.clear();
    ts.clear();
    for (size_t i = 0; i < t.size(); ++i) {
        if (!baseline.contains(local_day(t.ts[i], t.tz_offset_s[i]))) continue;
        if (!window.contains(local_seconds_of_day(t.ts[i], t.tz_offset_s[i]))) continue;
        pts.push_back({t.lat[i], t.lon[i]});
        ts.push_back(t.ts[i]);
    }
}

// Largest night cluster wins; ties go to the cluster whose earliest member
// sighting is earliest (then to the earlier-discovered cluster). Devices with
// fewer than min_pts night sightings, or none that cluster, yield no home.
inline HomeResult infer_home(const DeviceTrajectory& t, const DateRange& baseline,
                             const DbscanParams& params, const NightWindow& window = {}) {
    HomeResult res;
    std::vector<GeoPoint> pts;
    std::vector<int64_t> ts;
    collect_night_sightings(t, baseline, window, pts, ts);
    res.night_sightings = pts.size();
    if (pts.size() < params.min_pts) return res;
    DbscanResult db = dbscan(pts, params);
    res.clusters = db.clusters;
    if (db.clusters == 0) return res;

    std::vector<uint64_t> size(db.clusters, 0);
    std::vector<int64_t> earliest(db.clusters, std::numeric_limits<int64_t>::max());
    std::vector<double> sum_lat(db.clusters, 0), sum_lon(db.clusters, 0);
    for (size_t i = 0; i < pts.size(); ++i) {
        int c = db.labels[i];
        if (c == kNoiseLabel) continue;
        ++size[c];
        earliest[c] = std::min(earliest[c], ts[i]);
        sum_lat[c] += pts[i].lat;
        sum_lon[c] += pts[i].lon;
    }
    int best = 0;
    for (int c = 1; c < db.clusters; ++c) {
        if (size[c] > size[best] || (size[c] == size[best] && earliest[c] < earliest[best])) best = c;
    }
    res.status = HomeStatus::kOk;
    res.home_lat = sum_lat[best] / static_cast<double>(size[best]);
    res.home_lon = sum_lon[best] / static_cast<double>(size[best]);
    res.confidence = static_cast<double>(size[best]) / static_cast<double>(pts.size());
    return res;
}

}  // namespace evacuscope
