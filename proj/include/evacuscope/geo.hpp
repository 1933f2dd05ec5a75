#pragma once
// Pure geometry kernels: great-circle distance, local tangent projection,
// convex hull with area/perimeter, point-in-polygon, gridded elevation lookup.
// Everything here is reentrant and allocation-light; no I/O.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "evacuscope/civil.hpp"

namespace evacuscope {

inline constexpr double kEarthRadiusM = 6371000.0;
inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kMileM = 1609.344;  // exactly
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegToRad = kPi / 180.0;

struct GeoPoint {
    double lat = 0;  // decimal degrees, [-90, 90]
    double lon = 0;  // decimal degrees, [-180, 180]
};

struct PlanarPoint {
    double x = 0;  // km east of projection origin
    double y = 0;  // km north of projection origin
};

// Great-circle distance in meters on the R = 6,371,000 m sphere.
inline double haversine_m(const GeoPoint& a, const GeoPoint& b) {
    double phi1 = a.lat * kDegToRad;
    double phi2 = b.lat * kDegToRad;
    double dphi = (b.lat - a.lat) * kDegToRad;
    double dlam = (b.lon - a.lon) * kDegToRad;
    double sp = std::sin(dphi / 2);
    double sl = std::sin(dlam / 2);
    double h = sp * sp + std::cos(phi1) * std::cos(phi2) * sl * sl;
    h = std::min(1.0, std::max(0.0, h));
    return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

inline double haversine_mi(const GeoPoint& a, const GeoPoint& b) { return haversine_m(a, b) / kMileM; }

// Equirectangular projection about `origin`: x = R cos(lat0) dlon, y = R dlat (km).
// Adequate for point sets within a few hundred km of the origin.
inline PlanarPoint project_local(const GeoPoint& p, const GeoPoint& origin) {
    double cos0 = std::cos(origin.lat * kDegToRad);
    return PlanarPoint{kEarthRadiusKm * (p.lon - origin.lon) * kDegToRad * cos0,
                       kEarthRadiusKm * (p.lat - origin.lat) * kDegToRad};
}

inline void project_local(const std::vector<GeoPoint>& pts, const GeoPoint& origin, std::vector<PlanarPoint>& out) {
    out.clear();
    out.reserve(pts.size());
    for (const auto& p : pts) out.push_back(project_local(p, origin));
}

// Inverse of project_local; used by the synthetic generator to place anchors
// at planted km offsets.
inline GeoPoint unproject_local(const PlanarPoint& p, const GeoPoint& origin) {
    double cos0 = std::cos(origin.lat * kDegToRad);
    return GeoPoint{origin.lat + p.y / (kEarthRadiusKm * kDegToRad),
                    origin.lon + p.x / (kEarthRadiusKm * kDegToRad * cos0)};
}

inline GeoPoint centroid(const std::vector<GeoPoint>& pts) {
    double la = 0, lo = 0;
    for (const auto& p : pts) {
        la += p.lat;
        lo += p.lon;
    }
    double n = pts.empty() ? 1.0 : static_cast<double>(pts.size());
    return GeoPoint{la / n, lo / n};
}

inline double cross(const PlanarPoint& o, const PlanarPoint& a, const PlanarPoint& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Monotone-chain convex hull, counter-clockwise, collinear interior points
// dropped. Degenerate inputs yield degenerate hulls: one distinct point -> one
// vertex, collinear set -> the two extreme points.
inline std::vector<PlanarPoint> convex_hull(std::vector<PlanarPoint> pts) {
    std::sort(pts.begin(), pts.end(), [](const PlanarPoint& a, const PlanarPoint& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const PlanarPoint& a, const PlanarPoint& b) { return a.x == b.x && a.y == b.y; }),
              pts.end());
    size_t n = pts.size();
    if (n <= 2) return pts;
    std::vector<PlanarPoint> hull(2 * n);
    size_t k = 0;
    for (size_t i = 0; i < n; ++i) {  // lower chain
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    for (size_t i = n - 1, t = k + 1; i-- > 0;) {  // upper chain
        while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

struct HullMetrics {
    double area_km2 = 0;
    double perimeter_km = 0;
};

// Shoelace area plus closed-ring perimeter. A 2-point hull has area 0 and
// perimeter 2x the segment length (out-and-back); a single point gives (0, 0).
inline HullMetrics hull_area_perimeter(const std::vector<PlanarPoint>& hull) {
    HullMetrics m;
    size_t n = hull.size();
    if (n < 2) return m;
    double area2 = 0;
    for (size_t i = 0; i < n; ++i) {
        const PlanarPoint& a = hull[i];
        const PlanarPoint& b = hull[(i + 1) % n];
        area2 += a.x * b.y - b.x * a.y;
        m.perimeter_km += std::hypot(b.x - a.x, b.y - a.y);
    }
    m.area_km2 = std::abs(area2) / 2.0;
    return m;
}

enum class OrderType : int32_t { kNone = 0, kVoluntary = 1, kMandatory = 2 };

inline const char* order_type_name(OrderType t) {
    switch (t) {
        case OrderType::kVoluntary: return "voluntary";
        case OrderType::kMandatory: return "mandatory";
        default: return "none";
    }
}

inline std::optional<OrderType> order_type_from_name(const std::string& s) {
    if (s == "none") return OrderType::kNone;
    if (s == "voluntary") return OrderType::kVoluntary;
    if (s == "mandatory") return OrderType::kMandatory;
    return std::nullopt;
}

// Evacuation-zone polygon (rings closed: first vertex repeated last).
struct ZonePolygon {
    int64_t zone_id = 0;
    std::string county;
    OrderType order_type = OrderType::kNone;
    std::optional<LocalDate> order_date;
    std::vector<std::vector<GeoPoint>> rings;
};

namespace detail {

// p strictly between a and b on the segment, or at an endpoint.
inline bool on_segment(double px, double py, double ax, double ay, double bx, double by) {
    double cr = (bx - ax) * (py - ay) - (by - ay) * (px - ax);
    double scale = std::max({std::abs(ax), std::abs(ay), std::abs(bx), std::abs(by), 1.0});
    if (std::abs(cr) > 1e-12 * scale * scale) return false;
    return px >= std::min(ax, bx) - 1e-15 && px <= std::max(ax, bx) + 1e-15 &&
           py >= std::min(ay, by) - 1e-15 && py <= std::max(ay, by) + 1e-15;
}

}  // namespace detail

// Even-odd ray casting in lon/lat space; boundary points count as inside.
inline bool point_in_polygon(const GeoPoint& p, const std::vector<std::vector<GeoPoint>>& rings) {
    bool inside = false;
    for (const auto& ring : rings) {
        size_t n = ring.size();
        if (n < 2) continue;
        // closed ring: skip the repeated last vertex when present
        size_t m = (ring.front().lat == ring.back().lat && ring.front().lon == ring.back().lon) ? n - 1 : n;
        for (size_t i = 0; i < m; ++i) {
            const GeoPoint& a = ring[i];
            const GeoPoint& b = ring[(i + 1) % m];
            if (detail::on_segment(p.lon, p.lat, a.lon, a.lat, b.lon, b.lat)) return true;
            // half-open vertex rule on latitude
            if ((a.lat > p.lat) != (b.lat > p.lat)) {
                double x = a.lon + (p.lat - a.lat) / (b.lat - a.lat) * (b.lon - a.lon);
                if (p.lon < x) inside = !inside;
            }
        }
    }
    return inside;
}

inline bool point_in_polygon(const GeoPoint& p, const ZonePolygon& poly) {
    return point_in_polygon(p, poly.rings);
}

// Regular lat/lon grid of elevations. origin = center of cell (row 0, col 0);
// row index grows north, column index grows east.
struct ElevationGrid {
    GeoPoint origin;
    double cell_deg = 0;
    int32_t nrows = 0;
    int32_t ncols = 0;
    double nodata = -9999;
    std::vector<double> values;  // row-major, nrows*ncols

    double at(int32_t r, int32_t c) const { return values[static_cast<size_t>(r) * ncols + c]; }
};

// Nearest-cell lookup; outside the grid -> nullopt.
inline std::optional<double> elevation_at(const GeoPoint& p, const ElevationGrid& grid) {
    if (grid.cell_deg <= 0 || grid.nrows <= 0 || grid.ncols <= 0) return std::nullopt;
    double rf = (p.lat - grid.origin.lat) / grid.cell_deg;
    double cf = (p.lon - grid.origin.lon) / grid.cell_deg;
    int32_t r = static_cast<int32_t>(std::lround(rf));
    int32_t c = static_cast<int32_t>(std::lround(cf));
    if (r < 0 || r >= grid.nrows || c < 0 || c >= grid.ncols) return std::nullopt;
    double v = grid.at(r, c);
    if (v == grid.nodata) return std::nullopt;
    return v;
}

}  // namespace evacuscope
