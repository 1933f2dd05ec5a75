#pragma once
// Context joins: home location -> evacuation zone (order type/date, county),
// elevation and elevation bin, and census-tract attributes.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "evacuscope/civil.hpp"
#include "evacuscope/csv.hpp"
#include "evacuscope/fsio.hpp"
#include "evacuscope/geo.hpp"
#include "evacuscope/geofiles.hpp"

namespace evacuscope {

struct TractAttributes {
    std::string tract_id;
    std::optional<double> median_age;
    std::optional<double> median_income;
    std::optional<double> vehicle_pct;  // households with >= 1 vehicle, percent
    std::optional<double> race_white;   // fraction in [0,1]

    bool complete() const { return median_age && median_income && vehicle_pct && race_white; }
};

struct DeviceContext {
    std::string device_id;
    std::optional<int64_t> zone_id;
    std::string county;  // empty when outside every zone
    OrderType order = OrderType::kNone;
    std::optional<LocalDate> order_date;
    std::optional<double> elevation_m;
    int elevation_bin = 0;  // 1..3; 0 = no elevation data
    std::optional<TractAttributes> tract;
};

// Bin boundaries: below 10 m is bin 1, 10..50 m inclusive is bin 2, above 50 m
// is bin 3. Total over all of R.
inline int elevation_bin_of(double e) {
    if (e < 10.0) return 1;
    if (e <= 50.0) return 2;
    return 3;
}

// Index of the zone containing home, or npos. Several containing zones (edge
// homes) resolve to the lowest zone_id; `ambiguous` reports that happened.
inline size_t assign_zone(GeoPoint home, const std::vector<ZonePolygon>& zones, bool& ambiguous) {
    size_t best = static_cast<size_t>(-1);
    size_t hits = 0;
    for (size_t i = 0; i < zones.size(); ++i) {
        if (!point_in_polygon(home, zones[i].rings)) continue;
        ++hits;
        if (best == static_cast<size_t>(-1) || zones[i].zone_id < zones[best].zone_id) best = i;
    }
    ambiguous = hits > 1;
    return best;
}

// Reference datasets shared read-only across devices.
struct ReferenceData {
    std::vector<ZonePolygon> zones;
    std::optional<ElevationGrid> grid;
    std::vector<TractPolygon> tract_polygons;
    std::map<std::string, TractAttributes> tract_attrs;
    std::unordered_map<std::string, std::string> device_tract;  // sidecar fallback
};

inline std::map<std::string, TractAttributes> load_tract_attributes(const std::string& path) {
    std::map<std::string, TractAttributes> out;
    LineReader rd(path);
    std::string_view line;
    bool first = true;
    while (rd.next(line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.rfind("tract_id", 0) == 0) continue;  // header
        }
        std::string_view f[6];
        if (split_fields(line, ',', f, 6) != 5)
            throw std::runtime_error("tracts file: expected 5 fields: " + std::string(line));
        TractAttributes t;
        t.tract_id.assign(f[0]);
        auto opt = [&](std::string_view v) -> std::optional<double> {
            if (v.empty()) return std::nullopt;
            auto d = parse_f64(v);
            if (!d) throw std::runtime_error("tracts file: bad number: " + std::string(v));
            return d;
        };
        t.median_age = opt(f[1]);
        t.median_income = opt(f[2]);
        t.vehicle_pct = opt(f[3]);
        t.race_white = opt(f[4]);
        if (t.median_income && *t.median_income <= 0)
            throw std::runtime_error("tracts file: income must be positive: " + t.tract_id);
        if (t.vehicle_pct && (*t.vehicle_pct < 0 || *t.vehicle_pct > 100))
            throw std::runtime_error("tracts file: vehicle pct out of [0,100]: " + t.tract_id);
        if (t.race_white && (*t.race_white < 0 || *t.race_white > 1))
            throw std::runtime_error("tracts file: race fraction out of [0,1]: " + t.tract_id);
        out[t.tract_id] = std::move(t);
    }
    return out;
}

inline void save_tract_attributes(const std::string& path,
                                  const std::map<std::string, TractAttributes>& tracts) {
    RowBuffer row;
    row.raw("tract_id,median_age,median_income,vehicle_availability_pct,race_white_frac");
    row.nl();
    for (const auto& [id, t] : tracts) {
        row.raw(id);
        auto field = [&](const std::optional<double>& v, int prec) {
            row.sep(',');
            if (v) row.f64(*v, prec);
        };
        field(t.median_age, 1);
        field(t.median_income, 0);
        field(t.vehicle_pct, 2);
        field(t.race_white, 4);
        row.nl();
    }
    atomic_write(path, row.str());
}

struct EnrichCounters {
    uint64_t devices = 0;
    uint64_t no_zone = 0;
    uint64_t ambiguous_zone = 0;
    uint64_t elevation_nodata = 0;
    uint64_t no_tract = 0;
    uint64_t incomplete_tract = 0;

    nlohmann::json to_json() const {
        return {{"devices", devices},
                {"no_zone", no_zone},
                {"ambiguous_zone", ambiguous_zone},
                {"elevation_nodata", elevation_nodata},
                {"no_tract", no_tract},
                {"incomplete_tract", incomplete_tract}};
    }
};

// Tract lookup: polygons when provided, else the device->tract sidecar.
inline std::optional<std::string> find_tract_id(const std::string& device_id, GeoPoint home,
                                                const ReferenceData& ref) {
    if (!ref.tract_polygons.empty()) {
        for (const auto& tp : ref.tract_polygons)
            if (point_in_polygon(home, tp.rings)) return tp.tract_id;
        return std::nullopt;
    }
    auto it = ref.device_tract.find(device_id);
    if (it == ref.device_tract.end()) return std::nullopt;
    return it->second;
}

inline DeviceContext enrich_device(const std::string& device_id, GeoPoint home,
                                   const ReferenceData& ref, EnrichCounters& counters) {
    DeviceContext ctx;
    ctx.device_id = device_id;
    ++counters.devices;

    bool ambiguous = false;
    size_t zi = assign_zone(home, ref.zones, ambiguous);
    if (ambiguous) ++counters.ambiguous_zone;
    if (zi == static_cast<size_t>(-1)) {
        ++counters.no_zone;
    } else {
        ctx.zone_id = ref.zones[zi].zone_id;
        ctx.county = ref.zones[zi].county;
        ctx.order = ref.zones[zi].order_type;
        ctx.order_date = ref.zones[zi].order_date;
    }

    if (ref.grid) {
        ctx.elevation_m = elevation_at(home, *ref.grid);
        if (ctx.elevation_m)
            ctx.elevation_bin = elevation_bin_of(*ctx.elevation_m);
        else
            ++counters.elevation_nodata;
    } else {
        ++counters.elevation_nodata;
    }

    if (auto tid = find_tract_id(device_id, home, ref)) {
        auto it = ref.tract_attrs.find(*tid);
        if (it == ref.tract_attrs.end()) {
            ++counters.no_tract;
        } else {
            ctx.tract = it->second;
            if (!it->second.complete()) ++counters.incomplete_tract;
        }
    } else {
        ++counters.no_tract;
    }
    return ctx;
}

}  // namespace evacuscope
