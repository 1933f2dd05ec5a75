#pragma once
// Reference-data file formats: GeoJSON-style polygon files (evacuation zones,
// census-tract outlines) and the plain-text elevation grid.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "evacuscope/csv.hpp"
#include "evacuscope/fsio.hpp"
#include "evacuscope/geo.hpp"

namespace evacuscope {

// Zones file: FeatureCollection of Polygon features with properties
// zone_id (int), order_type ("none"|"voluntary"|"mandatory"),
// order_date ("YYYY-MM-DD", omitted or null when no order), county (string).
inline std::vector<ZonePolygon> load_zone_file(const std::string& path) {
    nlohmann::json doc = nlohmann::json::parse(read_file(path));
    if (doc.value("type", "") != "FeatureCollection") throw std::runtime_error(path + ": not a FeatureCollection");
    std::vector<ZonePolygon> zones;
    for (const auto& feat : doc.at("features")) {
        ZonePolygon z;
        const auto& props = feat.at("properties");
        z.zone_id = props.at("zone_id").get<int64_t>();
        z.county = props.value("county", std::string{});
        auto ot = order_type_from_name(props.value("order_type", "none"));
        if (!ot) throw std::runtime_error(path + ": bad order_type in zone " + std::to_string(z.zone_id));
        z.order_type = *ot;
        if (props.contains("order_date") && !props.at("order_date").is_null()) {
            auto d = parse_date(props.at("order_date").get<std::string>());
            if (!d) throw std::runtime_error(path + ": bad order_date in zone " + std::to_string(z.zone_id));
            z.order_date = *d;
        }
        if (z.order_type != OrderType::kNone && !z.order_date)
            throw std::runtime_error(path + ": zone " + std::to_string(z.zone_id) + " has an order but no order_date");
        const auto& geom = feat.at("geometry");
        if (geom.at("type").get<std::string>() != "Polygon")
            throw std::runtime_error(path + ": zone " + std::to_string(z.zone_id) + " geometry must be Polygon");
        for (const auto& ring : geom.at("coordinates")) {
            std::vector<GeoPoint> r;
            for (const auto& pt : ring) r.push_back(GeoPoint{pt.at(1).get<double>(), pt.at(0).get<double>()});
            z.rings.push_back(std::move(r));
        }
        zones.push_back(std::move(z));
    }
    return zones;
}

inline void save_zone_file(const std::string& path, const std::vector<ZonePolygon>& zones) {
    nlohmann::json feats = nlohmann::json::array();
    for (const auto& z : zones) {
        nlohmann::json props;
        props["zone_id"] = z.zone_id;
        props["county"] = z.county;
        props["order_type"] = order_type_name(z.order_type);
        if (z.order_date) props["order_date"] = format_date(*z.order_date);
        nlohmann::json rings = nlohmann::json::array();
        for (const auto& ring : z.rings) {
            nlohmann::json r = nlohmann::json::array();
            for (const auto& p : ring) r.push_back({p.lon, p.lat});
            rings.push_back(std::move(r));
        }
        feats.push_back({{"type", "Feature"},
                         {"properties", std::move(props)},
                         {"geometry", {{"type", "Polygon"}, {"coordinates", std::move(rings)}}}});
    }
    nlohmann::json doc = {{"type", "FeatureCollection"}, {"features", std::move(feats)}};
    atomic_write(path, doc.dump(1) + "\n");
}

// Tract outlines reuse the polygon container: zone_id carries a numeric index
// and county carries the tract_id string.
struct TractPolygon {
    std::string tract_id;
    std::vector<std::vector<GeoPoint>> rings;
};

inline std::vector<TractPolygon> load_tract_polygons(const std::string& path) {
    nlohmann::json doc = nlohmann::json::parse(read_file(path));
    if (doc.value("type", "") != "FeatureCollection") throw std::runtime_error(path + ": not a FeatureCollection");
    std::vector<TractPolygon> tracts;
    for (const auto& feat : doc.at("features")) {
        TractPolygon t;
        t.tract_id = feat.at("properties").at("tract_id").get<std::string>();
        const auto& geom = feat.at("geometry");
        if (geom.at("type").get<std::string>() != "Polygon")
            throw std::runtime_error(path + ": tract " + t.tract_id + " geometry must be Polygon");
        for (const auto& ring : geom.at("coordinates")) {
            std::vector<GeoPoint> r;
            for (const auto& pt : ring) r.push_back(GeoPoint{pt.at(1).get<double>(), pt.at(0).get<double>()});
            t.rings.push_back(std::move(r));
        }
        tracts.push_back(std::move(t));
    }
    return tracts;
}

inline void save_tract_polygons(const std::string& path, const std::vector<TractPolygon>& tracts) {
    nlohmann::json feats = nlohmann::json::array();
    for (const auto& t : tracts) {
        nlohmann::json rings = nlohmann::json::array();
        for (const auto& ring : t.rings) {
            nlohmann::json r = nlohmann::json::array();
            for (const auto& p : ring) r.push_back({p.lon, p.lat});
            rings.push_back(std::move(r));
        }
        feats.push_back({{"type", "Feature"},
                         {"properties", {{"tract_id", t.tract_id}}},
                         {"geometry", {{"type", "Polygon"}, {"coordinates", std::move(rings)}}}});
    }
    nlohmann::json doc = {{"type", "FeatureCollection"}, {"features", std::move(feats)}};
    atomic_write(path, doc.dump(1) + "\n");
}

// Elevation grid file: header lines `key value`, then nrows lines of ncols
// space-separated values (row 0 first, i.e. the southernmost row).
//
//   origin_lat 26.0
//   origin_lon -82.5
//   cell_deg 0.01
//   nrows 100
//   ncols 150
//   nodata -9999
//   <values...>
inline ElevationGrid load_elevation_grid(const std::string& path) {
    LineReader rd(path);
    ElevationGrid g;
    std::string_view line;
    int header_seen = 0;
    while (header_seen < 6 && rd.next(line)) {
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_all(line, ' ');
        if (fields.size() != 2) throw std::runtime_error(path + ": bad grid header line");
        std::string key(fields[0]);
        auto num = parse_f64(fields[1]);
        if (!num) throw std::runtime_error(path + ": bad grid header value for " + key);
        if (key == "origin_lat") g.origin.lat = *num;
        else if (key == "origin_lon") g.origin.lon = *num;
        else if (key == "cell_deg") g.cell_deg = *num;
        else if (key == "nrows") g.nrows = static_cast<int32_t>(*num);
        else if (key == "ncols") g.ncols = static_cast<int32_t>(*num);
        else if (key == "nodata") g.nodata = *num;
        else throw std::runtime_error(path + ": unknown grid header key " + key);
        ++header_seen;
    }
    if (g.cell_deg <= 0 || g.nrows <= 0 || g.ncols <= 0) throw std::runtime_error(path + ": incomplete grid header");
    g.values.reserve(static_cast<size_t>(g.nrows) * g.ncols);
    while (rd.next(line)) {
        if (line.empty()) continue;
        for (auto f : split_all(line, ' ')) {
            if (f.empty()) continue;
            auto v = parse_f64(f);
            if (!v) throw std::runtime_error(path + ": bad grid value");
            g.values.push_back(*v);
        }
    }
    if (g.values.size() != static_cast<size_t>(g.nrows) * g.ncols)
        throw std::runtime_error(path + ": grid value count does not match nrows*ncols");
    return g;
}

inline void save_elevation_grid(const std::string& path, const ElevationGrid& g) {
    RowBuffer buf;
    char tmp[64];
    std::snprintf(tmp, sizeof(tmp), "origin_lat %.10g\norigin_lon %.10g\ncell_deg %.10g\n", g.origin.lat,
                  g.origin.lon, g.cell_deg);
    buf.raw(tmp);
    std::snprintf(tmp, sizeof(tmp), "nrows %d\nncols %d\nnodata %.10g\n", g.nrows, g.ncols, g.nodata);
    buf.raw(tmp);
    for (int32_t r = 0; r < g.nrows; ++r) {
        for (int32_t c = 0; c < g.ncols; ++c) {
            if (c) buf.sep(' ');
            buf.f64(g.at(r, c));
        }
        buf.nl();
    }
    atomic_write(path, buf.str());
}

}  // namespace evacuscope
