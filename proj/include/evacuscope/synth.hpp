#pragma once
// Synthetic sighting generator with planted ground truth. Geography is a 3x3
// cell grid: rows (south to north) carry order types none/voluntary/mandatory,
// columns (west to east) carry elevation bands low/mid/high. Every device gets
// a home, a nightly presence pattern, a daily commute template with a known
// trip count, and optionally a planted evacuation spell with known departure,
// reentry, censoring, and shelter distance. Categorical targets (evacuation
// share, departure dates, reentry lags, shelter distances) are allocated by
// largest-remainder quotas so empirical shares hit the configured values up to
// integer rounding. Generation is deterministic per (seed, device index).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "evacuscope/civil.hpp"
#include "evacuscope/csv.hpp"
#include "evacuscope/enrich.hpp"
#include "evacuscope/fsio.hpp"
#include "evacuscope/geo.hpp"
#include "evacuscope/geofiles.hpp"
#include "evacuscope/kv.hpp"
#include "evacuscope/mobility.hpp"

namespace evacuscope {

inline uint64_t splitmix64(uint64_t seed, uint64_t index) {
    uint64_t z = seed + (index + 1) * 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Deterministic draw helpers: distributions are hand-rolled so the stream
// depends only on the engine, not on library internals.
struct Rng {
    std::mt19937_64 eng;
    double spare = 0;
    bool has_spare = false;

    explicit Rng(uint64_t s) : eng(s) {}
    double u01() { return static_cast<double>(eng() >> 11) * (1.0 / 9007199254740992.0); }
    uint64_t below(uint64_t n) { return n ? eng() % n : 0; }
    double uniform(double a, double b) { return a + (b - a) * u01(); }
    double normal(double sigma) {
        if (has_spare) {
            has_spare = false;
            return spare * sigma;
        }
        double u = std::max(u01(), 1e-300), v = u01();
        double r = std::sqrt(-2.0 * std::log(u));
        spare = r * std::sin(2.0 * kPi * v);
        has_spare = true;
        return r * std::cos(2.0 * kPi * v) * sigma;
    }
};

template <typename T>
inline void shuffle_in_place(std::vector<T>& v, Rng& rng) {
    for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

// Largest-remainder allocation of `total` into integer counts proportional to
// weights; remainders tie toward the lowest index. Counts always sum to total.
inline std::vector<uint64_t> quota_allocate(const std::vector<double>& weights, uint64_t total) {
    double wsum = 0;
    for (double w : weights) {
        if (w < 0) throw std::runtime_error("quota weight must be nonnegative");
        wsum += w;
    }
    if (weights.empty() || wsum <= 0) throw std::runtime_error("quota weights must sum to a positive value");
    std::vector<uint64_t> counts(weights.size());
    std::vector<std::pair<double, size_t>> rem;
    uint64_t assigned = 0;
    for (size_t i = 0; i < weights.size(); ++i) {
        double share = weights[i] / wsum * static_cast<double>(total);
        counts[i] = static_cast<uint64_t>(std::floor(share));
        assigned += counts[i];
        rem.push_back({share - std::floor(share), i});
    }
    std::sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    for (uint64_t r = 0; r < total - assigned; ++r) ++counts[rem[r % rem.size()].second];
    return counts;
}

// Expand quota counts over labeled categories into one label per slot.
template <typename T>
inline std::vector<T> quota_labels(const std::vector<std::pair<T, double>>& pmf, uint64_t total) {
    std::vector<double> w;
    for (const auto& [label, weight] : pmf) w.push_back(weight);
    std::vector<uint64_t> counts = quota_allocate(w, total);
    std::vector<T> out;
    out.reserve(total);
    for (size_t i = 0; i < pmf.size(); ++i)
        for (uint64_t c = 0; c < counts[i]; ++c) out.push_back(pmf[i].first);
    return out;
}

struct ScenarioConfig {
    uint64_t devices = 1000;
    uint64_t seed = 42;
    DateRange baseline{LocalDate{0}, LocalDate{0}};
    DateRange study{LocalDate{0}, LocalDate{0}};
    DateRange window{LocalDate{0}, LocalDate{0}};
    double grid_lat0 = 27.0;   // SW corner of cell (0,0)
    double grid_lon0 = -82.5;
    double cell_deg = 0.2;
    int32_t tz_offset_s = -14400;
    int device_type = 1;
    double accuracy_m = 50.0;
    double noise_m = 0.0;
    double dropout_prob = 0.0;
    int night_per_day = 4;
    int trips_min = 3, trips_max = 8;
    std::array<std::array<double, 3>, 3> evac_share{};  // [order row][elevation band]
    std::array<std::vector<std::pair<LocalDate, double>>, 3> departure_pmf;  // per order row
    std::vector<std::pair<int32_t, double>> reentry_lag_pmf;
    double censored_share = 0.1;
    std::array<std::vector<std::pair<double, double>>, 3> shelter_pmf;  // miles : weight
    LocalDate order_date_voluntary{0};
    LocalDate order_date_mandatory{0};
    double tract_missing_share = 0.0;
};

namespace detail {

inline std::vector<std::pair<std::string, std::string>> split_pairs(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> out;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        std::string item = text.substr(pos, comma - pos);
        size_t colon = item.find(':');
        if (colon == std::string::npos) throw std::runtime_error("expected key:weight, got '" + item + "'");
        out.push_back({item.substr(0, colon), item.substr(colon + 1)});
        pos = comma + 1;
    }
    return out;
}

inline std::vector<std::pair<LocalDate, double>> parse_date_pmf(const std::string& text) {
    std::vector<std::pair<LocalDate, double>> out;
    for (const auto& [k, v] : split_pairs(text)) {
        auto d = parse_date(k);
        auto w = parse_f64(v);
        if (!d || !w) throw std::runtime_error("bad date pmf entry '" + k + ":" + v + "'");
        out.push_back({*d, *w});
    }
    return out;
}

inline std::vector<std::pair<int32_t, double>> parse_int_pmf(const std::string& text) {
    std::vector<std::pair<int32_t, double>> out;
    for (const auto& [k, v] : split_pairs(text)) {
        auto i = parse_i32(k);
        auto w = parse_f64(v);
        if (!i || !w) throw std::runtime_error("bad integer pmf entry '" + k + ":" + v + "'");
        out.push_back({*i, *w});
    }
    return out;
}

inline std::vector<std::pair<double, double>> parse_value_pmf(const std::string& text) {
    std::vector<std::pair<double, double>> out;
    for (const auto& [k, v] : split_pairs(text)) {
        auto x = parse_f64(k);
        auto w = parse_f64(v);
        if (!x || !w) throw std::runtime_error("bad value pmf entry '" + k + ":" + v + "'");
        out.push_back({*x, *w});
    }
    return out;
}

}  // namespace detail

inline ScenarioConfig scenario_from_kv(const KvConfig& kv) {
    ScenarioConfig c;
    c.devices = static_cast<uint64_t>(kv.get_int("devices", 1000));
    c.seed = static_cast<uint64_t>(kv.get_int("seed", 42));
    c.baseline = kv.get_month("baseline_month", "2017-08");
    c.study = kv.get_month("study_month", "2017-09");
    c.window = DateRange{kv.get_date("window_start", "2017-09-04"), kv.get_date("window_end", "2017-09-12")};
    c.grid_lat0 = kv.get_double("grid_lat0", c.grid_lat0);
    c.grid_lon0 = kv.get_double("grid_lon0", c.grid_lon0);
    c.cell_deg = kv.get_double("cell_deg", c.cell_deg);
    c.tz_offset_s = static_cast<int32_t>(kv.get_int("tz_offset_s", c.tz_offset_s));
    c.device_type = static_cast<int>(kv.get_int("device_type", c.device_type));
    c.accuracy_m = kv.get_double("accuracy_m", c.accuracy_m);
    c.noise_m = kv.get_double("noise_m", 0.0);
    c.dropout_prob = kv.get_double("dropout_prob", 0.0);
    c.night_per_day = static_cast<int>(kv.get_int("night_per_day", c.night_per_day));
    c.trips_min = static_cast<int>(kv.get_int("trips_min", c.trips_min));
    c.trips_max = static_cast<int>(kv.get_int("trips_max", c.trips_max));

    double share_default = kv.get_double("evac_share", 0.35);
    static const char* order_names[3] = {"none", "voluntary", "mandatory"};
    static const char* band_names[3] = {"low", "mid", "high"};
    for (int r = 0; r < 3; ++r)
        for (int b = 0; b < 3; ++b) {
            std::string key = std::string("evac_share_") + order_names[r] + "_" + band_names[b];
            c.evac_share[r][b] = kv.get_double(key, share_default);
        }

    std::string dep_default = kv.get_string("departure_pmf", "2017-09-08:0.3,2017-09-09:0.4,2017-09-10:0.3");
    for (int r = 0; r < 3; ++r) {
        std::string key = std::string("departure_pmf_") + order_names[r];
        c.departure_pmf[r] = detail::parse_date_pmf(kv.get_string(key, dep_default));
    }
    c.reentry_lag_pmf = detail::parse_int_pmf(kv.get_string("reentry_lag_pmf", "2:0.3,3:0.4,4:0.3"));
    c.censored_share = kv.get_double("censored_share", 0.1);
    std::string shelter_default = kv.get_string("shelter_pmf", "10:0.4,30:0.3,70:0.2,120:0.1");
    for (int r = 0; r < 3; ++r) {
        std::string key = std::string("shelter_pmf_") + order_names[r];
        c.shelter_pmf[r] = detail::parse_value_pmf(kv.get_string(key, shelter_default));
    }
    c.order_date_voluntary = kv.get_date("order_date_voluntary", "2017-09-07");
    c.order_date_mandatory = kv.get_date("order_date_mandatory", "2017-09-08");
    c.tract_missing_share = kv.get_double("tract_missing_share", 0.0);
    return c;
}

inline void validate_scenario(const ScenarioConfig& c) {
    auto fail = [](const std::string& msg) { throw std::runtime_error("invalid scenario: " + msg); };
    if (c.devices == 0) fail("devices must be positive");
    if (c.cell_deg <= 0) fail("cell_deg must be positive");
    if (!(c.window.first >= c.study.first && c.window.last <= c.study.last))
        fail("study window must lie inside the study month");
    if (c.noise_m < 0 || c.accuracy_m < 0) fail("noise and accuracy must be nonnegative");
    if (c.dropout_prob < 0 || c.dropout_prob > 1) fail("dropout_prob must be in [0,1]");
    if (c.censored_share < 0 || c.censored_share > 1) fail("censored_share must be in [0,1]");
    if (c.tract_missing_share < 0 || c.tract_missing_share > 1) fail("tract_missing_share must be in [0,1]");
    if (c.night_per_day < 1) fail("night_per_day must be at least 1");
    if (c.trips_min < 2 || c.trips_max < c.trips_min || c.trips_max > 12)
        fail("trips_min/trips_max must satisfy 2 <= min <= max <= 12");
    for (int r = 0; r < 3; ++r)
        for (int b = 0; b < 3; ++b)
            if (c.evac_share[r][b] < 0 || c.evac_share[r][b] > 1) fail("evac_share must be in [0,1]");
    int32_t max_lag = 0;
    if (c.reentry_lag_pmf.empty()) fail("reentry_lag_pmf is empty");
    for (const auto& [lag, w] : c.reentry_lag_pmf) {
        if (lag < 2) fail("reentry lag must be at least 2 days");
        if (w < 0) fail("pmf weights must be nonnegative");
        max_lag = std::max(max_lag, lag);
    }
    for (int r = 0; r < 3; ++r) {
        if (c.departure_pmf[r].empty()) fail("departure_pmf is empty");
        for (const auto& [d, w] : c.departure_pmf[r]) {
            if (w < 0) fail("pmf weights must be nonnegative");
            if (d < c.window.first.prev() || d > c.window.last.prev())
                fail("departure date " + format_date(d) + " must be in [window_start-1, window_end-1]");
            if (d.plus(max_lag) > c.study.last)
                fail("departure " + format_date(d) + " + max reentry lag leaves the study month");
        }
        if (c.shelter_pmf[r].empty()) fail("shelter_pmf is empty");
        for (const auto& [mi, w] : c.shelter_pmf[r]) {
            if (mi < 1.5) fail("shelter distances must be at least 1.5 miles");
            if (w < 0) fail("pmf weights must be nonnegative");
        }
    }
    if (!(c.order_date_voluntary >= c.study.first.plus(-31)) || !(c.order_date_mandatory >= c.study.first.plus(-31)))
        fail("order dates look implausible");
}

struct DeviceTruth {
    std::string device_id;
    double home_lat = 0, home_lon = 0;
    int64_t zone_id = 0;
    std::string county;
    OrderType order = OrderType::kNone;
    std::optional<LocalDate> order_date;
    std::string tract_id;
    bool tract_missing = false;
    double elevation_m = 0;
    int elevation_bin = 0;
    int trips_per_day = 0;
    double avg_hull_km2 = 0;  // noise-free daily template value
    bool evacuated = false;
    bool censored = false;
    std::optional<LocalDate> departure, reentry;
    std::optional<int32_t> duration_days;
    std::optional<double> shelter_mi;
    double shelter_lat = 0, shelter_lon = 0;
};

struct SynthResult {
    uint64_t sightings = 0;
    std::vector<DeviceTruth> truth;
};

namespace detail {

inline double quantize_deg(double v) { return std::round(v * 1e6) / 1e6; }

inline GeoPoint quantize(GeoPoint p) { return {quantize_deg(p.lat), quantize_deg(p.lon)}; }

inline GeoPoint offset_km(GeoPoint origin, double east_km, double north_km) {
    return quantize(unproject_local({east_km, north_km}, origin));
}

inline GeoPoint with_noise(GeoPoint p, Rng& rng, double sigma_m) {
    if (sigma_m <= 0) return p;
    double north = rng.normal(sigma_m), east = rng.normal(sigma_m);
    double dlat = north / (kEarthRadiusM * kDegToRad);
    double dlon = east / (kEarthRadiusM * kDegToRad * std::max(0.05, std::cos(p.lat * kDegToRad)));
    return {p.lat + dlat, p.lon + dlon};
}

// Per-device planted layout and schedule.
struct DevicePlan {
    GeoPoint home;
    int trips = 0;
    std::vector<GeoPoint> anchors;               // commute anchors, trips-1 of them
    std::vector<std::pair<int32_t, GeoPoint>> day_template;  // (local sec, location)
    std::vector<int32_t> away_secs;
};

inline DevicePlan build_plan(GeoPoint home, int trips, int night_per_day, Rng& rng) {
    DevicePlan plan;
    plan.home = home;
    plan.trips = trips;
    double rot = rng.uniform(0, 2 * kPi);
    for (int j = 0; j < trips - 1; ++j) {
        double dist_km = 1.0 + 0.8 * j;
        double bearing = rot + j * 2.399963229728653;  // golden angle keeps anchors spread
        plan.anchors.push_back(offset_km(home, dist_km * std::cos(bearing), dist_km * std::sin(bearing)));
    }
    auto loc_of = [&](int leg) -> GeoPoint {  // leg endpoint: 0 = home, 1..trips-1 = anchors, trips = home
        if (leg <= 0 || leg >= trips) return home;
        return plan.anchors[static_cast<size_t>(leg - 1)];
    };
    auto midpoint = [&](GeoPoint a, GeoPoint b) {
        PlanarPoint pa = project_local(a, a), pb = project_local(b, a);
        return quantize(unproject_local({(pa.x + pb.x) / 2, (pa.y + pb.y) / 2}, a));
    };

    auto& tmpl = plan.day_template;
    tmpl.push_back({5 * 3600 + 1800, home});   // 05:30
    tmpl.push_back({6 * 3600 + 900, home});    // 06:15
    constexpr int32_t kLegStart = 8 * 3600;    // commute begins 08:00
    constexpr int32_t kLegSpacing = 65 * 60;   // 20 min travel + 45 min stay
    for (int l = 0; l < trips; ++l) {
        int32_t s = kLegStart + l * kLegSpacing;
        GeoPoint from = loc_of(l), to = loc_of(l + 1);
        tmpl.push_back({s, from});
        tmpl.push_back({s + 600, midpoint(from, to)});
        tmpl.push_back({s + 1200, to});
        if (l + 1 < trips) {  // two mid-stay pings at the anchor
            tmpl.push_back({s + 2100, to});
            tmpl.push_back({s + 3000, to});
        }
    }
    int32_t night_start = 19 * 3600 + 1800;  // 19:30
    int32_t night_span = 3 * 3600;
    for (int i = 0; i < night_per_day; ++i) {
        int32_t s = night_start + (night_per_day > 1 ? i * night_span / (night_per_day - 1) : 0);
        tmpl.push_back({s, home});
    }
    std::sort(tmpl.begin(), tmpl.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (int h = 1; h <= 23; h += 2) plan.away_secs.push_back(h * 3600);
    return plan;
}

inline double template_hull_km2(const DevicePlan& plan) {
    std::vector<GeoPoint> pts;
    for (const auto& [s, p] : plan.day_template) pts.push_back(p);
    auto h = daily_hull_metrics(pts);
    return h ? h->area_km2 : 0.0;
}

}  // namespace detail

// Build the 3x3 zone set for a scenario.
inline std::vector<ZonePolygon> scenario_zones(const ScenarioConfig& c) {
    static const char* counties[3] = {"baycrest", "midvale", "northport"};
    std::vector<ZonePolygon> zones;
    for (int r = 0; r < 3; ++r)
        for (int col = 0; col < 3; ++col) {
            ZonePolygon z;
            z.zone_id = r * 3 + col + 1;
            z.county = counties[r];
            z.order_type = static_cast<OrderType>(r);
            if (z.order_type == OrderType::kVoluntary) z.order_date = c.order_date_voluntary;
            if (z.order_type == OrderType::kMandatory) z.order_date = c.order_date_mandatory;
            double la = c.grid_lat0 + r * c.cell_deg, lb = la + c.cell_deg;
            double na = c.grid_lon0 + col * c.cell_deg, nb = na + c.cell_deg;
            z.rings = {{{la, na}, {la, nb}, {lb, nb}, {lb, na}}};
            zones.push_back(std::move(z));
        }
    return zones;
}

inline ElevationGrid scenario_elevation(const ScenarioConfig& c) {
    constexpr int kPerCell = 10;
    ElevationGrid g;
    g.cell_deg = c.cell_deg / kPerCell;
    g.origin = {c.grid_lat0 + g.cell_deg / 2, c.grid_lon0 + g.cell_deg / 2};
    g.nrows = g.ncols = 3 * kPerCell;
    g.nodata = -9999;
    static const double band_m[3] = {5.0, 30.0, 80.0};
    g.values.resize(static_cast<size_t>(g.nrows) * g.ncols);
    for (int r = 0; r < g.nrows; ++r)
        for (int col = 0; col < g.ncols; ++col)
            g.values[static_cast<size_t>(r) * g.ncols + col] = band_m[col / kPerCell];
    return g;
}

inline void scenario_tracts(const ScenarioConfig& c, std::vector<TractPolygon>& polys,
                            std::map<std::string, TractAttributes>& attrs) {
    polys.clear();
    attrs.clear();
    for (int r = 0; r < 3; ++r)
        for (int col = 0; col < 3; ++col) {
            int zone = r * 3 + col + 1;
            double la = c.grid_lat0 + r * c.cell_deg, lb = la + c.cell_deg;
            double na = c.grid_lon0 + col * c.cell_deg;
            double mid = na + c.cell_deg / 2, nb = na + c.cell_deg;
            for (int side = 0; side < 2; ++side) {
                TractPolygon tp;
                tp.tract_id = "T" + std::to_string(zone) + (side == 0 ? "L" : "R");
                double a = side == 0 ? na : mid, b = side == 0 ? mid : nb;
                tp.rings = {{{la, a}, {la, b}, {lb, b}, {lb, a}}};
                polys.push_back(tp);
                TractAttributes t;
                t.tract_id = tp.tract_id;
                t.median_age = 30.0 + zone + 3.0 * side;
                t.median_income = 45000.0 + 2500.0 * zone + 1000.0 * side;
                t.vehicle_pct = 75.0 + zone + 2.0 * side;
                t.race_white = 0.50 + 0.03 * zone + 0.01 * side;
                if (side == 1 && c.tract_missing_share > 0) t.median_income = std::nullopt;
                attrs[t.tract_id] = std::move(t);
            }
        }
}

inline void save_truth(const std::string& path, const std::vector<DeviceTruth>& truth) {
    RowBuffer row;
    row.raw(
        "device_id,home_lat,home_lon,zone_id,county,order_type,order_date,tract_id,tract_missing,"
        "elevation_m,elevation_bin,trips_per_day,avg_hull_km2,evacuated,censored,departure_date,"
        "reentry_date,duration_days,shelter_mi,shelter_lat,shelter_lon");
    row.nl();
    for (const auto& t : truth) {
        row.raw(t.device_id);
        row.sep(',');
        row.f64(t.home_lat, 6);
        row.sep(',');
        row.f64(t.home_lon, 6);
        row.sep(',');
        row.i64(t.zone_id);
        row.sep(',');
        row.raw(t.county);
        row.sep(',');
        row.raw(order_type_name(t.order));
        row.sep(',');
        if (t.order_date) row.raw(format_date(*t.order_date));
        row.sep(',');
        row.raw(t.tract_id);
        row.sep(',');
        row.i64(t.tract_missing ? 1 : 0);
        row.sep(',');
        row.f64(t.elevation_m, 1);
        row.sep(',');
        row.i64(t.elevation_bin);
        row.sep(',');
        row.i64(t.trips_per_day);
        row.sep(',');
        row.f64(t.avg_hull_km2, 9);
        row.sep(',');
        row.i64(t.evacuated ? 1 : 0);
        row.sep(',');
        row.i64(t.censored ? 1 : 0);
        row.sep(',');
        if (t.departure) row.raw(format_date(*t.departure));
        row.sep(',');
        if (t.reentry) row.raw(format_date(*t.reentry));
        row.sep(',');
        if (t.duration_days) row.i64(*t.duration_days);
        row.sep(',');
        if (t.shelter_mi) row.f64(*t.shelter_mi, 6);
        row.sep(',');
        row.f64(t.shelter_lat, 6);
        row.sep(',');
        row.f64(t.shelter_lon, 6);
        row.nl();
    }
    atomic_write(path, row.str());
}

inline std::vector<DeviceTruth> load_truth(const std::string& path) {
    std::vector<DeviceTruth> out;
    LineReader rd(path);
    std::string_view line;
    bool first = true;
    while (rd.next(line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            continue;  // header
        }
        std::string_view f[22];
        if (split_fields(line, ',', f, 22) != 21)
            throw std::runtime_error("truth file: expected 21 fields: " + std::string(line));
        DeviceTruth t;
        t.device_id.assign(f[0]);
        t.home_lat = *parse_f64(f[1]);
        t.home_lon = *parse_f64(f[2]);
        t.zone_id = *parse_i64(f[3]);
        t.county.assign(f[4]);
        t.order = order_type_from_name(std::string(f[5])).value_or(OrderType::kNone);
        if (!f[6].empty()) t.order_date = parse_date(f[6]);
        t.tract_id.assign(f[7]);
        t.tract_missing = f[8] == "1";
        t.elevation_m = *parse_f64(f[9]);
        t.elevation_bin = static_cast<int>(*parse_i64(f[10]));
        t.trips_per_day = static_cast<int>(*parse_i64(f[11]));
        t.avg_hull_km2 = *parse_f64(f[12]);
        t.evacuated = f[13] == "1";
        t.censored = f[14] == "1";
        if (!f[15].empty()) t.departure = parse_date(f[15]);
        if (!f[16].empty()) t.reentry = parse_date(f[16]);
        if (!f[17].empty()) t.duration_days = static_cast<int32_t>(*parse_i64(f[17]));
        if (!f[18].empty()) t.shelter_mi = *parse_f64(f[18]);
        t.shelter_lat = *parse_f64(f[19]);
        t.shelter_lon = *parse_f64(f[20]);
        out.push_back(std::move(t));
    }
    return out;
}

// Generate a full scenario into out_dir: sightings.csv, truth.csv, zones.json,
// elevation.grid, tracts.csv, tract_polygons.json.
inline SynthResult generate_scenario(const ScenarioConfig& cfg, const std::string& out_dir) {
    validate_scenario(cfg);
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    std::vector<ZonePolygon> zones = scenario_zones(cfg);
    save_zone_file(out_dir + "/zones.json", zones);
    save_elevation_grid(out_dir + "/elevation.grid", scenario_elevation(cfg));
    std::vector<TractPolygon> tract_polys;
    std::map<std::string, TractAttributes> tract_attrs;
    scenario_tracts(cfg, tract_polys, tract_attrs);
    save_tract_polygons(out_dir + "/tract_polygons.json", tract_polys);
    save_tract_attributes(out_dir + "/tracts.csv", tract_attrs);

    // Allocate devices to cells, then categorical attributes within each cell.
    std::vector<uint64_t> per_cell = quota_allocate(std::vector<double>(9, 1.0), cfg.devices);
    struct CellPlan {
        std::vector<uint8_t> evac, missing;
        std::vector<LocalDate> departure;
        std::vector<int32_t> lag;
        std::vector<uint8_t> censored;
        std::vector<double> shelter;
    };
    std::array<CellPlan, 9> cells;
    for (int cell = 0; cell < 9; ++cell) {
        int r = cell / 3;
        uint64_t n = per_cell[static_cast<size_t>(cell)];
        Rng rng(splitmix64(cfg.seed, 0x100000ull + static_cast<uint64_t>(cell)));
        CellPlan& cp = cells[static_cast<size_t>(cell)];
        int b = cell % 3;
        uint64_t ne = quota_allocate({cfg.evac_share[r][b], 1.0 - cfg.evac_share[r][b]}, n)[0];
        cp.evac.assign(n, 0);
        std::fill(cp.evac.begin(), cp.evac.begin() + static_cast<ptrdiff_t>(ne), uint8_t{1});
        shuffle_in_place(cp.evac, rng);
        uint64_t nm = quota_allocate({cfg.tract_missing_share, 1.0 - cfg.tract_missing_share}, n)[0];
        cp.missing.assign(n, 0);
        std::fill(cp.missing.begin(), cp.missing.begin() + static_cast<ptrdiff_t>(nm), uint8_t{1});
        shuffle_in_place(cp.missing, rng);
        cp.departure = quota_labels(cfg.departure_pmf[r], ne);
        shuffle_in_place(cp.departure, rng);
        cp.lag = quota_labels(cfg.reentry_lag_pmf, ne);
        shuffle_in_place(cp.lag, rng);
        uint64_t nc = quota_allocate({cfg.censored_share, 1.0 - cfg.censored_share}, ne)[0];
        cp.censored.assign(ne, 0);
        std::fill(cp.censored.begin(), cp.censored.begin() + static_cast<ptrdiff_t>(nc), uint8_t{1});
        shuffle_in_place(cp.censored, rng);
        cp.shelter = quota_labels(cfg.shelter_pmf[r], ne);
        shuffle_in_place(cp.shelter, rng);
    }

    SynthResult result;
    result.truth.reserve(cfg.devices);
    AtomicFile sf(out_dir + "/sightings.csv");
    RowBuffer buf;
    buf.raw("timestamp,device_id,device_type,lat,lon,accuracy_m,tz_offset_s");
    buf.nl();

    uint64_t cell_start = 0;
    int cell = 0;
    uint64_t in_cell = 0;
    std::array<uint64_t, 9> evac_seen{};
    for (uint64_t d = 0; d < cfg.devices; ++d) {
        while (in_cell >= per_cell[static_cast<size_t>(cell)]) {
            ++cell;
            cell_start = d;
            in_cell = 0;
        }
        int r = cell / 3, b = cell % 3;
        const CellPlan& cp = cells[static_cast<size_t>(cell)];
        Rng rng(splitmix64(cfg.seed, d));

        DeviceTruth t;
        char idbuf[16];
        std::snprintf(idbuf, sizeof(idbuf), "D%07llu", static_cast<unsigned long long>(d));
        t.device_id = idbuf;
        t.zone_id = cell + 1;
        t.county = zones[static_cast<size_t>(cell)].county;
        t.order = static_cast<OrderType>(r);
        t.order_date = zones[static_cast<size_t>(cell)].order_date;
        t.tract_missing = cp.missing[in_cell] != 0;
        t.tract_id = "T" + std::to_string(cell + 1) + (t.tract_missing ? "R" : "L");
        static const double band_m[3] = {5.0, 30.0, 80.0};
        t.elevation_m = band_m[b];
        t.elevation_bin = b + 1;

        // home: uniform in the tract half-cell, inset from every boundary
        double la = cfg.grid_lat0 + r * cfg.cell_deg, na = cfg.grid_lon0 + b * cfg.cell_deg;
        double half = cfg.cell_deg / 2;
        double lon_lo = t.tract_missing ? na + half : na;
        double inset_lat = 0.1 * cfg.cell_deg, inset_lon = 0.1 * half;
        GeoPoint home = detail::quantize({rng.uniform(la + inset_lat, la + cfg.cell_deg - inset_lat),
                                          rng.uniform(lon_lo + inset_lon, lon_lo + half - inset_lon)});
        t.home_lat = home.lat;
        t.home_lon = home.lon;

        t.trips_per_day = cfg.trips_min + static_cast<int>(rng.below(
                              static_cast<uint64_t>(cfg.trips_max - cfg.trips_min + 1)));
        detail::DevicePlan plan = detail::build_plan(home, t.trips_per_day, cfg.night_per_day, rng);
        t.avg_hull_km2 = detail::template_hull_km2(plan);

        GeoPoint shelter{0, 0};
        t.evacuated = cp.evac[in_cell] != 0;
        if (t.evacuated) {
            uint64_t e = evac_seen[static_cast<size_t>(cell)]++;
            t.departure = cp.departure[e];
            t.censored = cp.censored[e] != 0;
            if (!t.censored) {
                t.reentry = t.departure->plus(cp.lag[e]);
                t.duration_days = cp.lag[e];
            }
            double planted_mi = cp.shelter[e];
            double bearing = rng.uniform(0, 2 * kPi);
            double dist_km = planted_mi * kMileM / 1000.0;
            shelter = detail::offset_km(home, dist_km * std::cos(bearing), dist_km * std::sin(bearing));
            t.shelter_lat = shelter.lat;
            t.shelter_lon = shelter.lon;
            t.shelter_mi = haversine_m(home, shelter) / kMileM;
        }

        // emit the sighting stream, day by day across both months
        auto emit_day = [&](LocalDate day) {
            bool dropped = rng.u01() < cfg.dropout_prob;
            if (dropped) return;
            bool away = false;
            if (t.evacuated && day > *t.departure) {
                if (t.censored)
                    away = cfg.study.contains(day);
                else
                    away = day < *t.reentry;
            }
            if (away) {
                for (int32_t s : plan.away_secs) {
                    GeoPoint p = detail::quantize(detail::with_noise(shelter, rng, cfg.noise_m));
                    buf.i64(epoch_from_local(day, s, cfg.tz_offset_s));
                    buf.sep(',');
                    buf.raw(t.device_id);
                    buf.sep(',');
                    buf.i64(cfg.device_type);
                    buf.sep(',');
                    buf.f64(p.lat, 6);
                    buf.sep(',');
                    buf.f64(p.lon, 6);
                    buf.sep(',');
                    buf.f64(cfg.accuracy_m, 1);
                    buf.sep(',');
                    buf.i64(cfg.tz_offset_s);
                    buf.nl();
                    ++result.sightings;
                }
            } else {
                for (const auto& [s, loc] : plan.day_template) {
                    GeoPoint p = detail::quantize(detail::with_noise(loc, rng, cfg.noise_m));
                    buf.i64(epoch_from_local(day, s, cfg.tz_offset_s));
                    buf.sep(',');
                    buf.raw(t.device_id);
                    buf.sep(',');
                    buf.i64(cfg.device_type);
                    buf.sep(',');
                    buf.f64(p.lat, 6);
                    buf.sep(',');
                    buf.f64(p.lon, 6);
                    buf.sep(',');
                    buf.f64(cfg.accuracy_m, 1);
                    buf.sep(',');
                    buf.i64(cfg.tz_offset_s);
                    buf.nl();
                    ++result.sightings;
                }
            }
            if (buf.size() >= (1u << 20)) {
                sf.write(buf.str());
                buf.clear();
            }
        };
        for (LocalDate day = cfg.baseline.first; day <= cfg.baseline.last; day = day.next()) emit_day(day);
        for (LocalDate day = cfg.study.first; day <= cfg.study.last; day = day.next()) emit_day(day);

        result.truth.push_back(std::move(t));
        ++in_cell;
    }
    (void)cell_start;
    sf.write(buf.str());
    sf.commit();
    save_truth(out_dir + "/truth.csv", result.truth);
    return result;
}

}  // namespace evacuscope
