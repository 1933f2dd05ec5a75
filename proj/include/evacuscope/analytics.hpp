#pragma once
// Report aggregates: decision-by-order crosstab, departure/reentry date
// distributions, order-date x departure-date matrix, shelter-distance and
// duration histograms by order group, county aggregates, and elevation-bin
// evacuation rates. Accumulation is mergeable so shards can be combined.

#include <array>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evacuscope/civil.hpp"
#include "evacuscope/enrich.hpp"
#include "evacuscope/geo.hpp"
#include "evacuscope/stats.hpp"

namespace evacuscope {

// One device's joined view: evacuation profile + context + mobility baseline.
struct DeviceRecord {
    std::string device_id;
    bool active = false;
    bool evacuated = false;
    std::optional<LocalDate> departure;
    std::optional<LocalDate> reentry;  // absent on an evacuee = censored
    std::optional<int32_t> duration_days;
    std::optional<double> shelter_mi;
    std::string county;
    OrderType order = OrderType::kNone;
    std::optional<LocalDate> order_date;
    std::optional<double> elevation_m;
    int elevation_bin = 0;  // 1..3; 0 = no data
    std::optional<double> median_age, median_income, vehicle_pct, race_white;
    std::optional<double> avg_trips, avg_hull_km2;
};

inline const char* order_group_name(size_t g) {
    static const char* names[4] = {"none", "voluntary", "mandatory", "total"};
    return names[g];
}

// Decision x order-group crosstab with column percentages.
struct CrossTab {
    // rows: 0 = evacuated, 1 = stayed; cols: none, voluntary, mandatory, total
    std::array<std::array<uint64_t, 4>, 2> counts{};
    std::array<std::array<double, 4>, 2> pct{};
    std::array<bool, 4> empty_col{};

    void merge(const CrossTab& o) {
        for (size_t r = 0; r < 2; ++r)
            for (size_t c = 0; c < 3; ++c) counts[r][c] += o.counts[r][c];
    }

    void finalize() {
        for (size_t r = 0; r < 2; ++r)
            counts[r][3] = counts[r][0] + counts[r][1] + counts[r][2];
        for (size_t c = 0; c < 4; ++c) {
            uint64_t tot = counts[0][c] + counts[1][c];
            empty_col[c] = tot == 0;
            for (size_t r = 0; r < 2; ++r)
                pct[r][c] = tot ? 100.0 * static_cast<double>(counts[r][c]) / static_cast<double>(tot) : 0.0;
        }
    }
};

inline CrossTab crosstab_from_counts(uint64_t evac_none, uint64_t evac_vol, uint64_t evac_man,
                                     uint64_t stay_none, uint64_t stay_vol, uint64_t stay_man) {
    CrossTab t;
    t.counts[0] = {evac_none, evac_vol, evac_man, 0};
    t.counts[1] = {stay_none, stay_vol, stay_man, 0};
    t.finalize();
    return t;
}

// Calendar-day shares of evacuees plus one explicit bucket for devices whose
// date is absent (censored reentries, edge-truncated departures).
struct DayDistribution {
    LocalDate start{0};
    std::vector<uint64_t> day_counts;
    uint64_t bucket = 0;
    std::string bucket_label;

    uint64_t total() const {
        uint64_t t = bucket;
        for (uint64_t c : day_counts) t += c;
        return t;
    }
    double day_pct(size_t i) const {
        uint64_t t = total();
        return t ? 100.0 * static_cast<double>(day_counts[i]) / static_cast<double>(t) : 0.0;
    }
    double bucket_pct() const {
        uint64_t t = total();
        return t ? 100.0 * static_cast<double>(bucket) / static_cast<double>(t) : 0.0;
    }
    double pct_on(LocalDate d) const {
        int32_t i = date_diff(d, start);
        return (i >= 0 && static_cast<size_t>(i) < day_counts.size()) ? day_pct(static_cast<size_t>(i)) : 0.0;
    }
    void merge(const DayDistribution& o) {
        bucket += o.bucket;
        for (size_t i = 0; i < day_counts.size(); ++i) day_counts[i] += o.day_counts[i];
    }
};

// Order-issue-date rows, departure-date columns, row percentages.
struct OrderDateMatrix {
    LocalDate start{0};
    size_t ndays = 0;
    std::map<LocalDate, std::vector<uint64_t>> rows;
    std::map<LocalDate, uint64_t> unobserved;  // evacuees with no departure date

    uint64_t row_total(LocalDate order_date) const {
        uint64_t t = 0;
        if (auto it = rows.find(order_date); it != rows.end())
            for (uint64_t c : it->second) t += c;
        if (auto it = unobserved.find(order_date); it != unobserved.end()) t += it->second;
        return t;
    }
    double cell_pct(LocalDate order_date, LocalDate departure) const {
        uint64_t t = row_total(order_date);
        auto it = rows.find(order_date);
        int32_t i = date_diff(departure, start);
        if (!t || it == rows.end() || i < 0 || static_cast<size_t>(i) >= ndays) return 0.0;
        return 100.0 * static_cast<double>(it->second[static_cast<size_t>(i)]) / static_cast<double>(t);
    }
    void merge(const OrderDateMatrix& o) {
        for (const auto& [d, v] : o.rows) {
            auto& row = rows[d];
            row.resize(ndays, 0);
            for (size_t i = 0; i < v.size(); ++i) row[i] += v[i];
        }
        for (const auto& [d, c] : o.unobserved) unobserved[d] += c;
    }
};

// Right-closed value histogram per order group (+ total).
struct GroupHistogram {
    std::vector<double> edges;  // e.g. {1,20,40,60,80,100}; last bin is open
    std::array<std::vector<uint64_t>, 4> counts;  // per group, edges.size() bins

    void init(std::vector<double> e) {
        edges = std::move(e);
        for (auto& c : counts) c.assign(edges.size(), 0);
    }
    size_t bin_index(double v) const {
        for (size_t i = 0; i + 1 < edges.size(); ++i)
            if (v <= edges[i + 1]) return i;
        return edges.size() - 1;
    }
    std::string bin_label(size_t i) const {
        char buf[48];
        if (i + 1 < edges.size())
            std::snprintf(buf, sizeof(buf), "%g-%g", edges[i], edges[i + 1]);
        else
            std::snprintf(buf, sizeof(buf), ">%g", edges.back());
        return buf;
    }
    uint64_t group_total(size_t g) const {
        uint64_t t = 0;
        for (uint64_t c : counts[g]) t += c;
        return t;
    }
    double share_pct(size_t g, size_t i) const {
        uint64_t t = group_total(g);
        return t ? 100.0 * static_cast<double>(counts[g][i]) / static_cast<double>(t) : 0.0;
    }
    // share of group g at or below `edge` miles (right-closed cumulative)
    double cum_share_at(size_t g, double edge) const {
        uint64_t t = group_total(g), acc = 0;
        for (size_t i = 0; i + 1 < edges.size(); ++i) {
            if (edges[i + 1] <= edge) acc += counts[g][i];
        }
        return t ? 100.0 * static_cast<double>(acc) / static_cast<double>(t) : 0.0;
    }
    void merge(const GroupHistogram& o) {
        for (size_t g = 0; g < 4; ++g)
            for (size_t i = 0; i < counts[g].size(); ++i) counts[g][i] += o.counts[g][i];
    }
};

// Integer-valued duration histogram per order group; censored kept separate.
struct DurationTable {
    std::array<std::map<int32_t, uint64_t>, 4> counts;
    std::array<uint64_t, 4> censored{};

    uint64_t group_total(size_t g) const {
        uint64_t t = 0;
        for (const auto& [d, c] : counts[g]) t += c;
        return t;
    }
    double share_pct(size_t g, int32_t days) const {
        uint64_t t = group_total(g);
        auto it = counts[g].find(days);
        if (!t || it == counts[g].end()) return 0.0;
        return 100.0 * static_cast<double>(it->second) / static_cast<double>(t);
    }
    void merge(const DurationTable& o) {
        for (size_t g = 0; g < 4; ++g) {
            censored[g] += o.censored[g];
            for (const auto& [d, c] : o.counts[g]) counts[g][d] += c;
        }
    }
};

struct CountyRow {
    uint64_t evacuees = 0;
    std::vector<double> shelter_mi;
    std::vector<double> durations;  // observed (uncensored) only
};

struct CountyTable {
    std::map<std::string, CountyRow> rows;  // key "unassigned" for no county

    void merge(const CountyTable& o) {
        for (const auto& [county, r] : o.rows) {
            CountyRow& mine = rows[county];
            mine.evacuees += r.evacuees;
            mine.shelter_mi.insert(mine.shelter_mi.end(), r.shelter_mi.begin(), r.shelter_mi.end());
            mine.durations.insert(mine.durations.end(), r.durations.begin(), r.durations.end());
        }
    }
};

// Evacuation rate per (elevation bin x order group) over active devices with
// elevation data.
struct ElevationRates {
    std::array<std::array<uint64_t, 3>, 3> devices{};    // [bin-1][order]
    std::array<std::array<uint64_t, 3>, 3> evacuated{};

    double rate_pct(int bin, OrderType order) const {
        uint64_t n = devices[bin - 1][static_cast<int>(order)];
        uint64_t e = evacuated[bin - 1][static_cast<int>(order)];
        return n ? 100.0 * static_cast<double>(e) / static_cast<double>(n) : 0.0;
    }
    void merge(const ElevationRates& o) {
        for (size_t b = 0; b < 3; ++b)
            for (size_t g = 0; g < 3; ++g) {
                devices[b][g] += o.devices[b][g];
                evacuated[b][g] += o.evacuated[b][g];
            }
    }
};

// All report aggregates, built in one pass over joined device records.
struct Analytics {
    DateRange study_month{LocalDate{0}, LocalDate{0}};
    CrossTab crosstab;
    DayDistribution departure;
    DayDistribution reentry;
    OrderDateMatrix order_matrix;
    GroupHistogram distance;
    DurationTable duration;
    CountyTable county;
    ElevationRates elevation;
    uint64_t devices_seen = 0;
    uint64_t inactive = 0;
    uint64_t active = 0;
    uint64_t evacuees = 0;

    explicit Analytics(const DateRange& month, std::vector<double> distance_edges = {1, 20, 40, 60, 80, 100})
        : study_month(month) {
        size_t n = static_cast<size_t>(month.length());
        departure.start = reentry.start = month.first;
        departure.day_counts.assign(n, 0);
        reentry.day_counts.assign(n, 0);
        departure.bucket_label = "unobserved";
        reentry.bucket_label = "censored";
        order_matrix.start = month.first;
        order_matrix.ndays = n;
        distance.init(std::move(distance_edges));
    }

    void add(const DeviceRecord& r) {
        ++devices_seen;
        if (!r.active) {
            ++inactive;
            return;
        }
        ++active;
        size_t g = static_cast<size_t>(r.order);
        ++(r.evacuated ? crosstab.counts[0][g] : crosstab.counts[1][g]);
        if (r.elevation_bin >= 1 && r.elevation_bin <= 3) {
            ++elevation.devices[r.elevation_bin - 1][g];
            if (r.evacuated) ++elevation.evacuated[r.elevation_bin - 1][g];
        }
        if (!r.evacuated) return;
        ++evacuees;

        auto day_slot = [&](const std::optional<LocalDate>& d, DayDistribution& dist) {
            if (!d) {
                ++dist.bucket;
                return;
            }
            int32_t i = date_diff(*d, dist.start);
            if (i >= 0 && static_cast<size_t>(i) < dist.day_counts.size())
                ++dist.day_counts[static_cast<size_t>(i)];
            else
                ++dist.bucket;
        };
        day_slot(r.departure, departure);
        day_slot(r.reentry, reentry);

        if (r.order != OrderType::kNone && r.order_date) {
            auto& row = order_matrix.rows[*r.order_date];
            row.resize(order_matrix.ndays, 0);
            int32_t i = r.departure ? date_diff(*r.departure, order_matrix.start) : -1;
            if (i >= 0 && static_cast<size_t>(i) < order_matrix.ndays)
                ++row[static_cast<size_t>(i)];
            else
                ++order_matrix.unobserved[*r.order_date];
        }

        if (r.shelter_mi) {
            size_t b = distance.bin_index(*r.shelter_mi);
            ++distance.counts[g][b];
            ++distance.counts[3][b];
        }
        if (r.duration_days) {
            ++duration.counts[g][*r.duration_days];
            ++duration.counts[3][*r.duration_days];
        } else {
            ++duration.censored[g];
            ++duration.censored[3];
        }

        CountyRow& c = county.rows[r.county.empty() ? "unassigned" : r.county];
        ++c.evacuees;
        if (r.shelter_mi) c.shelter_mi.push_back(*r.shelter_mi);
        if (r.duration_days) c.durations.push_back(static_cast<double>(*r.duration_days));
    }

    void merge(const Analytics& o) {
        devices_seen += o.devices_seen;
        inactive += o.inactive;
        active += o.active;
        evacuees += o.evacuees;
        crosstab.merge(o.crosstab);
        departure.merge(o.departure);
        reentry.merge(o.reentry);
        order_matrix.merge(o.order_matrix);
        distance.merge(o.distance);
        duration.merge(o.duration);
        county.merge(o.county);
        elevation.merge(o.elevation);
    }

    void finalize() { crosstab.finalize(); }
};

}  // namespace evacuscope
