#pragma once
// Sighting ingestion: parse and validate raw delimited records, apply the
// accuracy / bounding-box / date filters, and partition into per-device
// time-sorted trajectories. Bad records are counted and skipped, never fatal.
//
// The file path is two-pass: pass 1 streams the input and appends kept records
// to hash-sharded temp files; pass 2 sorts each shard by (device, time) and
// emits device blocks to the trajectory store. Peak memory is one shard.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <stdexcept>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "evacuscope/civil.hpp"
#include "evacuscope/csv.hpp"
#include "evacuscope/fsio.hpp"
#include "evacuscope/geo.hpp"
#include "evacuscope/store.hpp"

namespace evacuscope {

// One raw observation, Table-1 column order.
struct SightingRecord {
    int64_t timestamp = 0;  // seconds since Unix epoch, UTC
    std::string device_id;
    int32_t device_type = 0;
    double lat = 0;
    double lon = 0;
    double accuracy_m = 0;
    int32_t tz_offset_s = 0;
};

enum class ParseStatus { kOk, kMalformed, kOutOfRange };

// Parse one delimited line with the 7 Table-1 fields. Wrong field count or an
// unparseable number -> kMalformed; lat/lon/accuracy outside their valid
// ranges -> kOutOfRange.
inline ParseStatus parse_sighting(std::string_view line, char delim, SightingRecord& out) {
    std::string_view f[8];
    size_t nf = split_fields(line, delim, f, 8);
    if (nf != 7) return ParseStatus::kMalformed;
    auto ts = parse_i64(f[0]);
    auto dtype = parse_i64(f[2]);
    auto lat = parse_f64(f[3]);
    auto lon = parse_f64(f[4]);
    auto acc = parse_f64(f[5]);
    auto tz = parse_i32(f[6]);
    if (!ts || !dtype || !lat || !lon || !acc || !tz || f[1].empty()) return ParseStatus::kMalformed;
    if (*dtype < 0 || *dtype > 255) return ParseStatus::kMalformed;
    if (*lat < -90.0 || *lat > 90.0 || *lon < -180.0 || *lon > 180.0 || *acc < 0.0)
        return ParseStatus::kOutOfRange;
    out.timestamp = *ts;
    out.device_id.assign(f[1]);
    out.device_type = static_cast<int32_t>(*dtype);
    out.lat = *lat;
    out.lon = *lon;
    out.accuracy_m = *acc;
    out.tz_offset_s = *tz;
    return ParseStatus::kOk;
}

struct BoundingBox {
    double min_lat = -90, max_lat = 90, min_lon = -180, max_lon = 180;

    bool contains(double lat, double lon) const {
        return lat >= min_lat && lat <= max_lat && lon >= min_lon && lon <= max_lon;
    }
};

// Record-level keep/drop policy. Date ranges are matched on the record's own
// local day; an empty range list keeps every date.
struct IngestFilter {
    double accuracy_ceiling_m = 250.0;
    std::optional<BoundingBox> bbox;
    std::vector<DateRange> date_ranges;

    enum class Drop { kKeep, kAccuracy, kBbox, kDate };

    Drop check(const SightingRecord& r) const {
        if (r.accuracy_m > accuracy_ceiling_m) return Drop::kAccuracy;
        if (bbox && !bbox->contains(r.lat, r.lon)) return Drop::kBbox;
        if (!date_ranges.empty()) {
            LocalDate d = local_day(r.timestamp, r.tz_offset_s);
            bool in = false;
            for (const auto& range : date_ranges)
                if (range.contains(d)) {
                    in = true;
                    break;
                }
            if (!in) return Drop::kDate;
        }
        return Drop::kKeep;
    }
};

struct IngestStats {
    uint64_t records_read = 0;
    uint64_t records_kept = 0;    // passed parse + filters, pre-dedup
    uint64_t records_stored = 0;  // after exact-duplicate collapse
    uint64_t duplicates_removed = 0;
    uint64_t dropped_malformed = 0;
    uint64_t dropped_out_of_range = 0;
    uint64_t dropped_accuracy = 0;
    uint64_t dropped_bbox = 0;
    uint64_t dropped_date = 0;
    uint64_t devices = 0;

    uint64_t dropped_total() const {
        return dropped_malformed + dropped_out_of_range + dropped_accuracy + dropped_bbox + dropped_date;
    }

    // Conservation: read = kept + dropped and kept = stored + duplicates.
    bool conserved() const {
        return records_read == records_kept + dropped_total() &&
               records_kept == records_stored + duplicates_removed;
    }

    void merge(const IngestStats& o) {
        records_read += o.records_read;
        records_kept += o.records_kept;
        records_stored += o.records_stored;
        duplicates_removed += o.duplicates_removed;
        dropped_malformed += o.dropped_malformed;
        dropped_out_of_range += o.dropped_out_of_range;
        dropped_accuracy += o.dropped_accuracy;
        dropped_bbox += o.dropped_bbox;
        dropped_date += o.dropped_date;
        devices += o.devices;
    }

    nlohmann::json to_json() const {
        return {{"records_read", records_read},
                {"records_kept", records_kept},
                {"records_stored", records_stored},
                {"duplicates_removed", duplicates_removed},
                {"dropped",
                 {{"malformed", dropped_malformed},
                  {"out_of_range", dropped_out_of_range},
                  {"accuracy", dropped_accuracy},
                  {"bbox", dropped_bbox},
                  {"date", dropped_date}}},
                {"devices", devices}};
    }
};

namespace detail {

// Sort key covers every field so equal (ts,lat,lon) duplicates collapse
// deterministically (lowest accuracy wins) regardless of arrival order.
struct SightingLess {
    bool operator()(const SightingRecord& a, const SightingRecord& b) const {
        if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
        if (a.lat != b.lat) return a.lat < b.lat;
        if (a.lon != b.lon) return a.lon < b.lon;
        if (a.accuracy_m != b.accuracy_m) return a.accuracy_m < b.accuracy_m;
        if (a.tz_offset_s != b.tz_offset_s) return a.tz_offset_s < b.tz_offset_s;
        return a.device_type < b.device_type;
    }
};

// records for one device, any order -> sorted, exact (ts,lat,lon) deduped.
inline uint64_t canonicalize_device(std::vector<SightingRecord>& recs) {
    std::sort(recs.begin(), recs.end(), SightingLess{});
    auto last = std::unique(recs.begin(), recs.end(), [](const SightingRecord& a, const SightingRecord& b) {
        return a.timestamp == b.timestamp && a.lat == b.lat && a.lon == b.lon;
    });
    uint64_t removed = static_cast<uint64_t>(recs.end() - last);
    recs.erase(last, recs.end());
    return removed;
}

inline DeviceTrajectory to_trajectory(const std::string& id, const std::vector<SightingRecord>& recs) {
    DeviceTrajectory t;
    t.device_id = id;
    t.ts.reserve(recs.size());
    t.lat.reserve(recs.size());
    t.lon.reserve(recs.size());
    t.accuracy_m.reserve(recs.size());
    t.tz_offset_s.reserve(recs.size());
    t.device_type.reserve(recs.size());
    for (const auto& r : recs) {
        t.ts.push_back(r.timestamp);
        t.lat.push_back(r.lat);
        t.lon.push_back(r.lon);
        t.accuracy_m.push_back(static_cast<float>(r.accuracy_m));
        t.tz_offset_s.push_back(r.tz_offset_s);
        t.device_type.push_back(static_cast<uint8_t>(r.device_type));
    }
    t.build_day_index();
    return t;
}

}  // namespace detail

// In-memory build for pre-parsed record streams. Devices come back ordered by
// id; stats count filter drops for the given records.
inline std::vector<DeviceTrajectory> build_trajectories(const std::vector<SightingRecord>& records,
                                                        const IngestFilter& filter, IngestStats& stats) {
    std::map<std::string, std::vector<SightingRecord>> by_device;
    for (const auto& r : records) {
        ++stats.records_read;
        switch (filter.check(r)) {
            case IngestFilter::Drop::kAccuracy: ++stats.dropped_accuracy; continue;
            case IngestFilter::Drop::kBbox: ++stats.dropped_bbox; continue;
            case IngestFilter::Drop::kDate: ++stats.dropped_date; continue;
            case IngestFilter::Drop::kKeep: break;
        }
        ++stats.records_kept;
        by_device[r.device_id].push_back(r);
    }
    std::vector<DeviceTrajectory> out;
    out.reserve(by_device.size());
    for (auto& [id, recs] : by_device) {
        stats.duplicates_removed += detail::canonicalize_device(recs);
        stats.records_stored += recs.size();
        out.push_back(detail::to_trajectory(id, recs));
    }
    stats.devices = out.size();
    return out;
}

struct IngestOptions {
    uint64_t shard_bytes = 64ull << 20;  // pass-2 working-set target
    std::string tmp_dir;                 // defaults next to the store file
};

namespace detail {

struct ShardWriter {
    FILE* f = nullptr;
    std::vector<char> buf;

    void open(const std::string& path) {
        f = std::fopen(path.c_str(), "wb");
        if (!f) throw std::runtime_error("cannot create shard " + path);
        buf.reserve(1 << 20);
    }
    void put(const SightingRecord& r) {
        uint16_t id_len = static_cast<uint16_t>(r.device_id.size());
        append(&id_len, sizeof(id_len));
        append(r.device_id.data(), id_len);
        append(&r.timestamp, sizeof(r.timestamp));
        append(&r.lat, sizeof(r.lat));
        append(&r.lon, sizeof(r.lon));
        float acc = static_cast<float>(r.accuracy_m);
        append(&acc, sizeof(acc));
        append(&r.tz_offset_s, sizeof(r.tz_offset_s));
        uint8_t dt = static_cast<uint8_t>(r.device_type);
        append(&dt, sizeof(dt));
        if (buf.size() >= (1 << 20)) flush();
    }
    void append(const void* p, size_t n) { buf.insert(buf.end(), static_cast<const char*>(p), static_cast<const char*>(p) + n); }
    void flush() {
        if (!buf.empty() && std::fwrite(buf.data(), 1, buf.size(), f) != buf.size())
            throw std::runtime_error("short write to shard");
        buf.clear();
    }
    void close() {
        flush();
        std::fclose(f);
        f = nullptr;
    }
};

inline std::vector<SightingRecord> read_shard(const std::string& path) {
    std::string blob = read_file(path);
    std::vector<SightingRecord> recs;
    size_t pos = 0;
    auto need = [&](size_t n) {
        if (pos + n > blob.size()) throw std::runtime_error("corrupt shard " + path);
    };
    while (pos < blob.size()) {
        SightingRecord r;
        uint16_t id_len;
        need(sizeof(id_len));
        std::memcpy(&id_len, blob.data() + pos, sizeof(id_len));
        pos += sizeof(id_len);
        need(id_len);
        r.device_id.assign(blob.data() + pos, id_len);
        pos += id_len;
        float acc;
        uint8_t dt;
        need(sizeof(r.timestamp) + sizeof(r.lat) + sizeof(r.lon) + sizeof(acc) + sizeof(r.tz_offset_s) + sizeof(dt));
        std::memcpy(&r.timestamp, blob.data() + pos, sizeof(r.timestamp));
        pos += sizeof(r.timestamp);
        std::memcpy(&r.lat, blob.data() + pos, sizeof(r.lat));
        pos += sizeof(r.lat);
        std::memcpy(&r.lon, blob.data() + pos, sizeof(r.lon));
        pos += sizeof(r.lon);
        std::memcpy(&acc, blob.data() + pos, sizeof(acc));
        pos += sizeof(acc);
        std::memcpy(&r.tz_offset_s, blob.data() + pos, sizeof(r.tz_offset_s));
        pos += sizeof(r.tz_offset_s);
        std::memcpy(&dt, blob.data() + pos, sizeof(dt));
        pos += sizeof(dt);
        r.accuracy_m = acc;
        r.device_type = dt;
        recs.push_back(std::move(r));
    }
    return recs;
}

}  // namespace detail

// Comma unless the first line contains a tab.
inline char detect_delimiter(std::string_view first_line) {
    return first_line.find('\t') != std::string_view::npos ? '\t' : ',';
}

// A header row is any first line whose first field is not an integer.
inline bool looks_like_header(std::string_view first_line, char delim) {
    std::string_view f[8];
    size_t nf = split_fields(first_line, delim, f, 8);
    return nf > 0 && !parse_i64(f[0]).has_value();
}

// Full file ingest: delimited sightings -> trajectory store at store_path.
inline IngestStats ingest_file_to_store(const std::string& input_path, const std::string& store_path,
                                        const IngestFilter& filter, const IngestOptions& opts = {}) {
    IngestStats stats;
    namespace fs = std::filesystem;
    uint64_t input_bytes = fs::exists(input_path) ? fs::file_size(input_path) : 0;
    size_t nshards = static_cast<size_t>(std::clamp<uint64_t>(
        opts.shard_bytes ? (input_bytes + opts.shard_bytes - 1) / opts.shard_bytes : 1, 1, 512));
    fs::path tmp_root = opts.tmp_dir.empty() ? fs::path(store_path).parent_path() : fs::path(opts.tmp_dir);
    if (tmp_root.empty()) tmp_root = ".";
    fs::path shard_dir = tmp_root / (fs::path(store_path).filename().string() + ".shards");
    fs::create_directories(shard_dir);

    // pass 1: parse, filter, shard by device hash
    std::vector<detail::ShardWriter> shards(nshards);
    for (size_t s = 0; s < nshards; ++s) shards[s].open((shard_dir / (std::to_string(s) + ".shard")).string());
    {
        LineReader rd(input_path);
        std::string_view line;
        bool first = true;
        char delim = ',';
        SightingRecord rec;
        while (rd.next(line)) {
            if (first) {
                first = false;
                delim = detect_delimiter(line);
                if (looks_like_header(line, delim)) continue;
            }
            if (line.empty()) continue;
            ++stats.records_read;
            switch (parse_sighting(line, delim, rec)) {
                case ParseStatus::kMalformed: ++stats.dropped_malformed; continue;
                case ParseStatus::kOutOfRange: ++stats.dropped_out_of_range; continue;
                case ParseStatus::kOk: break;
            }
            switch (filter.check(rec)) {
                case IngestFilter::Drop::kAccuracy: ++stats.dropped_accuracy; continue;
                case IngestFilter::Drop::kBbox: ++stats.dropped_bbox; continue;
                case IngestFilter::Drop::kDate: ++stats.dropped_date; continue;
                case IngestFilter::Drop::kKeep: break;
            }
            ++stats.records_kept;
            size_t s = fnv1a64(rec.device_id.data(), rec.device_id.size()) % nshards;
            shards[s].put(rec);
        }
        for (auto& s : shards) s.close();
    }

    // pass 2: per shard, group by device, canonicalize, append to the store
    TrajectoryWriter writer(store_path);
    for (size_t s = 0; s < nshards; ++s) {
        fs::path shard_path = shard_dir / (std::to_string(s) + ".shard");
        std::vector<SightingRecord> recs = detail::read_shard(shard_path.string());
        fs::remove(shard_path);
        std::sort(recs.begin(), recs.end(), [](const SightingRecord& a, const SightingRecord& b) {
            int c = a.device_id.compare(b.device_id);
            if (c != 0) return c < 0;
            return detail::SightingLess{}(a, b);
        });
        size_t i = 0;
        std::vector<SightingRecord> device;
        while (i < recs.size()) {
            size_t j = i + 1;
            while (j < recs.size() && recs[j].device_id == recs[i].device_id) ++j;
            device.assign(recs.begin() + i, recs.begin() + j);
            stats.duplicates_removed += detail::canonicalize_device(device);
            stats.records_stored += device.size();
            writer.append(detail::to_trajectory(recs[i].device_id, device));
            ++stats.devices;
            i = j;
        }
    }
    writer.commit();
    fs::remove_all(shard_dir);
    return stats;
}

}  // namespace evacuscope
