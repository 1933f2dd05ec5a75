#pragma once
// On-disk trajectory store: one binary file of per-device blocks, each block
// holding that device's time-sorted sightings in columnar layout. Downstream
// stages stream the file a device at a time, so memory stays bounded by the
// largest single trajectory.

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include "evacuscope/civil.hpp"
#include "evacuscope/fsio.hpp"

namespace evacuscope {

inline constexpr char kStoreMagic[8] = {'E', 'V', 'T', 'R', 'S', 'T', 'O', '1'};

// Contiguous slice of a trajectory that shares one local calendar day.
// Normally one run per day; a device whose tz offset changes mid-day can
// produce several runs for the same date, and consumers aggregate over runs.
struct DayRun {
    LocalDate day;
    uint32_t begin = 0;
    uint32_t end = 0;  // exclusive
};

struct DeviceTrajectory {
    std::string device_id;
    std::vector<int64_t> ts;
    std::vector<double> lat;
    std::vector<double> lon;
    std::vector<float> accuracy_m;
    std::vector<int32_t> tz_offset_s;
    std::vector<uint8_t> device_type;
    std::vector<DayRun> day_runs;

    size_t size() const { return ts.size(); }

    void clear() {
        device_id.clear();
        ts.clear();
        lat.clear();
        lon.clear();
        accuracy_m.clear();
        tz_offset_s.clear();
        device_type.clear();
        day_runs.clear();
    }

    void build_day_index() {
        day_runs.clear();
        size_t n = ts.size();
        size_t i = 0;
        while (i < n) {
            LocalDate d = local_day(ts[i], tz_offset_s[i]);
            size_t j = i + 1;
            while (j < n && local_day(ts[j], tz_offset_s[j]) == d) ++j;
            day_runs.push_back(DayRun{d, static_cast<uint32_t>(i), static_cast<uint32_t>(j)});
            i = j;
        }
    }
};

class TrajectoryWriter {
  public:
    explicit TrajectoryWriter(const std::string& path) : file_(path) { file_.write(kStoreMagic, sizeof(kStoreMagic)); }

    void append(const DeviceTrajectory& t) {
        uint32_t id_len = static_cast<uint32_t>(t.device_id.size());
        uint32_t n = static_cast<uint32_t>(t.ts.size());
        file_.write(&id_len, sizeof(id_len));
        file_.write(t.device_id.data(), id_len);
        file_.write(&n, sizeof(n));
        file_.write(t.ts.data(), sizeof(int64_t) * n);
        file_.write(t.lat.data(), sizeof(double) * n);
        file_.write(t.lon.data(), sizeof(double) * n);
        file_.write(t.accuracy_m.data(), sizeof(float) * n);
        file_.write(t.tz_offset_s.data(), sizeof(int32_t) * n);
        file_.write(t.device_type.data(), sizeof(uint8_t) * n);
        ++count_;
    }

    uint64_t device_count() const { return count_; }

    void commit() { file_.commit(); }

  private:
    AtomicFile file_;
    uint64_t count_ = 0;
};

class TrajectoryReader {
  public:
    explicit TrajectoryReader(const std::string& path) : path_(path), f_(std::fopen(path.c_str(), "rb")) {
        if (!f_) throw std::runtime_error("cannot open trajectory store " + path);
        char magic[8];
        if (std::fread(magic, 1, 8, f_) != 8 || std::memcmp(magic, kStoreMagic, 8) != 0)
            throw std::runtime_error(path + ": not a trajectory store");
    }
    ~TrajectoryReader() {
        if (f_) std::fclose(f_);
    }
    TrajectoryReader(const TrajectoryReader&) = delete;
    TrajectoryReader& operator=(const TrajectoryReader&) = delete;

    // Reads the next device into `out` (day index included). False at EOF.
    bool next(DeviceTrajectory& out) {
        uint32_t id_len = 0;
        size_t got = std::fread(&id_len, 1, sizeof(id_len), f_);
        if (got == 0) return false;
        if (got != sizeof(id_len)) throw std::runtime_error(path_ + ": truncated store");
        out.clear();
        out.device_id.resize(id_len);
        uint32_t n = 0;
        if (std::fread(out.device_id.data(), 1, id_len, f_) != id_len ||
            std::fread(&n, 1, sizeof(n), f_) != sizeof(n))
            throw std::runtime_error(path_ + ": truncated store");
        out.ts.resize(n);
        out.lat.resize(n);
        out.lon.resize(n);
        out.accuracy_m.resize(n);
        out.tz_offset_s.resize(n);
        out.device_type.resize(n);
        bool ok = std::fread(out.ts.data(), sizeof(int64_t), n, f_) == n &&
                  std::fread(out.lat.data(), sizeof(double), n, f_) == n &&
                  std::fread(out.lon.data(), sizeof(double), n, f_) == n &&
                  std::fread(out.accuracy_m.data(), sizeof(float), n, f_) == n &&
                  std::fread(out.tz_offset_s.data(), sizeof(int32_t), n, f_) == n &&
                  std::fread(out.device_type.data(), sizeof(uint8_t), n, f_) == n;
        if (!ok) throw std::runtime_error(path_ + ": truncated store");
        out.build_day_index();
        return true;
    }

  private:
    std::string path_;
    FILE* f_ = nullptr;
};

}  // namespace evacuscope
