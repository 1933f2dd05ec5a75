#pragma once
// File helpers shared by the pipeline stages: atomic writes (temp + rename),
// whole-file reads, and a 64-bit FNV-1a digest used in the run manifest.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace evacuscope {

inline std::string read_file(const std::string& path) {
    FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw std::runtime_error("cannot open " + path);
    std::string out;
    char buf[1 << 16];
    size_t n;
    while ((n = std::fread(buf, 1, sizeof(buf), f)) > 0) out.append(buf, n);
    std::fclose(f);
    return out;
}

// Write via <path>.tmp then rename, so readers never see a partial file.
inline void atomic_write(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    FILE* f = std::fopen(tmp.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot create " + tmp);
    if (!content.empty() && std::fwrite(content.data(), 1, content.size(), f) != content.size()) {
        std::fclose(f);
        throw std::runtime_error("short write to " + tmp);
    }
    if (std::fflush(f) != 0 || std::fclose(f) != 0) throw std::runtime_error("flush failed for " + tmp);
    std::filesystem::rename(tmp, path);
}

// Streaming writer with the same temp-file discipline for large outputs.
class AtomicFile {
  public:
    explicit AtomicFile(std::string path) : path_(std::move(path)), tmp_(path_ + ".tmp") {
        f_ = std::fopen(tmp_.c_str(), "wb");
        if (!f_) throw std::runtime_error("cannot create " + tmp_);
    }
    ~AtomicFile() {
        if (f_) {  // destroyed without commit: drop the temp file
            std::fclose(f_);
            std::remove(tmp_.c_str());
        }
    }
    AtomicFile(const AtomicFile&) = delete;
    AtomicFile& operator=(const AtomicFile&) = delete;

    void write(const void* data, size_t n) {
        if (n && std::fwrite(data, 1, n, f_) != n) throw std::runtime_error("short write to " + tmp_);
    }
    void write(const std::string& s) { write(s.data(), s.size()); }

    void commit() {
        if (std::fflush(f_) != 0 || std::fclose(f_) != 0) {
            f_ = nullptr;
            throw std::runtime_error("flush failed for " + tmp_);
        }
        f_ = nullptr;
        std::filesystem::rename(tmp_, path_);
    }

  private:
    std::string path_, tmp_;
    FILE* f_ = nullptr;
};

inline uint64_t fnv1a64(const void* data, size_t n, uint64_t h = 1469598103934665603ull) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string digest_hex(uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string file_digest(const std::string& path) {
    FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw std::runtime_error("cannot open " + path);
    uint64_t h = 1469598103934665603ull;
    char buf[1 << 16];
    size_t n;
    while ((n = std::fread(buf, 1, sizeof(buf), f)) > 0) h = fnv1a64(buf, n, h);
    std::fclose(f);
    return digest_hex(h);
}

}  // namespace evacuscope
