#pragma once
// Minimal delimited-text plumbing used by ingest and the report writers.
// Field splitting is allocation-free; number parsing goes through from_chars.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace evacuscope {

// Split `line` on `delim` into at most `max_fields` views. Returns field count;
// a count above max_fields means the line had extra fields.
inline size_t split_fields(std::string_view line, char delim, std::string_view* out, size_t max_fields) {
    size_t n = 0;
    size_t start = 0;
    while (true) {
        size_t pos = line.find(delim, start);
        std::string_view f = (pos == std::string_view::npos) ? line.substr(start)
                                                             : line.substr(start, pos - start);
        if (n < max_fields) out[n] = f;
        ++n;
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return n;
}

inline std::vector<std::string_view> split_all(std::string_view line, char delim) {
    std::vector<std::string_view> out;
    size_t start = 0;
    while (true) {
        size_t pos = line.find(delim, start);
        out.push_back(pos == std::string_view::npos ? line.substr(start) : line.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::optional<int64_t> parse_i64(std::string_view s) {
    int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
    return v;
}

inline std::optional<int32_t> parse_i32(std::string_view s) {
    auto v = parse_i64(s);
    if (!v || *v < INT32_MIN || *v > INT32_MAX) return std::nullopt;
    return static_cast<int32_t>(*v);
}

inline std::optional<double> parse_f64(std::string_view s) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
    return v;
}

// Buffered line reader over a FILE*, tolerant of \r\n and a missing final newline.
class LineReader {
  public:
    explicit LineReader(const std::string& path) : f_(std::fopen(path.c_str(), "rb")) {
        if (!f_) throw std::runtime_error("cannot open " + path);
        buf_.resize(1 << 20);
    }
    ~LineReader() {
        if (f_) std::fclose(f_);
    }
    LineReader(const LineReader&) = delete;
    LineReader& operator=(const LineReader&) = delete;

    // View is valid until the next call.
    bool next(std::string_view& line) {
        line_.clear();
        while (true) {
            if (pos_ >= len_) {
                len_ = std::fread(buf_.data(), 1, buf_.size(), f_);
                pos_ = 0;
                if (len_ == 0) {
                    if (line_.empty()) return false;
                    strip_cr();
                    line = line_;
                    return true;
                }
            }
            for (size_t i = pos_; i < len_; ++i) {
                if (buf_[i] == '\n') {
                    line_.append(buf_.data() + pos_, i - pos_);
                    pos_ = i + 1;
                    strip_cr();
                    line = line_;
                    return true;
                }
            }
            line_.append(buf_.data() + pos_, len_ - pos_);
            pos_ = len_;
        }
    }

  private:
    void strip_cr() {
        if (!line_.empty() && line_.back() == '\r') line_.pop_back();
    }
    FILE* f_ = nullptr;
    std::vector<char> buf_;
    size_t pos_ = 0, len_ = 0;
    std::string line_;
};

// Append-only formatter with to_chars fast paths; callers flush to a file.
class RowBuffer {
  public:
    void clear() { s_.clear(); }
    const std::string& str() const { return s_; }

    RowBuffer& raw(std::string_view v) {
        s_.append(v);
        return *this;
    }
    RowBuffer& sep(char c = ',') {
        s_.push_back(c);
        return *this;
    }
    RowBuffer& i64(int64_t v) {
        char b[24];
        auto [p, ec] = std::to_chars(b, b + sizeof(b), v);
        s_.append(b, p);
        return *this;
    }
    RowBuffer& f64(double v, int precision = -1) {
        char b[40];
        auto r = (precision < 0) ? std::to_chars(b, b + sizeof(b), v)
                                 : std::to_chars(b, b + sizeof(b), v, std::chars_format::fixed, precision);
        s_.append(b, r.ptr);
        return *this;
    }
    RowBuffer& nl() {
        s_.push_back('\n');
        return *this;
    }

  private:
    std::string s_;
};

}  // namespace evacuscope
