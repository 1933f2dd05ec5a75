#pragma once
// Flat key = value config files (scenario.toml / pipeline.toml use this subset):
// one `key = value` per line, '#' comments, optional double quotes around values.

#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "evacuscope/civil.hpp"
#include "evacuscope/csv.hpp"

namespace evacuscope {

class KvConfig {
  public:
    static KvConfig parse_text(const std::string& text) {
        KvConfig cfg;
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            size_t hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            std::string t = trim(line);
            if (t.empty()) continue;
            size_t eq = t.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
            std::string key = trim(t.substr(0, eq));
            std::string val = trim(t.substr(eq + 1));
            if (val.size() >= 2 && val.front() == '"' && val.back() == '"') val = val.substr(1, val.size() - 2);
            if (key.empty()) throw std::runtime_error("config line " + std::to_string(lineno) + ": empty key");
            cfg.values_[key] = val;
        }
        return cfg;
    }

    static KvConfig parse_file(const std::string& path) {
        LineReader rd(path);
        std::string text;
        std::string_view line;
        while (rd.next(line)) {
            text.append(line);
            text.push_back('\n');
        }
        return parse_text(text);
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::optional<std::string> get(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        return it->second;
    }

    std::string get_string(const std::string& key, const std::string& def) const {
        auto v = get(key);
        return v ? *v : def;
    }
    std::string require_string(const std::string& key) const {
        auto v = get(key);
        if (!v) throw std::runtime_error("config: missing required key '" + key + "'");
        return *v;
    }

    int64_t get_int(const std::string& key, int64_t def) const {
        auto v = get(key);
        if (!v) return def;
        auto n = parse_i64(*v);
        if (!n) throw std::runtime_error("config: key '" + key + "' is not an integer: " + *v);
        return *n;
    }

    double get_double(const std::string& key, double def) const {
        auto v = get(key);
        if (!v) return def;
        auto n = parse_f64(*v);
        if (!n) throw std::runtime_error("config: key '" + key + "' is not a number: " + *v);
        return *n;
    }

    bool get_bool(const std::string& key, bool def) const {
        auto v = get(key);
        if (!v) return def;
        if (*v == "true" || *v == "1" || *v == "yes") return true;
        if (*v == "false" || *v == "0" || *v == "no") return false;
        throw std::runtime_error("config: key '" + key + "' is not a boolean: " + *v);
    }

    LocalDate get_date(const std::string& key, LocalDate def) const {
        auto v = get(key);
        if (!v) return def;
        auto d = parse_date(*v);
        if (!d) throw std::runtime_error("config: key '" + key + "' is not a date (YYYY-MM-DD): " + *v);
        return *d;
    }

    DateRange get_month(const std::string& key, DateRange def) const {
        auto v = get(key);
        if (!v) return def;
        auto r = parse_month(*v);
        if (!r) throw std::runtime_error("config: key '" + key + "' is not a month (YYYY-MM): " + *v);
        return *r;
    }

    const std::map<std::string, std::string>& all() const { return values_; }

    void set(const std::string& key, const std::string& val) { values_[key] = val; }

  private:
    static std::string trim(const std::string& s) {
        size_t a = s.find_first_not_of(" \t");
        if (a == std::string::npos) return "";
        size_t b = s.find_last_not_of(" \t");
        return s.substr(a, b - a + 1);
    }

    std::map<std::string, std::string> values_;
};

}  // namespace evacuscope
