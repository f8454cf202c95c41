#pragma once
// CSV emission and line-oriented config parsing for the batch driver.
//
// CSV contract: comma-separated, single header row, numeric cells printed with
// 17 significant digits, LF line endings, byte-identical across reruns with
// identical inputs.
//
// Config contract: `key = value` lines grouped under `[section]` headers,
// '#' starts a comment, unknown keys are rejected by validate().

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "g2glue/errors.hpp"

namespace g2glue {

// ---------------------------------------------------------------------------
// CSV

inline std::string csv_cell(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row) {
        if (row.size() != header.size())
            throw IoFailure("CsvTable: row width does not match header");
        rows.push_back(std::move(row));
    }
    std::string to_string() const {
        std::ostringstream out;
        for (std::size_t i = 0; i < header.size(); ++i)
            out << (i ? "," : "") << header[i];
        out << '\n';
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i)
                out << (i ? "," : "") << row[i];
            out << '\n';
        }
        return out.str();
    }
};

inline void emit_csv(const std::string& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::binary);  // binary: LF endings everywhere
    if (!out) throw IoFailure("emit_csv: cannot open " + path);
    out << table.to_string();
    if (!out) throw IoFailure("emit_csv: write failed for " + path);
}

// ---------------------------------------------------------------------------
// Config

class Config {
public:
    static Config parse(std::istream& in) {
        Config cfg;
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::size_t hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const std::string t = trim(line);
            if (t.empty()) continue;
            if (t.front() == '[') {
                if (t.back() != ']')
                    throw ConfigParse("config line " + std::to_string(lineno) +
                                      ": unterminated section header");
                section = trim(t.substr(1, t.size() - 2));
                if (section.empty())
                    throw ConfigParse("config line " + std::to_string(lineno) +
                                      ": empty section name");
                cfg.values_[section];  // record section even if empty
                continue;
            }
            const std::size_t eq = t.find('=');
            if (eq == std::string::npos)
                throw ConfigParse("config line " + std::to_string(lineno) +
                                  ": expected key = value");
            const std::string key = trim(t.substr(0, eq));
            const std::string val = trim(t.substr(eq + 1));
            if (key.empty())
                throw ConfigParse("config line " + std::to_string(lineno) + ": empty key");
            auto& sec = cfg.values_[section];
            if (sec.count(key))
                throw ConfigParse("config line " + std::to_string(lineno) +
                                  ": duplicate key '" + key + "'");
            sec[key] = val;
        }
        return cfg;
    }

    static Config parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigParse("config: cannot open " + path);
        return parse(in);
    }

    // Reject keys outside the allowed set (per section; "" is the top level).
    void validate(const std::map<std::string, std::set<std::string>>& allowed) const {
        for (const auto& [section, kv] : values_) {
            const auto it = allowed.find(section);
            if (it == allowed.end())
                throw ConfigParse("config: unknown section [" + section + "]");
            for (const auto& [key, _] : kv)
                if (!it->second.count(key))
                    throw ConfigParse("config: unknown key '" + key + "' in section [" +
                                      section + "]");
        }
    }

    bool has(const std::string& section, const std::string& key) const {
        const auto s = values_.find(section);
        return s != values_.end() && s->second.count(key) > 0;
    }
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
        const auto s = values_.find(section);
        if (s == values_.end()) return fallback;
        const auto k = s->second.find(key);
        return k == s->second.end() ? fallback : k->second;
    }
    double get_double(const std::string& section, const std::string& key,
                      double fallback) const {
        if (!has(section, key)) return fallback;
        const std::string v = get_string(section, key, "");
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(v, &used);
        } catch (const std::exception&) {
            throw ConfigParse("config: key '" + key + "' is not a number: '" + v + "'");
        }
        if (used != v.size())
            throw ConfigParse("config: key '" + key + "' has trailing junk: '" + v + "'");
        return x;
    }
    long get_int(const std::string& section, const std::string& key, long fallback) const {
        if (!has(section, key)) return fallback;
        const std::string v = get_string(section, key, "");
        std::size_t used = 0;
        long x = 0;
        try {
            x = std::stol(v, &used);
        } catch (const std::exception&) {
            throw ConfigParse("config: key '" + key + "' is not an integer: '" + v + "'");
        }
        if (used != v.size())
            throw ConfigParse("config: key '" + key + "' has trailing junk: '" + v + "'");
        return x;
    }

private:
    static std::string trim(const std::string& s) {
        std::size_t a = s.find_first_not_of(" \t\r");
        std::size_t b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    }

    std::map<std::string, std::map<std::string, std::string>> values_;
};

}  // namespace g2glue
