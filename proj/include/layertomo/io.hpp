#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <boost/version.hpp>
#include <mpfr.h>
#include <json.hpp>

#include "errors.hpp"
#include "velocity_model.hpp"

namespace layertomo {

using json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// "start,stop,count", both ends included; point i is start + i (stop - start) / (count - 1).
inline std::vector<double> parse_grid(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string tok; std::getline(ss, tok, ',');) parts.push_back(tok);
    if (parts.size() != 3) throw ConfigError("grid spec must be start,stop,count: '" + spec + "'");
    double a, b;
    long n;
    try {
        std::size_t used = 0;
        a = std::stod(parts[0], &used);
        if (used != parts[0].size()) throw std::invalid_argument(parts[0]);
        b = std::stod(parts[1], &used);
        if (used != parts[1].size()) throw std::invalid_argument(parts[1]);
        n = std::stol(parts[2], &used);
        if (used != parts[2].size()) throw std::invalid_argument(parts[2]);
    } catch (const std::logic_error&) {
        throw ConfigError("grid spec not numeric: '" + spec + "'");
    }
    if (!std::isfinite(a) || !std::isfinite(b)) throw ConfigError("grid ends must be finite: '" + spec + "'");
    if (n < 1) throw ConfigError("grid count must be positive: '" + spec + "'");
    if (n == 1 && a != b) throw ConfigError("a one-point grid needs start == stop: '" + spec + "'");
    std::vector<double> g(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i)
        g[i] = i + 1 == n ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return g;
}

// Comma-separated numbers, e.g. the four slowness bounds.
inline std::vector<double> parse_list(const std::string& spec, std::size_t expected) {
    std::vector<double> out;
    std::stringstream ss(spec);
    for (std::string tok; std::getline(ss, tok, ',');) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::logic_error&) {
            throw ConfigError("not a number: '" + tok + "' in '" + spec + "'");
        }
    }
    if (out.size() != expected)
        throw ConfigError("expected " + std::to_string(expected) + " comma-separated values: '" + spec + "'");
    return out;
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << text;
    if (!out.flush()) throw IoError("write failed for '" + path + "'");
}

// Profile JSON: {"h": .., "knots": [{"z": .., "c": ..}, ...]}. A "dc" on every knot
// fixes the tangents; otherwise monotone tangents are used.
inline VelocityProfile profile_from_json(const json& j) {
    if (!j.is_object() || !j.contains("h") || !j.contains("knots"))
        throw InvariantViolation("profile JSON needs members 'h' and 'knots'");
    if (!j["h"].is_number()) throw InvariantViolation("profile 'h' must be a number");
    if (!j["knots"].is_array()) throw InvariantViolation("profile 'knots' must be an array");
    const double h = j["h"].get<double>();
    if (!(h > 0)) throw InvariantViolation("profile 'h' must be positive");
    std::vector<double> z, c, dc;
    bool all_dc = true;
    for (std::size_t i = 0; i < j["knots"].size(); ++i) {
        const auto& k = j["knots"][i];
        if (!k.is_object() || !k.contains("z") || !k.contains("c") || !k["z"].is_number() || !k["c"].is_number())
            throw InvariantViolation("knot " + std::to_string(i) + " needs numeric 'z' and 'c'");
        z.push_back(k["z"].get<double>());
        c.push_back(k["c"].get<double>());
        if (k.contains("dc") && k["dc"].is_number()) {
            dc.push_back(k["dc"].get<double>());
            if (!std::isfinite(dc.back())) throw InvariantViolation("non-finite 'dc' at knot " + std::to_string(i));
        } else {
            all_dc = false;
        }
    }
    if (auto v = VelocityProfile::first_violation(z, c)) throw InvariantViolation("invalid profile: " + *v);
    if (z.back() != h) throw InvariantViolation("last knot depth must equal h");
    return all_dc ? VelocityProfile::from_samples(std::move(z), std::move(c), std::move(dc))
                  : VelocityProfile::from_samples(std::move(z), std::move(c));
}

inline VelocityProfile load_profile(const std::string& path) {
    const std::string text = read_text(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw IoError("'" + path + "' is not valid JSON: " + e.what());
    }
    return profile_from_json(j);
}

inline json profile_to_json(const VelocityProfile& p) {
    json knots = json::array();
    for (std::size_t i = 0; i < p.knots().size(); ++i)
        knots.push_back({{"z", p.knots()[i]}, {"c", p.speeds()[i]}, {"dc", p.slopes()[i]}});
    return {{"h", p.depth()}, {"knots", std::move(knots)}};
}

// nlohmann prints doubles in shortest round-trip form, so a saved profile reloads exactly.
inline void save_profile(const std::string& path, const VelocityProfile& p) {
    write_text(path, profile_to_json(p).dump(2) + "\n");
}

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    CsvTable& row() {
        rows_.emplace_back();
        return *this;
    }
    CsvTable& add(double v) { return add_cell(format_double(v)); }
    CsvTable& add(std::size_t v) { return add_cell(std::to_string(v)); }
    CsvTable& add(const std::string& v) { return add_cell(v); }
    CsvTable& add(const char* v) { return add_cell(v); }

    std::size_t size() const { return rows_.size(); }

    std::string str() const {
        std::string out;
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (i) out += ',';
                out += cells[i];
            }
            out += '\n';
        };
        line(header_);
        for (const auto& r : rows_) {
            if (r.size() != header_.size()) throw InvariantViolation("csv row width differs from header");
            line(r);
        }
        return out;
    }

    void save(const std::string& path) const { write_text(path, str()); }

private:
    CsvTable& add_cell(std::string s) {
        if (rows_.empty()) throw InvariantViolation("csv cell added before row()");
        rows_.back().push_back(std::move(s));
        return *this;
    }

    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

struct NumericTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw InvariantViolation("csv has no column '" + name + "'");
    }
};

// Header row followed by rows; blank lines and lines starting with '#' are skipped.
// With `wanted` given, only those columns are kept (in that order) and other cells may be text.
inline NumericTable read_numeric_csv(const std::string& path, const std::vector<std::string>& wanted = {}) {
    std::stringstream in(read_text(path));
    NumericTable t;
    std::vector<std::size_t> keep;
    std::size_t lineno = 0, width = 0;
    for (std::string line; std::getline(in, line);) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');) {
            const auto b = c.find_first_not_of(" \t"), e = c.find_last_not_of(" \t");
            cells.push_back(b == std::string::npos ? "" : c.substr(b, e - b + 1));
        }
        if (t.header.empty()) {
            t.header = cells;
            if (wanted.empty()) {
                for (std::size_t i = 0; i < cells.size(); ++i) keep.push_back(i);
            } else {
                for (const auto& w : wanted) keep.push_back(t.column(w));
                t.header = wanted;
            }
            width = cells.size();
            continue;
        }
        if (cells.size() != width)
            throw InvariantViolation(path + ":" + std::to_string(lineno) + ": row width differs from header");
        std::vector<double> r;
        for (std::size_t k : keep) {
            const auto& c = cells[k];
            try {
                std::size_t used = 0;
                r.push_back(std::stod(c, &used));
                if (used != c.size()) throw std::invalid_argument(c);
            } catch (const std::logic_error&) {
                throw InvariantViolation(path + ":" + std::to_string(lineno) + ": not a number '" + c + "'");
            }
        }
        t.rows.push_back(std::move(r));
    }
    if (t.header.empty()) throw InvariantViolation("'" + path + "' has no header row");
    return t;
}

inline json library_versions() {
    return {{"layertomo", kVersion},
            {"boost", std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) + "." +
                          std::to_string(BOOST_VERSION % 100)},
            {"mpfr", mpfr_get_version()},
            {"compiler", __VERSION__}};
}

inline std::string manifest_path(const std::string& output) { return output + ".manifest.json"; }

// One-line machine-readable error for standard error.
inline std::string error_line(ErrorKind kind, const std::string& message) {
    return json{{"error", kind_name(kind)}, {"exit_code", exit_code(kind)}, {"message", message}}.dump();
}

}  // namespace layertomo
