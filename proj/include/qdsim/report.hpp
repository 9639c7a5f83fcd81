#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "geometry.hpp"

namespace qd {

// Shortest decimal form that round-trips to the same double. Used for every
// machine-readable number so repeated runs are byte-identical.
inline std::string fmt_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// Human-oriented fixed-significance form for tables.
inline std::string fmt_short(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::string(buf);
}

struct Measurement {
    std::string name;
    double value = 0;
    std::string unit;
    std::string note;
    std::optional<bool> pass;
};

struct RunReport {
    std::string scenario;
    std::vector<Measurement> items;
    std::vector<std::string> notes;

    void add(const std::string& name, double value, const std::string& unit,
             const std::string& note = "") {
        items.push_back({name, value, unit, note, std::nullopt});
    }

    void add_check(const std::string& name, double value,
                   const std::string& unit, bool pass,
                   const std::string& note = "") {
        items.push_back({name, value, unit, note, pass});
    }

    void note(const std::string& text) { notes.push_back(text); }

    bool all_pass() const {
        for (const Measurement& m : items)
            if (m.pass.has_value() && !*m.pass) return false;
        return true;
    }
};

inline nlohmann::json to_json(const RunReport& rep) {
    nlohmann::json items = nlohmann::json::array();
    for (const Measurement& m : rep.items) {
        nlohmann::json j{{"name", m.name}, {"value", m.value},
                         {"unit", m.unit}};
        if (!m.note.empty()) j["note"] = m.note;
        if (m.pass.has_value()) j["pass"] = *m.pass;
        items.push_back(std::move(j));
    }
    return nlohmann::json{{"scenario", rep.scenario},
                          {"items", std::move(items)},
                          {"notes", rep.notes},
                          {"all_pass", rep.all_pass()}};
}

inline std::string render_text(const RunReport& rep) {
    std::string out = "== " + rep.scenario + " ==\n";
    std::size_t w = 0;
    for (const Measurement& m : rep.items) w = std::max(w, m.name.size());
    for (const Measurement& m : rep.items) {
        out += "  " + m.name;
        out.append(w - m.name.size() + 2, ' ');
        out += fmt_short(m.value);
        if (!m.unit.empty()) out += " " + m.unit;
        if (m.pass.has_value()) out += *m.pass ? "  [pass]" : "  [FAIL]";
        if (!m.note.empty()) out += "  (" + m.note + ")";
        out += '\n';
    }
    for (const std::string& n : rep.notes) out += "  note: " + n + '\n';
    out += rep.all_pass() ? "  => all verdicts pass\n"
                          : "  => FAILED verdicts present\n";
    return out;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

// Comma separator, '.' decimal point, header row, LF endings.
inline std::string render_csv(const CsvTable& t) {
    std::string out;
    for (std::size_t i = 0; i < t.header.size(); ++i) {
        if (i) out += ',';
        out += t.header[i];
    }
    out += '\n';
    for (const std::vector<double>& row : t.rows) {
        if (row.size() != t.header.size())
            throw invalid_input("csv: row width differs from header");
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += fmt_double(row[i]);
        }
        out += '\n';
    }
    return out;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw invalid_input("cannot open for writing: " + path);
    f.write(content.data(),
            static_cast<std::streamsize>(content.size()));
    if (!f) throw invalid_input("write failed: " + path);
}

inline void write_csv(const std::string& path, const CsvTable& t) {
    write_file(path, render_csv(t));
}

} // namespace qd
