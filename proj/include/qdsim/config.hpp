#pragma once

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "criterion.hpp"
#include "geometry.hpp"

namespace qd {

struct config_error : std::runtime_error {
    std::vector<std::string> errors;

    static std::string join(const std::vector<std::string>& errs) {
        std::string s = "config validation failed:";
        for (const std::string& e : errs) s += "\n  - " + e;
        return s;
    }

    explicit config_error(std::vector<std::string> errs)
        : std::runtime_error(join(errs)), errors(std::move(errs)) {}
};

// Validated run configuration with every default filled in. The JSON schema
// is published in docs/config_schema.json; validation reports all violations
// with field paths in one pass.
struct SimConfig {
    DeviceGeometry geometry{};
    bool use_explicit_caps = false;
    CapacitanceSet caps{};

    // spin / drive
    double t = 0.4;        // meV, uniform tunneling
    double q_res = 0.0;    // e, detuning calibration offset
    double drive_amp = 0;  // meV; 0 = pick 4% of 2t
    std::string gate_mode = "ideal";
    std::size_t cp_cycles = 64;
    bool composite_z = false;

    // rwa study
    double rwa_ratio = 0.02;
    double rwa_cycles = 10;

    // oracle study
    std::size_t oracle_samples = 60;
    double chi_max = 0.045;

    // readout
    std::size_t ro_segments = 8;
    double ro_overdrive = 2.0; // V
    double ro_theta = 0.3;     // 1/V
    double ro_shift = 0.1;     // fraction of overdrive
    double ro_vdrain = 1.5;    // V
    double ro_lambda = 1.0;
    double vd_start = 0.05, vd_step = 0.05, vd_stop = 2.0;
    std::size_t ro_max_n = 16;
    double ro_sigma = 0.1;
    std::size_t ro_seeds = 100;

    // operating criterion
    CriterionInput crit{0.001, 0.1, 0.3, 0.4, 1.0e6, 0.44, 10.0};

    // optional estimate quotes: each present key adds a banded verdict to the
    // derive report
    std::optional<double> est_ec;  // meV
    std::optional<double> est_j;   // meV
    std::optional<double> est_thz; // THz
    double est_j_band = 10; // J gets a wider band than the rest
    double est_band = 3.0;

    std::uint64_t seed = 1;
    double margin = 10.0;
    std::size_t max_qubits = 0; // 0 = keep compiled-in cap
    std::string out_dir = ".";

    std::vector<std::string> notices;
};

namespace detail {

struct ConfigReader {
    std::vector<std::string> errors;

    void reject_unknown(const nlohmann::json& obj, const std::string& base,
                        std::initializer_list<const char*> known) {
        std::set<std::string> k;
        for (const char* s : known) k.insert(s);
        for (const auto& item : obj.items())
            if (!k.count(item.key()))
                errors.push_back(base + item.key() + ": unknown key");
    }

    enum class Bound { any, positive, nonneg };

    bool check_bound(double v, Bound b, const std::string& path) {
        if (b == Bound::positive && !(v > 0)) {
            errors.push_back(path + ": must be > 0");
            return false;
        }
        if (b == Bound::nonneg && !(v >= 0)) {
            errors.push_back(path + ": must be >= 0");
            return false;
        }
        return true;
    }

    void num(const nlohmann::json& obj, const std::string& base,
             const char* key, double& target, Bound b = Bound::any) {
        if (!obj.contains(key)) return;
        const nlohmann::json& v = obj.at(key);
        if (!v.is_number()) {
            errors.push_back(base + key + ": must be a number");
            return;
        }
        const double x = v.get<double>();
        if (check_bound(x, b, base + key)) target = x;
    }

    void opt_num(const nlohmann::json& obj, const std::string& base,
                 const char* key, std::optional<double>& target,
                 Bound b = Bound::any) {
        double x = 0;
        bool had = obj.contains(key);
        num(obj, base, key, x, b);
        if (had && obj.at(key).is_number() && check_silent(x, b)) target = x;
    }

    bool check_silent(double v, Bound b) const {
        if (b == Bound::positive) return v > 0;
        if (b == Bound::nonneg) return v >= 0;
        return true;
    }

    void count(const nlohmann::json& obj, const std::string& base,
               const char* key, std::size_t& target, std::size_t min_v = 0) {
        if (!obj.contains(key)) return;
        const nlohmann::json& v = obj.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) {
            errors.push_back(base + key +
                             ": must be a non-negative integer");
            return;
        }
        const auto x = static_cast<std::size_t>(v.get<long long>());
        if (x < min_v) {
            errors.push_back(base + key + ": must be >= " +
                             std::to_string(min_v));
            return;
        }
        target = x;
    }

    void boolean(const nlohmann::json& obj, const std::string& base,
                 const char* key, bool& target) {
        if (!obj.contains(key)) return;
        const nlohmann::json& v = obj.at(key);
        if (!v.is_boolean()) {
            errors.push_back(base + key + ": must be a boolean");
            return;
        }
        target = v.get<bool>();
    }

    void word(const nlohmann::json& obj, const std::string& base,
              const char* key, std::string& target,
              std::initializer_list<const char*> allowed) {
        if (!obj.contains(key)) return;
        const nlohmann::json& v = obj.at(key);
        if (!v.is_string()) {
            errors.push_back(base + key + ": must be a string");
            return;
        }
        const std::string s = v.get<std::string>();
        for (const char* a : allowed)
            if (s == a) {
                target = s;
                return;
            }
        std::string opts;
        for (const char* a : allowed) {
            if (!opts.empty()) opts += "|";
            opts += a;
        }
        errors.push_back(base + key + ": must be one of " + opts);
    }

    void vec(const nlohmann::json& obj, const std::string& base,
             const char* key, std::vector<double>& target,
             Bound b = Bound::nonneg) {
        if (!obj.contains(key)) return;
        const nlohmann::json& v = obj.at(key);
        if (!v.is_array()) {
            errors.push_back(base + key + ": must be an array of numbers");
            return;
        }
        std::vector<double> out;
        bool ok = true;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) {
                errors.push_back(base + key + "[" + std::to_string(i) +
                                 "]: must be a number");
                ok = false;
                continue;
            }
            const double x = v[i].get<double>();
            if (!check_bound(x, b,
                             base + key + "[" + std::to_string(i) + "]"))
                ok = false;
            out.push_back(x);
        }
        if (ok) target = std::move(out);
    }
};

} // namespace detail

// Validates a parsed JSON document against the schema and fills a SimConfig.
// Reports every violation (with field paths) instead of stopping at the
// first; explicit capacitances take precedence over the geometry block with
// a notice.
inline SimConfig validate_config(const nlohmann::json& root) {
    detail::ConfigReader r;
    SimConfig cfg;
    using B = detail::ConfigReader::Bound;

    if (!root.is_object()) {
        r.errors.push_back("(root): must be a JSON object");
        throw config_error(std::move(r.errors));
    }
    r.reject_unknown(root, "",
                     {"geometry", "capacitances", "spin", "gates", "rwa",
                      "oracle", "readout", "criterion", "estimates", "seed",
                      "margin", "max_qubits", "out_dir"});

    if (root.contains("geometry")) {
        const nlohmann::json& g = root.at("geometry");
        if (!g.is_object()) {
            r.errors.push_back("geometry: must be an object");
        } else {
            r.reject_unknown(g, "geometry.",
                             {"r0", "d_A", "d_B", "d_C", "d_D", "eps_ox",
                              "eps_si", "n_qubits"});
            r.num(g, "geometry.", "r0", cfg.geometry.r0, B::positive);
            r.num(g, "geometry.", "d_A", cfg.geometry.d_A, B::positive);
            r.num(g, "geometry.", "d_B", cfg.geometry.d_B, B::positive);
            r.num(g, "geometry.", "d_C", cfg.geometry.d_C, B::positive);
            r.num(g, "geometry.", "d_D", cfg.geometry.d_D, B::positive);
            r.num(g, "geometry.", "eps_ox", cfg.geometry.eps_ox, B::positive);
            r.num(g, "geometry.", "eps_si", cfg.geometry.eps_si, B::positive);
            r.count(g, "geometry.", "n_qubits", cfg.geometry.n_qubits, 1);
        }
    }

    if (root.contains("capacitances")) {
        const nlohmann::json& c = root.at("capacitances");
        if (!c.is_object()) {
            r.errors.push_back("capacitances: must be an object");
        } else {
            r.reject_unknown(c, "capacitances.",
                             {"cA", "cB", "cC", "cD", "cE", "cH", "cI"});
            CapacitanceSet caps;
            r.vec(c, "capacitances.", "cA", caps.cA);
            r.vec(c, "capacitances.", "cB", caps.cB);
            r.vec(c, "capacitances.", "cC", caps.cC);
            r.vec(c, "capacitances.", "cD", caps.cD);
            r.vec(c, "capacitances.", "cE", caps.cE);
            r.vec(c, "capacitances.", "cH", caps.cH);
            r.vec(c, "capacitances.", "cI", caps.cI);
            const std::size_t n = caps.cA.size();
            if (caps.cH.empty()) caps.cH.assign(n, 0.0);
            if (caps.cI.empty()) caps.cI.assign(n, 0.0);
            if (caps.cE.empty() && !caps.cD.empty())
                caps.cE.assign(caps.cD.size(), 0.0);
            try {
                caps.validate();
                cfg.caps = std::move(caps);
                cfg.use_explicit_caps = true;
            } catch (const invalid_input& e) {
                r.errors.push_back(std::string("capacitances: ") + e.what());
            }
            if (root.contains("geometry") && cfg.use_explicit_caps)
                cfg.notices.push_back(
                    "both geometry and explicit capacitances given; explicit "
                    "capacitances win");
        }
    }

    if (root.contains("spin")) {
        const nlohmann::json& s = root.at("spin");
        if (!s.is_object()) {
            r.errors.push_back("spin: must be an object");
        } else {
            r.reject_unknown(s, "spin.", {"t", "q_res", "drive_amp"});
            r.num(s, "spin.", "t", cfg.t, B::positive);
            r.num(s, "spin.", "q_res", cfg.q_res);
            r.num(s, "spin.", "drive_amp", cfg.drive_amp, B::nonneg);
        }
    }

    if (root.contains("gates")) {
        const nlohmann::json& g = root.at("gates");
        if (!g.is_object()) {
            r.errors.push_back("gates: must be an object");
        } else {
            r.reject_unknown(g, "gates.",
                             {"mode", "cp_cycles", "composite_z"});
            r.word(g, "gates.", "mode", cfg.gate_mode,
                   {"ideal", "physical"});
            r.count(g, "gates.", "cp_cycles", cfg.cp_cycles, 1);
            r.boolean(g, "gates.", "composite_z", cfg.composite_z);
        }
    }

    if (root.contains("rwa")) {
        const nlohmann::json& w = root.at("rwa");
        if (!w.is_object()) {
            r.errors.push_back("rwa: must be an object");
        } else {
            r.reject_unknown(w, "rwa.", {"ratio", "cycles"});
            r.num(w, "rwa.", "ratio", cfg.rwa_ratio, B::positive);
            r.num(w, "rwa.", "cycles", cfg.rwa_cycles, B::positive);
        }
    }

    if (root.contains("oracle")) {
        const nlohmann::json& o = root.at("oracle");
        if (!o.is_object()) {
            r.errors.push_back("oracle: must be an object");
        } else {
            r.reject_unknown(o, "oracle.", {"samples", "chi_max"});
            r.count(o, "oracle.", "samples", cfg.oracle_samples, 1);
            r.num(o, "oracle.", "chi_max", cfg.chi_max, B::positive);
            if (cfg.chi_max >= 0.05)
                r.errors.push_back(
                    "oracle.chi_max: must stay below 0.05 (weak-coupling "
                    "regime)");
        }
    }

    if (root.contains("readout")) {
        const nlohmann::json& o = root.at("readout");
        if (!o.is_object()) {
            r.errors.push_back("readout: must be an object");
        } else {
            r.reject_unknown(o, "readout.",
                             {"segments", "overdrive", "theta", "shift_frac",
                              "v_drain", "lambda", "vd_start", "vd_step",
                              "vd_stop", "max_n", "sigma", "substrate_seeds"});
            r.count(o, "readout.", "segments", cfg.ro_segments, 1);
            r.num(o, "readout.", "overdrive", cfg.ro_overdrive, B::positive);
            r.num(o, "readout.", "theta", cfg.ro_theta, B::nonneg);
            r.num(o, "readout.", "shift_frac", cfg.ro_shift, B::positive);
            r.num(o, "readout.", "v_drain", cfg.ro_vdrain, B::positive);
            r.num(o, "readout.", "lambda", cfg.ro_lambda, B::positive);
            r.num(o, "readout.", "vd_start", cfg.vd_start, B::positive);
            r.num(o, "readout.", "vd_step", cfg.vd_step, B::positive);
            r.num(o, "readout.", "vd_stop", cfg.vd_stop, B::positive);
            r.count(o, "readout.", "max_n", cfg.ro_max_n, 3);
            r.num(o, "readout.", "sigma", cfg.ro_sigma, B::nonneg);
            r.count(o, "readout.", "substrate_seeds", cfg.ro_seeds, 1);
            if (cfg.ro_sigma >= 1)
                r.errors.push_back("readout.sigma: must be < 1");
            if (cfg.vd_stop < cfg.vd_start)
                r.errors.push_back(
                    "readout.vd_stop: must be >= readout.vd_start");
        }
    }

    if (root.contains("criterion")) {
        const nlohmann::json& c = root.at("criterion");
        if (!c.is_object()) {
            r.errors.push_back("criterion: must be an object");
        } else {
            r.reject_unknown(c, "criterion.",
                             {"T", "J", "delta0", "t", "R_int", "C_int"});
            r.num(c, "criterion.", "T", cfg.crit.T, B::positive);
            r.num(c, "criterion.", "J", cfg.crit.J, B::positive);
            r.num(c, "criterion.", "delta0", cfg.crit.delta0, B::positive);
            r.num(c, "criterion.", "t", cfg.crit.t, B::positive);
            r.num(c, "criterion.", "R_int", cfg.crit.R_int, B::positive);
            r.num(c, "criterion.", "C_int", cfg.crit.C_int, B::positive);
        }
    }

    if (root.contains("estimates")) {
        const nlohmann::json& e = root.at("estimates");
        if (!e.is_object()) {
            r.errors.push_back("estimates: must be an object");
        } else {
            r.reject_unknown(e, "estimates.",
                             {"e_c", "j", "j_band", "f_thz", "band"});
            r.opt_num(e, "estimates.", "e_c", cfg.est_ec, B::positive);
            r.opt_num(e, "estimates.", "j", cfg.est_j, B::positive);
            r.num(e, "estimates.", "j_band", cfg.est_j_band, B::positive);
            r.opt_num(e, "estimates.", "f_thz", cfg.est_thz, B::positive);
            r.num(e, "estimates.", "band", cfg.est_band, B::positive);
            if (cfg.est_band <= 1)
                r.errors.push_back("estimates.band: must be > 1");
            if (cfg.est_j_band <= 1)
                r.errors.push_back("estimates.j_band: must be > 1");
        }
    }

    if (root.contains("seed")) {
        const nlohmann::json& v = root.at("seed");
        if (!v.is_number_integer() || v.get<long long>() < 0)
            r.errors.push_back("seed: must be a non-negative integer");
        else
            cfg.seed = static_cast<std::uint64_t>(v.get<long long>());
    }
    r.num(root, "", "margin", cfg.margin, B::positive);
    r.count(root, "", "max_qubits", cfg.max_qubits, 1);
    if (root.contains("out_dir")) {
        if (!root.at("out_dir").is_string())
            r.errors.push_back("out_dir: must be a string");
        else
            cfg.out_dir = root.at("out_dir").get<std::string>();
    }

    if (!cfg.use_explicit_caps) {
        try {
            cfg.caps = caps_from_geometry(cfg.geometry);
        } catch (const invalid_input& e) {
            r.errors.push_back(std::string("geometry: ") + e.what());
        }
    }
    cfg.crit.margin = cfg.margin;

    if (!r.errors.empty()) throw config_error(std::move(r.errors));
    return cfg;
}

inline SimConfig default_config() {
    return validate_config(nlohmann::json::object());
}

inline SimConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw config_error({"cannot open config file: " + path});
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error({path + ": " + e.what()});
    }
    return validate_config(root);
}

// Echo of the effective configuration: every default filled in, suitable for
// archiving next to the outputs.
inline nlohmann::json effective_json(const SimConfig& cfg) {
    nlohmann::json root;
    root["geometry"] = {{"r0", cfg.geometry.r0},     {"d_A", cfg.geometry.d_A},
                        {"d_B", cfg.geometry.d_B},   {"d_C", cfg.geometry.d_C},
                        {"d_D", cfg.geometry.d_D},   {"eps_ox", cfg.geometry.eps_ox},
                        {"eps_si", cfg.geometry.eps_si},
                        {"n_qubits", cfg.geometry.n_qubits}};
    if (cfg.use_explicit_caps)
        root["capacitances"] = {{"cA", cfg.caps.cA}, {"cB", cfg.caps.cB},
                                {"cC", cfg.caps.cC}, {"cD", cfg.caps.cD},
                                {"cE", cfg.caps.cE}, {"cH", cfg.caps.cH},
                                {"cI", cfg.caps.cI}};
    root["spin"] = {{"t", cfg.t}, {"q_res", cfg.q_res},
                    {"drive_amp", cfg.drive_amp}};
    root["gates"] = {{"mode", cfg.gate_mode},
                     {"cp_cycles", cfg.cp_cycles},
                     {"composite_z", cfg.composite_z}};
    root["rwa"] = {{"ratio", cfg.rwa_ratio}, {"cycles", cfg.rwa_cycles}};
    root["oracle"] = {{"samples", cfg.oracle_samples},
                      {"chi_max", cfg.chi_max}};
    root["readout"] = {{"segments", cfg.ro_segments},
                       {"overdrive", cfg.ro_overdrive},
                       {"theta", cfg.ro_theta},
                       {"shift_frac", cfg.ro_shift},
                       {"v_drain", cfg.ro_vdrain},
                       {"lambda", cfg.ro_lambda},
                       {"vd_start", cfg.vd_start},
                       {"vd_step", cfg.vd_step},
                       {"vd_stop", cfg.vd_stop},
                       {"max_n", cfg.ro_max_n},
                       {"sigma", cfg.ro_sigma},
                       {"substrate_seeds", cfg.ro_seeds}};
    root["criterion"] = {{"T", cfg.crit.T},         {"J", cfg.crit.J},
                         {"delta0", cfg.crit.delta0}, {"t", cfg.crit.t},
                         {"R_int", cfg.crit.R_int}, {"C_int", cfg.crit.C_int}};
    if (cfg.est_ec || cfg.est_j || cfg.est_thz) {
        nlohmann::json est{{"band", cfg.est_band},
                           {"j_band", cfg.est_j_band}};
        if (cfg.est_ec) est["e_c"] = *cfg.est_ec;
        if (cfg.est_j) est["j"] = *cfg.est_j;
        if (cfg.est_thz) est["f_thz"] = *cfg.est_thz;
        root["estimates"] = std::move(est);
    }
    root["seed"] = cfg.seed;
    root["margin"] = cfg.margin;
    if (cfg.max_qubits > 0) root["max_qubits"] = cfg.max_qubits;
    root["out_dir"] = cfg.out_dir;
    if (!cfg.notices.empty()) root["notices"] = cfg.notices;
    return root;
}

} // namespace qd
