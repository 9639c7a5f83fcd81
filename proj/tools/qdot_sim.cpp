// qdot_sim: command-line front end for the quantum-dot array simulator.
//
// Exit codes: 0 all verdicts pass, 1 at least one failed verdict,
// 2 usage or configuration error. Diagnostics go to stderr, the report to
// stdout; report.json and any CSVs land in the output directory.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "qdsim/scenarios.hpp"

namespace {

struct CliOverrides {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<double> margin;
    std::optional<std::size_t> max_qubits;
    std::string mode;
    std::string sweep_grid;
    int verbosity = 0;
};

bool parse_sweep_grid(const std::string& s, qd::SimConfig& cfg,
                      std::string& err) {
    const std::size_t a = s.find(':');
    const std::size_t b = s.rfind(':');
    if (a == std::string::npos || b == a) {
        err = "--sweep-grid: expected start:step:stop";
        return false;
    }
    try {
        const double start = std::stod(s.substr(0, a));
        const double step = std::stod(s.substr(a + 1, b - a - 1));
        const double stop = std::stod(s.substr(b + 1));
        if (!(start > 0) || !(step > 0) || !(stop >= start)) {
            err = "--sweep-grid: need 0 < start <= stop and step > 0";
            return false;
        }
        cfg.vd_start = start;
        cfg.vd_step = step;
        cfg.vd_stop = stop;
    } catch (const std::exception&) {
        err = "--sweep-grid: expected start:step:stop with numeric fields";
        return false;
    }
    return true;
}

// The compile-size guard: config and flag may move it, the environment
// variable caps it.
bool apply_qubit_limit(const CliOverrides& ov, const qd::SimConfig& cfg,
                       std::string& err) {
    std::size_t limit = 14;
    if (cfg.max_qubits > 0) limit = cfg.max_qubits;
    if (ov.max_qubits) limit = *ov.max_qubits;
    if (const char* env = std::getenv("QDOT_MAX_QUBITS")) {
        char* end = nullptr;
        const unsigned long cap = std::strtoul(env, &end, 10);
        if (end == env || *end != '\0' || cap == 0) {
            err = "QDOT_MAX_QUBITS: expected a positive integer, got '" +
                  std::string(env) + "'";
            return false;
        }
        limit = std::min<std::size_t>(limit, cap);
    }
    if (limit == 0) {
        err = "--max-qubits: must be positive";
        return false;
    }
    qd::max_qubits_limit() = limit;
    return true;
}

int emit(const std::vector<qd::RunReport>& reports,
         const std::string& out_dir, bool write_outputs) {
    std::string text;
    nlohmann::json jall = nlohmann::json::array();
    bool pass = true;
    for (const qd::RunReport& r : reports) {
        text += qd::render_text(r);
        jall.push_back(qd::to_json(r));
        pass = pass && r.all_pass();
    }
    if (write_outputs) {
        std::filesystem::create_directories(out_dir);
        qd::write_file(
            (std::filesystem::path(out_dir) / "report.json").string(),
            jall.dump(2) + "\n");
        qd::write_file(
            (std::filesystem::path(out_dir) / "report.txt").string(), text);
    }
    std::cout << text;
    return pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Capacitively coupled quantum-dot array simulator: device "
        "parameters, spin dynamics, and readout-chain studies."};
    app.fallthrough();
    app.require_subcommand(1);

    CliOverrides ov;
    app.add_option("--config", ov.config_path,
                   "JSON config file (defaults used when omitted)");
    app.add_option("--out", ov.out_dir,
                   "output directory for report.json and CSVs");
    app.add_option("--seed", ov.seed, "RNG seed override");
    app.add_option("--margin", ov.margin,
                   "separation margin for the operating criterion");
    app.add_option("--max-qubits", ov.max_qubits,
                   "dense-simulation qubit cap (QDOT_MAX_QUBITS caps this)");
    app.add_option("--mode", ov.mode, "gate mode: ideal or physical")
        ->check(CLI::IsMember({"ideal", "physical"}));
    app.add_option("--sweep-grid", ov.sweep_grid,
                   "drain-voltage grid start:step:stop for figures");
    app.add_flag("-v,--verbose", ov.verbosity,
                 "echo the effective config to stderr");

    CLI::App* sub_derive = app.add_subcommand(
        "derive",
        "derive capacitances, E_C, J and the switching rate; with no "
        "--config, reproduce the built-in estimates for both device sizes");
    CLI::App* sub_oracle = app.add_subcommand(
        "oracle", "randomized oracle cross-check of the pair reduction");
    CLI::App* sub_gates = app.add_subcommand(
        "gates", "rotation, refocusing, coupling-gate and CNOT study");
    CLI::App* sub_rwa = app.add_subcommand(
        "rwa", "rotating-wave validity study");
    CLI::App* sub_readout = app.add_subcommand(
        "readout", "solve the readout FET chain at the operating point");
    CLI::App* sub_figures = app.add_subcommand(
        "figures", "drain-voltage and chain-length sweeps, CSV output");
    CLI::App* sub_criterion = app.add_subcommand(
        "criterion", "evaluate the operating-regime inequality chain");
    CLI::App* sub_manifest = app.add_subcommand(
        "run-manifest", "execute a scenario manifest");
    std::string manifest_path;
    sub_manifest->add_option("manifest", manifest_path, "manifest JSON file")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (sub_manifest->parsed()) {
            std::size_t limit = 14;
            if (ov.max_qubits) limit = *ov.max_qubits;
            if (const char* env = std::getenv("QDOT_MAX_QUBITS")) {
                char* end = nullptr;
                const unsigned long cap = std::strtoul(env, &end, 10);
                if (end == env || *end != '\0' || cap == 0) {
                    std::cerr << "QDOT_MAX_QUBITS: expected a positive "
                                 "integer\n";
                    return 2;
                }
                limit = std::min<std::size_t>(limit, cap);
            }
            qd::max_qubits_limit() = limit;
            return emit(qd::run_manifest(manifest_path), "", false);
        }

        qd::SimConfig cfg = ov.config_path.empty()
                                ? qd::default_config()
                                : qd::load_config(ov.config_path);
        if (ov.seed) cfg.seed = *ov.seed;
        if (ov.margin) {
            cfg.margin = *ov.margin;
            cfg.crit.margin = *ov.margin;
        }
        if (!ov.mode.empty()) cfg.gate_mode = ov.mode;
        if (!ov.out_dir.empty()) cfg.out_dir = ov.out_dir;
        std::string err;
        if (!ov.sweep_grid.empty() &&
            !parse_sweep_grid(ov.sweep_grid, cfg, err)) {
            std::cerr << err << "\n";
            return 2;
        }
        if (!apply_qubit_limit(ov, cfg, err)) {
            std::cerr << err << "\n";
            return 2;
        }
        for (const std::string& n : cfg.notices)
            std::cerr << "notice: " << n << "\n";
        if (ov.verbosity > 0)
            std::cerr << qd::effective_json(cfg).dump(2) << "\n";

        std::vector<qd::RunReport> reports;
        if (sub_derive->parsed())
            reports.push_back(ov.config_path.empty()
                                  ? qd::run_builtin_estimates(cfg.margin)
                                  : qd::run_derive(cfg));
        else if (sub_oracle->parsed())
            reports.push_back(
                qd::run_oracle_check(cfg.oracle_samples, cfg.seed));
        else if (sub_gates->parsed())
            reports.push_back(qd::run_gate_study(cfg));
        else if (sub_rwa->parsed())
            reports.push_back(qd::run_rwa_study(cfg));
        else if (sub_readout->parsed())
            reports.push_back(qd::run_readout(cfg));
        else if (sub_figures->parsed())
            reports.push_back(qd::run_figures(cfg, qd::FigSelect::both));
        else if (sub_criterion->parsed())
            reports.push_back(qd::run_criterion(cfg));
        return emit(reports, cfg.out_dir, true);
    } catch (const qd::config_error& e) {
        for (const std::string& m : e.errors)
            std::cerr << "config error: " << m << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
