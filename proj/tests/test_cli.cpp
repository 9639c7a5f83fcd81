// End-to-end checks of the qdot_sim binary: exit-code contract, diagnostics,
// and byte-stable outputs. argv[1] = binary, argv[2] = configs directory.
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int failures = 0;

void check(bool ok, const std::string& name) {
    std::printf("%s - %s\n", ok ? "ok" : "FAIL", name.c_str());
    if (!ok) ++failures;
}

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

RunResult run(const std::string& cmd, const fs::path& tmp) {
    const fs::path out = tmp / "stdout.txt";
    const fs::path err = tmp / "stderr.txt";
    const std::string full =
        cmd + " > '" + out.string() + "' 2> '" + err.string() + "'";
    const int rc = std::system(full.c_str());
    RunResult r;
    if (rc != -1 && WIFEXITED(rc)) r.code = WEXITSTATUS(rc);
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::fprintf(stderr, "usage: %s <qdot_sim> <configs-dir>\n", argv[0]);
        return 2;
    }
    const std::string bin = std::string("'") + argv[1] + "'";
    const fs::path configs = argv[2];
    const fs::path tmp = fs::temp_directory_path() / "qdsim_cli_checks";
    fs::remove_all(tmp);
    fs::create_directories(tmp);

    {
        const RunResult r = run(bin + " --help", tmp);
        check(r.code == 0, "help exits 0");
        bool all = true;
        for (const char* sub :
             {"derive", "oracle", "gates", "rwa", "readout", "figures",
              "criterion", "run-manifest"})
            all = all && r.out.find(sub) != std::string::npos;
        check(all, "help lists every subcommand");
    }

    {
        const RunResult r = run(bin + " derive --config '" +
                                    (configs / "geom1.json").string() +
                                    "' --out '" + (tmp / "d1").string() + "'",
                                tmp);
        check(r.code == 0, "derive on the default device exits 0");
        check(fs::exists(tmp / "d1" / "report.json"),
              "derive writes report.json");
        check(r.out.find("E_C") != std::string::npos,
              "derive report lands on stdout");
    }

    {
        const RunResult r =
            run(bin + " derive --config '" + (tmp / "missing.json").string() +
                    "'",
                tmp);
        check(r.code == 2, "missing config exits 2");
        check(r.err.find("missing.json") != std::string::npos,
              "missing config is named on stderr");
    }

    {
        const fs::path bad = tmp / "bad.json";
        std::ofstream(bad) << "{\"geometry\": {\"d_B\": -1.5}, "
                              "\"gates\": {\"mode\": \"fancy\"}}";
        const RunResult r =
            run(bin + " derive --config '" + bad.string() + "'", tmp);
        check(r.code == 2, "invalid config exits 2");
        check(r.err.find("geometry.d_B") != std::string::npos &&
                  r.err.find("gates.mode") != std::string::npos,
              "all violations reported with field paths");
    }

    {
        const RunResult r = run(bin + " derive --bogus-flag", tmp);
        check(r.code == 2, "unknown flag exits 2");
        const RunResult r2 = run(bin, tmp);
        check(r2.code == 2, "missing subcommand exits 2");
        const RunResult r3 =
            run(bin + " figures --sweep-grid nonsense", tmp);
        check(r3.code == 2, "malformed sweep grid exits 2");
    }

    {
        const RunResult r = run(bin + " criterion --out '" +
                                    (tmp / "crit").string() + "'",
                                tmp);
        check(r.code == 1, "failing verdict exits 1");
        check(r.out.find("FAIL") != std::string::npos,
              "failed link is visible in the report");
    }

    {
        const std::string common = " figures --sweep-grid 0.5:0.5:1.5 --out '";
        const RunResult a =
            run(bin + common + (tmp / "figA").string() + "'", tmp);
        const RunResult b =
            run(bin + common + (tmp / "figB").string() + "'", tmp);
        check(a.code == 0 && b.code == 0, "figures exits 0");
        bool same = true;
        for (const char* f : {"fig2a.csv", "fig2b.csv", "report.json"})
            same = same && slurp(tmp / "figA" / f) == slurp(tmp / "figB" / f)
                   && !slurp(tmp / "figA" / f).empty();
        check(same, "figure outputs are byte-identical across runs");
        check(slurp(tmp / "figA" / "fig2a.csv").rfind("v_d,", 0) == 0,
              "fig2a.csv carries the header row");
    }

    {
        const fs::path mani = tmp / "mani.json";
        std::ofstream(mani)
            << "{\n"
               "  \"out_dir\": \"" << (tmp / "mani_out").string() << "\",\n"
               "  \"scenarios\": [\n"
               "    {\"name\": \"fa\", \"kind\": \"fig2a\",\n"
               "     \"config\": {\"readout\": {\"vd_start\": 0.5,\n"
               "       \"vd_step\": 0.5, \"vd_stop\": 1.5}}},\n"
               "    {\"name\": \"crit\", \"kind\": \"criterion\",\n"
               "     \"config\": {\"criterion\": {\"T\": 5e-5,\n"
               "       \"J\": 0.001, \"delta0\": 0.01, \"t\": 0.1,\n"
               "       \"R_int\": 1e6, \"C_int\": 0.044}}}\n"
               "  ]\n"
               "}\n";
        const RunResult r =
            run(bin + " run-manifest '" + mani.string() + "'", tmp);
        check(r.code == 0, "manifest run exits 0");
        check(fs::exists(tmp / "mani_out" / "report.json") &&
                  fs::exists(tmp / "mani_out" / "report.txt") &&
                  fs::exists(tmp / "mani_out" / "fa" / "fig2a.csv"),
              "manifest writes consolidated and per-scenario outputs");

        std::ofstream(tmp / "mani_bad.json")
            << "{\"scenarios\": [{\"name\": \"x\", \"kind\": \"nope\"}]}";
        const RunResult rb = run(
            bin + " run-manifest '" + (tmp / "mani_bad.json").string() + "'",
            tmp);
        check(rb.code == 2, "unknown scenario kind exits 2");
    }

    {
        const RunResult a = run(bin + " derive --out '" +
                                    (tmp / "pe1").string() + "'",
                                tmp);
        const RunResult b = run(bin + " derive --out '" +
                                    (tmp / "pe2").string() + "'",
                                tmp);
        check(a.code == 0, "built-in estimate reproduction exits 0");
        check(!slurp(tmp / "pe1" / "report.json").empty() &&
                  slurp(tmp / "pe1" / "report.json") ==
                      slurp(tmp / "pe2" / "report.json"),
              "estimate report is byte-identical across runs");
    }

    if (failures) std::printf("%d check(s) failed\n", failures);
    return failures ? 1 : 0;
}
