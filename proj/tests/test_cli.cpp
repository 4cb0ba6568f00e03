#include <doctest.h>

#include "cdii/grid.hpp"
#include "cdii/io.hpp"
#include "cdii/report.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

using namespace cdii;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code = -1;
    std::string output;
};

fs::path case_dir(const std::string& name) {
    fs::path d = fs::temp_directory_path() / "cdii_cli_tests" / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

RunResult run_cli(const std::string& args) {
    const char* bin = std::getenv("CDII_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "CDII_BIN must point at the cli binary");
    static int serial = 0;
    fs::path log = fs::temp_directory_path() / ("cdii_cli_log_" + std::to_string(serial++));
    std::string cmd = std::string(bin) + " " + args + " > " + log.string() + " 2>&1";
    int rc = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.output = slurp(log);
    fs::remove(log);
    return r;
}

} // namespace

TEST_CASE("forward run writes the artifact set and the exact linear ramp") {
    fs::path d = case_dir("forward_ok");
    RunResult r = run_cli("forward --sigma 1 --f linear --n 17 --out " + d.string());
    CHECK(r.code == 0);
    for (const char* f :
         {"u.txt", "jx.txt", "jy.txt", "a.txt", "sigma.txt", "f.csv", "meta.json",
          "manifest.json"})
        CHECK_MESSAGE(fs::exists(d / f), f);

    ScalarField u = read_grid_text((d / "u.txt").string());
    const Grid2D& g = u.grid;
    REQUIRE(g.nx == 17);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            CHECK(u.at(i, j) == doctest::Approx(g.x(i)).epsilon(1e-8));

    json meta = read_json((d / "meta.json").string());
    CHECK(meta["residual_norm"].get<double>() <= 1e-10);
    CHECK(meta["admissibility"]["grad_positive"].get<bool>());

    json man = read_json((d / "manifest.json").string());
    CHECK(man["subcommand"] == "forward");
    CHECK(man["config"]["n"].get<int>() == 17);
    CHECK(man.contains("timestamp"));
}

TEST_CASE("nonpositive conductivity exits with the invalid-input code naming the bound") {
    fs::path d = case_dir("forward_sigma0");
    RunResult r = run_cli("forward --sigma 0 --n 9 --out " + d.string());
    CHECK(r.code == 2);
    CHECK(r.output.find("sigma0") != std::string::npos);
}

TEST_CASE("malformed field files exit with the invalid-input code naming the line") {
    fs::path d = case_dir("bad_grid");
    fs::path bad = d / "bad.txt";
    std::ofstream(bad) << "4 3 0.5 0.5 0 0\n1 2 3 4\n5 oops 7 8\n9 10 11 12\n";
    RunResult r = run_cli("reconstruct --a " + bad.string() + " --out " + d.string());
    CHECK(r.code == 2);
    CHECK(r.output.find(":3:") != std::string::npos);
}

TEST_CASE("a weight file without its boundary trace is rejected") {
    fs::path d = case_dir("lgp_missing_trace");
    Grid2D g = Grid2D::unit_square(9);
    write_grid_text((d / "a.txt").string(), ScalarField(g, 1.0));
    RunResult r = run_cli("lgp --a " + (d / "a.txt").string() + " --out " + d.string());
    CHECK(r.code == 2);
    CHECK(r.output.find("--f-file") != std::string::npos);
}

TEST_CASE("self-generated reconstruction recovers the uniform conductor") {
    fs::path d = case_dir("reconstruct_uniform");
    RunResult r = run_cli("reconstruct --sigma 1 --f linear --n 17 --out " + d.string());
    CHECK(r.code == 0);
    json rep = read_json((d / "report.json").string());
    CHECK(rep["lgp"]["converged"].get<bool>());
    CHECK(rep["errors"]["sigma_rel_l1"].get<double>() <= 1e-3);
    ScalarField sh = read_grid_text((d / "sigma_hat.txt").string());
    for (double v : sh.v) CHECK(v == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("an exhausted iteration budget exits with the checks-failed code, artifacts intact") {
    fs::path d = case_dir("lgp_unconverged");
    RunResult r =
        run_cli("lgp --a-expr 1+x --f tilted:0.8 --n 17 --max-iter 5 --out " + d.string());
    CHECK(r.code == 3);
    REQUIRE(fs::exists(d / "certificate.json"));
    json cert = read_json((d / "certificate.json").string());
    CHECK(!cert["converged"].get<bool>());
    CHECK(fs::exists(d / "u.txt"));
}

TEST_CASE("constant fields are rejected by the level-set command") {
    fs::path d = case_dir("levelsets_constant");
    RunResult r = run_cli("levelsets --u-expr 1 --n 17 --out " + d.string());
    CHECK(r.code == 2);
}

TEST_CASE("level-set statistics of the linear ramp land on the unit length") {
    fs::path d = case_dir("levelsets_ramp");
    RunResult r = run_cli("levelsets --u-expr x --n 33 --levels 8 --out " + d.string());
    CHECK(r.code == 0);
    json st = read_json((d / "stats.json").string());
    CHECK(st["n_components"].get<int>() == 8);
    CHECK(st["L_M_hat"].get<double>() == doctest::Approx(1.0).epsilon(0.02));
    std::string csv = slurp(d / "contours.csv");
    CHECK(csv.rfind("level,component,closed,vertex,x,y", 0) == 0);
}

TEST_CASE("explicit flags win over config file entries") {
    fs::path d = case_dir("config_precedence");
    fs::path cfg = d / "cfg.json";
    std::ofstream(cfg) << "{\"n\": 17, \"sigma\": \"2\"}\n";
    RunResult r = run_cli("forward --config " + cfg.string() + " --sigma 1 --out " +
                          (d / "run").string());
    CHECK(r.code == 0);
    json man = read_json((d / "run" / "manifest.json").string());
    CHECK(man["config"]["sigma"] == "1"); // flag beats the file
    CHECK(man["config"]["n"].get<int>() == 17); // file beats the default
}

TEST_CASE("sweeps are deterministic across reruns") {
    fs::path d1 = case_dir("sweep_rerun_a");
    fs::path d2 = case_dir("sweep_rerun_b");
    std::string args = "sweep --sigma 1 --eta 1 --f linear --n 17 "
                       "--epsilons 0.5 0.25 0.125 0.0625 --out ";
    RunResult r1 = run_cli(args + d1.string());
    RunResult r2 = run_cli(args + d2.string());
    CHECK(r1.code == 0);
    CHECK(r2.code == 0);
    CHECK(slurp(d1 / "report.json") == slurp(d2 / "report.json"));
    CHECK(slurp(d1 / "runs.csv") == slurp(d2 / "runs.csv"));
    CHECK(!slurp(d1 / "report.json").empty());
}

TEST_CASE("usage errors and help use the contract exit codes") {
    CHECK(run_cli("forward --no-such-flag").code == 2);
    CHECK(run_cli("").code == 2); // a subcommand is required
    CHECK(run_cli("--help").code == 0);
    RunResult r = run_cli("forward --help");
    CHECK(r.code == 0);
    CHECK(r.output.find("--sigma") != std::string::npos);
}
