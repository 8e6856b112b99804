#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "doctest.h"

#include <nlohmann/json.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int status = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CliResult run_cli(const std::string& args, const std::string& env = "") {
    fs::path dir = fs::temp_directory_path() / "chainpay_cli_tests";
    fs::create_directories(dir);
    fs::path out = dir / "stdout.txt";
    fs::path err = dir / "stderr.txt";
    std::string cmd = env + (env.empty() ? "" : " ") + std::string(CHAINPAY_BIN) + " " + args +
                      " > " + out.string() + " 2> " + err.string();
    int rc = std::system(cmd.c_str());
    CliResult result;
    result.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    result.out = slurp(out);
    result.err = slurp(err);
    return result;
}

fs::path scratch_file(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / "chainpay_cli_tests";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("pay prints exact chain payments") {
    CliResult r = run_cli("pay --mech gdgeom:1/2,1/2 --rmax 1 --t 3");
    CHECK(r.status == 0);
    CHECK(r.out == "1/8 1/4 1/2\n");

    CliResult wta = run_cli("pay --mech wta:1 --t 3");
    CHECK(wta.out == "0 0 1\n");

    CliResult dgeom = run_cli("pay --mech dgeom:1/2 --t 3");
    CHECK(dgeom.out == "1/7 2/7 4/7\n");
}

TEST_CASE("prove emits the elimination report and exit 0 when verified") {
    fs::path out = scratch_file("prove.json");
    CliResult r = run_cli("prove --theorem impossibility --horizon 3 --out " + out.string());
    CHECK(r.status == 0);
    json report = json::parse(r.out);
    CHECK(report["forced_zero"] == json::array({{2, 3}}));
    CHECK(json::parse(slurp(out)) == report);

    CliResult wta = run_cli("prove --theorem wta --horizon 5");
    CHECK(wta.status == 0);
    CHECK(json::parse(wta.out)["verified"] == true);
}

TEST_CASE("check exits 1 on a failing property and reports the witness") {
    CliResult r = run_cli("check --mech topdown --prop cp --tmax 10 --pmax 10");
    CHECK(r.status == 1);
    json report = json::parse(r.out);
    CHECK(report["verdict"] == "fail");
    CHECK(report["witness"]["k"] == 1);
    CHECK(report["witness"]["t"] == 2);
    CHECK(report["witness"]["p"] == 1);

    CliResult pass = run_cli("check --mech wta:1 --prop dsp --tmax 10 --nmax 10");
    CHECK(pass.status == 0);
    CHECK(json::parse(pass.out)["verdict"] == "certified");

    CliResult eps = run_cli("check --mech gdgeom:1/2,3/5 --prop eps_dsp --eps 1");
    CHECK(eps.status == 1);
    CHECK(json::parse(eps.out)["witness"]["n"] == 3);
}

TEST_CASE("attack exits 1 exactly when a profitable move exists") {
    CliResult gd = run_cli("attack --mech gdgeom:1/2,1/2 --kind sybil --k 1 --t 1 --nmax 20");
    CHECK(gd.status == 1);
    json report = json::parse(gd.out);
    CHECK(report["kind"] == "sybil");
    CHECK(report["n"] == 20);

    CliResult wta = run_cli("attack --mech wta:1 --kind collapse --t 5");
    CHECK(wta.status == 0);
    CHECK(json::parse(wta.out)["gain"] == "0");
}

TEST_CASE("region writes the CSV grid") {
    fs::path out = scratch_file("region.csv");
    CliResult r = run_cli("region --step-delta 1/2 --step-eps 1/2 --step-gamma 1/2 --out " +
                          out.string());
    CHECK(r.status == 0);
    std::string csv = slurp(out);
    CHECK(csv == r.out);
    CHECK(csv.substr(0, csv.find('\n')) ==
          "delta,epsilon,gamma,inside,witness_property,witness_t,witness_n");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);  // header + 8 cells
}

TEST_CASE("region output does not depend on the thread count, flag or env") {
    std::string args = "region --step-delta 1/4 --step-eps 1/2 --step-gamma 1/4";
    CliResult one = run_cli(args + " --threads 1");
    CliResult four = run_cli(args + " --threads 4");
    CliResult env = run_cli(args, "CHAINPAY_THREADS=3");
    CHECK(one.out == four.out);
    CHECK(one.out == env.out);
}

TEST_CASE("simulate is byte-identical for identical arguments") {
    std::string args = "simulate --mech dgeom:1/2 --runs 200 --seed 9 --q 0.1 --pmf 0:0.5,2:0.5";
    CliResult a = run_cli(args);
    CliResult b = run_cli(args);
    CHECK(a.status == 0);
    CHECK(a.out == b.out);
    json stats = json::parse(a.out);
    CHECK(stats["runs"] == 200);
    CHECK(stats["mechanism"] == "dgeom:1/2 rmax=1");

    CliResult threaded = run_cli(args + " --threads 4");
    CHECK(threaded.out == a.out);
}

TEST_CASE("simulate writes per-run CSV on request") {
    fs::path per_run = scratch_file("runs.csv");
    CliResult r = run_cli("simulate --mech wta:1 --runs 20 --seed 1 --per-run " +
                          per_run.string());
    CHECK(r.status == 0);
    std::string csv = slurp(per_run);
    CHECK(csv.substr(0, csv.find('\n')) ==
          "run,completed,rounds,t,total_payout,leaf_reward,tree_size");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 21);
}

TEST_CASE("simulate reads defaults from a config file, flags win") {
    fs::path cfg = scratch_file("sim.cfg");
    std::ofstream(cfg) << "# growth settings\nq = 0.2\nseed = 77\nruns = 50\n";
    CliResult from_file = run_cli("simulate --mech dgeom:1/2 --config " + cfg.string());
    CliResult from_flags = run_cli("simulate --mech dgeom:1/2 --q 0.2 --seed 77 --runs 50");
    CHECK(from_file.status == 0);
    CHECK(from_file.out == from_flags.out);

    CliResult overridden =
        run_cli("simulate --mech dgeom:1/2 --config " + cfg.string() + " --q 0.4");
    CHECK(json::parse(overridden.out)["config_digest"] !=
          json::parse(from_file.out)["config_digest"]);
}

TEST_CASE("pay accepts a tabular mechanism file") {
    fs::path table = scratch_file("table.csv");
    std::ofstream(table) << "t,k,reward\n1,1,1/4\n2,1,1/8\n2,2,1/16\n";
    CliResult r = run_cli("pay --mech table:" + table.string() + " --t 2");
    CHECK(r.status == 0);
    CHECK(r.out == "1/8 1/16\n");

    CliResult beyond = run_cli("pay --mech table:" + table.string() + " --t 3");
    CHECK(beyond.status == 2);
}

TEST_CASE("usage and input errors exit with status 2") {
    CHECK(run_cli("frobnicate").status == 2);
    CHECK(run_cli("check --mech topdown").status == 2);           // missing --prop
    CHECK(run_cli("pay --mech banana --t 3").status == 2);        // bad mechanism spec
    CHECK(run_cli("pay --mech gdgeom:1/2,1 --t 3").status == 2);  // delta out of range
    CHECK(run_cli("check --mech topdown --prop eps_dsp").status == 2);  // missing --eps
    CHECK(run_cli("pay --mech dgeom:1/2 --t 0").status == 2);
}
