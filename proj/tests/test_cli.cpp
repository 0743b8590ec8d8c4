#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

fs::path scratch_root() {
    static const fs::path root = [] {
        auto p = fs::temp_directory_path() /
                 ("pslab_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(p);
        return p;
    }();
    return root;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    const auto out_file = scratch_root() / ("stdout_" + std::to_string(counter));
    const auto err_file = scratch_root() / ("stderr_" + std::to_string(counter));
    ++counter;
    const std::string cmd = std::string(PSLAB_CLI_BIN) + " " + args + " > " +
                            out_file.string() + " 2> " + err_file.string();
    const int raw = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out_file);
    r.err = slurp(err_file);
    return r;
}

// flags shared by the fast `run` invocations below
const std::string kSmallRun =
    "run --scenario A --n 1500 --reps 6 --fraction 0.7 --oracle-reps 3 --seed 11";

}  // namespace

TEST_CASE("--version exits cleanly") {
    const auto r = run_cli("--version");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("0.1.0") != std::string::npos);
}

TEST_CASE("a subcommand is required") {
    const auto r = run_cli("");
    CHECK(r.exit_code == 1);
}

TEST_CASE("--help exits zero") {
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("run --help").exit_code == 0);
}

TEST_CASE("invalid scenario labels are a usage error") {
    const auto r = run_cli("run --scenario H --n 500 --reps 2");
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("A, B, C, D, E, F, G") != std::string::npos);
}

TEST_CASE("unknown method keys are a usage error") {
    const auto r = run_cli(kSmallRun + " --methods PSM,teleport");
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("teleport") != std::string::npos);
}

TEST_CASE("a run writes its full artifact set") {
    const auto dir = scratch_root() / "artifacts";
    const auto r = run_cli(kSmallRun + " --out " + dir.string());
    REQUIRE(r.exit_code == 0);
    for (const char* name :
         {"summary.json", "summary.csv", "summary.md", "figure1_data.csv", "manifest.json"}) {
        CHECK(fs::exists(dir / name));
        CHECK(fs::file_size(dir / name) > 0);
    }
    const auto manifest = slurp(dir / "manifest.json");
    CHECK(manifest.find("\"master_seed\": 11") != std::string::npos);
    const auto json = slurp(dir / "summary.json");
    CHECK(json.find("\"artifact_version\"") != std::string::npos);
    CHECK(json.find("\"oracle\"") != std::string::npos);
    // default stdout format is the markdown table
    CHECK(r.out.find("PSM") != std::string::npos);
}

TEST_CASE("identical configurations produce byte-identical artifacts") {
    const auto d1 = scratch_root() / "rep1";
    const auto d2 = scratch_root() / "rep2";
    const auto d3 = scratch_root() / "rep3";
    REQUIRE(run_cli(kSmallRun + " --out " + d1.string()).exit_code == 0);
    REQUIRE(run_cli(kSmallRun + " --out " + d2.string()).exit_code == 0);
    REQUIRE(run_cli(kSmallRun + " --threads 4 --out " + d3.string()).exit_code == 0);
    for (const char* name : {"summary.json", "summary.csv", "summary.md", "figure1_data.csv"}) {
        const auto base = slurp(d1 / name);
        CHECK(base == slurp(d2 / name));
        CHECK(base == slurp(d3 / name));  // worker count must not leak into results
    }
}

TEST_CASE("generate and estimate round-trip through a cohort file") {
    const auto dir = scratch_root() / "cohorts";
    const auto g = run_cli("generate --scenario B --n 1200 --seed 3 --out " + dir.string());
    REQUIRE(g.exit_code == 0);
    const auto cohort = dir / "cohort_B.csv";
    REQUIRE(fs::exists(cohort));
    const auto first_line = slurp(cohort).substr(0, 42);
    CHECK(first_line == "w1,w2,w3,w4,w5,w6,w7,w8,w9,w10,a,y,true_ps");

    // regeneration is byte-identical
    const auto dir2 = scratch_root() / "cohorts2";
    REQUIRE(run_cli("generate --scenario B --n 1200 --seed 3 --out " + dir2.string()).exit_code == 0);
    CHECK(slurp(cohort) == slurp(dir2 / "cohort_B.csv"));

    const auto e = run_cli("estimate --cohort " + cohort.string() + " --format csv");
    REQUIRE(e.exit_code == 0);
    CHECK(e.out.find("method,ok,gamma1_hat,") != std::string::npos);
    CHECK(e.out.find("PSM") != std::string::npos);

    const auto missing = run_cli("estimate --cohort /nonexistent.csv");
    CHECK(missing.exit_code == 1);
}

TEST_CASE("the oracle subcommand reports per-scenario truth") {
    const auto r = run_cli("oracle --scenario A --n 800 --reps 4 --seed 2");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("\"A\"") != std::string::npos);
    CHECK(r.out.find("\"marginal_ate\"") != std::string::npos);
    CHECK(r.out.find("\"mc_reps\": 4") != std::string::npos);
}

TEST_CASE("the environment seed is a fallback for --seed") {
    const auto dir = scratch_root() / "envseed";
    ::setenv("PSLAB_SEED", "4242", 1);
    const auto r = run_cli("run --scenario A --n 600 --reps 2 --oracle-reps 2 --out " + dir.string());
    ::unsetenv("PSLAB_SEED");
    REQUIRE(r.exit_code == 0);
    CHECK(slurp(dir / "manifest.json").find("\"master_seed\": 4242") != std::string::npos);

    // an explicit flag wins over the environment
    ::setenv("PSLAB_SEED", "4242", 1);
    const auto dir2 = scratch_root() / "envseed2";
    const auto r2 = run_cli("run --scenario A --n 600 --reps 2 --oracle-reps 2 --seed 7 --out " +
                            dir2.string());
    ::unsetenv("PSLAB_SEED");
    REQUIRE(r2.exit_code == 0);
    CHECK(slurp(dir2 / "manifest.json").find("\"master_seed\": 7") != std::string::npos);
}

TEST_CASE("the true-model shorthand needs a single scenario") {
    const auto r = run_cli("run --all-scenarios --n 500 --reps 2 --oracle-reps 2 --ps-model true");
    CHECK(r.exit_code == 1);

    const auto dir = scratch_root() / "truemodel";
    const auto ok = run_cli("run --scenario A --n 1500 --reps 2 --oracle-reps 2 --ps-model true --out " +
                            dir.string());
    CHECK(ok.exit_code == 0);
}

TEST_CASE("method filtering and strata-method selection") {
    const auto r = run_cli(kSmallRun + " --methods IPW-stab --format csv");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("IPW-stab") != std::string::npos);
    CHECK(r.out.find("PSM") == std::string::npos);

    const auto q = run_cli(kSmallRun + " --strata-method psvalue --format csv");
    REQUIRE(q.exit_code == 0);
    CHECK(q.out.find("PSS-psvalue") != std::string::npos);
    CHECK(q.out.find("PSS-quantile") == std::string::npos);
}

TEST_CASE("a custom coefficient file replaces the defaults") {
    const auto cfg_path = scratch_root() / "coeffs.cfg";
    {
        std::ofstream out(cfg_path);
        for (int i = 0; i < 8; ++i) out << "beta" << i << " = " << (i == 1 ? "0.5" : "0") << "\n";
        for (int i = 0; i < 8; ++i) out << "alpha" << i << " = " << (i == 0 ? "-2" : "0") << "\n";
        out << "gamma1 = 0\n";
    }
    const auto dir = scratch_root() / "customcfg";
    const auto r = run_cli("run --scenario A --n 1000 --reps 2 --oracle-reps 2 --seed 1 --coeffs " +
                           cfg_path.string() + " --out " + dir.string());
    REQUIRE(r.exit_code == 0);
    const auto manifest = slurp(dir / "manifest.json");
    CHECK(manifest.find("\"gamma1\": 0.0") != std::string::npos);

    const auto bad = run_cli("run --scenario A --n 500 --reps 2 --coeffs /nonexistent.cfg");
    CHECK(bad.exit_code == 1);
}
