#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::current_path() / "cli-scratch";

int run(const std::string& args) {
    const std::string cmd = std::string(HYBRIDGRID_CLI_PATH) + " " + args + " >" +
                            (kRoot / "stdout.txt").string() + " 2>" + (kRoot / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

struct Scratch {
    Scratch() {
        fs::remove_all(kRoot);
        fs::create_directories(kRoot);
    }
};

std::string at(const char* name) { return (kRoot / name).string(); }

}  // namespace

TEST_CASE("pinit writes a curve and reuses the cache") {
    Scratch s;
    CHECK(run("pinit --base 2 --dwall 0 --max-L 64 --cache-dir " + at("cache")) == 0);
    const std::string out = slurp(kRoot / "stdout.txt");
    CHECK(out.find("2,0.125,0,exact_dp") != std::string::npos);
    CHECK(slurp(kRoot / "stderr.txt").find("built") != std::string::npos);
    CHECK(run("pinit --base 2 --dwall 0 --max-L 64 --cache-dir " + at("cache")) == 0);
    CHECK(slurp(kRoot / "stderr.txt").find("cache hit") != std::string::npos);
    CHECK(slurp(kRoot / "stdout.txt") == out);
}

TEST_CASE("sweep outputs are reproducible") {
    Scratch s;
    const std::string args = "sweep --base 4,5 --dwall 0,2 -n 200 --seed 3 --cache-dir " + at("cache");
    REQUIRE(run(args + " --out " + at("a")) == 0);
    REQUIRE(run(args + " --threads 2 --out " + at("b")) == 0);
    for (const char* f : {"table.csv", "summary.json", "ratios.csv", "histograms/hist_hybrid_b5_d2.csv"}) {
        INFO(f);
        CHECK(slurp(kRoot / "a" / f) == slurp(kRoot / "b" / f));
        CHECK_FALSE(slurp(kRoot / "a" / f).empty());
    }
    const std::string manifest = slurp(kRoot / "a" / "manifest.json");
    CHECK(manifest.find("\"rerun\"") != std::string::npos);
    CHECK(manifest.find("\"seed_base\": 3") != std::string::npos);

    // Rerun from the recorded configuration.
    REQUIRE(run("sweep --config " + at("a/config.yaml") + " --cache-dir " + at("cache") + " --out " + at("c")) == 0);
    CHECK(slurp(kRoot / "a" / "table.csv") == slurp(kRoot / "c" / "table.csv"));

    // Flags override the file.
    REQUIRE(run("sweep --config " + at("a/config.yaml") + " -n 50 --cache-dir " + at("cache") + " --out " + at("d")) == 0);
    CHECK(slurp(kRoot / "d" / "config.yaml").find("n_runs: 50") != std::string::npos);
    CHECK(slurp(kRoot / "d" / "config.yaml").find("seed_base: 3") != std::string::npos);

    CHECK(run("table --summary " + at("a/summary.json")) == 0);
    CHECK(slurp(kRoot / "stdout.txt") == slurp(kRoot / "a" / "table.csv"));
    CHECK(run("hist --summary " + at("a/summary.json") + " -s unrestricted -b 4 -d 0") == 0);
    CHECK(run("hist --summary " + at("a/summary.json") + " -s unrestricted -b 9 -d 0") == 2);
}

TEST_CASE("exit codes") {
    Scratch s;
    std::ofstream(kRoot / "bad.yaml") << "n_runs: 10\nbase_sizes: [5, x]\n";
    CHECK(run("sweep --config " + at("bad.yaml") + " --out " + at("o")) == 2);
    CHECK(slurp(kRoot / "stderr.txt").find("bad.yaml:2: base_sizes") != std::string::npos);
    CHECK(run("sweep --strategies nope --out " + at("o")) == 2);
    CHECK(run("sweep --bogus-flag --out " + at("o")) == 2);
    CHECK(run("sweep --base 6 --dwall 1 -n 5 --no-build --cache-dir " + at("empty") + " --out " + at("o")) == 4);
    CHECK(slurp(kRoot / "stderr.txt").find("b=6 d_wall=1") != std::string::npos);
    CHECK(run("fixed-sweep --base 7 --dwall 16 --lengths 4,8 -n 3 --out " + at("f")) == 3);
    CHECK(fs::exists(kRoot / "f" / "manifest.json"));
    CHECK(run("run --strategy unrestricted --base 9 --dwall 8 --step-cap 5") == 3);
    CHECK(run("run --strategy prob-classical --base 5 --dwall 0 --seed 4") == 0);
    CHECK(slurp(kRoot / "stdout.txt").find("\"invariants\": \"ok\"") != std::string::npos);
}

TEST_CASE("validate") {
    Scratch s;
    fs::create_directories(kRoot / "cache");
    CHECK(run("validate --cache-dir " + at("cache")) == 0);
    std::ofstream(kRoot / "cache" / "curve_b3_d0_mc_bs16_0.json") << "{]";
    CHECK(run("validate --cache-dir " + at("cache")) == 4);
    CHECK(slurp(kRoot / "stdout.txt").find("FAIL cache: curve_b3_d0_mc_bs16_0.json") != std::string::npos);
}
