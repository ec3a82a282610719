#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "hypercol/experiment.hpp"

using namespace hypercol;
namespace fs = std::filesystem;
using nlohmann::json;

static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

static fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("hypercol_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

TEST_CASE("validate flags bad configs") {
    CHECK(!experiment::validate(json{{"kind", "nonsense"}}).empty());
    CHECK(!experiment::validate(json{{"kind", "bounds"}, {"R", -1.0}}).empty());
    CHECK(!experiment::validate(json{{"kind", "bounds"}, {"R", 1.0}, {"typo_key", 3}}).empty());
    const json bad_annulus{{"kind", "phase-scan"}, {"R", 1.0},
                           {"lambda_grid", {0.1}},  {"rho1", 5.0},
                           {"rho2", 4.0},           {"trials", 10}};
    CHECK(!experiment::validate(bad_annulus).empty());
    const json ok{{"kind", "bounds"}, {"n", 2}, {"R", 1.0}};
    CHECK(experiment::validate(ok).empty());
    const json ok_scan{{"kind", "phase-scan"}, {"R", 1.0}, {"lambda_grid", {0.1, 0.2}},
                       {"rho1", 2.5},          {"rho2", 5.0}, {"trials", 5}};
    CHECK(experiment::validate(ok_scan).empty());
}

TEST_CASE("run rejects invalid configs") {
    CHECK_THROWS_AS(experiment::run(json{{"kind", "bounds"}, {"R", -1.0}}),
                    std::invalid_argument);
}

TEST_CASE("bounds run writes the advertised files") {
    const auto dir = fresh_dir("bounds");
    const json cfg{{"kind", "bounds"}, {"n", 2}, {"R", 1.0}, {"eps", {0.1}}};
    const auto report = experiment::run(cfg, dir.string());
    CHECK(fs::exists(dir / "results.csv"));
    CHECK(fs::exists(dir / "report.json"));
    const auto csv = slurp(dir / "results.csv");
    CHECK(csv.rfind("key,value\n", 0) == 0);
    CHECK(csv.find("lambda_lower,") != std::string::npos);
    CHECK(csv.find("lambda_upper,") != std::string::npos);
    const auto rj = json::parse(slurp(dir / "report.json"));
    for (const char* key : {"config", "results", "timings", "version", "seed"})
        CHECK(rj.contains(key));
    CHECK(report.version == experiment::kVersion);
}

TEST_CASE("reruns are byte-identical and job-count invariant") {
    const json cfg{{"kind", "phase-scan"}, {"R", 1.0},   {"lambda_grid", {0.05, 0.2, 0.4}},
                   {"rho1", 2.5},          {"rho2", 5.0}, {"trials", 20},
                   {"seed", 7}};
    const auto d1 = fresh_dir("scan1");
    const auto d2 = fresh_dir("scan2");
    const auto d3 = fresh_dir("scan3");
    experiment::run(cfg, d1.string(), 1);
    experiment::run(cfg, d2.string(), 1);
    experiment::run(cfg, d3.string(), 3);
    const auto csv1 = slurp(d1 / "results.csv");
    CHECK(csv1 == slurp(d2 / "results.csv"));
    CHECK(csv1 == slurp(d3 / "results.csv"));
    CHECK(csv1.rfind("lambda,crossing_freq,crossing_se,mean_crossing_clusters,"
                     "vacant_freq,vacant_se\n", 0) == 0);
}

TEST_CASE("decay run emits one row per distance") {
    const auto dir = fresh_dir("decay");
    const json cfg{{"kind", "decay"}, {"n", 2},      {"R", 1.0},
                   {"lambda", 0.1},   {"rho", 6.0},  {"distances", {0.0, 1.0, 2.0}},
                   {"trials", 50},    {"seed", 3}};
    experiment::run(cfg, dir.string());
    const auto csv = slurp(dir / "results.csv");
    CHECK(csv.rfind("distance,conn_prob,conn_se\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("walk-bound run emits rows for k = 2..k_max") {
    const auto dir = fresh_dir("walk");
    const json cfg{{"kind", "walk-bound"}, {"n", 2}, {"R", 1.0},
                   {"k_max", 4},           {"trials", 500}, {"seed", 1}};
    experiment::run(cfg, dir.string());
    const auto csv = slurp(dir / "results.csv");
    CHECK(csv.rfind("k,p_walk,p_sum,chernoff_bound\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("certificate run reports a convergent pair") {
    const auto dir = fresh_dir("cert");
    const json cfg{{"kind", "certificate"}, {"n", 2}, {"t", 1.5}};
    experiment::run(cfg, dir.string());
    const auto csv = slurp(dir / "results.csv");
    CHECK(csv.find("found,1") != std::string::npos);
    CHECK(csv.find("\nq,") != std::string::npos);
}

TEST_CASE("render produces an SVG") {
    const auto dir = fresh_dir("render");
    const json cfg{{"kind", "render"}, {"n", 2},     {"R", 1.0},
                   {"lambda", 0.2},    {"rho", 4.0}, {"seed", 11}};
    experiment::run(cfg, dir.string());
    const auto svg = slurp(dir / "realization.svg");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("circle") != std::string::npos);
    // deterministic bytes under the same seed
    const auto dir2 = fresh_dir("render2");
    experiment::run(cfg, dir2.string());
    CHECK(svg == slurp(dir2 / "realization.svg"));
}

TEST_CASE("no stray temp files are left behind") {
    const auto dir = fresh_dir("tmpcheck");
    const json cfg{{"kind", "bounds"}, {"n", 2}, {"R", 1.0}};
    experiment::run(cfg, dir.string());
    for (const auto& entry : fs::directory_iterator(dir))
        CHECK(entry.path().extension() != ".tmp");
}
