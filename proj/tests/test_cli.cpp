#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "afs/cli.hpp"
#include "afs/presets.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace afs;

namespace {

fs::path scratch(const std::string& tag) {
    static std::atomic<int> counter{0};
    auto p = fs::temp_directory_path() /
             ("afs_cli_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

struct Captured {
    int rc = 0;
    std::string out, err;
};

Captured invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "afs");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream o, e;
    auto* old_o = std::cout.rdbuf(o.rdbuf());
    auto* old_e = std::cerr.rdbuf(e.rdbuf());
    Captured c;
    c.rc = cli::main(static_cast<int>(argv.size()), argv.data());
    std::cout.rdbuf(old_o);
    std::cerr.rdbuf(old_e);
    c.out = o.str();
    c.err = e.str();
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json small_config() {
    return json::parse(R"({
      "medium": {"beta": 100.0, "gamma": 0.0, "n_cells": 512},
      "pulse": {"z0": 0.05, "center": 0.25},
      "schedule": {"kind": "storage", "delta_from": -1000.0, "delta_to": 1000.0,
                   "ramp_time": 0.6, "hold": 0.1},
      "t_end": 2.5,
      "outputs": {"boundary_csv": "out.csv", "summary_json": "summary.json"}
    })");
}

fs::path write_config(const fs::path& dir, const json& j, const std::string& name = "cfg.json") {
    const auto p = dir / name;
    std::ofstream(p) << j.dump(2);
    return p;
}

std::vector<std::vector<double>> read_csv(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> r;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) r.push_back(std::stod(cell));
        rows.push_back(r);
    }
    return rows;
}

std::string header_of(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

}  // namespace

TEST_CASE("config json round trip") {
    const auto cfg = cli::from_json(small_config());
    const auto j = cli::to_json(cfg);
    const auto again = cli::from_json(j);
    CHECK(cli::to_json(again) == j);
    CHECK(cfg.medium.length == 1.0);
    CHECK(cfg.medium.c == 1.0);
    CHECK(cfg.pulse.injection == Injection::in_medium);
    CHECK(cfg.initial == cli::InitialState::pulse);
    CHECK(cfg.effective_retrieval_start() == doctest::Approx(0.7));
    CHECK(j["retrieval_start"].get<double>() == doctest::Approx(0.7));

    const auto f2 = presets::fig2();
    CHECK(cli::to_json(cli::from_json(cli::to_json(f2))) == cli::to_json(f2));
}

TEST_CASE("config rejects unknown keys with a path") {
    auto j = small_config();
    j["pulse"]["width"] = 1.0;
    try {
        cli::from_json(j);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "pulse.width");
    }
}

TEST_CASE("simulate: invalid width exits with the config code") {
    const auto dir = scratch("z0");
    auto j = small_config();
    j["pulse"]["z0"] = 0.0;
    const auto r = invoke({"simulate", "--config", write_config(dir, j).string(), "--out", dir.string()});
    CHECK(r.rc == cli::kExitConfig);
    CHECK(r.err.find("pulse.z0") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("simulate: malformed json and missing file exit 2") {
    const auto dir = scratch("bad");
    std::ofstream(dir / "broken.json") << "{ not json";
    CHECK(invoke({"simulate", "--config", (dir / "broken.json").string()}).rc == cli::kExitConfig);
    CHECK(invoke({"simulate", "--config", (dir / "absent.json").string()}).rc == cli::kExitConfig);
    CHECK(invoke({"no-such-command"}).rc == cli::kExitConfig);
    fs::remove_all(dir);
}

TEST_CASE("simulate: overflow exits with the blowup code") {
    const auto dir = scratch("blowup");
    auto j = small_config();
    j["pulse"]["amplitude"] = 1e200;
    const auto r = invoke({"simulate", "--config", write_config(dir, j).string(), "--out", dir.string()});
    CHECK(r.rc == cli::kExitBlowup);
    fs::remove_all(dir);
}

TEST_CASE("simulate writes outputs and reports resolution warnings") {
    const auto dir = scratch("warn");
    auto j = small_config();
    j["medium"]["n_cells"] = 64;  // dz = 1/64 > z0/20
    j["outputs"]["snapshots_csv"] = "snap.csv";
    j["outputs"]["polariton_csv"] = "pol.csv";
    const auto r = invoke({"simulate", "--config", write_config(dir, j).string(), "--out", dir.string()});
    REQUIRE(r.rc == cli::kExitOk);
    const auto s = json::parse(slurp(dir / "summary.json"));
    bool found = false;
    for (const auto& w : s["warnings"]) found = found || w["code"] == "resolution.dz";
    CHECK(found);
    CHECK(s.contains("units"));
    CHECK(s["figures"].contains("efficiency"));
    CHECK(s["conditions"]["adiabaticity_margin"].contains("verdict"));
    CHECK(header_of(dir / "out.csv") == "t,re_E_out,im_E_out");
    CHECK(header_of(dir / "snap.csv") == "t,z,re_E,im_E,re_sigma,im_sigma");
    CHECK(header_of(dir / "pol.csv") == "t,k,theta,abs2_psi,abs2_phi,abs2_E,abs2_sigma");
    fs::remove_all(dir);
}

TEST_CASE("simulate is deterministic") {
    const auto a = scratch("det_a"), b = scratch("det_b");
    const auto cfg = write_config(a, small_config());
    REQUIRE(invoke({"simulate", "--config", cfg.string(), "--out", a.string()}).rc == 0);
    REQUIRE(invoke({"simulate", "--config", cfg.string(), "--out", b.string()}).rc == 0);
    CHECK(slurp(a / "out.csv") == slurp(b / "out.csv"));
    CHECK_FALSE(slurp(a / "out.csv").empty());
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("single-value sweep matches simulate") {
    const auto dir = scratch("sweep1");
    const auto cfg = write_config(dir, small_config());
    REQUIRE(invoke({"simulate", "--config", cfg.string(), "--out", dir.string()}).rc == 0);
    const auto sim = json::parse(slurp(dir / "summary.json"));
    const auto sw = dir / "sw";
    REQUIRE(invoke({"sweep", "--config", cfg.string(), "--param", "medium.beta", "--values", "100",
                    "--out", sw.string()})
                .rc == 0);
    const auto rows = read_csv(sw / "sweep.csv");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0][1] == sim["figures"]["efficiency"].get<double>());
    CHECK(rows[0][2] == sim["figures"]["fidelity"].get<double>());
    fs::remove_all(dir);
}

TEST_CASE("gamma sweep lowers efficiency monotonically") {
    const auto dir = scratch("sweepg");
    const auto cfg = write_config(dir, small_config());
    REQUIRE(invoke({"sweep", "--config", cfg.string(), "--param", "medium.gamma", "--values",
                    "0,0.5,2", "--out", dir.string(), "--jobs", "3"})
                .rc == 0);
    const auto rows = read_csv(dir / "sweep.csv");
    REQUIRE(rows.size() == 3);
    CHECK(rows[0][0] == 0.0);
    CHECK(rows[1][1] < rows[0][1]);
    CHECK(rows[2][1] < rows[1][1]);
    CHECK(fs::exists(dir / "sweep_2.json"));
    fs::remove_all(dir);
}

TEST_CASE("sweep argument errors exit 2") {
    const auto dir = scratch("sweeperr");
    const auto cfg = write_config(dir, small_config()).string();
    const auto o = (dir / "o").string();
    CHECK(invoke({"sweep", "--config", cfg, "--param", "medium.gamma", "--values", "", "--out", o}).rc ==
          cli::kExitConfig);
    CHECK(invoke({"sweep", "--config", cfg, "--param", "medium.gamma", "--values", "1,x", "--out", o})
              .rc == cli::kExitConfig);
    CHECK(invoke({"sweep", "--config", cfg, "--param", "pulse.envelope", "--values", "1", "--out", o})
              .rc == cli::kExitConfig);
    CHECK(invoke({"sweep", "--config", cfg, "--param", "medium.nothing", "--values", "1", "--out", o})
              .rc == cli::kExitConfig);
    CHECK(invoke({"sweep", "--config", cfg, "--param", "medium.n_cells", "--values", "100.5", "--out",
                  o})
              .rc == cli::kExitConfig);
    fs::remove_all(dir);
}

TEST_CASE("unknown preset exits 2 and lists names") {
    const auto dir = scratch("preset");
    const auto r = invoke({"preset", "fig9", "--out", dir.string()});
    CHECK(r.rc == cli::kExitConfig);
    CHECK(r.err.find("fig2") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("fig3 preset writes the velocity table") {
    const auto dir = scratch("fig3");
    REQUIRE(invoke({"preset", "fig3", "--out", dir.string(), "--jobs", "4"}).rc == 0);
    CHECK(header_of(dir / "fig3.csv") == "delta_over_beta,v_analytic,v_measured");
    const auto rows = read_csv(dir / "fig3.csv");
    CHECK(rows.size() == presets::fig3_ratios().size());
    for (const auto& r : rows) CHECK(std::abs(r[2] - r[1]) <= 0.05 * r[1]);
    fs::remove_all(dir);
}

TEST_CASE("polaritons table") {
    const auto dir = scratch("pol");
    REQUIRE(invoke({"polaritons", "--out", dir.string(), "--beta", "2", "--min", "-4", "--max", "4",
                    "--points", "9"})
                .rc == 0);
    CHECK(header_of(dir / "polaritons.csv") ==
          "delta_over_beta,theta0,lambda1_over_beta,lambda2_over_beta,v_psi,v_phi");
    const auto rows = read_csv(dir / "polaritons.csv");
    REQUIRE(rows.size() == 9);
    const auto& mid = rows[4];
    CHECK(mid[0] == 0.0);
    CHECK(mid[1] == doctest::Approx(M_PI / 4));
    CHECK(mid[2] == doctest::Approx(1.0));
    CHECK(mid[3] == doctest::Approx(-1.0));
    for (const auto& r : rows) CHECK(r[4] + r[5] == doctest::Approx(1.0));
    CHECK(invoke({"polaritons", "--out", dir.string(), "--points", "1"}).rc == cli::kExitConfig);
    fs::remove_all(dir);
}
