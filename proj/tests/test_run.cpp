#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "hlflock/error.hpp"
#include "hlflock/run.hpp"
#include "hlflock/verify.hpp"

using namespace hlflock;
namespace fs = std::filesystem;

namespace {

// Fresh directory under the system temp dir, removed on scope exit.
struct ScratchDir {
  fs::path path;
  explicit ScratchDir(const std::string& name) {
    path = fs::temp_directory_path() / ("hlflock_test_" + name);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

constexpr const char* kPair = R"({
  "tau": 0.5, "graph": {"chain": 2},
  "kernel": {"beta": 0.25},
  "initial": {"form": "constant", "x": [[0], [1]], "v": [[0], [1]]},
  "stepper": {"t_end": 30}
})";

}  // namespace

TEST_CASE("trajectory CSV layout") {
  auto cfg = RunConfig::parse(R"({
    "dim": 2, "tau": 0.1, "graph": {"chain": 2},
    "initial": {"form": "constant", "x": [[0, 0], [1, 1]], "v": [[0.1, 0], [1, -1]]},
    "stepper": {"h": 0.05, "t_end": 1}
  })");
  const auto run = run_in_memory(cfg);
  std::ostringstream os;
  write_trajectory_csv(os, run.spec.layout(), run.trajectory, 4);
  const auto rows = lines(os.str());
  CHECK(rows[0] == "t,x1_1,x1_2,x2_1,x2_2,v1_1,v1_2,v2_1,v2_2");
  REQUIRE(rows.size() == 1 + 6);
  CHECK(rows[1].rfind("0,0,0,1,1,0.10000000000000001,0,1,-1", 0) == 0);
  CHECK(rows[2].rfind("0.20000000000000001,", 0) == 0);
}

TEST_CASE("diagnostics CSV header") {
  auto cfg = RunConfig::parse(R"({
    "tau": 0.5, "graph": {"chain": 3},
    "initial": {"form": "constant", "x": [[0], [1], [2]], "v": [[0], [1], [2]]},
    "diagnostics": {"lyapunov": [{"pair": [1, 2]}, {"level": 3}]},
    "stepper": {"t_end": 2}
  })");
  const auto run = run_in_memory(cfg);
  std::ostringstream os;
  write_diagnostics_csv(os, run.diagnostics);
  const auto rows = lines(os.str());
  CHECK(rows[0] ==
        "t,X,V,cross_1_1,cross_1_2,cross_1_3,cross_2_1,cross_2_2,cross_2_3,cross_3_1,cross_3_2,cross_3_3,"
        "vdev_2,vdev_3,xdev_2,xdev_3,L_plus_1_2,L_minus_1_2,L_plus_level_3,L_minus_level_3");
  CHECK(rows.size() == 202);
  CHECK(std::count(rows[5].begin(), rows[5].end(), ',') == std::count(rows[0].begin(), rows[0].end(), ','));
}

TEST_CASE("simulate writes three files") {
  ScratchDir dir("simulate");
  auto cfg = RunConfig::parse(kPair);
  cfg.set_output_dir((dir.path / "nested" / "out").string());
  const auto art = simulate_to_files(cfg);
  CHECK(fs::exists(art.trajectory));
  CHECK(fs::exists(art.diagnostics));
  CHECK(fs::exists(art.summary));
  CHECK(art.trajectory.filename() == "run_trajectory.csv");
  const auto summary = nlohmann::json::parse(slurp(art.summary));
  CHECK(summary["verdict"]["flocking"] == true);
  CHECK(summary["graph"]["depth"] == 2);
  CHECK(summary["kernel_tail"] == "divergent");
  CHECK(summary["forcing_l1"] == 0.0);
}

TEST_CASE("identical config and seed give identical files") {
  ScratchDir dir("determinism");
  const auto result = check_determinism(dir.path);
  CHECK(result.passed);
  const char* random = R"({"tau": 0.25, "seed": 99, "graph": {"chain": 3},
                           "initial": {"form": "random"}, "stepper": {"t_end": 5}})";
  std::string text[2];
  for (int k = 0; k < 2; ++k) {
    auto cfg = RunConfig::parse(random);
    cfg.set_output_dir((dir.path / ("r" + std::to_string(k))).string());
    text[k] = slurp(simulate_to_files(cfg).trajectory);
  }
  CHECK(text[0] == text[1]);
}

TEST_CASE("unwritable output directory") {
  ScratchDir dir("io");
  std::ofstream(dir.path / "blocker") << "x";
  auto cfg = RunConfig::parse(kPair);
  cfg.set_output_dir((dir.path / "blocker" / "sub").string());
  try {
    simulate_to_files(cfg);
    FAIL("expected IoError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IoError);
  }
}

TEST_CASE("beta sweep gives three run directories and one index") {
  ScratchDir dir("sweep");
  auto cfg = RunConfig::from_document([] {
    auto doc = nlohmann::json::parse(kPair, nullptr, true, true);
    doc["sweep"] = {{"axes", {{{"param", "kernel.beta"}, {"values", {0.1, 0.25, 0.5}}}}}};
    return doc;
  }());
  cfg.set_output_dir(dir.path.string());
  std::vector<std::string> log;
  const auto outcome = run_sweep(cfg, 3, [&](const std::string& l) { log.push_back(l); });
  CHECK(outcome.runs == 3);
  CHECK(outcome.failed == 0);
  CHECK(log.size() == 3);
  for (const char* name : {"kernel.beta=0.1", "kernel.beta=0.25", "kernel.beta=0.5"}) {
    CHECK(fs::exists(dir.path / name / "run_summary.json"));
  }
  int indexes = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir.path)) indexes += e.path().filename() == "sweep_index.json";
  CHECK(indexes == 1);

  const auto table = sweep_summary(outcome.index);
  CHECK(table.rows == 3);
  CHECK(table.warnings.empty());
  const auto rows = lines(table.csv);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == "run,kernel.beta,status,flocking,v_ratio,exp_rate,exp_residual,power_rate,power_residual");
  CHECK(rows[1].rfind("kernel.beta=0.1,0.10000000000000001,ok,true,", 0) == 0);

  SUBCASE("a deleted run is reported, not fatal") {
    fs::remove(dir.path / "kernel.beta=0.25" / "run_summary.json");
    const auto partial = sweep_summary(outcome.index);
    CHECK(partial.rows == 3);
    CHECK(partial.warnings.size() == 1);
    CHECK(lines(partial.csv)[2].find(",missing,") != std::string::npos);
  }
}

TEST_CASE("sweep records failing points and keeps going") {
  ScratchDir dir("sweep_fail");
  auto cfg = RunConfig::from_document([] {
    auto doc = nlohmann::json::parse(kPair, nullptr, true, true);
    doc["sweep"] = {{"axes", {{{"param", "tau"}, {"values", {0.25, 0.333}}}}}};
    return doc;
  }());
  cfg.set_output_dir(dir.path.string());
  const auto outcome = run_sweep(cfg, 2);
  CHECK(outcome.failed == 1);
  const auto index = nlohmann::json::parse(slurp(outcome.index));
  CHECK(index["runs"][1]["status"] == "error");
  CHECK(index["runs"][1]["error"].get<std::string>().find("MisalignedDelay") != std::string::npos);
  const auto table = sweep_summary(outcome.index);
  CHECK(table.rows == 2);
  CHECK(table.warnings.size() == 1);
}

TEST_CASE("empty index gives an empty table and a warning") {
  ScratchDir dir("empty");
  std::ofstream(dir.path / "sweep_index.json") << R"({"axes": [], "runs": []})";
  const auto table = sweep_summary(dir.path / "sweep_index.json");
  CHECK(table.rows == 0);
  CHECK(table.warnings.size() == 1);
  CHECK(lines(table.csv).size() == 1);
  CHECK_THROWS_AS(sweep_summary(dir.path / "nope.json"), Error);
}

TEST_CASE("delay sweep keeps flocking at every delay") {
  ScratchDir dir("tau");
  auto cfg = RunConfig::parse(reference_config(7));
  cfg = RunConfig::from_document([&] {
    auto doc = cfg.document();
    doc["sweep"]["axes"][0]["values"] = {0, 0.25, 0.5, 1.0};
    return doc;
  }());
  cfg.set_output_dir(dir.path.string());
  const auto outcome = run_sweep(cfg, 4);
  const auto rows = lines(sweep_summary(outcome.index).csv);
  REQUIRE(rows.size() == 5);
  for (std::size_t k = 1; k < rows.size(); ++k) CHECK(rows[k].find(",ok,true,") != std::string::npos);
}
