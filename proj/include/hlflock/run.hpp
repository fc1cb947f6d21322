#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "hlflock/config.hpp"
#include "hlflock/diagnostics.hpp"

namespace hlflock {

struct RunResult {
  SimSpec spec;
  Trajectory trajectory;
  DiagnosticsSeries diagnostics;
  FlockingReport report;
};

RunResult run_in_memory(const RunConfig& config);

// t, x_1..x_N, v_1..v_N (d columns each) for t >= 0, every `every`-th step,
// 17 significant digits.
void write_trajectory_csv(std::ostream& os, const FlockLayout& layout, const Trajectory& traj, std::size_t every);
void write_diagnostics_csv(std::ostream& os, const DiagnosticsSeries& diag);
nlohmann::json summary_record(const RunConfig& config, const RunResult& result);

struct RunArtifacts {
  std::filesystem::path trajectory;
  std::filesystem::path diagnostics;
  std::filesystem::path summary;
  FlockingReport report;
};

// Writes <stem>_trajectory.csv, <stem>_diagnostics.csv, <stem>_summary.json
// into output().dir, creating it if needed.
RunArtifacts simulate_to_files(const RunConfig& config);

using LogSink = std::function<void(const std::string&)>;

struct SweepOutcome {
  std::filesystem::path index;
  std::size_t runs = 0;
  std::size_t failed = 0;
};

// One directory per cartesian point under output().dir, run by `workers`
// threads; sweep_index.json is written once all runs finish.
SweepOutcome run_sweep(const RunConfig& config, unsigned workers, const LogSink& log = {});

struct SummaryTable {
  std::string csv;
  std::size_t rows = 0;
  std::vector<std::string> warnings;
};

SummaryTable sweep_summary(const std::filesystem::path& index);

}  // namespace hlflock
