#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hlflock/diagnostics.hpp"
#include "hlflock/flock.hpp"

namespace hlflock {

struct OutputConfig {
  std::string dir = "out";
  std::string stem = "run";
  std::size_t every = 1;  // write every n-th grid step
};

struct SweepAxis {
  std::string param;  // dotted path, e.g. "kernel.beta" or "tau"
  std::vector<double> values;
};

struct SweepPoint {
  std::vector<std::pair<std::string, double>> params;
  std::string name;  // directory name, "param=value__param=value"
};

// Parsed and normalized run configuration. The normalized JSON document is
// the canonical form: defaults are filled in, so echo() re-parses to an
// equal configuration.
class RunConfig {
 public:
  static RunConfig parse(std::string_view text);
  static RunConfig load(const std::filesystem::path& path);
  static RunConfig from_document(nlohmann::json doc);

  std::string echo() const;
  const nlohmann::json& document() const noexcept { return doc_; }

  // Materializes the simulation, drawing random initial data from seed().
  SimSpec sim_spec() const;
  OutputConfig output() const;
  DiagnosticsOptions diagnostics() const;
  VerdictThresholds thresholds() const;
  std::vector<SweepAxis> sweep_axes() const;
  unsigned workers() const;
  std::uint64_t seed() const;

  void set_seed(std::uint64_t seed);
  void set_output_dir(const std::string& dir);
  void set_workers(unsigned workers);

  RunConfig with_parameter(const std::string& path, double value) const;
  std::vector<SweepPoint> expand_sweep() const;

  bool operator==(const RunConfig& other) const { return doc_ == other.doc_; }

 private:
  explicit RunConfig(nlohmann::json doc) : doc_(std::move(doc)) {}
  nlohmann::json doc_;
};

// Shortest decimal that round-trips, used in directory and parameter names.
std::string format_short(double value);

}  // namespace hlflock
