#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "hlflock/graph.hpp"
#include "hlflock/rng.hpp"

namespace hlflock {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double limit = 0.0;  // wall-clock budget in seconds, 0 = none
};

using CheckSink = std::function<void(const CheckResult&)>;

// Random valid HL graph: each agent i > 1 draws a nonempty leader set from
// {1, .., i-1}.
HLGraph random_hl_graph(int agents, Rng& rng, double edge_probability = 0.5);

// Reference configurations used by the checks (criteria 1, 4, 6 and 7).
std::string reference_config(int criterion);

CheckResult check_analytic_rate();
CheckResult check_positivity();
CheckResult check_hull();
CheckResult check_exponential_flocking();
CheckResult check_lyapunov_monotone();
CheckResult check_free_will();
CheckResult check_delay_robustness();
CheckResult check_integrator_order();
// With a scratch directory the two runs are written to files and compared
// byte for byte; otherwise the CSV text is compared in memory.
CheckResult check_determinism(const std::filesystem::path& scratch = {});

const std::vector<std::string>& suite_names();

// Runs every check of the suite, reporting each through `sink` as it
// finishes. Throws InvalidArgument for an unknown suite.
std::vector<CheckResult> run_suite(std::string_view suite, const CheckSink& sink = {});

}  // namespace hlflock
