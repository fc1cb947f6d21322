// hlflock command line: simulate, sweep, verify, summary, echo.
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hlflock/hlflock.h"

namespace {

void print_line(const char* line, void* user) {
  std::fprintf(static_cast<FILE*>(user), "%s\n", line);
}

int report(hlf_status st) {
  std::fprintf(stderr, "hlflock: %s\n", hlf_last_error()[0] ? hlf_last_error() : hlf_status_name(st));
  return 2;
}

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
  unsigned workers = 0;
};

// Loads the config and applies --seed / --output. Returns nullptr after
// printing the error.
hlf_config* load(const std::string& path, const Overrides& o, int& exit_code) {
  hlf_config* cfg = nullptr;
  hlf_status st = hlf_config_load_file(path.c_str(), &cfg);
  if (st == HLF_OK && o.seed) st = hlf_config_set_seed(cfg, *o.seed);
  if (st == HLF_OK && o.output) st = hlf_config_set_output_dir(cfg, o.output->c_str());
  if (st != HLF_OK) {
    exit_code = report(st);
    hlf_config_free(cfg);
    return nullptr;
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delayed hierarchical-leadership flocking simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", hlf_version());

  Overrides o;
  std::uint64_t seed = 0;
  std::string output;
  auto* seed_opt = app.add_option("--seed", seed, "Seed for randomized initial data (overrides config)");
  auto* out_opt = app.add_option("--output", output, "Output directory (overrides config)");
  app.add_option("--workers", o.workers, "Concurrent sweep runs (overrides config)")->check(CLI::PositiveNumber);

  std::string config_path;
  std::string suite;
  std::string index_path;

  auto* sim = app.add_subcommand("simulate", "Run one configuration and write CSV and summary files");
  sim->add_option("config", config_path, "Run configuration file")->required()->check(CLI::ExistingFile);
  sim->fallthrough();

  auto* sweep = app.add_subcommand("sweep", "Run the cartesian sweep of a configuration");
  sweep->add_option("config", config_path, "Run configuration file")->required()->check(CLI::ExistingFile);
  sweep->fallthrough();

  auto* verify = app.add_subcommand("verify", "Run a check suite");
  verify->add_option("suite", suite, "positivity, hull, flocking, freewill, convergence or all")
      ->required()
      ->check(CLI::IsMember({"positivity", "hull", "flocking", "freewill", "convergence", "all"}));

  auto* summary = app.add_subcommand("summary", "Tabulate a finished sweep as CSV");
  summary->add_option("index", index_path, "sweep_index.json")->required();

  auto* echo = app.add_subcommand("echo", "Print the normalized configuration");
  echo->add_option("config", config_path, "Run configuration file")->required()->check(CLI::ExistingFile);
  echo->fallthrough();

  CLI11_PARSE(app, argc, argv);
  if (*seed_opt) o.seed = seed;
  if (*out_opt) o.output = output;

  int code = 0;
  if (*sim) {
    hlf_config* cfg = load(config_path, o, code);
    if (cfg == nullptr) return code;
    const hlf_status st = hlf_simulate(cfg, print_line, stdout);
    hlf_config_free(cfg);
    return st == HLF_OK ? 0 : report(st);
  }
  if (*sweep) {
    hlf_config* cfg = load(config_path, o, code);
    if (cfg == nullptr) return code;
    std::size_t failed = 0;
    const hlf_status st = hlf_sweep(cfg, o.workers, print_line, stdout, &failed);
    hlf_config_free(cfg);
    if (st != HLF_OK) return report(st);
    return failed == 0 ? 0 : 1;
  }
  if (*verify) {
    int failed = 0;
    const hlf_status st = hlf_verify(suite.c_str(), print_line, stdout, &failed);
    if (st != HLF_OK) return report(st);
    std::printf("%s: %d check(s) failed\n", suite.c_str(), failed);
    return failed == 0 ? 0 : 1;
  }
  if (*summary) {
    char* csv = nullptr;
    const hlf_status st = hlf_summary(index_path.c_str(), &csv, print_line, stderr);
    if (st != HLF_OK) return report(st);
    std::fputs(csv, stdout);
    hlf_string_free(csv);
    return 0;
  }
  if (*echo) {
    hlf_config* cfg = load(config_path, o, code);
    if (cfg == nullptr) return code;
    char* text = nullptr;
    const hlf_status st = hlf_config_echo(cfg, &text);
    hlf_config_free(cfg);
    if (st != HLF_OK) return report(st);
    std::fputs(text, stdout);
    hlf_string_free(text);
  }
  return 0;
}
