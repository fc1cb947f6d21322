#include "hlflock/hlflock.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>
#include <string>

#include "hlflock/config.hpp"
#include "hlflock/error.hpp"
#include "hlflock/run.hpp"
#include "hlflock/verify.hpp"

struct hlf_config {
  hlflock::RunConfig cfg;
};

struct hlf_run {
  hlflock::RunResult result;
};

namespace {

thread_local std::string g_last_error;

hlf_status to_status(hlflock::ErrorCode code) {
  using hlflock::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return HLF_INVALID_ARGUMENT;
    case ErrorCode::InvalidGraph: return HLF_INVALID_GRAPH;
    case ErrorCode::NegativeDistance: return HLF_NEGATIVE_DISTANCE;
    case ErrorCode::QuadratureFailure: return HLF_QUADRATURE_FAILURE;
    case ErrorCode::MisalignedDelay: return HLF_MISALIGNED_DELAY;
    case ErrorCode::EmptyHorizon: return HLF_EMPTY_HORIZON;
    case ErrorCode::OutOfWindow: return HLF_OUT_OF_WINDOW;
    case ErrorCode::NonFiniteState: return HLF_NON_FINITE_STATE;
    case ErrorCode::HistoryExhausted: return HLF_HISTORY_EXHAUSTED;
    case ErrorCode::OffsetUnavailable: return HLF_OFFSET_UNAVAILABLE;
    case ErrorCode::InsufficientData: return HLF_INSUFFICIENT_DATA;
    case ErrorCode::NonPositiveSamples: return HLF_NON_POSITIVE_SAMPLES;
    case ErrorCode::ConfigError: return HLF_CONFIG_ERROR;
    case ErrorCode::IoError: return HLF_IO_ERROR;
  }
  return HLF_INTERNAL_ERROR;
}

template <class F>
hlf_status guard(F&& f) {
  try {
    g_last_error.clear();
    f();
    return HLF_OK;
  } catch (const hlflock::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return HLF_INTERNAL_ERROR;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HLF_INTERNAL_ERROR;
  }
}

hlf_status null_arg(const char* what) {
  g_last_error = std::string(what) + " must not be null";
  return HLF_INVALID_ARGUMENT;
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p == nullptr) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

void emit_lines(hlf_line_fn fn, void* user, const std::string& text) {
  if (fn == nullptr) return;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) fn(line.c_str(), user);
}

}  // namespace

extern "C" {

const char* hlf_version(void) { return "0.1.0"; }

const char* hlf_status_name(hlf_status status) {
  switch (status) {
    case HLF_OK: return "Ok";
    case HLF_INVALID_ARGUMENT: return "InvalidArgument";
    case HLF_INVALID_GRAPH: return "InvalidGraph";
    case HLF_NEGATIVE_DISTANCE: return "NegativeDistance";
    case HLF_QUADRATURE_FAILURE: return "QuadratureFailure";
    case HLF_MISALIGNED_DELAY: return "MisalignedDelay";
    case HLF_EMPTY_HORIZON: return "EmptyHorizon";
    case HLF_OUT_OF_WINDOW: return "OutOfWindow";
    case HLF_NON_FINITE_STATE: return "NonFiniteState";
    case HLF_HISTORY_EXHAUSTED: return "HistoryExhausted";
    case HLF_OFFSET_UNAVAILABLE: return "OffsetUnavailable";
    case HLF_INSUFFICIENT_DATA: return "InsufficientData";
    case HLF_NON_POSITIVE_SAMPLES: return "NonPositiveSamples";
    case HLF_CONFIG_ERROR: return "ConfigError";
    case HLF_IO_ERROR: return "IoError";
    case HLF_INTERNAL_ERROR: return "InternalError";
  }
  return "Unknown";
}

const char* hlf_last_error(void) { return g_last_error.c_str(); }

void hlf_string_free(char* s) { std::free(s); }

hlf_status hlf_config_load_file(const char* path, hlf_config** out) {
  if (path == nullptr || out == nullptr) return null_arg("path and out");
  *out = nullptr;
  return guard([&] { *out = new hlf_config{hlflock::RunConfig::load(path)}; });
}

hlf_status hlf_config_load_string(const char* text, hlf_config** out) {
  if (text == nullptr || out == nullptr) return null_arg("text and out");
  *out = nullptr;
  return guard([&] { *out = new hlf_config{hlflock::RunConfig::parse(text)}; });
}

void hlf_config_free(hlf_config* config) { delete config; }

hlf_status hlf_config_set_seed(hlf_config* config, uint64_t seed) {
  if (config == nullptr) return null_arg("config");
  return guard([&] { config->cfg.set_seed(seed); });
}

hlf_status hlf_config_set_output_dir(hlf_config* config, const char* dir) {
  if (config == nullptr || dir == nullptr) return null_arg("config and dir");
  return guard([&] { config->cfg.set_output_dir(dir); });
}

hlf_status hlf_config_echo(const hlf_config* config, char** out) {
  if (config == nullptr || out == nullptr) return null_arg("config and out");
  return guard([&] { *out = dup(config->cfg.echo()); });
}

hlf_status hlf_simulate(const hlf_config* config, hlf_line_fn log, void* user) {
  if (config == nullptr) return null_arg("config");
  return guard([&] {
    const auto art = hlflock::simulate_to_files(config->cfg);
    std::ostringstream os;
    os << "trajectory  " << art.trajectory.string() << '\n'
       << "diagnostics " << art.diagnostics.string() << '\n'
       << "summary     " << art.summary.string() << '\n'
       << "flocking " << (art.report.flocking ? "yes" : "no") << ", V ratio " << art.report.v_ratio;
    if (art.report.exponential) os << ", exponential rate " << art.report.exponential->rate;
    emit_lines(log, user, os.str());
  });
}

hlf_status hlf_sweep(const hlf_config* config, unsigned workers, hlf_line_fn log, void* user, size_t* failed_runs) {
  if (config == nullptr) return null_arg("config");
  return guard([&] {
    const unsigned n = workers == 0 ? config->cfg.workers() : workers;
    const auto outcome =
        hlflock::run_sweep(config->cfg, n, [&](const std::string& line) { emit_lines(log, user, line); });
    emit_lines(log, user,
               "index " + outcome.index.string() + " (" + std::to_string(outcome.runs) + " runs, " +
                   std::to_string(outcome.failed) + " failed)");
    if (failed_runs != nullptr) *failed_runs = outcome.failed;
  });
}

hlf_status hlf_summary(const char* index_path, char** csv, hlf_line_fn warn, void* user) {
  if (index_path == nullptr || csv == nullptr) return null_arg("index_path and csv");
  return guard([&] {
    const auto table = hlflock::sweep_summary(index_path);
    for (const auto& w : table.warnings) emit_lines(warn, user, "warning: " + w);
    *csv = dup(table.csv);
  });
}

hlf_status hlf_verify(const char* suite, hlf_line_fn line, void* user, int* failed_checks) {
  if (suite == nullptr) return null_arg("suite");
  return guard([&] {
    int failed = 0;
    hlflock::run_suite(suite, [&](const hlflock::CheckResult& r) {
      if (!r.passed) ++failed;
      std::ostringstream os;
      os.precision(3);
      os << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << " [" << r.seconds << " s]";
      emit_lines(line, user, os.str());
    });
    if (failed_checks != nullptr) *failed_checks = failed;
  });
}

hlf_status hlf_run_create(const hlf_config* config, hlf_run** out) {
  if (config == nullptr || out == nullptr) return null_arg("config and out");
  *out = nullptr;
  return guard([&] { *out = new hlf_run{hlflock::run_in_memory(config->cfg)}; });
}

void hlf_run_free(hlf_run* run) { delete run; }

size_t hlf_run_sample_count(const hlf_run* run) {
  if (run == nullptr) return 0;
  const auto& traj = run->result.trajectory;
  return traj.size() - traj.zero_index();
}

size_t hlf_run_state_size(const hlf_run* run) { return run == nullptr ? 0 : run->result.spec.layout().size(); }

hlf_status hlf_run_sample(const hlf_run* run, size_t k, double* t, double* state, size_t capacity) {
  if (run == nullptr) return null_arg("run");
  if (k >= hlf_run_sample_count(run)) {
    g_last_error = "sample index out of range";
    return HLF_INVALID_ARGUMENT;
  }
  const auto& traj = run->result.trajectory;
  const std::size_t g = traj.zero_index() + k;
  if (t != nullptr) *t = traj.time(g);
  if (state != nullptr) {
    const auto y = traj.state(g);
    if (capacity < y.size()) {
      g_last_error = "state buffer too small";
      return HLF_INVALID_ARGUMENT;
    }
    std::memcpy(state, y.data(), y.size() * sizeof(double));
  }
  return HLF_OK;
}

hlf_status hlf_run_diameters(const hlf_run* run, size_t k, double* X, double* V) {
  if (run == nullptr) return null_arg("run");
  const auto& d = run->result.diagnostics;
  if (k >= d.times.size()) {
    g_last_error = "sample index out of range";
    return HLF_INVALID_ARGUMENT;
  }
  if (X != nullptr) *X = d.X[k];
  if (V != nullptr) *V = d.V[k];
  return HLF_OK;
}

hlf_status hlf_run_verdict(const hlf_run* run, hlf_verdict* out) {
  if (run == nullptr || out == nullptr) return null_arg("run and out");
  const auto& rep = run->result.report;
  *out = hlf_verdict{};
  out->flocking = rep.flocking;
  out->x_bounded = rep.x_bounded;
  out->v_decayed = rep.v_decayed;
  out->v_ratio = rep.v_ratio;
  if (rep.exponential) {
    out->has_exponential = 1;
    out->exponential_rate = rep.exponential->rate;
    out->exponential_residual = rep.exponential->residual;
  }
  if (rep.power) {
    out->has_power = 1;
    out->power_rate = rep.power->rate;
    out->power_residual = rep.power->residual;
  }
  return HLF_OK;
}

}  // extern "C"
