#include "hlflock/run.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "hlflock/error.hpp"

namespace hlflock {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void put(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

std::string coordinate_name(char prefix, int agent, int coord, int dim) {
  std::string s(1, prefix);
  s += std::to_string(agent);
  if (dim > 1) s += "_" + std::to_string(coord + 1);
  return s;
}

json fit_json(const std::optional<DecayFit>& fit) {
  if (!fit) return nullptr;
  return {{"model", decay_model_name(fit->model)}, {"C", fit->C},         {"rate", fit->rate},
          {"residual", fit->residual},             {"t_lo", fit->t_lo},   {"t_hi", fit->t_hi},
          {"samples", fit->samples}};
}

// inf/nan are not JSON numbers
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  out.close();
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IoError, path.string() + ": " + e.what());
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace

RunResult run_in_memory(const RunConfig& config) {
  SimSpec spec = config.sim_spec();
  Trajectory traj = simulate_flock(spec);
  DiagnosticsSeries diag = compute_diagnostics(spec, traj, config.diagnostics());
  FlockingReport report = flocking_verdict(diag, config.thresholds());
  return RunResult{std::move(spec), std::move(traj), std::move(diag), std::move(report)};
}

void write_trajectory_csv(std::ostream& os, const FlockLayout& layout, const Trajectory& traj, std::size_t every) {
  if (every == 0) every = 1;
  os << "t";
  for (char prefix : {'x', 'v'}) {
    for (int i = 1; i <= layout.agents; ++i) {
      for (int c = 0; c < layout.dim; ++c) os << ',' << coordinate_name(prefix, i, c, layout.dim);
    }
  }
  os << '\n';
  for (std::size_t k = traj.zero_index(); k < traj.size(); k += every) {
    put(os, traj.time(k));
    for (double v : traj.state(k)) {
      os << ',';
      put(os, v);
    }
    os << '\n';
  }
}

void write_diagnostics_csv(std::ostream& os, const DiagnosticsSeries& diag) {
  const int n = diag.agents;
  os << "t,X,V";
  if (diag.cross) {
    for (int i = 1; i <= n; ++i) {
      for (int j = 1; j <= n; ++j) os << ",cross_" << i << '_' << j;
    }
  }
  if (!diag.deviation.empty()) {
    for (int l = 2; l <= n; ++l) os << ",vdev_" << l;
    for (int l = 2; l <= n; ++l) os << ",xdev_" << l;
  }
  for (const auto& ly : diag.lyapunov) os << ",L_plus_" << ly.config.label() << ",L_minus_" << ly.config.label();
  os << '\n';

  // Lyapunov series start at the same grid time as the rest; a series
  // shorter than the run leaves its cells empty.
  for (std::size_t k = 0; k < diag.times.size(); ++k) {
    put(os, diag.times[k]);
    os << ',';
    put(os, diag.X[k]);
    os << ',';
    put(os, diag.V[k]);
    if (diag.cross) {
      for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) {
          os << ',';
          put(os, diag.cross->at(k, i, j));
        }
      }
    }
    if (!diag.deviation.empty()) {
      const auto& dev = diag.deviation[k];
      for (int l = 2; l <= n; ++l) {
        os << ',';
        put(os, dev.speed[static_cast<std::size_t>(l - 1)]);
      }
      for (int l = 2; l <= n; ++l) {
        os << ',';
        put(os, dev.position[static_cast<std::size_t>(l - 1)]);
      }
    }
    for (const auto& ly : diag.lyapunov) {
      os << ',';
      if (k < ly.plus.size()) put(os, ly.plus[k]);
      os << ',';
      if (k < ly.minus.size()) put(os, ly.minus[k]);
    }
    os << '\n';
  }
}

json summary_record(const RunConfig& config, const RunResult& result) {
  const auto& rep = result.report;
  const char* tail = "unknown";
  switch (has_divergent_tail(result.spec.kernel)) {
    case TailVerdict::Yes: tail = "divergent"; break;
    case TailVerdict::No: tail = "integrable"; break;
    case TailVerdict::Unknown: break;
  }
  json lyap = json::array();
  for (const auto& ly : result.diagnostics.lyapunov) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < ly.times.size(); ++k) {
      if (ly.times[k - 1] < 2.0 * result.spec.tau) continue;
      worst = std::max({worst, ly.plus[k] - ly.plus[k - 1], ly.minus[k] - ly.minus[k - 1]});
    }
    lyap.push_back({{"label", ly.config.label()}, {"offset", ly.offset}, {"max_increment", finite_or_null(worst)}});
  }
  return {{"verdict",
           {{"flocking", rep.flocking},
            {"x_bounded", rep.x_bounded},
            {"v_decayed", rep.v_decayed},
            {"v_initial", rep.v_initial},
            {"v_final", rep.v_final},
            {"v_ratio", rep.v_ratio},
            {"x_max", rep.x_max},
            {"x_max_final_quarter", rep.x_max_final_quarter},
            {"x_max_before", rep.x_max_before}}},
          {"fits", {{"exponential", fit_json(rep.exponential)}, {"power", fit_json(rep.power)}}},
          {"fit_horizon", rep.fit_horizon},
          {"note", rep.note},
          {"graph", {{"agents", result.spec.graph.size()}, {"depth", depth(result.spec.graph)}}},
          {"kernel_tail", tail},
          {"forcing_l1", finite_or_null(result.spec.forcing.l1_norm())},
          {"steps", result.trajectory.steps.size()},
          {"lyapunov", lyap},
          {"seed", config.seed()}};
}

RunArtifacts simulate_to_files(const RunConfig& config) {
  const auto out = config.output();
  const fs::path dir(out.dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());

  const RunResult result = run_in_memory(config);
  RunArtifacts art;
  art.trajectory = dir / (out.stem + "_trajectory.csv");
  art.diagnostics = dir / (out.stem + "_diagnostics.csv");
  art.summary = dir / (out.stem + "_summary.json");
  art.report = result.report;

  std::ostringstream traj;
  write_trajectory_csv(traj, result.spec.layout(), result.trajectory, out.every);
  write_file(art.trajectory, traj.str());
  std::ostringstream diag;
  write_diagnostics_csv(diag, result.diagnostics);
  write_file(art.diagnostics, diag.str());
  write_file(art.summary, summary_record(config, result).dump(2) + "\n");
  return art;
}

SweepOutcome run_sweep(const RunConfig& config, unsigned workers, const LogSink& log) {
  if (workers == 0) workers = 1;
  const auto points = config.expand_sweep();
  const auto base = config.output();
  const fs::path root(base.dir);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + root.string() + ": " + ec.message());

  std::vector<json> entries(points.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto say = [&](const std::string& msg) {
    if (!log) return;
    std::lock_guard lock(log_mutex);
    log(msg);
  };

  auto worker = [&] {
    for (std::size_t k = next++; k < points.size(); k = next++) {
      const auto& p = points[k];
      json entry{{"name", p.name}, {"dir", p.name}, {"params", json::object()}};
      for (const auto& [name, v] : p.params) entry["params"][name] = v;
      try {
        RunConfig run = config;
        for (const auto& [name, v] : p.params) run = run.with_parameter(name, v);
        run.set_output_dir((root / p.name).string());
        const auto art = simulate_to_files(run);
        entry["status"] = "ok";
        entry["summary"] = (fs::path(p.name) / art.summary.filename()).generic_string();
        entry["flocking"] = art.report.flocking;
        say(p.name + ": " + (art.report.flocking ? "flocking" : "no flocking"));
      } catch (const std::exception& e) {
        entry["status"] = "error";
        entry["error"] = e.what();
        say(p.name + ": " + e.what());
      }
      entries[k] = std::move(entry);
    }
  };

  std::vector<std::thread> pool;
  const unsigned n = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(points.size(), 1)));
  for (unsigned w = 0; w < n; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  SweepOutcome outcome;
  outcome.runs = points.size();
  json index{{"axes", json::array()}, {"runs", json::array()}};
  for (const auto& axis : config.sweep_axes()) index["axes"].push_back({{"param", axis.param}, {"values", axis.values}});
  for (auto& e : entries) {
    if (e["status"] != "ok") ++outcome.failed;
    index["runs"].push_back(std::move(e));
  }
  outcome.index = root / "sweep_index.json";
  write_file(outcome.index, index.dump(2) + "\n");
  return outcome;
}

SummaryTable sweep_summary(const fs::path& index_path) {
  const json index = read_json(index_path);
  const fs::path root = index_path.parent_path();
  SummaryTable table;

  std::vector<std::string> params;
  if (index.contains("axes")) {
    for (const auto& a : index["axes"]) params.push_back(a.value("param", std::string()));
  }
  std::ostringstream os;
  os << "run";
  for (const auto& p : params) os << ',' << csv_field(p);
  os << ",status,flocking,v_ratio,exp_rate,exp_residual,power_rate,power_residual\n";

  const json runs = index.value("runs", json::array());
  if (runs.empty()) table.warnings.push_back("index lists no runs");

  auto num = [&](const json& j) {
    os << ',';
    if (j.is_number()) put(os, j.get<double>());
  };
  for (const auto& run : runs) {
    const std::string name = run.value("name", std::string("?"));
    os << csv_field(name);
    for (const auto& p : params) {
      os << ',';
      if (run.contains("params") && run["params"].contains(p)) put(os, run["params"][p].get<double>());
    }
    std::string status = run.value("status", std::string("missing"));
    json summary;
    if (status == "ok") {
      const fs::path path = root / run.value("summary", std::string());
      std::error_code ec;
      if (!run.contains("summary") || !fs::exists(path, ec)) {
        status = "missing";
        table.warnings.push_back("run " + name + ": summary file missing");
      } else {
        try {
          summary = read_json(path);
        } catch (const Error& e) {
          status = "missing";
          table.warnings.push_back("run " + name + ": " + e.what());
        }
      }
    } else if (status == "error") {
      table.warnings.push_back("run " + name + " failed: " + run.value("error", std::string()));
    }
    os << ',' << status;
    if (summary.is_object()) {
      os << ',' << (summary["verdict"].value("flocking", false) ? "true" : "false");
      num(summary["verdict"]["v_ratio"]);
      for (const char* model : {"exponential", "power"}) {
        const json& fit = summary["fits"][model];
        if (fit.is_object()) {
          num(fit["rate"]);
          num(fit["residual"]);
        } else {
          os << ",,";
        }
      }
    } else {
      os << ",,,,,,";
    }
    os << '\n';
    ++table.rows;
  }
  table.csv = os.str();
  return table;
}

}  // namespace hlflock
