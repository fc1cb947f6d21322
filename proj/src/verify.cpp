#include "hlflock/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "hlflock/config.hpp"
#include "hlflock/diagnostics.hpp"
#include "hlflock/error.hpp"
#include "hlflock/flock.hpp"
#include "hlflock/run.hpp"

namespace hlflock {

namespace fs = std::filesystem;

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

// Folds the time budget into the verdict.
CheckResult finish(CheckResult r, const Stopwatch& clock) {
  r.seconds = clock.seconds();
  if (r.limit > 0.0 && r.seconds >= r.limit) {
    r.passed = false;
    r.detail += "; over time budget (" + fmt(r.seconds, 3) + " s >= " + fmt(r.limit, 3) + " s)";
  }
  return r;
}

template <class Body>
CheckResult guarded(std::string name, double limit, Body&& body) {
  Stopwatch clock;
  CheckResult r;
  r.name = std::move(name);
  r.limit = limit;
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("error: ") + e.what();
  }
  return finish(std::move(r), clock);
}

constexpr const char* kAnalytic = R"({
  // two agents, constant kernel: |v2 - v1| = exp(-t) exactly
  "dim": 1, "tau": 0.5,
  "graph": {"chain": 2},
  "kernel": {"form": "cucker-smale", "H": 1, "sigma": 1, "beta": 0},
  "initial": {"form": "constant", "x": [[0], [1]], "v": [[0], [1]]},
  "stepper": {"h": 0.01, "scheme": "rk4", "t_end": 20},
  "output": {"stem": "analytic"}
})";

constexpr const char* kChain5 = R"({
  "dim": 1, "tau": 0.5, "seed": 7,
  "graph": {"chain": 5},
  "kernel": {"form": "cucker-smale", "H": 1, "sigma": 1, "beta": 0.25},
  "initial": {"form": "constant",
              "x": [[0], [2], [-1], [3], [1]],
              "v": [[1], [-1], [0.5], [-0.5], [2]]},
  "stepper": {"h": 0.01, "scheme": "rk4", "t_end": 60},
  "diagnostics": {"lyapunov": [{"pair": [1, 2]}]},
  "output": {"stem": "chain5"}
})";

constexpr const char* kFreeWill = R"({
  "dim": 1, "tau": 0.5,
  "graph": {"chain": 3},
  "kernel": {"form": "cucker-smale", "H": 1, "sigma": 1, "beta": 0.25},
  "forcing": {"form": "power-decay", "amplitude": 1, "mu": 3},
  "initial": {"form": "constant", "x": [[0], [1], [2]], "v": [[1], [0], [-1]]},
  "stepper": {"h": 0.01, "scheme": "rk4", "t_end": 200},
  "diagnostics": {"cross": false},
  "output": {"stem": "freewill"}
})";

constexpr const char* kDiamond = R"({
  "dim": 1, "tau": 0.5,
  "graph": {"n_agents": 4, "leaders": [
    {"agent": 2, "leaders": [1]},
    {"agent": 3, "leaders": [1]},
    {"agent": 4, "leaders": [2, 3]}]},
  "kernel": {"form": "cucker-smale", "H": 1, "sigma": 1, "beta": 0.25},
  "initial": {"form": "constant", "x": [[0], [1.5], [-1], [2.5]], "v": [[1], [-1], [0.5], [-0.5]]},
  "stepper": {"h": 0.01, "scheme": "rk4", "t_end": 60},
  "diagnostics": {"cross": false},
  "sweep": {"axes": [{"param": "tau", "values": [0, 0.25, 0.5, 1.0, 2.0]}]},
  "output": {"stem": "diamond"}
})";

// Scalar delayed test problem y' = a (y(t - tau) - y(t)) with smooth history.
// Solution of y' = a (y(t - tau) - y(t)) sampled every `stride` steps of h.
std::vector<double> scalar_test_solution(double h, Scheme scheme, std::int64_t stride) {
  constexpr double a = 20.0;
  constexpr double tau = 1.0;
  auto history = seed_history([](double s, StateSpan out) { out[0] = std::cos(s) + 0.5 * std::sin(2.0 * s); }, 1,
                              tau, h);
  StepperConfig cfg;
  cfg.h = h;
  cfg.scheme = scheme;
  cfg.t_end = 5.0;
  cfg.keep_full_history = false;
  std::vector<double> samples;
  std::int64_t step = 0;
  const StepObserver keep[] = {[&](double, StateView y) {
    if (++step % stride == 0) samples.push_back(y[0]);
  }};
  integrate([](double, StateView y, StateView yd, StateSpan dy) { dy[0] = a * (yd[0] - y[0]); }, std::move(history),
            cfg, keep);
  return samples;
}

// Shared graph and kernel sampling for the positivity and hull checks.
template <class Visit>
void for_each_random_case(int dim, Visit&& visit) {
  int index = 0;
  for (int g = 0; g < 100; ++g) {
    Rng rng(1000u + static_cast<std::uint64_t>(g));
    const int n = rng.integer(2, 6);
    const HLGraph graph = random_hl_graph(n, rng);
    for (double beta : {0.0, 0.25, 0.5}) {
      for (double tau : {0.25, 1.0}) {
        SimSpec spec;
        spec.graph = graph;
        spec.kernel = Kernel(CuckerSmaleKernel{1.0, 1.0, beta});
        spec.tau = tau;
        spec.dim = dim;
        spec.initial = random_initial(n, dim, 5000u + static_cast<std::uint64_t>(index), 2.0, 1.0, 0.5);
        spec.stepper.h = 0.01;
        spec.stepper.t_end = 10.0;
        visit(spec, rng, index);
        ++index;
      }
    }
  }
}

}  // namespace

HLGraph random_hl_graph(int agents, Rng& rng, double edge_probability) {
  std::vector<std::vector<int>> leaders(static_cast<std::size_t>(agents));
  for (int i = 2; i <= agents; ++i) {
    auto& li = leaders[static_cast<std::size_t>(i - 1)];
    for (int j = 1; j < i; ++j) {
      if (rng.coin(edge_probability)) li.push_back(j);
    }
    if (li.empty()) li.push_back(rng.integer(1, i - 1));
  }
  return HLGraph(agents, std::move(leaders));
}

std::string reference_config(int criterion) {
  switch (criterion) {
    case 1: return kAnalytic;
    case 4:
    case 5:
    case 9: return kChain5;
    case 6: return kFreeWill;
    case 7: return kDiamond;
    default: throw Error(ErrorCode::InvalidArgument, "no reference config for criterion " + std::to_string(criterion));
  }
}

CheckResult check_analytic_rate() {
  return guarded("analytic rate, constant kernel", 1.0, [](CheckResult& r) {
    const auto cfg = RunConfig::parse(kAnalytic);
    const auto run = run_in_memory(cfg);
    double worst = 0.0;
    const auto& d = run.diagnostics;
    for (std::size_t k = 0; k < d.times.size(); ++k) {
      const double exact = std::exp(-d.times[k]);
      worst = std::max(worst, std::abs(d.V[k] - exact) / exact);
    }
    const auto fit = fit_decay(d.times, d.V, DecayModel::Exponential, d.times.front(), d.times.back());
    const double rate_err = std::abs(fit.rate - 1.0);
    r.passed = worst < 1e-6 && rate_err < 0.01;
    r.detail = "max rel err " + fmt(worst) + " (< 1e-6), fitted B " + fmt(fit.rate, 8) + " (|B-1| < 0.01)";
  });
}

CheckResult check_positivity() {
  return guarded("positivity of the scalar companion system", 30.0, [](CheckResult& r) {
    double lowest = std::numeric_limits<double>::infinity();
    int runs = 0;
    for_each_random_case(1, [&](const SimSpec& spec, Rng& rng, int) {
      const int n = spec.graph.size();
      std::vector<double> c(static_cast<std::size_t>(n));
      std::vector<double> b(c.size());
      std::vector<double> w(c.size());
      for (std::size_t i = 0; i < c.size(); ++i) {
        // some agents start exactly on the boundary eta = 0
        const bool zero = rng.coin(0.2);
        c[i] = zero ? 0.0 : rng.uniform(0.0, 1.0);
        b[i] = zero ? 0.0 : rng.uniform(0.0, 1.0);
        w[i] = rng.uniform(0.5, 4.0);
      }
      const Trajectory flock = simulate_flock(spec);
      const ScalarSystem scalar(spec, flock);
      const auto eta = scalar.solve(
          [&](double s, StateSpan out) {
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = c[i] + b[i] * (1.0 + std::sin(w[i] * s));
          },
          spec.stepper.t_end);
      for (std::size_t k = 0; k < eta.size(); ++k) {
        for (double v : eta.state(k)) lowest = std::min(lowest, v);
      }
      ++runs;
    });
    r.passed = lowest >= -1e-9;
    r.detail = std::to_string(runs) + " runs, min eta " + fmt(lowest, 6) + " (>= -1e-9)";
  });
}

CheckResult check_hull() {
  return guarded("velocity hull bound", 30.0, [](CheckResult& r) {
    double worst = 0.0;  // max over runs of max|v_i| / D0 - 1
    int runs = 0;
    for (int dim = 1; dim <= 3; ++dim) {
      for_each_random_case(dim, [&](const SimSpec& spec, Rng&, int) {
        const FlockLayout layout = spec.layout();
        const double d0 = spec.initial.max_speed(layout, spec.tau);
        const Trajectory traj = simulate_flock(spec);
        double top = 0.0;
        for (std::size_t k = 0; k < traj.size(); ++k) {
          for (int i = 1; i <= layout.agents; ++i) top = std::max(top, norm(layout.velocity(traj.state(k), i)));
        }
        worst = std::max(worst, d0 > 0.0 ? top / d0 - 1.0 : (top > 0.0 ? 1.0 : 0.0));
        ++runs;
      });
    }
    r.passed = worst <= 1e-9;
    r.detail = std::to_string(runs) + " runs, max excess max|v|/D0 - 1 = " + fmt(worst) + " (<= 1e-9)";
  });
}

CheckResult check_exponential_flocking() {
  return guarded("exponential flocking, divergent tail", 10.0, [](CheckResult& r) {
    const auto run = run_in_memory(RunConfig::parse(kChain5));
    const auto& rep = run.report;
    const bool a = rep.v_ratio <= 1e-3;
    const bool b = rep.exponential && rep.exponential->rate > 0.0 && rep.exponential->residual < 0.5;
    const bool c = rep.x_bounded;

    const auto& cross = *run.diagnostics.cross;
    const std::size_t last = cross.times.size() - 1;
    double cross_ratio = 0.0;
    for (int i = 1; i <= cross.agents; ++i) {
      for (int j = 1; j <= cross.agents; ++j) {
        double peak = 0.0;
        for (std::size_t k = 0; k < cross.times.size(); ++k) peak = std::max(peak, cross.at(k, i, j));
        const double end = cross.at(last, i, j);
        cross_ratio = std::max(cross_ratio, peak > 0.0 ? end / peak : (end > 0.0 ? 1.0 : 0.0));
      }
    }
    const bool d = cross_ratio <= 1e-3;
    r.passed = a && b && c && d;
    r.detail = "V ratio " + fmt(rep.v_ratio) + "; B " + (rep.exponential ? fmt(rep.exponential->rate) : "n/a") +
               " residual " + (rep.exponential ? fmt(rep.exponential->residual) : "n/a") + "; X bounded " +
               (c ? "yes" : "no") + "; cross end/max " + fmt(cross_ratio);
  });
}

CheckResult check_lyapunov_monotone() {
  return guarded("pair Lyapunov functional non-increasing", 10.0, [](CheckResult& r) {
    const auto run = run_in_memory(RunConfig::parse(kChain5));
    const auto& ly = run.diagnostics.lyapunov.at(0);
    const double start = 2.0 * run.spec.tau;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < ly.times.size(); ++k) {
      if (ly.times[k - 1] < start - 1e-12) continue;
      worst = std::max({worst, ly.plus[k] - ly.plus[k - 1], ly.minus[k] - ly.minus[k - 1]});
    }
    r.passed = worst <= 1e-8;
    r.detail = "pair (1,2), max increment of L+ and L- for t >= 2 tau: " + fmt(worst) + " (<= 1e-8)";
  });
}

CheckResult check_free_will() {
  return guarded("free-will leader, power-decay forcing", 10.0, [](CheckResult& r) {
    const auto run = run_in_memory(RunConfig::parse(kFreeWill));
    const FlockLayout layout = run.spec.layout();
    const auto& traj = run.trajectory;
    const double v1 = norm(layout.velocity(traj.state(traj.zero_index()), 1));
    const double bound = v1 + run.spec.forcing.l1_norm();
    double leader = 0.0;
    for (std::size_t k = traj.zero_index(); k < traj.size(); ++k) {
      leader = std::max(leader, norm(layout.velocity(traj.state(k), 1)));
    }
    const bool a = leader <= bound + 1e-9;

    const int gamma = depth(run.spec.graph);
    const auto& pd = std::get<PowerDecayForcing>(run.spec.forcing.form());
    const double exponent = pd.mu - gamma + 1.0;
    const auto& d = run.diagnostics;
    const double mid = 0.5 * (d.times.front() + d.times.back());
    double first = 0.0;
    double second = 0.0;
    for (std::size_t k = 0; k < d.times.size(); ++k) {
      double& half = d.times[k] < mid ? first : second;
      half = std::max(half, d.V[k] * std::pow(1.0 + d.times[k], exponent));
    }
    const bool b = second <= first;
    r.passed = a && b;
    r.detail = "leader max speed " + fmt(leader, 10) + " (<= " + fmt(bound, 10) + "); V (1+t)^" + fmt(exponent) +
               " max first half " + fmt(first) + ", second half " + fmt(second);
  });
}

CheckResult check_delay_robustness() {
  return guarded("flocking at every delay", 20.0, [](CheckResult& r) {
    const auto base = RunConfig::parse(kDiamond);
    bool all = true;
    std::string detail;
    for (const auto& point : base.expand_sweep()) {
      RunConfig cfg = base;
      for (const auto& [name, v] : point.params) cfg = cfg.with_parameter(name, v);
      const auto run = run_in_memory(cfg);
      all = all && run.report.flocking;
      if (!detail.empty()) detail += ", ";
      detail += "tau=" + format_short(run.spec.tau) + (run.report.flocking ? " yes" : " NO") + " (V ratio " +
                fmt(run.report.v_ratio, 2) + ")";
    }
    r.passed = all;
    r.detail = detail;
  });
}

CheckResult check_integrator_order() {
  return guarded("integrator order against fine Euler oracle", 60.0, [](CheckResult& r) {
    std::vector<double> errors;
    for (double h : {0.1, 0.05, 0.025}) {
      const auto coarse = scalar_test_solution(h, Scheme::Rk4, 1);
      const auto oracle = scalar_test_solution(h / 1000.0, Scheme::ExplicitEuler, 1000);
      if (coarse.size() != oracle.size()) throw Error(ErrorCode::InvalidArgument, "oracle grid does not match");
      double worst = 0.0;
      for (std::size_t k = 0; k < coarse.size(); ++k) worst = std::max(worst, std::abs(coarse[k] - oracle[k]));
      errors.push_back(worst);
    }
    const double r1 = errors[0] / errors[1];
    const double r2 = errors[1] / errors[2];
    r.passed = r1 >= 4.0 && r2 >= 4.0;
    r.detail = "errors " + fmt(errors[0]) + ", " + fmt(errors[1]) + ", " + fmt(errors[2]) + "; ratios " + fmt(r1) +
               ", " + fmt(r2) + " (>= 4)";
  });
}

CheckResult check_determinism(const fs::path& scratch) {
  return guarded("bitwise determinism of trajectory output", 30.0, [&](CheckResult& r) {
    std::string first;
    std::string second;
    if (scratch.empty()) {
      for (std::string* out : {&first, &second}) {
        const auto run = run_in_memory(RunConfig::parse(kChain5));
        std::ostringstream os;
        write_trajectory_csv(os, run.spec.layout(), run.trajectory, 1);
        *out = os.str();
      }
    } else {
      int k = 0;
      for (std::string* out : {&first, &second}) {
        auto cfg = RunConfig::parse(kChain5);
        cfg.set_output_dir((scratch / ("run" + std::to_string(k++))).string());
        const auto art = simulate_to_files(cfg);
        std::ifstream in(art.trajectory, std::ios::binary);
        *out = std::string(std::istreambuf_iterator<char>(in), {});
      }
    }
    r.passed = !first.empty() && first == second;
    r.detail = std::to_string(first.size()) + " bytes, " + (first == second ? "identical" : "DIFFERENT");
  });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"positivity", "hull", "flocking", "freewill", "convergence", "all"};
  return names;
}

std::vector<CheckResult> run_suite(std::string_view suite, const CheckSink& sink) {
  using Check = CheckResult (*)();
  std::vector<Check> checks;
  const bool all = suite == "all";
  if (all || suite == "positivity") checks.push_back(&check_positivity);
  if (all || suite == "hull") checks.push_back(&check_hull);
  if (all || suite == "flocking") {
    checks.push_back(&check_analytic_rate);
    checks.push_back(&check_exponential_flocking);
    checks.push_back(&check_lyapunov_monotone);
    checks.push_back(&check_delay_robustness);
    checks.push_back([] { return check_determinism(); });
  }
  if (all || suite == "freewill") checks.push_back(&check_free_will);
  if (all || suite == "convergence") checks.push_back(&check_integrator_order);
  if (checks.empty()) {
    throw Error(ErrorCode::InvalidArgument,
                "unknown suite '" + std::string(suite) + "' (positivity, hull, flocking, freewill, convergence, all)");
  }
  std::vector<CheckResult> results;
  for (auto check : checks) {
    results.push_back(check());
    if (sink) sink(results.back());
  }
  return results;
}

}  // namespace hlflock
