#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "hlflock/dde.hpp"
#include "hlflock/graph.hpp"
#include "hlflock/kernels.hpp"

namespace hlflock {

// Flat flock state: x_1 .. x_N (d entries each) followed by v_1 .. v_N.
// Agent arguments are 1-based.
struct FlockLayout {
  int agents = 1;
  int dim = 1;

  std::size_t size() const noexcept { return 2u * static_cast<std::size_t>(agents) * static_cast<std::size_t>(dim); }
  std::size_t position_offset(int agent) const noexcept {
    return static_cast<std::size_t>(agent - 1) * static_cast<std::size_t>(dim);
  }
  std::size_t velocity_offset(int agent) const noexcept {
    return static_cast<std::size_t>(agents + agent - 1) * static_cast<std::size_t>(dim);
  }
  std::span<const double> position(StateView y, int agent) const {
    return y.subspan(position_offset(agent), static_cast<std::size_t>(dim));
  }
  std::span<const double> velocity(StateView y, int agent) const {
    return y.subspan(velocity_offset(agent), static_cast<std::size_t>(dim));
  }
};

double distance(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);

// x_i(s), v_i(s) constant on [-tau, 0]. Indexed [agent-1][coordinate].
struct ConstantInitial {
  std::vector<std::vector<double>> x;
  std::vector<std::vector<double>> v;
};

// x_i(s) = x0_i + s * x_slope_i, v_i(s) = v0_i + s * v_slope_i.
struct LinearInitial {
  std::vector<std::vector<double>> x0;
  std::vector<std::vector<double>> x_slope;
  std::vector<std::vector<double>> v0;
  std::vector<std::vector<double>> v_slope;
};

// Piecewise-linear tables on a shared time list covering [-tau, 0].
// Indexed [agent-1][sample][coordinate].
struct SampledInitial {
  std::vector<double> times;
  std::vector<std::vector<std::vector<double>>> x;
  std::vector<std::vector<std::vector<double>>> v;
};

class InitialData {
 public:
  using Form = std::variant<ConstantInitial, LinearInitial, SampledInitial>;

  InitialData() = default;
  explicit InitialData(Form form) : form_(std::move(form)) {}

  const Form& form() const noexcept { return form_; }

  // Throws ConfigError when the shape disagrees with (agents, dim) or a table
  // does not cover [-tau, 0].
  void check(const FlockLayout& layout, double tau) const;

  void eval(const FlockLayout& layout, double s, StateSpan out) const;

  // max_i max_{s in [-tau,0]} |v_i(s)| (exact for constant and linear forms,
  // maximum over table rows for sampled form).
  double max_speed(const FlockLayout& layout, double tau) const;

 private:
  Form form_;
};

// Linear-in-s initial data with coordinates drawn uniformly from the given
// spreads; fully determined by the seed.
InitialData random_initial(int agents, int dim, std::uint64_t seed, double x_spread, double v_spread,
                           double slope_spread = 0.0);

struct SimSpec {
  HLGraph graph;
  Kernel kernel;
  double tau = 0.0;
  int dim = 1;
  InitialData initial;
  ForcingSpec forcing;  // drives agent 1 when non-zero
  StepperConfig stepper;

  FlockLayout layout() const noexcept { return {graph.size(), dim}; }
};

void check_spec(const SimSpec& spec);

// dx_i/dt = v_i(t)
// dv_i/dt = sum_{j in L(i)} w_ij psi(|x_i(t-tau) - x_j(t-tau)|) (v_j(t-tau) - v_i(t))
// with dv_1/dt = f(t) under a free-will leader.
void flock_rhs(const SimSpec& spec, double t, StateView now, StateView delayed, StateSpan dy);

HistoryBuffer seed_flock_history(const SimSpec& spec);

Trajectory simulate_flock(const SimSpec& spec, std::span<const StepObserver> observers = {});

// Scalar companion system driven by coefficients recorded from a flock run:
// d eta_i/dt = sum_{j in L(i)} a_ij(t - tau) (eta_j(t - tau) - eta_i(t)).
class ScalarSystem {
 public:
  ScalarSystem(const SimSpec& spec, const Trajectory& flock);

  // Throws HistoryExhausted when the flock run does not cover t - tau.
  void rhs(double t, StateView now, StateView delayed, StateSpan d_eta) const;

  // Integrates eta from the given history up to t_end (<= flock coverage).
  Trajectory solve(const InitialFunction& eta_initial, double t_end, Scheme scheme = Scheme::Rk4) const;

 private:
  const SimSpec& spec_;
  const Trajectory& flock_;
  FlockLayout layout_;
  mutable std::vector<double> positions_;
};

void scalar_rhs(const SimSpec& spec, const Trajectory& flock, double t, StateView now, StateView delayed,
                StateSpan d_eta);

}  // namespace hlflock
