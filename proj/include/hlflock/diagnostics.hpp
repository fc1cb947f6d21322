#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hlflock/dde.hpp"
#include "hlflock/flock.hpp"
#include "hlflock/kernels.hpp"

namespace hlflock {

struct Diameters {
  double X = 0.0;  // max_{i,j} |x_i - x_j|
  double V = 0.0;  // max_{i,j} |v_i - v_j|
};

Diameters diameters(const FlockLayout& layout, StateView state);

// |v_i(t - tau) - v_j(t)| for every ordered pair, row-major [i-1][j-1], at
// every recorded grid time t >= 0 (taking every `stride`-th step).
struct CrossSeries {
  int agents = 0;
  std::vector<double> times;
  std::vector<double> values;  // times.size() * agents * agents

  double at(std::size_t k, int i, int j) const {
    return values[(k * static_cast<std::size_t>(agents) + static_cast<std::size_t>(i - 1)) *
                      static_cast<std::size_t>(agents) +
                  static_cast<std::size_t>(j - 1)];
  }
};

CrossSeries cross_differences(const Trajectory& traj, const FlockLayout& layout, std::size_t stride = 1);

// Deviation of agent l from the mean of its direct leaders:
// v^l = v_l - mean_{j in L(l)} v_j, x^l likewise. Agent 1 reports 0.
struct LeaderDeviation {
  std::vector<double> speed;     // |v^l| per agent
  std::vector<double> position;  // |x^l| per agent
};

LeaderDeviation leader_deviation(const HLGraph& graph, const FlockLayout& layout, StateView state);

struct LyapunovConfig {
  enum class Kind { Pair, Level };
  Kind kind = Kind::Pair;
  int leader = 1;    // Pair: reference agent
  int follower = 2;  // Pair: second agent; Level: the agent l
  std::optional<double> level_bound;  // Level: M_l override; empirical when unset

  std::string label() const;
};

// Pair:  L_pm(t) = |v_b - v_a|(t) pm Phi(|x_b - x_a|(t) + |v_b - v_a|(tau) * tau)
// Level: L_pm(t) = |v^l|(t) pm d_l Phi(|x^l|(t) + tau * D0 + M_l), with
//        D0 = 2 max_i max_{s in [-tau,0]} |v_i(s)| over agents 1..l.
struct LyapunovSeries {
  LyapunovConfig config;
  double offset = 0.0;
  double multiplier = 1.0;
  std::vector<double> times;
  std::vector<double> plus;
  std::vector<double> minus;
};

LyapunovSeries lyapunov_pair(const Trajectory& traj, const SimSpec& spec, const KernelPrimitive& primitive,
                             const LyapunovConfig& config, std::size_t stride = 1);

enum class DecayModel { Exponential, Power };

const char* decay_model_name(DecayModel model) noexcept;

// Exponential: V ~ C e^{-rate t}; Power: V ~ C (1 + t)^{-rate}.
struct DecayFit {
  DecayModel model = DecayModel::Exponential;
  double t_lo = 0.0;
  double t_hi = 0.0;
  double C = 0.0;
  double rate = 0.0;
  double residual = 0.0;  // max |log V - log fit| over the window
  std::size_t samples = 0;
};

// Least squares in the log domain over samples with t in [t_lo, t_hi].
// Throws InsufficientData (< 10 samples) or NonPositiveSamples.
DecayFit fit_decay(std::span<const double> times, std::span<const double> values, DecayModel model, double t_lo,
                   double t_hi);

struct DiagnosticsOptions {
  std::size_t stride = 1;
  bool cross = true;
  bool leader_deviation = true;
  std::vector<LyapunovConfig> lyapunov;
  KernelPrimitive primitive;
};

struct DiagnosticsSeries {
  int agents = 0;
  std::vector<double> times;
  std::vector<double> X;
  std::vector<double> V;
  std::optional<CrossSeries> cross;
  std::vector<LeaderDeviation> deviation;  // per time
  std::vector<LyapunovSeries> lyapunov;
};

DiagnosticsSeries compute_diagnostics(const SimSpec& spec, const Trajectory& traj, const DiagnosticsOptions& options);

struct VerdictThresholds {
  double v_ratio = 1e-3;       // V(t_end) / V(0) must fall below this
  double x_growth = 1e-2;      // allowed relative rise of X in the final quarter
  double fit_fraction = 0.5;   // fit window = final fraction of the horizon
  // V / V(0) below this counts as rounding noise; the fitted horizon stops
  // at the first such sample.
  double resolution = 1e-12;
};

struct FlockingReport {
  bool flocking = false;
  bool x_bounded = false;
  bool v_decayed = false;
  double v_initial = 0.0;
  double v_final = 0.0;
  double v_ratio = 0.0;
  double x_max = 0.0;
  double x_max_final_quarter = 0.0;
  double x_max_before = 0.0;
  std::optional<DecayFit> exponential;
  std::optional<DecayFit> power;
  double fit_horizon = 0.0;  // end of the resolved part of the run
  std::string note;
};

// X is called bounded when its maximum over the final quarter of the run
// exceeds the maximum over the first three quarters by no more than
// x_growth * max(1, max X).
FlockingReport flocking_verdict(const DiagnosticsSeries& diag, const VerdictThresholds& thresholds = {});

}  // namespace hlflock
