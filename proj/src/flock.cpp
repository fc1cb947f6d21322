#include "hlflock/flock.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "hlflock/error.hpp"
#include "hlflock/rng.hpp"

namespace hlflock {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_rows(const std::vector<std::vector<double>>& rows, const FlockLayout& layout, const char* what) {
  if (rows.size() != static_cast<std::size_t>(layout.agents)) {
    std::ostringstream os;
    os << what << ": expected " << layout.agents << " agents, got " << rows.size();
    throw Error(ErrorCode::ConfigError, os.str());
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != static_cast<std::size_t>(layout.dim)) {
      std::ostringstream os;
      os << what << ": agent " << i + 1 << " has " << rows[i].size() << " coordinates, expected " << layout.dim;
      throw Error(ErrorCode::ConfigError, os.str());
    }
  }
}

// Locate s in a sorted table; returns (lo, weight of hi).
std::pair<std::size_t, double> bracket(const std::vector<double>& times, double s) {
  if (times.size() == 1 || s <= times.front()) return {0, 0.0};
  if (s >= times.back()) return {times.size() - 1, 0.0};
  const auto hi = static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), s) - times.begin());
  const std::size_t lo = hi - 1;
  return {lo, (s - times[lo]) / (times[hi] - times[lo])};
}

}  // namespace

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return std::sqrt(s);
}

double norm(std::span<const double> a) {
  double s = 0.0;
  for (double c : a) s += c * c;
  return std::sqrt(s);
}

void InitialData::check(const FlockLayout& layout, double tau) const {
  std::visit(Overloaded{
                 [&](const ConstantInitial& c) {
                   check_rows(c.x, layout, "initial.x");
                   check_rows(c.v, layout, "initial.v");
                 },
                 [&](const LinearInitial& l) {
                   check_rows(l.x0, layout, "initial.x0");
                   check_rows(l.x_slope, layout, "initial.x_slope");
                   check_rows(l.v0, layout, "initial.v0");
                   check_rows(l.v_slope, layout, "initial.v_slope");
                 },
                 [&](const SampledInitial& s) {
                   if (s.times.empty()) throw Error(ErrorCode::ConfigError, "sampled initial data needs times");
                   for (std::size_t k = 1; k < s.times.size(); ++k) {
                     if (!(s.times[k] > s.times[k - 1])) {
                       throw Error(ErrorCode::ConfigError, "sampled initial times must be strictly increasing");
                     }
                   }
                   if (s.times.front() > -tau + 1e-12 || std::abs(s.times.back()) > 1e-12) {
                     throw Error(ErrorCode::ConfigError, "sampled initial times must cover [-tau, 0] and end at 0");
                   }
                   if (s.x.size() != static_cast<std::size_t>(layout.agents) ||
                       s.v.size() != static_cast<std::size_t>(layout.agents)) {
                     throw Error(ErrorCode::ConfigError, "sampled initial data: agent count mismatch");
                   }
                   for (int i = 0; i < layout.agents; ++i) {
                     const auto ii = static_cast<std::size_t>(i);
                     if (s.x[ii].size() != s.times.size() || s.v[ii].size() != s.times.size()) {
                       throw Error(ErrorCode::ConfigError, "sampled initial data: sample count mismatch");
                     }
                     check_rows(s.x[ii], {static_cast<int>(s.times.size()), layout.dim}, "initial.x samples");
                     check_rows(s.v[ii], {static_cast<int>(s.times.size()), layout.dim}, "initial.v samples");
                   }
                 },
             },
             form_);
}

void InitialData::eval(const FlockLayout& layout, double s, StateSpan out) const {
  const auto d = static_cast<std::size_t>(layout.dim);
  std::visit(Overloaded{
                 [&](const ConstantInitial& c) {
                   for (int i = 1; i <= layout.agents; ++i) {
                     const auto ii = static_cast<std::size_t>(i - 1);
                     for (std::size_t k = 0; k < d; ++k) {
                       out[layout.position_offset(i) + k] = c.x[ii][k];
                       out[layout.velocity_offset(i) + k] = c.v[ii][k];
                     }
                   }
                 },
                 [&](const LinearInitial& l) {
                   for (int i = 1; i <= layout.agents; ++i) {
                     const auto ii = static_cast<std::size_t>(i - 1);
                     for (std::size_t k = 0; k < d; ++k) {
                       out[layout.position_offset(i) + k] = l.x0[ii][k] + s * l.x_slope[ii][k];
                       out[layout.velocity_offset(i) + k] = l.v0[ii][k] + s * l.v_slope[ii][k];
                     }
                   }
                 },
                 [&](const SampledInitial& smp) {
                   const auto [lo, w] = bracket(smp.times, s);
                   const std::size_t hi = std::min(lo + 1, smp.times.size() - 1);
                   for (int i = 1; i <= layout.agents; ++i) {
                     const auto ii = static_cast<std::size_t>(i - 1);
                     for (std::size_t k = 0; k < d; ++k) {
                       out[layout.position_offset(i) + k] =
                           smp.x[ii][lo][k] + w * (smp.x[ii][hi][k] - smp.x[ii][lo][k]);
                       out[layout.velocity_offset(i) + k] =
                           smp.v[ii][lo][k] + w * (smp.v[ii][hi][k] - smp.v[ii][lo][k]);
                     }
                   }
                 },
             },
             form_);
}

double InitialData::max_speed(const FlockLayout& layout, double tau) const {
  double best = 0.0;
  if (const auto* smp = std::get_if<SampledInitial>(&form_)) {
    for (const auto& agent : smp->v) {
      for (const auto& row : agent) best = std::max(best, norm(row));
    }
    return best;
  }
  // Speed of an affine velocity is convex in s, so the endpoints suffice.
  std::vector<double> y(layout.size());
  for (double s : {-tau, 0.0}) {
    eval(layout, s, y);
    for (int i = 1; i <= layout.agents; ++i) best = std::max(best, norm(layout.velocity(y, i)));
  }
  return best;
}

InitialData random_initial(int agents, int dim, std::uint64_t seed, double x_spread, double v_spread,
                           double slope_spread) {
  Rng rng(seed);
  auto rows = [&](double spread) {
    std::vector<std::vector<double>> out(static_cast<std::size_t>(agents),
                                         std::vector<double>(static_cast<std::size_t>(dim)));
    for (auto& r : out) {
      for (double& c : r) c = rng.uniform(-spread, spread);
    }
    return out;
  };
  LinearInitial lin;
  lin.x0 = rows(x_spread);
  lin.v0 = rows(v_spread);
  lin.x_slope = rows(slope_spread);
  lin.v_slope = rows(slope_spread);
  return InitialData(std::move(lin));
}

void check_spec(const SimSpec& spec) {
  require_valid(spec.graph);
  if (spec.dim < 1) throw Error(ErrorCode::ConfigError, "dim must be >= 1");
  if (!(spec.tau >= 0.0)) throw Error(ErrorCode::ConfigError, "tau must be nonnegative");
  if (!(spec.stepper.t_end > 0.0)) throw Error(ErrorCode::EmptyHorizon, "t_end must be positive");
  delay_steps(spec.tau, spec.stepper.h);
  spec.initial.check(spec.layout(), spec.tau);
  if (const auto* pd = std::get_if<PowerDecayForcing>(&spec.forcing.form())) {
    if (!pd->direction.empty() && pd->direction.size() != static_cast<std::size_t>(spec.dim)) {
      throw Error(ErrorCode::ConfigError, "forcing direction must have dim entries");
    }
  }
  if (const auto* tab = std::get_if<TabulatedForcing>(&spec.forcing.form())) {
    if (tab->samples.front().size() != static_cast<std::size_t>(spec.dim)) {
      throw Error(ErrorCode::ConfigError, "forcing samples must have dim entries");
    }
  }
  for (int i = 1; i <= spec.graph.size(); ++i) {
    if (spec.graph.weights(i).size() != spec.graph.leaders(i).size()) {
      throw Error(ErrorCode::ConfigError, "edge weights do not match leader sets");
    }
  }
}

void flock_rhs(const SimSpec& spec, double t, StateView now, StateView delayed, StateSpan dy) {
  const FlockLayout layout = spec.layout();
  if (now.size() != layout.size() || delayed.size() != layout.size() || dy.size() != layout.size()) {
    throw Error(ErrorCode::InvalidArgument, "flock state size mismatch");
  }
  const auto d = static_cast<std::size_t>(layout.dim);
  const std::size_t vel0 = layout.velocity_offset(1);
  std::copy(now.begin() + static_cast<std::ptrdiff_t>(vel0), now.end(), dy.begin());
  std::fill(dy.begin() + static_cast<std::ptrdiff_t>(vel0), dy.end(), 0.0);

  for (int i = 1; i <= layout.agents; ++i) {
    StateSpan acc = dy.subspan(layout.velocity_offset(i), d);
    if (i == 1 && !spec.forcing.is_zero()) {
      spec.forcing.eval(t, acc);
      continue;
    }
    const auto xi = layout.position(delayed, i);
    const auto vi = layout.velocity(now, i);
    const auto leaders = spec.graph.leaders(i);
    const auto weights = spec.graph.weights(i);
    for (std::size_t e = 0; e < leaders.size(); ++e) {
      const int j = leaders[e];
      const double a = weights[e] * spec.kernel(distance(xi, layout.position(delayed, j)));
      const auto vj = layout.velocity(delayed, j);
      for (std::size_t k = 0; k < d; ++k) acc[k] += a * (vj[k] - vi[k]);
    }
  }
}

HistoryBuffer seed_flock_history(const SimSpec& spec) {
  const FlockLayout layout = spec.layout();
  const InitialData& initial = spec.initial;
  return seed_history([&](double s, StateSpan out) { initial.eval(layout, s, out); }, layout.size(), spec.tau,
                      spec.stepper.h);
}

Trajectory simulate_flock(const SimSpec& spec, std::span<const StepObserver> observers) {
  check_spec(spec);
  auto history = seed_flock_history(spec);
  return integrate([&spec](double t, StateView now, StateView delayed,
                           StateSpan dy) { flock_rhs(spec, t, now, delayed, dy); },
                   std::move(history), spec.stepper, observers);
}

ScalarSystem::ScalarSystem(const SimSpec& spec, const Trajectory& flock)
    : spec_(spec), flock_(flock), layout_(spec.layout()), positions_(layout_.size()) {
  require_valid(spec.graph);
  if (flock.record.dim() != layout_.size()) throw Error(ErrorCode::InvalidArgument, "flock trajectory size mismatch");
}

void ScalarSystem::rhs(double t, StateView now, StateView delayed, StateSpan d_eta) const {
  const double tq = t - spec_.tau;
  try {
    flock_.record.query(tq, positions_);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::OutOfWindow) throw;
    std::ostringstream os;
    os << "flock positions unavailable at t - tau = " << tq;
    throw Error(ErrorCode::HistoryExhausted, os.str());
  }
  for (int i = 1; i <= layout_.agents; ++i) {
    const auto ii = static_cast<std::size_t>(i - 1);
    const auto xi = layout_.position(positions_, i);
    const auto leaders = spec_.graph.leaders(i);
    const auto weights = spec_.graph.weights(i);
    double acc = 0.0;
    for (std::size_t e = 0; e < leaders.size(); ++e) {
      const int j = leaders[e];
      const double a = weights[e] * spec_.kernel(distance(xi, layout_.position(positions_, j)));
      acc += a * (delayed[static_cast<std::size_t>(j - 1)] - now[ii]);
    }
    d_eta[ii] = acc;
  }
}

Trajectory ScalarSystem::solve(const InitialFunction& eta_initial, double t_end, Scheme scheme) const {
  StepperConfig cfg;
  cfg.h = flock_.h();
  cfg.scheme = scheme;
  cfg.t_end = t_end;
  auto history = seed_history(eta_initial, static_cast<std::size_t>(layout_.agents), spec_.tau, cfg.h);
  return integrate([this](double t, StateView now, StateView delayed, StateSpan d) { rhs(t, now, delayed, d); },
                   std::move(history), cfg);
}

void scalar_rhs(const SimSpec& spec, const Trajectory& flock, double t, StateView now, StateView delayed,
                StateSpan d_eta) {
  ScalarSystem(spec, flock).rhs(t, now, delayed, d_eta);
}

}  // namespace hlflock
