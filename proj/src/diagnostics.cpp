#include "hlflock/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hlflock/error.hpp"

namespace hlflock {

Diameters diameters(const FlockLayout& layout, StateView state) {
  Diameters out;
  for (int i = 1; i <= layout.agents; ++i) {
    for (int j = i + 1; j <= layout.agents; ++j) {
      out.X = std::max(out.X, distance(layout.position(state, i), layout.position(state, j)));
      out.V = std::max(out.V, distance(layout.velocity(state, i), layout.velocity(state, j)));
    }
  }
  return out;
}

CrossSeries cross_differences(const Trajectory& traj, const FlockLayout& layout, std::size_t stride) {
  if (stride == 0) stride = 1;
  CrossSeries out;
  out.agents = layout.agents;
  const std::size_t m = static_cast<std::size_t>(traj.record.delay_steps());
  for (std::size_t k = traj.zero_index(); k < traj.size(); k += stride) {
    // t - tau is the grid point m steps back, always recorded for t >= 0.
    const auto now = traj.state(k);
    const auto past = traj.state(k - m);
    out.times.push_back(traj.time(k));
    for (int i = 1; i <= layout.agents; ++i) {
      for (int j = 1; j <= layout.agents; ++j) {
        out.values.push_back(distance(layout.velocity(past, i), layout.velocity(now, j)));
      }
    }
  }
  return out;
}

LeaderDeviation leader_deviation(const HLGraph& graph, const FlockLayout& layout, StateView state) {
  const auto n = static_cast<std::size_t>(layout.agents);
  const auto d = static_cast<std::size_t>(layout.dim);
  LeaderDeviation out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  std::vector<double> xhat(d);
  std::vector<double> vhat(d);
  for (int l = 2; l <= layout.agents; ++l) {
    const auto leaders = graph.leaders(l);
    if (leaders.empty()) continue;
    std::fill(xhat.begin(), xhat.end(), 0.0);
    std::fill(vhat.begin(), vhat.end(), 0.0);
    for (int j : leaders) {
      const auto xj = layout.position(state, j);
      const auto vj = layout.velocity(state, j);
      for (std::size_t k = 0; k < d; ++k) {
        xhat[k] += xj[k];
        vhat[k] += vj[k];
      }
    }
    const double inv = 1.0 / static_cast<double>(leaders.size());
    for (std::size_t k = 0; k < d; ++k) {
      xhat[k] *= inv;
      vhat[k] *= inv;
    }
    out.position[static_cast<std::size_t>(l - 1)] = distance(layout.position(state, l), xhat);
    out.speed[static_cast<std::size_t>(l - 1)] = distance(layout.velocity(state, l), vhat);
  }
  return out;
}

std::string LyapunovConfig::label() const {
  std::ostringstream os;
  if (kind == Kind::Pair) {
    os << leader << "_" << follower;
  } else {
    os << "level_" << follower;
  }
  return os.str();
}

LyapunovSeries lyapunov_pair(const Trajectory& traj, const SimSpec& spec, const KernelPrimitive& primitive,
                             const LyapunovConfig& config, std::size_t stride) {
  if (stride == 0) stride = 1;
  const FlockLayout layout = spec.layout();
  const double tau = traj.tau();
  const std::size_t z = traj.zero_index();
  const std::size_t tau_index = z + static_cast<std::size_t>(traj.record.delay_steps());
  if (tau_index >= traj.size()) {
    throw Error(ErrorCode::OffsetUnavailable, "trajectory does not reach t = tau");
  }
  auto in_range = [&](int a) { return a >= 1 && a <= layout.agents; };

  LyapunovSeries out;
  out.config = config;

  if (config.kind == LyapunovConfig::Kind::Pair) {
    if (!in_range(config.leader) || !in_range(config.follower) || config.leader == config.follower) {
      throw Error(ErrorCode::InvalidArgument, "Lyapunov pair needs two distinct agents");
    }
    const auto at_tau = traj.state(tau_index);
    out.offset = distance(layout.velocity(at_tau, config.follower), layout.velocity(at_tau, config.leader)) * tau;
    for (std::size_t k = z; k < traj.size(); k += stride) {
      const auto y = traj.state(k);
      const double dv = distance(layout.velocity(y, config.follower), layout.velocity(y, config.leader));
      const double dx = distance(layout.position(y, config.follower), layout.position(y, config.leader));
      const double phi = phi_eval(primitive, spec.kernel, dx + out.offset);
      out.times.push_back(traj.time(k));
      out.plus.push_back(dv + phi);
      out.minus.push_back(dv - phi);
    }
    return out;
  }

  const int l = config.follower;
  if (!in_range(l) || l < 2) throw Error(ErrorCode::InvalidArgument, "level functional needs an agent l >= 2");
  const auto leaders = spec.graph.leaders(l);
  out.multiplier = static_cast<double>(leaders.size());

  double d0 = 0.0;
  for (std::size_t k = 0; k <= z; ++k) {
    const auto y = traj.state(k);
    for (int i = 1; i <= l; ++i) d0 = std::max(d0, norm(layout.velocity(y, i)));
  }
  d0 *= 2.0;

  double bound = 0.0;
  if (config.level_bound) {
    bound = *config.level_bound;
  } else {
    const auto d = static_cast<std::size_t>(layout.dim);
    std::vector<double> xhat(d);
    for (std::size_t k = 0; k < traj.size(); ++k) {
      const auto y = traj.state(k);
      std::fill(xhat.begin(), xhat.end(), 0.0);
      for (int j : leaders) {
        const auto xj = layout.position(y, j);
        for (std::size_t c = 0; c < d; ++c) xhat[c] += xj[c] / static_cast<double>(leaders.size());
      }
      for (int j : leaders) bound = std::max(bound, distance(layout.position(y, j), xhat));
    }
  }
  out.offset = tau * d0 + bound;

  for (std::size_t k = z; k < traj.size(); k += stride) {
    const auto y = traj.state(k);
    const auto dev = leader_deviation(spec.graph, layout, y);
    const auto li = static_cast<std::size_t>(l - 1);
    const double phi = out.multiplier * phi_eval(primitive, spec.kernel, dev.position[li] + out.offset);
    out.times.push_back(traj.time(k));
    out.plus.push_back(dev.speed[li] + phi);
    out.minus.push_back(dev.speed[li] - phi);
  }
  return out;
}

const char* decay_model_name(DecayModel model) noexcept {
  return model == DecayModel::Exponential ? "exponential" : "power";
}

DecayFit fit_decay(std::span<const double> times, std::span<const double> values, DecayModel model, double t_lo,
                   double t_hi) {
  if (times.size() != values.size()) throw Error(ErrorCode::InvalidArgument, "times and values differ in length");
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    if (t < t_lo || t > t_hi) continue;
    if (!(values[k] > 0.0)) {
      std::ostringstream os;
      os << "value " << values[k] << " at t = " << t << " is not strictly positive";
      throw Error(ErrorCode::NonPositiveSamples, os.str());
    }
    xs.push_back(model == DecayModel::Exponential ? t : std::log1p(t));
    ys.push_back(std::log(values[k]));
  }
  if (xs.size() < 10) {
    std::ostringstream os;
    os << xs.size() << " samples in window [" << t_lo << ", " << t_hi << "], need >= 10";
    throw Error(ErrorCode::InsufficientData, os.str());
  }

  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::InsufficientData, "window has no spread in time");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;

  DecayFit fit;
  fit.model = model;
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  fit.rate = -slope;
  fit.C = std::exp(intercept);
  fit.samples = xs.size();
  for (std::size_t k = 0; k < xs.size(); ++k) {
    fit.residual = std::max(fit.residual, std::abs(ys[k] - (intercept + slope * xs[k])));
  }
  return fit;
}

DiagnosticsSeries compute_diagnostics(const SimSpec& spec, const Trajectory& traj, const DiagnosticsOptions& options) {
  const std::size_t stride = std::max<std::size_t>(options.stride, 1);
  const FlockLayout layout = spec.layout();
  DiagnosticsSeries out;
  out.agents = layout.agents;
  for (std::size_t k = traj.zero_index(); k < traj.size(); k += stride) {
    const auto y = traj.state(k);
    const auto dm = diameters(layout, y);
    out.times.push_back(traj.time(k));
    out.X.push_back(dm.X);
    out.V.push_back(dm.V);
    if (options.leader_deviation) out.deviation.push_back(leader_deviation(spec.graph, layout, y));
  }
  if (options.cross) out.cross = cross_differences(traj, layout, stride);
  for (const auto& cfg : options.lyapunov) {
    out.lyapunov.push_back(lyapunov_pair(traj, spec, options.primitive, cfg, stride));
  }
  return out;
}

FlockingReport flocking_verdict(const DiagnosticsSeries& diag, const VerdictThresholds& thresholds) {
  FlockingReport report;
  if (diag.times.empty()) {
    report.note = "empty diagnostics";
    return report;
  }
  const double t0 = diag.times.front();
  const double t1 = diag.times.back();
  const double horizon = t1 - t0;

  report.v_initial = diag.V.front();
  report.v_final = diag.V.back();
  report.v_ratio = report.v_initial > 0.0 ? report.v_final / report.v_initial : 0.0;
  report.v_decayed = report.v_initial == 0.0 ? report.v_final == 0.0 : report.v_ratio < thresholds.v_ratio;

  const double quarter_start = t0 + 0.75 * horizon;
  for (std::size_t k = 0; k < diag.times.size(); ++k) {
    report.x_max = std::max(report.x_max, diag.X[k]);
    if (diag.times[k] >= quarter_start) {
      report.x_max_final_quarter = std::max(report.x_max_final_quarter, diag.X[k]);
    } else {
      report.x_max_before = std::max(report.x_max_before, diag.X[k]);
    }
  }
  report.x_bounded =
      report.x_max_final_quarter <= report.x_max_before + thresholds.x_growth * std::max(1.0, report.x_max);
  report.flocking = report.x_bounded && report.v_decayed;

  // Past the rounding floor log V is noise, so fit the resolved part only.
  double t_fit = t1;
  for (std::size_t k = 0; k < diag.times.size(); ++k) {
    if (diag.V[k] <= thresholds.resolution * report.v_initial) {
      t_fit = diag.times[k];
      report.note = "V reaches the rounding floor at t = " + std::to_string(t_fit) + "; fits end there";
      break;
    }
  }
  report.fit_horizon = t_fit;
  const double lo = t_fit - thresholds.fit_fraction * (t_fit - t0);
  for (auto model : {DecayModel::Exponential, DecayModel::Power}) {
    try {
      auto fit = fit_decay(diag.times, diag.V, model, lo, t_fit);
      (model == DecayModel::Exponential ? report.exponential : report.power) = fit;
    } catch (const Error& e) {
      if (!report.note.empty()) report.note += "; ";
      report.note += std::string(decay_model_name(model)) + " fit unavailable: " + e.what();
    }
  }
  return report;
}

}  // namespace hlflock
