#include "hlflock/dde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hlflock/error.hpp"

namespace hlflock {

const char* scheme_name(Scheme scheme) noexcept {
  return scheme == Scheme::ExplicitEuler ? "explicit-euler" : "rk4";
}

int delay_steps(double tau, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorCode::EmptyHorizon, "step size must be positive");
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw Error(ErrorCode::InvalidArgument, "delay must be nonnegative");
  if (tau == 0.0) return 0;
  const double ratio = tau / h;
  const double m = std::round(ratio);
  if (m < 1.0 || std::abs(ratio - m) > 1e-9 * std::max(1.0, ratio)) {
    std::ostringstream os;
    os << "tau/h = " << ratio << " is not a positive integer (tau=" << tau << ", h=" << h << ")";
    throw Error(ErrorCode::MisalignedDelay, os.str());
  }
  return static_cast<int>(m);
}

HistoryBuffer::HistoryBuffer(std::size_t dim, double tau, double h)
    : dim_(dim), tau_(tau), h_(h), m_(hlflock::delay_steps(tau, h)) {
  if (dim_ == 0) throw Error(ErrorCode::EmptyHorizon, "state dimension must be positive");
}

StateView HistoryBuffer::state(std::size_t i) const { return {y_.data() + slot(i), dim_}; }
StateView HistoryBuffer::left_derivative(std::size_t i) const { return {dl_.data() + slot(i), dim_}; }
StateView HistoryBuffer::right_derivative(std::size_t i) const { return {dr_.data() + slot(i), dim_}; }

void HistoryBuffer::append(StateView y, StateView d_left, StateView d_right) {
  y_.insert(y_.end(), y.begin(), y.end());
  dl_.insert(dl_.end(), d_left.begin(), d_left.end());
  dr_.insert(dr_.end(), d_right.begin(), d_right.end());
  ++count_;
}

void HistoryBuffer::set_right_derivative_of_back(StateView d) {
  std::copy(d.begin(), d.end(), dr_.begin() + static_cast<std::ptrdiff_t>(slot(count_ - 1)));
}

void HistoryBuffer::query(double t, StateSpan out) const {
  if (count_ == 0) throw Error(ErrorCode::OutOfWindow, "query on an empty history");
  const double u = t / h_ + static_cast<double>(m_) - static_cast<double>(first_);
  const double last = static_cast<double>(count_ - 1);
  constexpr double snap = 1e-9;
  if (!(u >= -snap) || !(u <= last + snap)) {
    std::ostringstream os;
    os << "t = " << t << " outside retained window [" << front_time() << ", " << back_time() << "]";
    throw Error(ErrorCode::OutOfWindow, os.str());
  }
  const double nearest = std::round(u);
  if (std::abs(u - nearest) <= snap) {
    auto s = state(static_cast<std::size_t>(nearest));
    std::copy(s.begin(), s.end(), out.begin());
    return;
  }
  const auto lo = static_cast<std::size_t>(std::floor(u));
  const double th = u - static_cast<double>(lo);
  const double th2 = th * th;
  const double th3 = th2 * th;
  const double h00 = 2.0 * th3 - 3.0 * th2 + 1.0;
  const double h10 = (th3 - 2.0 * th2 + th) * h_;
  const double h01 = -2.0 * th3 + 3.0 * th2;
  const double h11 = (th3 - th2) * h_;
  auto y0 = state(lo);
  auto y1 = state(lo + 1);
  auto m0 = right_derivative(lo);
  auto m1 = left_derivative(lo + 1);
  for (std::size_t k = 0; k < dim_; ++k) out[k] = h00 * y0[k] + h10 * m0[k] + h01 * y1[k] + h11 * m1[k];
}

std::vector<double> HistoryBuffer::query(double t) const {
  std::vector<double> out(dim_);
  query(t, out);
  return out;
}

void HistoryBuffer::trim_to_window(double window) {
  if (count_ < 2) return;
  const double keep_from = back_time() - window;
  std::size_t drop = 0;
  while (drop + 2 < count_ && time(drop + 1) <= keep_from) ++drop;
  if (drop == 0) return;
  first_ += drop;
  offset_ += drop;
  count_ -= drop;
  // Compact once the dead prefix dominates the storage.
  if (offset_ > count_) {
    const auto dead = static_cast<std::ptrdiff_t>(offset_ * dim_);
    y_.erase(y_.begin(), y_.begin() + dead);
    dl_.erase(dl_.begin(), dl_.begin() + dead);
    dr_.erase(dr_.begin(), dr_.begin() + dead);
    offset_ = 0;
  }
}

HistoryBuffer seed_history(const InitialFunction& initial, std::size_t dim, double tau, double h,
                           const InitialFunction& derivative) {
  HistoryBuffer buffer(dim, tau, h);
  const int m = buffer.delay_steps();
  std::vector<double> y(dim);
  std::vector<double> d(dim, 0.0);
  std::vector<double> a(dim);
  std::vector<double> b(dim);
  std::vector<double> c(dim);

  // Finite differences of the initial functions, one-sided at the ends of
  // [-tau, 0] so they are never evaluated outside their domain.
  const double delta = 1e-6 * std::max(1.0, tau);
  auto fd_derivative = [&](double s) {
    if (tau == 0.0) {
      std::fill(d.begin(), d.end(), 0.0);
    } else if (s - delta < -tau) {
      initial(s, a);
      initial(s + delta, b);
      initial(s + 2.0 * delta, c);
      for (std::size_t k = 0; k < dim; ++k) d[k] = (-3.0 * a[k] + 4.0 * b[k] - c[k]) / (2.0 * delta);
    } else if (s + delta > 0.0) {
      initial(s, a);
      initial(s - delta, b);
      initial(s - 2.0 * delta, c);
      for (std::size_t k = 0; k < dim; ++k) d[k] = (3.0 * a[k] - 4.0 * b[k] + c[k]) / (2.0 * delta);
    } else {
      initial(s + delta, a);
      initial(s - delta, b);
      for (std::size_t k = 0; k < dim; ++k) d[k] = (a[k] - b[k]) / (2.0 * delta);
    }
  };

  for (int g = 0; g <= m; ++g) {
    const double s = static_cast<double>(g - m) * h;
    initial(s, y);
    if (derivative) {
      derivative(s, d);
    } else {
      fd_derivative(s);
    }
    buffer.append(y, d, d);
  }
  return buffer;
}

namespace {

void check_finite(StateView y, double t) {
  for (double v : y) {
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "non-finite state at t = " << t;
      throw Error(ErrorCode::NonFiniteState, os.str());
    }
  }
}

}  // namespace

Trajectory integrate(const DelayRhs& rhs, HistoryBuffer buffer, const StepperConfig& cfg,
                     std::span<const StepObserver> observers) {
  if (!(cfg.t_end > 0.0) || !std::isfinite(cfg.t_end)) throw Error(ErrorCode::EmptyHorizon, "t_end must be positive");
  if (buffer.empty()) throw Error(ErrorCode::EmptyHorizon, "history buffer is empty");
  if (std::abs(buffer.back_time()) > 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "history buffer must end at t = 0");
  }
  if (std::abs(cfg.h - buffer.h()) > 1e-15 * cfg.h) {
    throw Error(ErrorCode::InvalidArgument, "stepper h differs from history grid spacing");
  }

  const double h = buffer.h();
  const double tau = buffer.tau();
  const bool undelayed = buffer.delay_steps() == 0;  // tau = 0: delayed aliases the stage state
  const std::size_t n = buffer.dim();
  const auto n_steps = static_cast<std::int64_t>(std::ceil(cfg.t_end / h - 1e-9));
  const double window = tau + 2.0 * h;

  std::vector<double> y(n), k1(n), k2(n), k3(n), k4(n), stage(n), delayed(n), next(n), dnext(n);
  std::int64_t evals = 0;

  Trajectory traj{std::move(buffer), {}, cfg.scheme};
  HistoryBuffer& record = traj.record;
  traj.steps.reserve(static_cast<std::size_t>(n_steps));

  auto eval = [&](double t, StateView now, StateSpan out) {
    if (undelayed) {
      rhs(t, now, now, out);
    } else {
      record.query(t - tau, delayed);
      rhs(t, now, delayed, out);
    }
    ++evals;
  };

  {
    auto y0 = record.back();
    std::copy(y0.begin(), y0.end(), y.begin());
    check_finite(y, 0.0);
    eval(0.0, y, k1);
    record.set_right_derivative_of_back(k1);
  }

  for (std::int64_t step = 0; step < n_steps; ++step) {
    const double t = static_cast<double>(step) * h;
    const double t_next = static_cast<double>(step + 1) * h;
    auto yk = record.back();
    std::copy(yk.begin(), yk.end(), y.begin());
    auto dk = record.right_derivative(record.size() - 1);
    std::copy(dk.begin(), dk.end(), k1.begin());

    if (cfg.scheme == Scheme::ExplicitEuler) {
      for (std::size_t i = 0; i < n; ++i) next[i] = y[i] + h * k1[i];
    } else {
      const double t_half = t + 0.5 * h;
      for (std::size_t i = 0; i < n; ++i) stage[i] = y[i] + 0.5 * h * k1[i];
      eval(t_half, stage, k2);
      for (std::size_t i = 0; i < n; ++i) stage[i] = y[i] + 0.5 * h * k2[i];
      eval(t_half, stage, k3);
      for (std::size_t i = 0; i < n; ++i) stage[i] = y[i] + h * k3[i];
      eval(t_next, stage, k4);
      for (std::size_t i = 0; i < n; ++i) next[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    check_finite(next, t_next);

    // The derivative at the new point doubles as k1 of the following step.
    // Its delayed argument t_next - tau <= t is already recorded.
    eval(t_next, next, dnext);
    check_finite(dnext, t_next);
    record.append(next, dnext, dnext);

    traj.steps.push_back({step + 1, t_next, evals});
    if (!cfg.keep_full_history) record.trim_to_window(window);
    for (const auto& obs : observers) obs(t_next, next);
  }
  return traj;
}

}  // namespace hlflock
