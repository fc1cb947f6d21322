#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace hlflock {

using StateView = std::span<const double>;
using StateSpan = std::span<double>;

enum class Scheme { ExplicitEuler, Rk4 };

const char* scheme_name(Scheme scheme) noexcept;

struct StepperConfig {
  double h = 0.01;
  Scheme scheme = Scheme::Rk4;
  double t_end = 10.0;
  // Off-grid history queries always use cubic Hermite interpolation.
  bool keep_full_history = true;
};

// Number of grid steps spanned by the delay; throws MisalignedDelay unless
// tau is a nonnegative integer multiple of h.
int delay_steps(double tau, double h);

// Uniform-grid record of a state on [t - window, t]. Sample g sits at time
// (g - m) * h where m = tau / h, so g = 0 is t = -tau and the grid is shared
// by every run with the same (tau, h). Each sample stores the derivative seen
// from the left and from the right so that Hermite interpolation stays exact
// across the t = 0 breakpoint.
class HistoryBuffer {
 public:
  HistoryBuffer(std::size_t dim, double tau, double h);

  std::size_t dim() const noexcept { return dim_; }
  double h() const noexcept { return h_; }
  double tau() const noexcept { return tau_; }
  int delay_steps() const noexcept { return m_; }

  // Retained samples, indexed from the oldest kept sample.
  std::size_t size() const noexcept { return count_; }
  bool empty() const noexcept { return count_ == 0; }
  double time(std::size_t i) const noexcept { return grid_time(first_ + i); }
  StateView state(std::size_t i) const;
  StateView left_derivative(std::size_t i) const;
  StateView right_derivative(std::size_t i) const;

  double front_time() const noexcept { return time(0); }
  double back_time() const noexcept { return time(count_ - 1); }
  StateView back() const { return state(count_ - 1); }

  // Index (into the retained range) of the sample at t = 0.
  std::size_t zero_index() const noexcept { return static_cast<std::size_t>(m_) - first_; }

  void append(StateView y, StateView d_left, StateView d_right);
  void set_right_derivative_of_back(StateView d);

  // Grid points return the stored sample bitwise; other times use cubic
  // Hermite interpolation. Throws OutOfWindow outside [front_time, back_time].
  void query(double t, StateSpan out) const;
  std::vector<double> query(double t) const;

  // Drop samples older than back_time() - window (keeps at least one bracket).
  void trim_to_window(double window);

 private:
  double grid_time(std::size_t g) const noexcept {
    return static_cast<double>(static_cast<long long>(g) - m_) * h_;
  }
  std::size_t slot(std::size_t i) const noexcept { return (offset_ + i) * dim_; }

  std::size_t dim_;
  double tau_;
  double h_;
  int m_;
  std::size_t first_ = 0;   // global grid index of the oldest kept sample
  std::size_t offset_ = 0;  // storage offset of the oldest kept sample
  std::size_t count_ = 0;
  std::vector<double> y_;
  std::vector<double> dl_;
  std::vector<double> dr_;
};

// Initial data on [-tau, 0]: writes the state at time s.
using InitialFunction = std::function<void(double s, StateSpan out)>;

HistoryBuffer seed_history(const InitialFunction& initial, std::size_t dim, double tau, double h,
                           const InitialFunction& derivative = {});

// Right-hand side G(t, y(t), y(t - tau)) written into dy.
using DelayRhs = std::function<void(double t, StateView now, StateView delayed, StateSpan dy)>;

// Called after every accepted step with the new time and state.
using StepObserver = std::function<void(double t, StateView y)>;

struct StepRecord {
  std::int64_t index = 0;
  double t = 0.0;
  std::int64_t rhs_evaluations = 0;  // cumulative
};

struct Trajectory {
  HistoryBuffer record;  // includes the seeded history on [-tau, 0]
  std::vector<StepRecord> steps;
  Scheme scheme = Scheme::Rk4;

  std::size_t size() const noexcept { return record.size(); }
  double time(std::size_t i) const noexcept { return record.time(i); }
  StateView state(std::size_t i) const { return record.state(i); }
  std::size_t zero_index() const noexcept { return record.zero_index(); }
  double tau() const noexcept { return record.tau(); }
  double h() const noexcept { return record.h(); }
};

Trajectory integrate(const DelayRhs& rhs, HistoryBuffer buffer, const StepperConfig& cfg,
                     std::span<const StepObserver> observers = {});

}  // namespace hlflock
