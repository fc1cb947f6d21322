#pragma once

#include <span>
#include <variant>
#include <vector>

namespace hlflock {

// psi(r) = H / (sigma + r^2)^beta
struct CuckerSmaleKernel {
  double H = 1.0;
  double sigma = 1.0;
  double beta = 0.25;
};

// Piecewise-linear through (knots, values); held at values.front() before
// the first knot and at values.back() past the last one.
struct TabulatedKernel {
  std::vector<double> knots;
  std::vector<double> values;
};

class Kernel {
 public:
  using Form = std::variant<CuckerSmaleKernel, TabulatedKernel>;

  Kernel() : Kernel(CuckerSmaleKernel{}) {}
  explicit Kernel(CuckerSmaleKernel cs);
  explicit Kernel(TabulatedKernel tab);

  const Form& form() const noexcept { return form_; }
  bool is_cucker_smale() const noexcept { return std::holds_alternative<CuckerSmaleKernel>(form_); }

  double operator()(double r) const;
  double sup() const;  // psi(0), the maximum of a non-increasing kernel

  // True when psi vanishes somewhere (only possible for tabulated kernels).
  bool has_zeros() const;

 private:
  Form form_;
};

enum class TailVerdict { Yes, No, Unknown };

double psi_eval(const Kernel& kernel, double r);
TailVerdict has_divergent_tail(const Kernel& kernel);

struct KernelPrimitive {
  double base_point = 0.0;
  double tolerance = 1e-13;  // relative
  unsigned max_depth = 15;
};

// Phi(r) = integral of psi from base_point to r.
double phi_eval(const KernelPrimitive& primitive, const Kernel& kernel, double r);

struct ZeroForcing {};

// |f(t)| = amplitude * (1 + t)^(-mu) along a fixed unit direction.
struct PowerDecayForcing {
  double amplitude = 1.0;
  double mu = 2.0;
  std::vector<double> direction;  // empty -> first coordinate axis
};

// Piecewise-linear in t through the samples, held at the last sample after
// the final time.
struct TabulatedForcing {
  std::vector<double> times;
  std::vector<std::vector<double>> samples;
};

class ForcingSpec {
 public:
  using Form = std::variant<ZeroForcing, PowerDecayForcing, TabulatedForcing>;

  ForcingSpec() = default;
  explicit ForcingSpec(Form form);

  const Form& form() const noexcept { return form_; }
  bool is_zero() const noexcept { return std::holds_alternative<ZeroForcing>(form_); }

  // Writes f(t) into out (size = spatial dimension).
  void eval(double t, std::span<double> out) const;

  // ||f||_1 over [0, inf); +inf when not integrable.
  double l1_norm() const;

 private:
  Form form_;
};

std::vector<double> forcing_eval(const ForcingSpec& spec, double t, int dim);

}  // namespace hlflock
