#include "hlflock/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hlflock/error.hpp"

namespace hlflock {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double tabulated_value(const TabulatedKernel& tab, double r) {
  const auto& k = tab.knots;
  const auto& v = tab.values;
  if (r <= k.front()) return v.front();
  if (r >= k.back()) return v.back();
  auto it = std::upper_bound(k.begin(), k.end(), r);
  const size_t hi = static_cast<size_t>(it - k.begin());
  const size_t lo = hi - 1;
  const double w = (r - k[lo]) / (k[hi] - k[lo]);
  return v[lo] + w * (v[hi] - v[lo]);
}

// Exact integral of the piecewise-linear kernel over [0, r].
double tabulated_integral(const TabulatedKernel& tab, double r) {
  const auto& k = tab.knots;
  double total = 0.0;
  double left = 0.0;
  auto add = [&](double a, double b) {
    if (b <= a) return;
    total += 0.5 * (b - a) * (tabulated_value(tab, a) + tabulated_value(tab, b));
  };
  for (double knot : k) {
    if (knot <= left) continue;
    if (knot >= r) break;
    add(left, knot);
    left = knot;
  }
  add(left, r);
  return total;
}

void check_cucker_smale(const CuckerSmaleKernel& cs) {
  if (!(cs.H > 0.0) || !std::isfinite(cs.H)) throw Error(ErrorCode::InvalidArgument, "kernel H must be positive");
  if (!(cs.sigma > 0.0) || !std::isfinite(cs.sigma)) {
    throw Error(ErrorCode::InvalidArgument, "kernel sigma must be positive");
  }
  if (!(cs.beta >= 0.0) || !std::isfinite(cs.beta)) {
    throw Error(ErrorCode::InvalidArgument, "kernel beta must be nonnegative");
  }
}

void check_tabulated(const TabulatedKernel& tab) {
  if (tab.knots.empty() || tab.knots.size() != tab.values.size()) {
    throw Error(ErrorCode::InvalidArgument, "tabulated kernel needs equally many knots and values (>= 1)");
  }
  for (size_t i = 0; i < tab.knots.size(); ++i) {
    if (!std::isfinite(tab.knots[i]) || !std::isfinite(tab.values[i])) {
      throw Error(ErrorCode::InvalidArgument, "tabulated kernel entries must be finite");
    }
    if (tab.values[i] < 0.0) throw Error(ErrorCode::InvalidArgument, "tabulated kernel values must be nonnegative");
    if (i > 0 && !(tab.knots[i] > tab.knots[i - 1])) {
      throw Error(ErrorCode::InvalidArgument, "tabulated kernel knots must be strictly increasing");
    }
    if (i > 0 && tab.values[i] > tab.values[i - 1]) {
      throw Error(ErrorCode::InvalidArgument, "tabulated kernel values must be non-increasing");
    }
  }
  if (tab.knots.front() < 0.0) throw Error(ErrorCode::InvalidArgument, "tabulated kernel knots must be >= 0");
}

}  // namespace

Kernel::Kernel(CuckerSmaleKernel cs) : form_(cs) { check_cucker_smale(cs); }

Kernel::Kernel(TabulatedKernel tab) : form_(std::move(tab)) { check_tabulated(std::get<TabulatedKernel>(form_)); }

double Kernel::operator()(double r) const {
  if (r < 0.0) throw Error(ErrorCode::NegativeDistance, "psi evaluated at r = " + std::to_string(r));
  return std::visit(Overloaded{
                        [r](const CuckerSmaleKernel& cs) {
                          if (cs.beta == 0.0) return cs.H;
                          return cs.H / std::pow(cs.sigma + r * r, cs.beta);
                        },
                        [r](const TabulatedKernel& tab) { return tabulated_value(tab, r); },
                    },
                    form_);
}

double Kernel::sup() const { return (*this)(0.0); }

bool Kernel::has_zeros() const {
  if (const auto* tab = std::get_if<TabulatedKernel>(&form_)) return tab->values.back() == 0.0;
  return false;
}

double psi_eval(const Kernel& kernel, double r) { return kernel(r); }

TailVerdict has_divergent_tail(const Kernel& kernel) {
  if (const auto* cs = std::get_if<CuckerSmaleKernel>(&kernel.form())) {
    // psi ~ H r^{-2 beta} at infinity
    return cs->beta <= 0.5 ? TailVerdict::Yes : TailVerdict::No;
  }
  return TailVerdict::Unknown;
}

double phi_eval(const KernelPrimitive& primitive, const Kernel& kernel, double r) {
  if (r < 0.0) throw Error(ErrorCode::NegativeDistance, "Phi evaluated at r = " + std::to_string(r));
  const double base = primitive.base_point;
  if (r == base) return 0.0;

  if (const auto* tab = std::get_if<TabulatedKernel>(&kernel.form())) {
    return tabulated_integral(*tab, r) - tabulated_integral(*tab, base);
  }

  const auto& cs = std::get<CuckerSmaleKernel>(kernel.form());
  const double root_sigma = std::sqrt(cs.sigma);
  if (cs.beta == 0.0) return cs.H * (r - base);
  if (cs.beta == 0.5) return cs.H * (std::asinh(r / root_sigma) - std::asinh(base / root_sigma));
  if (cs.beta == 1.0) return cs.H / root_sigma * (std::atan(r / root_sigma) - std::atan(base / root_sigma));

  // Panels [0, sqrt(sigma)], then doubling; each is mapped onto [0, 1] because
  // Boost compares the unscaled panel error against a scaled tolerance.
  using boost::math::quadrature::gauss_kronrod;
  const double lo = std::min(base, r);
  const double hi = std::max(base, r);
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
  double edge = root_sigma;
  while (edge <= lo) edge *= 2.0;
  for (double a = lo; a < hi; edge *= 2.0) {
    const double b = std::min(edge, hi);
    const double width = b - a;
    double e = 0.0;
    double m = 0.0;
    value += gauss_kronrod<double, 31>::integrate([&](double u) { return width * kernel(a + width * u); }, 0.0, 1.0,
                                                  primitive.max_depth, primitive.tolerance, &e, &m);
    error += e;
    l1 += m;
    a = b;
  }
  if (!std::isfinite(value) || error > primitive.tolerance * std::max(1.0, l1) * 10.0) {
    throw Error(ErrorCode::QuadratureFailure, "Phi(" + std::to_string(r) + ") error estimate " + std::to_string(error));
  }
  return r < base ? -value : value;
}

ForcingSpec::ForcingSpec(Form form) : form_(std::move(form)) {
  if (auto* pd = std::get_if<PowerDecayForcing>(&form_)) {
    if (!std::isfinite(pd->amplitude) || !std::isfinite(pd->mu)) {
      throw Error(ErrorCode::InvalidArgument, "power-decay forcing parameters must be finite");
    }
    if (!pd->direction.empty()) {
      double norm = 0.0;
      for (double c : pd->direction) norm += c * c;
      norm = std::sqrt(norm);
      if (!(norm > 0.0)) throw Error(ErrorCode::InvalidArgument, "forcing direction must be nonzero");
      for (double& c : pd->direction) c /= norm;
    }
  } else if (const auto* tab = std::get_if<TabulatedForcing>(&form_)) {
    if (tab->times.empty() || tab->times.size() != tab->samples.size()) {
      throw Error(ErrorCode::InvalidArgument, "tabulated forcing needs equally many times and samples");
    }
    for (size_t i = 0; i < tab->times.size(); ++i) {
      if (i > 0 && !(tab->times[i] > tab->times[i - 1])) {
        throw Error(ErrorCode::InvalidArgument, "tabulated forcing times must be strictly increasing");
      }
      if (tab->samples[i].size() != tab->samples.front().size()) {
        throw Error(ErrorCode::InvalidArgument, "tabulated forcing samples must share one dimension");
      }
    }
  }
}

void ForcingSpec::eval(double t, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  std::visit(Overloaded{
                 [](const ZeroForcing&) {},
                 [&](const PowerDecayForcing& pd) {
                   const double mag = pd.amplitude * std::pow(1.0 + t, -pd.mu);
                   if (pd.direction.empty()) {
                     if (!out.empty()) out[0] = mag;
                     return;
                   }
                   if (pd.direction.size() != out.size()) {
                     throw Error(ErrorCode::InvalidArgument, "forcing direction dimension mismatch");
                   }
                   for (size_t k = 0; k < out.size(); ++k) out[k] = mag * pd.direction[k];
                 },
                 [&](const TabulatedForcing& tab) {
                   if (tab.samples.front().size() != out.size()) {
                     throw Error(ErrorCode::InvalidArgument, "forcing sample dimension mismatch");
                   }
                   const auto& ts = tab.times;
                   if (t <= ts.front()) {
                     std::copy(tab.samples.front().begin(), tab.samples.front().end(), out.begin());
                     return;
                   }
                   if (t >= ts.back()) {
                     std::copy(tab.samples.back().begin(), tab.samples.back().end(), out.begin());
                     return;
                   }
                   const size_t hi = static_cast<size_t>(std::upper_bound(ts.begin(), ts.end(), t) - ts.begin());
                   const size_t lo = hi - 1;
                   const double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
                   for (size_t k = 0; k < out.size(); ++k) {
                     out[k] = tab.samples[lo][k] + w * (tab.samples[hi][k] - tab.samples[lo][k]);
                   }
                 },
             },
             form_);
}

double ForcingSpec::l1_norm() const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return std::visit(Overloaded{
                        [](const ZeroForcing&) { return 0.0; },
                        [](const PowerDecayForcing& pd) {
                          if (pd.amplitude == 0.0) return 0.0;
                          return pd.mu > 1.0 ? std::abs(pd.amplitude) / (pd.mu - 1.0) : inf;
                        },
                        [this](const TabulatedForcing& tab) {
                          for (double c : tab.samples.back()) {
                            if (c != 0.0) return inf;
                          }
                          const size_t dim = tab.samples.front().size();
                          std::vector<double> buf(dim);
                          auto magnitude = [&](double t) {
                            eval(t, buf);
                            double s = 0.0;
                            for (double c : buf) s += c * c;
                            return std::sqrt(s);
                          };
                          double total = 0.0;
                          if (tab.times.front() > 0.0) total += magnitude(0.0) * tab.times.front();
                          using boost::math::quadrature::gauss_kronrod;
                          for (size_t i = 1; i < tab.times.size(); ++i) {
                            const double a = std::max(0.0, tab.times[i - 1]);
                            const double b = tab.times[i];
                            if (b <= a) continue;
                            total += gauss_kronrod<double, 15>::integrate(magnitude, a, b, 15, 1e-12);
                          }
                          return total;
                        },
                    },
                    form_);
}

std::vector<double> forcing_eval(const ForcingSpec& spec, double t, int dim) {
  if (t < 0.0) throw Error(ErrorCode::InvalidArgument, "forcing evaluated at negative time");
  std::vector<double> out(static_cast<size_t>(dim));
  spec.eval(t, out);
  return out;
}

}  // namespace hlflock
