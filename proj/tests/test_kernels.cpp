#include <doctest.h>

#include <cmath>
#include <limits>

#include "hlflock/error.hpp"
#include "hlflock/kernels.hpp"
#include "hlflock/rng.hpp"

using namespace hlflock;
using doctest::Approx;

TEST_CASE("psi examples") {
  CHECK(psi_eval(Kernel(CuckerSmaleKernel{1, 1, 0.25}), 0.0) == 1.0);
  CHECK(psi_eval(Kernel(CuckerSmaleKernel{2, 1, 0.5}), std::sqrt(3.0)) == Approx(1.0).epsilon(1e-15));
  const Kernel constant(CuckerSmaleKernel{1, 1, 0});
  for (double r : {0.0, 0.3, 7.0, 1e6}) CHECK(psi_eval(constant, r) == 1.0);
}

TEST_CASE("psi rejects negative distance") {
  try {
    psi_eval(Kernel(), -1e-3);
    FAIL("expected NegativeDistance");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NegativeDistance);
  }
}

TEST_CASE("psi is non-increasing (random kernels and pairs)") {
  Rng rng(11);
  for (int k = 0; k < 500; ++k) {
    const Kernel kern(CuckerSmaleKernel{rng.uniform(0.1, 5), rng.uniform(0.1, 3), rng.uniform(0, 2)});
    double r1 = rng.uniform(0, 20);
    double r2 = rng.uniform(0, 20);
    if (r1 > r2) std::swap(r1, r2);
    CHECK(kern(r1) >= kern(r2));
  }
  const Kernel tab(TabulatedKernel{{0, 1, 3}, {2, 1, 0.5}});
  for (int k = 0; k < 200; ++k) {
    double r1 = rng.uniform(0, 5);
    double r2 = rng.uniform(0, 5);
    if (r1 > r2) std::swap(r1, r2);
    CHECK(tab(r1) >= tab(r2));
  }
}

TEST_CASE("tabulated kernel interpolates and clamps") {
  const Kernel tab(TabulatedKernel{{1, 2}, {2, 1}});
  CHECK(tab(0.0) == 2.0);
  CHECK(tab(1.5) == Approx(1.5));
  CHECK(tab(50.0) == 1.0);
  CHECK(tab.sup() == 2.0);
  CHECK_FALSE(tab.has_zeros());
  CHECK(Kernel(TabulatedKernel{{0, 1}, {1, 0}}).has_zeros());
}

TEST_CASE("invalid tabulated kernels") {
  CHECK_THROWS_AS(Kernel(TabulatedKernel{{0, 1}, {1, 2}}), Error);      // increasing
  CHECK_THROWS_AS(Kernel(TabulatedKernel{{0, 1}, {1, -0.5}}), Error);   // negative
  CHECK_THROWS_AS(Kernel(TabulatedKernel{{1, 0}, {1, 1}}), Error);      // knots out of order
  CHECK_THROWS_AS(Kernel(TabulatedKernel{{0, 1, 2}, {1, 1}}), Error);   // shape
  CHECK_THROWS_AS(Kernel(CuckerSmaleKernel{1, 0, 0.5}), Error);         // sigma
  CHECK_THROWS_AS(Kernel(CuckerSmaleKernel{1, 1, -0.1}), Error);        // beta
}

TEST_CASE("divergent tail") {
  CHECK(has_divergent_tail(Kernel(CuckerSmaleKernel{1, 1, 0.25})) == TailVerdict::Yes);
  CHECK(has_divergent_tail(Kernel(CuckerSmaleKernel{1, 1, 0.5})) == TailVerdict::Yes);
  CHECK(has_divergent_tail(Kernel(CuckerSmaleKernel{1, 1, 1.0})) == TailVerdict::No);
  CHECK(has_divergent_tail(Kernel(TabulatedKernel{{0, 1}, {1, 1}})) == TailVerdict::Unknown);
}

TEST_CASE("phi examples") {
  const KernelPrimitive prim;
  CHECK(phi_eval(prim, Kernel(CuckerSmaleKernel{1, 1, 0}), 3.0) == Approx(3.0).epsilon(1e-15));
  CHECK(phi_eval(prim, Kernel(CuckerSmaleKernel{1, 1, 0.5}), 1.0) ==
        Approx(std::log(1.0 + std::sqrt(2.0))).epsilon(1e-14));
  CHECK(std::abs(phi_eval(prim, Kernel(CuckerSmaleKernel{1, 1, 0.5}), 1.0) - 0.881374) < 1e-6);
  for (double beta : {0.0, 0.25, 0.5, 0.75, 1.0, 1.5}) {
    const Kernel k(CuckerSmaleKernel{1.3, 0.7, beta});
    CHECK(phi_eval(prim, k, 0.0) == 0.0);
    CHECK(phi_eval(KernelPrimitive{2.0}, k, 2.0) == 0.0);
  }
}

TEST_CASE("closed forms agree with quadrature") {
  // beta = 1 uses atan; a nearby exponent goes through Gauss-Kronrod.
  const KernelPrimitive prim;
  for (double beta : {0.5, 1.0}) {
    const double closed = phi_eval(prim, Kernel(CuckerSmaleKernel{1, 2, beta}), 4.0);
    const double quad = phi_eval(prim, Kernel(CuckerSmaleKernel{1, 2, beta + 1e-12}), 4.0);
    CHECK(closed == Approx(quad).epsilon(1e-10));
  }
  CHECK(phi_eval(prim, Kernel(CuckerSmaleKernel{1, 1, 1.0}), 1.0) == Approx(std::atan(1.0)).epsilon(1e-14));
}

TEST_CASE("phi of a tabulated kernel is the exact trapezoid area") {
  const Kernel tab(TabulatedKernel{{1, 2}, {2, 1}});
  CHECK(phi_eval(KernelPrimitive{}, tab, 3.0) == Approx(2.0 + 1.5 + 1.0));
  CHECK(phi_eval(KernelPrimitive{}, tab, 0.5) == Approx(1.0));
}

TEST_CASE("phi is non-decreasing and its difference quotient approaches psi") {
  const KernelPrimitive prim;
  for (double beta : {0.1, 0.25, 0.6, 1.0, 2.2}) {
    const Kernel k(CuckerSmaleKernel{1, 1, beta});
    double prev = -1.0;
    for (double r = 0.0; r <= 10.0; r += 0.25) {
      const double phi = phi_eval(prim, k, r);
      CHECK(phi >= prev);
      prev = phi;
      const double h = 1e-4;
      const double quotient = (phi_eval(prim, k, r + h) - phi) / h;
      // |psi'| <= 2 beta H r / (sigma + r^2)^(beta+1) <= 2 beta
      CHECK(std::abs(quotient - k(r)) <= 10.0 * h * 2.0 * beta + 1e-9);
    }
  }
}

TEST_CASE("phi differences do not depend on the base point") {
  const Kernel k(CuckerSmaleKernel{1, 1, 0.3});
  const double a = phi_eval(KernelPrimitive{0.0}, k, 5.0) - phi_eval(KernelPrimitive{0.0}, k, 2.0);
  const double b = phi_eval(KernelPrimitive{1.5}, k, 5.0) - phi_eval(KernelPrimitive{1.5}, k, 2.0);
  CHECK(a == Approx(b).epsilon(1e-12));
  CHECK(phi_eval(KernelPrimitive{1.5}, k, 0.5) < 0.0);
}

TEST_CASE("phi reports an unreachable tolerance") {
  KernelPrimitive strict;
  strict.tolerance = 1e-300;
  strict.max_depth = 1;
  try {
    phi_eval(strict, Kernel(CuckerSmaleKernel{1, 1e-6, 0.3}), 1000.0);
    FAIL("expected QuadratureFailure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::QuadratureFailure);
  }
}

TEST_CASE("forcing examples") {
  const ForcingSpec zero;
  CHECK(forcing_eval(zero, 3.0, 2) == std::vector<double>{0.0, 0.0});
  const ForcingSpec pd(PowerDecayForcing{1.0, 2.0, {}});
  CHECK(forcing_eval(pd, 0.0, 1)[0] == 1.0);
  CHECK(forcing_eval(pd, 1.0, 1)[0] == 0.25);
  const auto dir = forcing_eval(ForcingSpec(PowerDecayForcing{2.0, 2.0, {3.0, 4.0}}), 1.0, 2);
  CHECK(dir[0] == Approx(0.3));
  CHECK(dir[1] == Approx(0.4));
  CHECK(std::hypot(dir[0], dir[1]) == Approx(0.5));
}

TEST_CASE("forcing l1 norms") {
  CHECK(ForcingSpec().l1_norm() == 0.0);
  CHECK(ForcingSpec(PowerDecayForcing{1.0, 3.0, {}}).l1_norm() == 0.5);
  CHECK(ForcingSpec(PowerDecayForcing{2.0, 1.0, {}}).l1_norm() == std::numeric_limits<double>::infinity());
  const ForcingSpec tri(TabulatedForcing{{0, 1, 2}, {{0}, {2}, {0}}});
  CHECK(tri.l1_norm() == Approx(2.0));
  CHECK(tri.l1_norm() > 0.0);
  const ForcingSpec held(TabulatedForcing{{0, 1}, {{0}, {1}}});
  CHECK(held.l1_norm() == std::numeric_limits<double>::infinity());
  CHECK(forcing_eval(held, 10.0, 1)[0] == 1.0);
}

TEST_CASE("integrated |f| converges to A / (mu - 1)") {
  for (double mu : {1.5, 2.0, 3.0, 4.5}) {
    const ForcingSpec f(PowerDecayForcing{1.7, mu, {}});
    const double l1 = f.l1_norm();
    REQUIRE(l1 == Approx(1.7 / (mu - 1.0)));
    std::vector<double> gaps;
    for (double T : {10.0, 100.0, 1000.0, 10000.0}) {
      // trapezoid on log-spaced nodes
      double sum = 0.0;
      const int n = 20000;
      double t0 = 0.0;
      double f0 = forcing_eval(f, 0.0, 1)[0];
      for (int k = 1; k <= n; ++k) {
        const double t1 = std::expm1(std::log1p(T) * k / n);
        const double f1 = forcing_eval(f, t1, 1)[0];
        sum += 0.5 * (f0 + f1) * (t1 - t0);
        t0 = t1;
        f0 = f1;
      }
      const double tail = 1.7 * std::pow(1.0 + T, 1.0 - mu) / (mu - 1.0);
      CHECK(sum + tail == Approx(l1).epsilon(1e-6));
      gaps.push_back(l1 - sum);
    }
    CHECK(gaps.back() < gaps.front());
    CHECK(gaps.back() < 0.02 * l1);
  }
}
