#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>

#include "hlflock/dde.hpp"
#include "hlflock/error.hpp"

using namespace hlflock;
using doctest::Approx;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidArgument;
}

// y' = a (y(t - tau) - y(t)), history cos(s) + sin(2s) / 2
double scalar_problem(double a, double h, Scheme scheme, double t_end = 5.0, double tau = 1.0) {
  auto hist = seed_history([](double s, StateSpan o) { o[0] = std::cos(s) + 0.5 * std::sin(2 * s); }, 1, tau, h);
  StepperConfig cfg{h, scheme, t_end, false};
  auto tr = integrate([a](double, StateView y, StateView yd, StateSpan d) { d[0] = a * (yd[0] - y[0]); },
                      std::move(hist), cfg);
  return tr.record.back()[0];
}

bool bitwise_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("delay alignment") {
  CHECK(delay_steps(1.0, 0.25) == 4);
  CHECK(delay_steps(0.5, 0.01) == 50);
  CHECK(delay_steps(0.0, 0.1) == 0);
  CHECK(code_of([] { delay_steps(1.0, 0.3); }) == ErrorCode::MisalignedDelay);
  CHECK(code_of([] { delay_steps(0.05, 0.1); }) == ErrorCode::MisalignedDelay);
  CHECK(code_of([] { delay_steps(1.0, 0.0); }) == ErrorCode::EmptyHorizon);
  CHECK(code_of([] { delay_steps(-1.0, 0.1); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("seed_history examples") {
  SUBCASE("constant history") {
    auto buf = seed_history([](double, StateSpan o) { o[0] = 2.5; }, 1, 1.0, 0.25);
    REQUIRE(buf.size() == 5);
    for (std::size_t i = 0; i < buf.size(); ++i) {
      CHECK(buf.state(i)[0] == 2.5);
      CHECK(buf.right_derivative(i)[0] == Approx(0.0));
    }
  }
  SUBCASE("linear history") {
    auto buf = seed_history([](double s, StateSpan o) { o[0] = s; }, 1, 1.0, 0.5);
    REQUIRE(buf.size() == 3);
    CHECK(buf.state(0)[0] == -1.0);
    CHECK(buf.state(1)[0] == -0.5);
    CHECK(buf.state(2)[0] == 0.0);
    CHECK(buf.time(0) == -1.0);
    CHECK(buf.zero_index() == 2);
    for (std::size_t i = 0; i < 3; ++i) CHECK(buf.left_derivative(i)[0] == Approx(1.0).epsilon(1e-8));
  }
  SUBCASE("zero delay keeps one sample") {
    auto buf = seed_history([](double, StateSpan o) { o[0] = 4.0; }, 1, 0.0, 0.1);
    CHECK(buf.size() == 1);
    CHECK(buf.back_time() == 0.0);
    CHECK(buf.back()[0] == 4.0);
  }
  SUBCASE("misaligned delay") {
    CHECK(code_of([] { seed_history([](double, StateSpan o) { o[0] = 0; }, 1, 1.0, 0.3); }) ==
          ErrorCode::MisalignedDelay);
  }
}

TEST_CASE("query") {
  auto cubic = [](double s) { return 2 * s * s * s - s * s + 3 * s - 1; };
  auto dcubic = [](double s) { return 6 * s * s - 2 * s + 3; };
  auto buf = seed_history([&](double s, StateSpan o) { o[0] = cubic(s); }, 1, 1.0, 0.25,
                          [&](double s, StateSpan o) { o[0] = dcubic(s); });
  SUBCASE("grid points are returned bitwise") {
    for (std::size_t i = 0; i < buf.size(); ++i) {
      CHECK(bitwise_equal(buf.query(buf.time(i))[0], buf.state(i)[0]));
    }
  }
  SUBCASE("cubics are reproduced at midpoints") {
    for (double t : {-0.875, -0.625, -0.125, -0.3}) CHECK(buf.query(t)[0] == Approx(cubic(t)).epsilon(1e-14));
  }
  SUBCASE("constants are reproduced") {
    auto c = seed_history([](double, StateSpan o) { o[0] = -3.0; }, 1, 1.0, 0.25);
    for (double t : {-0.9, -0.51, -0.01}) CHECK(c.query(t)[0] == Approx(-3.0).epsilon(1e-12));
  }
  SUBCASE("outside the window") {
    CHECK(code_of([&] { buf.query(-1.01); }) == ErrorCode::OutOfWindow);
    CHECK(code_of([&] { buf.query(0.01); }) == ErrorCode::OutOfWindow);
  }
}

TEST_CASE("constant history is a fixed point") {
  for (Scheme s : {Scheme::ExplicitEuler, Scheme::Rk4}) {
    auto hist = seed_history([](double, StateSpan o) { o[0] = 1.75; }, 1, 0.5, 0.05);
    StepperConfig cfg{0.05, s, 10.0};
    auto tr = integrate([](double, StateView y, StateView yd, StateSpan d) { d[0] = 3.0 * (yd[0] - y[0]); },
                        std::move(hist), cfg);
    for (std::size_t i = 0; i < tr.size(); ++i) CHECK(tr.state(i)[0] == 1.75);
    CHECK(tr.steps.size() == 200);
  }
}

TEST_CASE("explicit Euler hits stored grid points") {
  auto hist = seed_history([](double s, StateSpan o) { o[0] = std::sin(s); }, 1, 0.3, 0.1);
  StepperConfig cfg{0.1, Scheme::ExplicitEuler, 2.0};
  double max_offgrid = 0.0;
  auto tr = integrate(
      [&](double t, StateView, StateView, StateSpan d) {
        const double s = (t - 0.3) / 0.1;
        max_offgrid = std::max(max_offgrid, std::abs(s - std::round(s)));
        d[0] = 0.0;
      },
      std::move(hist), cfg);
  CHECK(max_offgrid < 1e-9);
}

TEST_CASE("observers see every step in order") {
  auto hist = seed_history([](double, StateSpan o) { o[0] = 1.0; }, 1, 0.2, 0.1);
  std::vector<double> seen;
  std::vector<StepObserver> obs{[&](double t, StateView) { seen.push_back(t); }};
  auto tr = integrate([](double, StateView, StateView, StateSpan d) { d[0] = 1.0; }, std::move(hist),
                      StepperConfig{0.1, Scheme::Rk4, 1.0}, obs);
  REQUIRE(seen.size() == 10);
  for (std::size_t i = 0; i < seen.size(); ++i) CHECK(seen[i] == Approx(0.1 * static_cast<double>(i + 1)));
  CHECK(tr.record.back()[0] == Approx(2.0));
  CHECK(tr.steps.back().rhs_evaluations > 0);
}

TEST_CASE("non-finite state aborts") {
  auto hist = seed_history([](double, StateSpan o) { o[0] = 1.0; }, 1, 0.1, 0.1);
  const auto code = code_of([&] {
    integrate([](double, StateView y, StateView, StateSpan d) { d[0] = std::exp(800.0 * y[0]); }, std::move(hist),
              StepperConfig{0.1, Scheme::Rk4, 5.0});
  });
  CHECK(code == ErrorCode::NonFiniteState);
}

TEST_CASE("empty horizon") {
  auto hist = seed_history([](double, StateSpan o) { o[0] = 1.0; }, 1, 0.1, 0.1);
  CHECK(code_of([&] {
          integrate([](double, StateView, StateView, StateSpan d) { d[0] = 0; }, std::move(hist),
                    StepperConfig{0.1, Scheme::Rk4, 0.0});
        }) == ErrorCode::EmptyHorizon);
}

TEST_CASE("zero delay reduces to an ODE") {
  // y' = -y with the delayed argument aliased to the current stage
  auto hist = seed_history([](double, StateSpan o) { o[0] = 1.0; }, 1, 0.0, 0.01);
  auto tr = integrate([](double, StateView, StateView yd, StateSpan d) { d[0] = -yd[0]; }, std::move(hist),
                      StepperConfig{0.01, Scheme::Rk4, 2.0});
  CHECK(tr.record.back()[0] == Approx(std::exp(-2.0)).epsilon(1e-9));
}

TEST_CASE("trimmed history keeps the delay window") {
  auto hist = seed_history([](double s, StateSpan o) { o[0] = s; }, 1, 0.5, 0.1);
  StepperConfig cfg{0.1, Scheme::Rk4, 3.0, false};
  auto tr = integrate([](double, StateView, StateView yd, StateSpan d) { d[0] = yd[0]; }, std::move(hist), cfg);
  CHECK(tr.record.front_time() <= tr.record.back_time() - 0.5 + 1e-12);
  CHECK(tr.size() < 36);
  CHECK(tr.record.back_time() == Approx(3.0));
}

TEST_CASE("determinism") {
  const double a = scalar_problem(3.0, 0.01, Scheme::Rk4);
  const double b = scalar_problem(3.0, 0.01, Scheme::Rk4);
  CHECK(bitwise_equal(a, b));
}

TEST_CASE("rk4 order is at least 2 at a = 1 against an extrapolated reference") {
  // Richardson-extrapolated fine Euler removes the oracle's own O(h) error.
  const double h_ref = 1e-5;
  const double reference = 2.0 * scalar_problem(1.0, h_ref / 2, Scheme::ExplicitEuler) -
                           scalar_problem(1.0, h_ref, Scheme::ExplicitEuler);
  std::vector<double> err;
  for (double h : {0.1, 0.05, 0.025}) err.push_back(std::abs(scalar_problem(1.0, h, Scheme::Rk4) - reference));
  CHECK(err[0] / err[1] >= 4.0);
  CHECK(err[1] / err[2] >= 4.0);
}

TEST_CASE("explicit Euler converges at first order") {
  const double reference = scalar_problem(2.0, 0.001, Scheme::Rk4);
  const double e1 = std::abs(scalar_problem(2.0, 0.02, Scheme::ExplicitEuler) - reference);
  const double e2 = std::abs(scalar_problem(2.0, 0.01, Scheme::ExplicitEuler) - reference);
  CHECK(e1 / e2 == Approx(2.0).epsilon(0.1));
}
