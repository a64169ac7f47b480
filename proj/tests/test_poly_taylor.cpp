#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qes/errors.hpp"
#include "qes/poly.hpp"
#include "qes/smooth_function.hpp"
#include "qes/taylor.hpp"

using namespace qes;

namespace {

// Five-point derivative of a plain double function, used as the oracle.
template <class F>
double fd1(F f, double x, double h = 1e-3) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}
template <class F>
double fd2(F f, double x, double h = 1e-3) {
  return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h);
}

}  // namespace

TEST_CASE("taylor: elementary functions match closed-form derivatives") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.2, 1.3);
  for (int trial = 0; trial < 16; ++trial) {
    const double x = u(rng);
    const Taylor t = Taylor::variable(x);

    const Taylor e = exp(t);
    for (int k = 0; k <= Taylor::kMaxOrder; ++k) CHECK(e.derivative(k) == doctest::Approx(std::exp(x)).epsilon(1e-13));

    const Taylor s = sin(t);
    CHECK(s.derivative(1) == doctest::Approx(std::cos(x)).epsilon(1e-13));
    CHECK(s.derivative(2) == doctest::Approx(-std::sin(x)).epsilon(1e-13));
    CHECK(s.derivative(5) == doctest::Approx(std::cos(x)).epsilon(1e-12));

    const Taylor ta = tan(t);
    const double sec2 = 1.0 / (std::cos(x) * std::cos(x));
    CHECK(ta.derivative(1) == doctest::Approx(sec2).epsilon(1e-13));
    CHECK(ta.derivative(2) == doctest::Approx(2.0 * std::tan(x) * sec2).epsilon(1e-12));

    const Taylor th = tanh(t);
    const double sech2 = 1.0 - std::tanh(x) * std::tanh(x);
    CHECK(th.derivative(1) == doctest::Approx(sech2).epsilon(1e-13));
    CHECK(th.derivative(2) == doctest::Approx(-2.0 * std::tanh(x) * sech2).epsilon(1e-12));

    const Taylor lg = log(t);
    CHECK(lg.derivative(3) == doctest::Approx(2.0 / (x * x * x)).epsilon(1e-12));

    const Taylor p = pow(t, -1.5);
    CHECK(p.derivative(2) == doctest::Approx(3.75 * std::pow(x, -3.5)).epsilon(1e-12));

    const Taylor at = atan(t);
    CHECK(at.derivative(1) == doctest::Approx(1.0 / (1.0 + x * x)).epsilon(1e-13));

    CHECK(cosh(t).derivative(2) == doctest::Approx(std::cosh(x)).epsilon(1e-13));
    CHECK(sinh(t).derivative(3) == doctest::Approx(std::cosh(x)).epsilon(1e-13));
  }
}

TEST_CASE("taylor: compositions agree with finite differences") {
  auto g = [](const auto& x) { return exp(sin(x) / (1.0 + x * x)) * sqrt(cosh(x)) - atan(x * x); };
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 16; ++trial) {
    const double x = u(rng);
    const Taylor t = g(Taylor::variable(x));
    auto plain = [&](double y) { return g(y); };
    CHECK(t.value() == doctest::Approx(plain(x)).epsilon(1e-14));
    CHECK(t.derivative(1) == doctest::Approx(fd1(plain, x)).epsilon(1e-9));
    CHECK(t.derivative(2) == doctest::Approx(fd2(plain, x)).epsilon(1e-6));
  }
}

TEST_CASE("taylor: deriv drops one order and integral restores it") {
  const Taylor t = exp(Taylor::variable(0.3));
  const Taylor d = t.deriv();
  CHECK(d.order() == Taylor::kMaxOrder - 1);
  const Taylor back = d.integral(t.value());
  for (int k = 0; k <= d.order(); ++k) CHECK(back[k] == doctest::Approx(t[k]).epsilon(1e-14));
}

TEST_CASE("poly: degree, derivative and products") {
  const PolyCoeffs p{1.0, -2.0, 0.0, 3.0};
  CHECK(p.degree() == 3);
  CHECK(PolyCoeffs{}.degree() == -1);
  CHECK(PolyCoeffs{0.0, 0.0}.is_zero());
  CHECK(max_abs_diff(p.derivative(), PolyCoeffs{-2.0, 0.0, 9.0}) == 0.0);
  const PolyCoeffs q{0.5, 1.0};
  const PolyCoeffs pq = p * q;
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 16; ++i) {
    const double z = u(rng);
    CHECK(pq(z) == doctest::Approx(p(z) * q(z)).epsilon(1e-14));
  }
  CHECK(max_abs_diff(p.truncated(1) + p.tail(1), p) == 0.0);
}

TEST_CASE("poly: horner works on taylor arguments") {
  const PolyCoeffs p{1.0, 0.0, -2.0, 0.0, 1.0};  // (1 - z^2)^2
  const Taylor t = p(Taylor::variable(0.4));
  CHECK(t.derivative(1) == doctest::Approx(-4.0 * 0.4 * (1.0 - 0.16)).epsilon(1e-14));
  CHECK(t.derivative(4) == doctest::Approx(24.0).epsilon(1e-14));
}

TEST_CASE("smooth function: domain, singularities and derivatives") {
  const SmoothFunction1d f = SmoothFunction1d::from_formula(
      "1/x", [](const auto& x) { return 1.0 / x; }, {-1.0, 1.0}, {0.0});
  CHECK(f(0.5) == doctest::Approx(2.0));
  CHECK(f.d1(0.5) == doctest::Approx(-4.0));
  CHECK(f.d2(0.5) == doctest::Approx(16.0));
  CHECK_THROWS_AS(f(0.0), SingularityError);
  CHECK_THROWS_AS(f(2.0), DomainError);
  CHECK_THROWS_AS(f.check_window({-0.5, 0.5}), SingularityError);
  CHECK_NOTHROW(f.check_window({0.1, 0.5}));

  const SmoothFunction1d g = SmoothFunction1d::from_formula("x^2", [](const auto& x) { return x * x; });
  const SmoothFunction1d sum = f + g;
  CHECK(sum.domain().hi == 1.0);
  CHECK(sum(0.5) == doctest::Approx(2.25));
  CHECK(derivative(g)(3.0) == doctest::Approx(6.0));
}

TEST_CASE("smooth function: finite differences reproduce f' and f'' to O(h^2)") {
  const SmoothFunction1d f = SmoothFunction1d::from_formula(
      "mix", [](const auto& x) { return sin(2.0 * x) * exp(-0.3 * x * x) + 0.1 * x * x * x; });
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const double h = 1e-4;
  for (int i = 0; i < 16; ++i) {
    const double x = u(rng);
    const double c1 = (f(x + h) - f(x - h)) / (2 * h);
    const double c2 = (f(x + h) - 2 * f(x) + f(x - h)) / (h * h);
    // third and fourth derivatives stay below ~30 on [-2, 2]
    CHECK(std::abs(c1 - f.d1(x)) <= 30.0 * h * h);
    CHECK(std::abs(c2 - f.d2(x)) <= 30.0 * h * h + 1e-7);
  }
}
