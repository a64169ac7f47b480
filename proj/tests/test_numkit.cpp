#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "qes/errors.hpp"
#include "qes/models.hpp"
#include "qes/numkit.hpp"

using namespace qes;
using namespace qes::numkit;

namespace {

SmoothFunction1d constant(double c) {
  return SmoothFunction1d::from_formula("c", [c](const auto& x) { return 0.0 * x + c; });
}

// Dense eigenvalues of the same tridiagonal matrix, independent of the Sturm solver.
std::vector<double> dense_eigenvalues(const TridiagSym& m) {
  const auto n = static_cast<Eigen::Index>(m.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, i) = m.diag[i];
    if (i + 1 < n) a(i, i + 1) = a(i + 1, i) = m.offdiag[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  const Eigen::VectorXd ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

// Term-by-term Gauss series with explicit Pochhammer symbols.
double hyp2f1_direct(unsigned n, double b, double c, double x) {
  double sum = 0.0;
  for (unsigned k = 0; k <= n; ++k) {
    double term = 1.0;
    for (unsigned j = 0; j < k; ++j) term *= (-static_cast<double>(n) + j) * (b + j) / ((c + j) * (j + 1.0));
    sum += term * std::pow(x, k);
  }
  return sum;
}

}  // namespace

TEST_CASE("grid: invariants") {
  const Grid1d g(-1.0, 2.0, 7);
  CHECK(g.spacing() == doctest::Approx(0.5));
  CHECK(g.point(0) == -1.0);
  CHECK(g.point(6) == 2.0);
  CHECK(g.points().size() == 7);
  CHECK_THROWS_AS(Grid1d(1.0, 1.0, 5), UsageError);
  CHECK_THROWS_AS(Grid1d(0.0, 1.0, 2), UsageError);
}

TEST_CASE("discretize: free-particle stencil") {
  const TridiagSym m = discretize_hamiltonian(constant(0.0), Grid1d(0.0, 2.0, 3), 0.5);
  REQUIRE(m.size() == 3);
  for (double d : m.diag) CHECK(d == doctest::Approx(1.0));
  REQUIRE(m.offdiag.size() == 2);
  for (double o : m.offdiag) CHECK(o == doctest::Approx(-0.5));
}

TEST_CASE("discretize: non-finite potential names the point") {
  const SmoothFunction1d bad = SmoothFunction1d::from_formula("1/x", [](const auto& x) { return 1.0 / x; });
  try {
    discretize_hamiltonian(bad, Grid1d(-1.0, 1.0, 5), 0.5);
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("x = 0") != std::string::npos);
  }
}

TEST_CASE("eigenvalues: small closed forms") {
  TridiagSym two{{2.0, 2.0}, {-1.0}};
  const auto e2 = eigenvalues_lowest(two, 2);
  CHECK(e2[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(e2[1] == doctest::Approx(3.0).epsilon(1e-14));
  TridiagSym one{{4.25}, {}};
  CHECK(eigenvalues_lowest(one, 1)[0] == doctest::Approx(4.25));
  CHECK_THROWS_AS(eigenvalues_lowest(two, 3), UsageError);
  CHECK_THROWS_AS(eigenvalues_lowest(two, 0), UsageError);
}

TEST_CASE("eigenvalues: bisection matches a dense solver") {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 5; ++trial) {
    TridiagSym m;
    for (int i = 0; i < 40; ++i) m.diag.push_back(u(rng));
    for (int i = 0; i < 39; ++i) m.offdiag.push_back(u(rng));
    const auto dense = dense_eigenvalues(m);
    const auto low = eigenvalues_lowest(m, 10);
    for (int i = 0; i < 10; ++i) CHECK(low[i] == doctest::Approx(dense[i]).epsilon(1e-12));
    CHECK(sturm_count(m, dense[5] + 1e-9) == 6);
  }
}

TEST_CASE("spectrum: harmonic control after one Richardson step") {
  const SpectralResult s = lowest_spectrum(models::harmonic_potential(), {-10.0, 10.0}, 2000, 4000, 0.5, 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(s.eigenvalues[i] - (i + 0.5)) < 1e-6);
    CHECK(s.refinement_error[i] >= 0.0);
  }
  CHECK(std::is_sorted(s.eigenvalues.begin(), s.eigenvalues.end()));
  CHECK(s.grid_used.size() == 4000);
}

TEST_CASE("spectrum: Dirichlet box growth never raises eigenvalues") {
  const SmoothFunction1d v = SmoothFunction1d::from_formula("x^4", [](const auto& x) { return x * x * x * x; });
  const double h = 0.01;
  std::vector<double> prev;
  for (double half : {1.0, 1.5, 2.0, 3.0}) {
    const auto n = static_cast<std::size_t>(std::lround(2 * half / h)) + 1;
    const auto ev = eigenvalues_lowest(discretize_hamiltonian(v, Grid1d(-half, half, n), 0.5), 4);
    if (!prev.empty()) {
      for (int i = 0; i < 4; ++i) CHECK(ev[i] <= prev[i] + 1e-9);
    }
    prev = ev;
  }
}

TEST_CASE("cumulative integral: constants, cubics and cos") {
  const Grid1d g(0.0, 2.0, 21);
  const auto one = cumulative_integral(constant(1.0), g, 0.0);
  CHECK(one.back() == doctest::Approx(2.0).epsilon(1e-14));

  const SmoothFunction1d cubic =
      SmoothFunction1d::from_formula("cubic", [](const auto& x) { return 1.0 - 2.0 * x + 3.0 * x * x * x; });
  const auto fc = cumulative_integral(cubic, g, 0.37);
  auto anti = [](double x) { return x - x * x + 0.75 * x * x * x * x; };
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(fc[i] == doctest::Approx(anti(g.point(i)) - anti(0.37)).epsilon(1e-12));

  const Grid1d fine(0.0, std::numbers::pi / 2, 2001);
  const SmoothFunction1d c = SmoothFunction1d::from_formula("cos", [](const auto& x) { return cos(x); });
  CHECK(std::abs(cumulative_integral(c, fine, 0.0).back() - 1.0) < 1e-10);
}

TEST_CASE("cumulative integral: 1/W+ for the double well") {
  const susy::QesModel m = models::razavy_model(1.0, 2.0);
  const SmoothFunction1d inv = SmoothFunction1d::from_formula(
      "1/W+", [](const auto& x) { return 1.0 / sinh(2.0 * x); }, {0.0, 10.0}, {0.0});
  const Grid1d g(0.3, 3.0, 2001);
  const auto f = cumulative_integral(inv, g, 0.5);
  auto closed = [](double x) { return 0.5 * std::log(std::abs(std::tanh(x))); };
  double lo = 1e300, hi = -1e300;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double d = f[i] - closed(g.point(i));
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  CHECK(hi - lo < 1e-8);
  CHECK(m.epsilon == 1.0);
}

TEST_CASE("cumulative integral: changing the base point shifts by a constant") {
  const SmoothFunction1d f = SmoothFunction1d::from_formula("f", [](const auto& x) { return exp(-x) * sin(3.0 * x); });
  const Grid1d g(-1.0, 2.0, 301);
  const auto a = cumulative_integral(f, g, -0.3);
  const auto b = cumulative_integral(f, g, 1.17);
  double lo = 1e300, hi = -1e300;
  for (std::size_t i = 0; i < g.size(); ++i) {
    lo = std::min(lo, a[i] - b[i]);
    hi = std::max(hi, a[i] - b[i]);
  }
  CHECK(hi - lo < 1e-10);
}

TEST_CASE("cumulative integral: base point outside the grid is rejected") {
  CHECK_THROWS(cumulative_integral(constant(1.0), Grid1d(0.0, 1.0, 11), 2.0));
}

TEST_CASE("integrate: adaptive quadrature, including near-cancelling spans") {
  CHECK(integrate([](double x) { return std::cos(x); }, 0.0, std::numbers::pi / 2) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(integrate([](double x) { return std::sin(x); }, -2.0, 2.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(integrate([](double x) { return x; }, 1.0, 1.0 + 1e-15) == doctest::Approx(1e-15).epsilon(1e-6));
}

TEST_CASE("rk4: exponential growth and fourth-order convergence") {
  auto rhs = [](double, double y) { return y; };
  const Trajectory t = integrate_ode_1st(rhs, 1.0, 0.0, 1.0, 1e-3);
  CHECK(t.completion == Completion::kReachedEnd);
  CHECK(std::abs(t.points.back().y - std::exp(1.0)) < 1e-8);
  CHECK(t.points.back().t == doctest::Approx(1.0));

  const double e1 = std::abs(integrate_ode_1st(rhs, 1.0, 0.0, 1.0, 0.1).points.back().y - std::exp(1.0));
  const double e2 = std::abs(integrate_ode_1st(rhs, 1.0, 0.0, 1.0, 0.05).points.back().y - std::exp(1.0));
  const double ratio = e1 / e2;
  CHECK(ratio >= 12.0);
  CHECK(ratio <= 20.0);
}

TEST_CASE("rk4: constant field, stop rule and bad start") {
  const Trajectory c = integrate_ode_1st([](double, double) { return 0.0; }, 2.5, 0.0, 1.0, 0.1);
  for (const auto& p : c.points) CHECK(p.y == 2.5);

  const Trajectory s =
      integrate_ode_1st([](double, double y) { return y * y; }, 1.0, 0.0, 2.0, 1e-3, [](double, double y) { return y > 10.0; });
  CHECK(s.completion == Completion::kStopped);
  CHECK(s.stopped_early());
  CHECK(s.points.back().y <= 10.0);
  CHECK(std::string(to_string(s.completion)) == "stopped");

  CHECK_THROWS_AS(integrate_ode_1st([](double, double) { return std::nan(""); }, 0.0, 0.0, 1.0, 0.1), DomainError);
  CHECK_THROWS_AS(integrate_ode_1st([](double, double) { return 0.0; }, 0.0, 0.0, 1.0, -0.1), UsageError);
}

TEST_CASE("hyp2f1: truncated series") {
  CHECK(hyp2f1_poly(0, 3.3, 1.7, 0.8) == 1.0);
  CHECK(hyp2f1_poly(1, 3.0, 2.0, 0.4) == doctest::Approx(1.0 - 1.5 * 0.4));
  CHECK(hyp2f1_poly(2, 4.5, 3.5, 0.5) == doctest::Approx(3.0 / 28.0).epsilon(1e-14));
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (unsigned n = 0; n < 7; ++n) {
    const double x = u(rng);
    CHECK(hyp2f1_poly(n, 3.5 + n, 2.5, x) == doctest::Approx(hyp2f1_direct(n, 3.5 + n, 2.5, x)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(hyp2f1_poly(3, 1.0, -1.0, 0.2), DomainError);
  CHECK_NOTHROW(hyp2f1_poly(1, 1.0, -1.0, 0.2));  // (c)_0 only
}

TEST_CASE("polynomial fit: exact recovery on Chebyshev nodes") {
  const auto nodes = chebyshev_nodes({-0.5, 3.0}, 24);
  CHECK(std::is_sorted(nodes.begin(), nodes.end()));
  CHECK(nodes.front() > -0.5);
  CHECK(nodes.back() < 3.0);
  const PolyCoeffs p{0.3, -1.0, 0.0, 2.5, -0.75};
  std::vector<double> ys;
  for (double x : nodes) ys.push_back(p(x));
  const PolyFit fit = fit_polynomial(nodes, ys, 4);
  CHECK(max_abs_diff(fit.poly, p) < 1e-11);
  CHECK(fit.max_abs_residual < 1e-11);
}

TEST_CASE("finite differences: five-point stencils") {
  auto f = [](double x) { return std::sin(x) * std::exp(x); };
  const double x = 0.7;
  CHECK(first_derivative_fd(f, x, 1e-3) == doctest::Approx(std::exp(x) * (std::sin(x) + std::cos(x))).epsilon(1e-10));
  CHECK(second_derivative_fd(f, x, 1e-3) == doctest::Approx(2.0 * std::exp(x) * std::cos(x)).epsilon(1e-8));
}
