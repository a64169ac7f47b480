#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qes/errors.hpp"
#include "qes/models.hpp"
#include "qes/sl2.hpp"

using namespace qes;
using namespace qes::sl2;

namespace {

PolyCoeffs jp(int N, const PolyCoeffs& p) { return apply_generator({GeneratorKind::kPlus, N}, p); }
PolyCoeffs j0(int N, const PolyCoeffs& p) { return apply_generator({GeneratorKind::kZero, N}, p); }
PolyCoeffs jm(int N, const PolyCoeffs& p) { return apply_generator({GeneratorKind::kMinus, N}, p); }

// Independent oracle: the generators as plain differential operators on
// coefficient vectors, composed by hand.
PolyCoeffs oracle_apply(Basis b, int N, const PolyCoeffs& f) {
  auto d = [](const PolyCoeffs& p) { return p.derivative(); };
  auto z = [](const PolyCoeffs& p) { return PolyCoeffs{0.0, 1.0} * p; };
  auto plus = [&](const PolyCoeffs& p) { return -1.0 * z(z(d(p))) + static_cast<double>(N) * z(p); };
  auto zero = [&](const PolyCoeffs& p) { return z(d(p)) - 0.5 * N * p; };
  auto minus = [&](const PolyCoeffs& p) { return d(p); };
  switch (b) {
    case Basis::kPlusPlus: return plus(plus(f));
    case Basis::kPlusMinus: return plus(minus(f));
    case Basis::kZeroZero: return zero(zero(f));
    case Basis::kMinusMinus: return minus(minus(f));
    case Basis::kPlusZero: return plus(zero(f));
    case Basis::kZeroMinus: return zero(minus(f));
    case Basis::kPlus: return plus(f);
    case Basis::kZero: return zero(f);
    case Basis::kMinus: return minus(f);
    case Basis::kIdentity: return f;
  }
  return {};
}

ZOperator zop_from(const PolyOperator& op, Interval dom) { return make_zoperator(op, dom); }

std::array<double, kBasisSize> razavy_expected(double A, double al) {
  return {-al * al / 8.0, al * A / 3.0 - al * al / 12.0, al * A / 3.0 + al * al / 6.0, -al * al / 8.0, 0.0, 0.0, 0.0,
          al * A / 6.0 + al * al / 12.0, 0.0, 0.0};
}

std::array<double, kBasisSize> sextic_expected(double a, double b) {
  return {-3.0 * b * b / (2.0 * a), a / 3.0 - b / (2.0 * a), a / 3.0 + b / a, -1.0 / (2.0 * a), 0.0, 0.0, 0.0,
          a / 6.0 + b / (2.0 * a), 0.0, 0.0};
}

double rel_diff(const std::array<double, kBasisSize>& a, const std::array<double, kBasisSize>& b) {
  double s = 0.0, d = 0.0;
  for (std::size_t i = 0; i < kBasisSize; ++i) {
    s = std::max(s, std::abs(b[i]));
    d = std::max(d, std::abs(a[i] - b[i]));
  }
  return d / s;
}

ZMap zmap_of(const susy::QesModel& m) { return build_zmap(m, numkit::Grid1d(m.window.lo, m.window.hi, 401)); }

Interval inner(Interval i) {
  const double d = 0.02 * i.width();
  return {i.lo + d, i.hi - d};
}

}  // namespace

TEST_CASE("generators: action on low monomials") {
  const PolyCoeffs one{1.0}, z{0.0, 1.0}, z2{0.0, 0.0, 1.0};
  CHECK(max_abs_diff(jp(1, one), z) == 0.0);
  CHECK(jp(1, z).is_zero());
  CHECK(max_abs_diff(j0(1, one), PolyCoeffs{-0.5}) == 0.0);
  CHECK(max_abs_diff(j0(1, z), PolyCoeffs{0.0, 0.5}) == 0.0);
  CHECK(max_abs_diff(jp(2, z), z2) == 0.0);
  CHECK(jp(2, z2).is_zero());
  CHECK(max_abs_diff(jm(2, z2), PolyCoeffs{0.0, 2.0}) == 0.0);
}

TEST_CASE("generators: j+ raises degree by at most one and kills z^N") {
  for (int N = 0; N <= 6; ++N) {
    CHECK(jp(N, PolyCoeffs::monomial(N)).is_zero());
    for (int k = 0; k <= 8; ++k) {
      CHECK(jp(N, PolyCoeffs::monomial(k)).degree() <= k + 1);
      CHECK(j0(N, PolyCoeffs::monomial(k)).degree() <= k);
      CHECK(jm(N, PolyCoeffs::monomial(k)).degree() <= k - 1);
    }
  }
}

TEST_CASE("commutators hold exactly") {
  for (int N = 0; N <= 8; ++N) {
    const CommutatorReport r = commutator_check(N, 12);
    CHECK(r.max_defect == 0.0);
  }
  CHECK_THROWS_AS(commutator_check(3, 2), UsageError);
}

TEST_CASE("basis expansions match composed generators") {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int N : {0, 1, 2, 5}) {
    for (std::size_t b = 0; b < kBasisSize; ++b) {
      const PolyOperator op = basis_operator(static_cast<Basis>(b), N);
      for (int k = 0; k <= 6; ++k) {
        const PolyCoeffs f = PolyCoeffs::monomial(k, u(rng));
        CHECK(max_abs_diff(op.apply(f), oracle_apply(static_cast<Basis>(b), N, f)) < 1e-13);
      }
    }
  }
}

TEST_CASE("casimir combination is the zero operator") {
  for (int N = 0; N <= 6; ++N) {
    const auto v = casimir_null_vector(N);
    PolyOperator sum;
    for (std::size_t b = 0; b < kBasisSize; ++b) sum += v[b] * basis_operator(static_cast<Basis>(b), N);
    for (int k = 0; k <= 6; ++k) CHECK(sum.apply(PolyCoeffs::monomial(k)).is_zero());
  }
}

TEST_CASE("decompose: random combinations round-trip modulo the casimir relation") {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 12; ++trial) {
    const int N = trial % 3;
    std::array<double, kBasisSize> c{};
    PolyOperator op;
    for (std::size_t b = 0; b < kBasisSize; ++b) {
      c[b] = u(rng);
      op += c[b] * basis_operator(static_cast<Basis>(b), N);
    }
    const ZOperator t = zop_from(op, {-1.0, 2.0});
    for (const Sl2Gauge g : {Sl2Gauge::kZeroConstant, Sl2Gauge::kZeroPlusMinus, Sl2Gauge::kMinimumNorm}) {
      const Sl2Decomposition d = decompose_operator(t, N, {-1.0, 2.0}, g);
      CHECK(d.solve_residual < 1e-10);
      CHECK(round_trip_defect(d, t, {-1.0, 2.0}, 6) < 1e-10);
      // difference to the generating coefficients lies along the null vector
      const auto nv = casimir_null_vector(N);
      std::size_t pivot = 0;
      for (std::size_t b = 0; b < kBasisSize; ++b)
        if (std::abs(nv[b]) > std::abs(nv[pivot])) pivot = b;
      const double lambda = (d.coefficients[pivot] - c[pivot]) / nv[pivot];
      for (std::size_t b = 0; b < kBasisSize; ++b) CHECK(d.coefficients[b] - c[b] == doctest::Approx(lambda * nv[b]).epsilon(1e-9).scale(1.0));
      CHECK((d.gauge == g || (N == 0 && g == Sl2Gauge::kZeroConstant)));
      if (d.gauge == Sl2Gauge::kZeroConstant) CHECK(std::abs(d.coefficients[static_cast<int>(Basis::kIdentity)]) < 1e-12);
      if (d.gauge == Sl2Gauge::kZeroPlusMinus) CHECK(std::abs(d.coefficients[static_cast<int>(Basis::kPlusMinus)]) < 1e-12);
    }
  }
}

TEST_CASE("decompose: degree too high is reported") {
  PolyOperator op;
  op.q1 = PolyCoeffs{0.0, 0.0, 0.0, 0.0, 1.0};
  op.q0 = PolyCoeffs{0.0, 0.0, 0.0, 1.0};
  try {
    decompose_operator(zop_from(op, {0.0, 1.0}), 1, {0.0, 1.0});
    FAIL("expected DecompositionError");
  } catch (const DecompositionError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("q1") != std::string::npos);
    CHECK(msg.find("q0") != std::string::npos);
  }
}

TEST_CASE("zmap: double well and sextic shapes, inversion") {
  const susy::QesModel r = models::razavy_model(1.0, 2.0);
  const ZMap zr = zmap_of(r);
  CHECK(zr.increasing());
  for (double x : {0.5, 1.0, 2.0}) {
    CHECK(zr.z_of_x(x) / zr.z_of_x(0.7) == doctest::Approx(std::tanh(x) / std::tanh(0.7)).epsilon(1e-8));
    CHECK(zr.x_of_z(zr.z_of_x(x)) == doctest::Approx(x).epsilon(1e-10));
    CHECK(zr.dz_dx(x) == doctest::Approx(2.0 * r.epsilon * zr.z_of_x(x) / r.w_plus(x)).epsilon(1e-12));
    CHECK(std::abs(zr.z_interp(x) - zr.z_of_x(x)) < 1e-6);
  }
  CHECK(zr.z_of_x(r.x_ref) == doctest::Approx(r.z_gauge));
  CHECK_THROWS_AS(zr.x_of_z(2.0), DomainError);

  const susy::QesModel s = models::sextic_model(1.0, 1.0);
  const ZMap zs = zmap_of(s);
  for (double x : {0.3, 1.0, 2.5}) CHECK(zs.z_of_x(x) == doctest::Approx(x / std::sqrt(1.0 + x * x)).epsilon(1e-8));
}

TEST_CASE("zmap: constant W+ = 2 eps gives exp(x - x_ref)") {
  susy::QesModel m;
  m.name = "const";
  m.w_plus = SmoothFunction1d::from_formula("1", [](const auto& x) { return 0.0 * x + 1.0; });
  m.epsilon = 0.5;
  m.x_domain = Interval::real_line();
  m.x_ref = 0.25;
  m.window = {-1.0, 1.0};
  const ZMap z = zmap_of(m);
  for (double x : {-0.8, 0.0, 0.9}) CHECK(z.z_of_x(x) == doctest::Approx(std::exp(x - 0.25)).epsilon(1e-12));
}

TEST_CASE("gauge operator: preserves P(1) and has the predicted q2") {
  const susy::QesModel r = models::razavy_model(1.0, 2.0);
  const ZMap zr = zmap_of(r);
  const ZOperator t = gauge_operator_t(r, zr);
  for (double z : numkit::chebyshev_nodes(inner(zr.z_range()), 16)) {
    CHECK(std::abs(t.apply(PolyCoeffs{1.0}, z)) < 1e-14);
    CHECK(t.apply(PolyCoeffs{0.0, 1.0}, z) == doctest::Approx(r.epsilon * z).epsilon(1e-13));
    CHECK(t.q2_at(z) == doctest::Approx(-0.5 * (1 - z * z) * (1 - z * z)).epsilon(1e-8));
  }
  const susy::QesModel s = models::sextic_model(1.0, 2.0);
  const ZMap zs = zmap_of(s);
  const ZOperator ts = gauge_operator_t(s, zs);
  for (double z : numkit::chebyshev_nodes(inner(zs.z_range()), 16)) {
    CHECK(ts.q2_at(z) == doctest::Approx(-0.5 * std::pow(1 - 2.0 * z * z, 3)).epsilon(1e-8));
  }
}

TEST_CASE("gauge conjugation: H on eta f(z) equals T f") {
  const susy::QesModel r = models::razavy_model(1.0, 2.0);
  const std::vector<double> probes{0.5, 0.9, 1.3, 1.8};
  CHECK(gauge_conjugation_check(r, PolyCoeffs{1.0}, probes) < 1e-6);
  CHECK(gauge_conjugation_check(r, PolyCoeffs{0.0, 1.0}, probes) < 1e-6);
  const susy::QesModel s = models::sextic_model(1.0, 1.0);
  CHECK(gauge_conjugation_check(s, PolyCoeffs{0.0, 0.0, 1.0}, {0.3, 0.6, 1.0, 1.5}) < 1e-5);
  CHECK_THROWS_AS(gauge_conjugation_check(s, PolyCoeffs{1.0}, {1e-4}), SingularityError);
}

TEST_CASE("equivalence: double well yes, sextic no, verdict independent of the z constant") {
  for (double scale : {1.0, 0.5, 2.0}) {
    susy::QesModel r = models::razavy_model(1.0, 2.0);
    r.z_gauge *= scale;
    const EquivalenceResult er = quartic_equivalence_test(r, zmap_of(r));
    CHECK(er.equivalent);
    CHECK_FALSE(er.borderline);
    susy::QesModel s = models::sextic_model(1.0, 1.0);
    s.z_gauge *= scale;
    const EquivalenceResult es = quartic_equivalence_test(s, zmap_of(s));
    CHECK_FALSE(es.equivalent);
  }
  const susy::QesModel r = models::razavy_model(1.0, 2.0);
  const EquivalenceResult er = quartic_equivalence_test(r, zmap_of(r));
  const double c0 = 0.25;
  CHECK(er.c[0] == doctest::Approx(c0).epsilon(1e-8));
  CHECK(std::abs(er.c[1]) < 1e-8);
  CHECK(er.c[2] == doctest::Approx(-2.0 * c0).epsilon(1e-8));
  CHECK(std::abs(er.c[3]) < 1e-8);
  CHECK(er.c[4] == doctest::Approx(c0).epsilon(1e-8));
}

TEST_CASE("equivalence: W+(z) = z is a quartic with c = (1, 0, 0, 0, 0)") {
  // W+ = x with 2 eps = 1 gives z = x
  susy::QesModel m;
  m.name = "linear";
  m.w_plus = SmoothFunction1d::from_formula("x", [](const auto& x) { return x; });
  m.epsilon = 0.5;
  m.x_domain = {0.0, std::numeric_limits<double>::infinity()};
  m.x_ref = 1.0;
  m.w_plus_zeros = {0.0};
  m.window = {0.5, 3.0};
  const EquivalenceResult e = quartic_equivalence_test(m, zmap_of(m));
  CHECK(e.equivalent);
  CHECK(e.fit_residual < 1e-10);
  CHECK(e.c[0] == doctest::Approx(1.0).epsilon(1e-9));
  for (int k = 1; k < 5; ++k) CHECK(std::abs(e.c[k]) < 1e-9);
}

TEST_CASE("decompose: closed-form coefficients for the two W+ models") {
  for (const auto [A, al] : {std::pair{1.0, 2.0}, std::pair{0.6, 1.3}}) {
    const susy::QesModel r = models::razavy_model(A, al);
    const ZMap z = zmap_of(r);
    const ZOperator t = gauge_operator_t(r, z);
    const Sl2Decomposition d = decompose_operator(t, 1, inner(z.z_range()));
    CHECK(rel_diff(d.coefficients, razavy_expected(A, al)) < 1e-8);
    CHECK(round_trip_defect(d, t, inner(z.z_range()), 4) < 1e-10);
    CHECK(remainder_annihilation_defect(d, t, inner(z.z_range())) < 1e-10);
    REQUIRE(d.remainder_poly.has_value());
    CHECK(max_abs_diff(*d.remainder_poly, PolyCoeffs{}) < 1e-8);
  }
  for (const auto [a, b] : {std::pair{1.0, 1.0}, std::pair{2.0, 0.5}}) {
    const susy::QesModel s = models::sextic_model(a, b);
    const ZMap z = zmap_of(s);
    const ZOperator t = gauge_operator_t(s, z);
    const Sl2Decomposition d = decompose_operator(t, 1, inner(z.z_range()));
    CHECK(rel_diff(d.coefficients, sextic_expected(a, b)) < 1e-8);
    REQUIRE(d.remainder_poly.has_value());
    CHECK(max_abs_diff(*d.remainder_poly, PolyCoeffs::monomial(6, b * b * b / (2.0 * a))) < 1e-8 * b * b * b / a);
    CHECK(round_trip_defect(d, t, inner(z.z_range()), 6) < 1e-10);
    CHECK(remainder_annihilation_defect(d, t, inner(z.z_range())) < 1e-10);
  }
}
