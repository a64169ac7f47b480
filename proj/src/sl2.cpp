#include "qes/sl2.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "qes/errors.hpp"
#include "qes/numkit.hpp"

namespace qes::sl2 {

PolyCoeffs apply_generator(const Sl2Generator& g, const PolyCoeffs& p) {
  const std::size_t n = p.size();
  const double N = g.N;
  switch (g.kind) {
    case GeneratorKind::kMinus:
      return p.derivative();
    case GeneratorKind::kZero: {
      std::vector<double> out(n);
      for (std::size_t k = 0; k < n; ++k) out[k] = (static_cast<double>(k) - N / 2.0) * p[k];
      return PolyCoeffs(std::move(out));
    }
    case GeneratorKind::kPlus: {
      std::vector<double> out(n + 1, 0.0);
      for (std::size_t k = 1; k <= n; ++k) out[k] = (N - (static_cast<double>(k) - 1.0)) * p[k - 1];
      return PolyCoeffs(std::move(out));
    }
  }
  return {};
}

CommutatorReport commutator_check(int N, int max_degree) {
  if (N < 0) throw UsageError("commutator_check: N must be nonnegative");
  if (max_degree < N) throw UsageError("commutator_check: max_degree must be >= N");
  const Sl2Generator jp{GeneratorKind::kPlus, N}, j0{GeneratorKind::kZero, N}, jm{GeneratorKind::kMinus, N};
  auto comm = [](const Sl2Generator& a, const Sl2Generator& b, const PolyCoeffs& p) {
    return apply_generator(a, apply_generator(b, p)) - apply_generator(b, apply_generator(a, p));
  };
  double defect = 0.0;
  for (int k = 0; k <= max_degree; ++k) {
    const PolyCoeffs m = PolyCoeffs::monomial(static_cast<std::size_t>(k));
    defect = std::max(defect, max_abs_diff(comm(j0, jp, m), apply_generator(jp, m)));
    defect = std::max(defect, max_abs_diff(comm(j0, jm, m), -1.0 * apply_generator(jm, m)));
    defect = std::max(defect, max_abs_diff(comm(jp, jm, m), 2.0 * apply_generator(j0, m)));
  }
  return {N, max_degree, defect};
}

PolyCoeffs PolyOperator::apply(const PolyCoeffs& f) const {
  const PolyCoeffs d1 = f.derivative();
  return q2 * d1.derivative() + q1 * d1 + q0 * f;
}

double PolyOperator::apply(const PolyCoeffs& f, double z) const {
  const PolyCoeffs d1 = f.derivative();
  return q2(z) * d1.derivative()(z) + q1(z) * d1(z) + q0(z) * f(z);
}

PolyOperator& PolyOperator::operator+=(const PolyOperator& o) {
  q2 += o.q2;
  q1 += o.q1;
  q0 += o.q0;
  return *this;
}

PolyOperator operator*(double s, const PolyOperator& op) { return {s * op.q2, s * op.q1, s * op.q0}; }

double ZOperator::q2_at(double z) const { return q2_poly ? (*q2_poly)(z) : q2(z); }

double ZOperator::apply(const PolyCoeffs& f, double z) const {
  const PolyCoeffs d1 = f.derivative();
  return q2_at(z) * d1.derivative()(z) + q1(z) * d1(z) + q0(z) * f(z);
}

double ZOperator::apply(const Taylor& f, double z) const {
  return q2_at(z) * f.derivative(2) + q1(z) * f.derivative(1) + q0(z) * f.value();
}

ZOperator make_zoperator(const PolyOperator& op, Interval z_domain) {
  return {[q2 = op.q2](double z) { return q2(z); }, op.q1, op.q0, z_domain, op.q2};
}

std::string_view basis_name(std::size_t i) {
  static constexpr std::array<std::string_view, kBasisSize> names = {
      "j+^2", "j+j-", "j0^2", "j-^2", "j+j0", "j0j-", "j+", "j0", "j-", "1"};
  return i < names.size() ? names[i] : "?";
}

namespace {

// a(z) d/dz + b(z)
struct FirstOrder {
  PolyCoeffs a, b;
};

FirstOrder generator_op(GeneratorKind kind, int N) {
  const double n = N;
  switch (kind) {
    case GeneratorKind::kPlus: return {{0.0, 0.0, -1.0}, {0.0, n}};
    case GeneratorKind::kZero: return {{0.0, 1.0}, {-n / 2.0}};
    case GeneratorKind::kMinus: return {{1.0}, {}};
  }
  return {};
}

PolyOperator compose(const FirstOrder& f, const FirstOrder& g) {
  return {f.a * g.a, f.a * g.a.derivative() + f.a * g.b + f.b * g.a, f.a * g.b.derivative() + f.b * g.b};
}

PolyOperator linear(const FirstOrder& f) { return {{}, f.a, f.b}; }

}  // namespace

PolyOperator basis_operator(Basis b, int N) {
  const FirstOrder p = generator_op(GeneratorKind::kPlus, N);
  const FirstOrder z = generator_op(GeneratorKind::kZero, N);
  const FirstOrder m = generator_op(GeneratorKind::kMinus, N);
  switch (b) {
    case Basis::kPlusPlus: return compose(p, p);
    case Basis::kPlusMinus: return compose(p, m);
    case Basis::kZeroZero: return compose(z, z);
    case Basis::kMinusMinus: return compose(m, m);
    case Basis::kPlusZero: return compose(p, z);
    case Basis::kZeroMinus: return compose(z, m);
    case Basis::kPlus: return linear(p);
    case Basis::kZero: return linear(z);
    case Basis::kMinus: return linear(m);
    case Basis::kIdentity: return {{}, {}, {1.0}};
  }
  return {};
}

std::array<double, kBasisSize> casimir_null_vector(int N) {
  std::array<double, kBasisSize> v{};
  const double j = N / 2.0;
  v[static_cast<int>(Basis::kZeroZero)] = 1.0;
  v[static_cast<int>(Basis::kPlusMinus)] = 1.0;
  v[static_cast<int>(Basis::kZero)] = -1.0;
  v[static_cast<int>(Basis::kIdentity)] = -j * (j + 1.0);
  return v;
}

PolyOperator Sl2Decomposition::combination() const {
  PolyOperator sum;
  for (std::size_t i = 0; i < kBasisSize; ++i) {
    if (coefficients[i] != 0.0) sum += coefficients[i] * basis_operator(static_cast<Basis>(i), N);
  }
  return sum;
}

double Sl2Decomposition::apply(const PolyCoeffs& f, double z) const {
  return combination().apply(f, z) + remainder.apply(f, z);
}

namespace {

constexpr int kQ2Rows = 5;  // z^0..z^4
constexpr int kQ1Rows = 4;  // z^0..z^3
constexpr int kQ0Rows = 3;  // z^0..z^2

std::string describe_excess(const char* name, const PolyCoeffs& p, int max_deg) {
  std::ostringstream os;
  os.precision(17);
  for (int k = max_deg + 1; k < static_cast<int>(p.size()); ++k) {
    if (p[k] != 0.0) os << " " << name << "[z^" << k << "] = " << p[k] << ";";
  }
  return os.str();
}

struct Q2Split {
  PolyCoeffs quartic;
  std::optional<PolyCoeffs> full;  // exact polynomial form, when recognized
  double residual;
};

Q2Split split_q2(const ZOperator& op, Interval dom) {
  if (op.q2_poly) return {op.q2_poly->truncated(4), *op.q2_poly, 0.0};
  const std::vector<double> nodes = numkit::chebyshev_nodes(dom, 64);
  const std::vector<double> held = numkit::chebyshev_nodes(dom, 97);
  std::vector<double> ys(nodes.size()), yh(held.size());
  double scale = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) ys[i] = op.q2(nodes[i]);
  for (std::size_t i = 0; i < held.size(); ++i) {
    yh[i] = op.q2(held[i]);
    scale = std::max(scale, std::abs(yh[i]));
  }
  if (!(scale > 0.0)) return {PolyCoeffs{}, PolyCoeffs{}, 0.0};
  auto held_residual = [&](const PolyCoeffs& p) {
    double r = 0.0;
    for (std::size_t i = 0; i < held.size(); ++i) r = std::max(r, std::abs(p(held[i]) - yh[i]));
    return r / scale;
  };
  for (unsigned deg = 4; deg <= 12; ++deg) {
    const numkit::PolyFit fit = numkit::fit_polynomial(nodes, ys, deg);
    const double r = held_residual(fit.poly);
    if (r < 1e-10) return {fit.poly.truncated(4), fit.poly, r};
  }
  const numkit::PolyFit fit4 = numkit::fit_polynomial(nodes, ys, 4);
  return {fit4.poly, std::nullopt, held_residual(fit4.poly)};
}

}  // namespace

Sl2Decomposition decompose_operator(const ZOperator& op, int N, Interval fit_domain, Sl2Gauge gauge) {
  if (N < 0) throw UsageError("decompose_operator: N must be nonnegative");
  if (!(fit_domain.lo < fit_domain.hi)) throw UsageError("decompose_operator: empty fit domain");
  const std::string excess =
      describe_excess("q1", op.q1, kQ1Rows - 1) + describe_excess("q0", op.q0, kQ0Rows - 1);
  if (!excess.empty())
    throw DecompositionError("decompose_operator: degree too high for a quadratic sl(2) combination:" + excess);

  Sl2Decomposition d;
  d.N = N;
  d.gauge = gauge;
  const Q2Split split = split_q2(op, fit_domain);
  d.quartic_part = split.quartic;
  d.q2_polynomial = split.full.has_value();
  d.q2_fit_residual = split.residual;
  if (split.full) {
    const PolyCoeffs tail = split.full->tail(4);
    d.remainder_poly = tail;
    d.remainder = {[tail](double z) { return tail(z); }, {}, {}, op.z_domain, tail};
  } else {
    d.remainder = {[q2 = op.q2, quartic = split.quartic](double z) { return q2(z) - quartic(z); },
                   {}, {}, op.z_domain, std::nullopt};
  }

  constexpr int rows = kQ2Rows + kQ1Rows + kQ0Rows;
  Eigen::MatrixXd a(rows, kBasisSize);
  Eigen::VectorXd rhs(rows);
  for (std::size_t j = 0; j < kBasisSize; ++j) {
    const PolyOperator b = basis_operator(static_cast<Basis>(j), N);
    for (int k = 0; k < kQ2Rows; ++k) a(k, j) = b.q2[k];
    for (int k = 0; k < kQ1Rows; ++k) a(kQ2Rows + k, j) = b.q1[k];
    for (int k = 0; k < kQ0Rows; ++k) a(kQ2Rows + kQ1Rows + k, j) = b.q0[k];
  }
  for (int k = 0; k < kQ2Rows; ++k) rhs(k) = split.quartic[k];
  for (int k = 0; k < kQ1Rows; ++k) rhs(kQ2Rows + k) = op.q1[k];
  for (int k = 0; k < kQ0Rows; ++k) rhs(kQ2Rows + kQ1Rows + k) = op.q0[k];

  int pinned = -1;
  if (gauge == Sl2Gauge::kZeroConstant) pinned = static_cast<int>(Basis::kIdentity);
  if (gauge == Sl2Gauge::kZeroPlusMinus) pinned = static_cast<int>(Basis::kPlusMinus);
  // a pin on a coefficient the null vector does not touch (the constant at N = 0)
  // removes no freedom; use minimum norm instead
  if (pinned >= 0 && std::abs(casimir_null_vector(N)[static_cast<std::size_t>(pinned)]) < 1e-12) {
    pinned = -1;
    d.gauge = Sl2Gauge::kMinimumNorm;
  }

  std::vector<int> cols;
  for (int j = 0; j < static_cast<int>(kBasisSize); ++j)
    if (j != pinned) cols.push_back(j);
  Eigen::MatrixXd reduced(rows, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) reduced.col(static_cast<Eigen::Index>(c)) = a.col(cols[c]);
  const Eigen::VectorXd sol = reduced.completeOrthogonalDecomposition().solve(rhs);
  for (std::size_t c = 0; c < cols.size(); ++c) d.coefficients[cols[c]] = sol(static_cast<Eigen::Index>(c));

  Eigen::VectorXd coef(kBasisSize);
  for (std::size_t j = 0; j < kBasisSize; ++j) coef(j) = d.coefficients[j];
  const Eigen::VectorXd mismatch = a * coef - rhs;
  const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
  d.solve_residual = mismatch.cwiseAbs().maxCoeff() / scale;
  if (d.solve_residual > 1e-9) {
    std::ostringstream os;
    os.precision(6);
    os << "decompose_operator: operator is not a quadratic sl(2) combination for N = " << N << ":";
    for (int r = 0; r < rows; ++r) {
      if (std::abs(mismatch(r)) / scale <= 1e-9) continue;
      const char* which = r < kQ2Rows ? "q2" : (r < kQ2Rows + kQ1Rows ? "q1" : "q0");
      const int k = r < kQ2Rows ? r : (r < kQ2Rows + kQ1Rows ? r - kQ2Rows : r - kQ2Rows - kQ1Rows);
      os << " " << which << "[z^" << k << "] off by " << mismatch(r) << ";";
    }
    throw DecompositionError(os.str());
  }
  return d;
}

namespace {

double operator_scale(const ZOperator& op, const std::vector<double>& zs, int max_k) {
  double s = 0.0;
  for (int k = 0; k <= max_k; ++k) {
    const PolyCoeffs f = PolyCoeffs::monomial(static_cast<std::size_t>(k));
    const PolyCoeffs f1 = f.derivative(), f2 = f1.derivative();
    for (double z : zs)
      s = std::max(s, std::abs(op.q2_at(z) * f2(z)) + std::abs(op.q1(z) * f1(z)) + std::abs(op.q0(z) * f(z)));
  }
  return s > 0.0 ? s : 1.0;
}

}  // namespace

double round_trip_defect(const Sl2Decomposition& d, const ZOperator& op, Interval domain, int max_k,
                         std::size_t samples) {
  const std::vector<double> zs = numkit::chebyshev_nodes(domain, samples);
  const double scale = operator_scale(op, zs, max_k);
  const PolyOperator comb = d.combination();
  double defect = 0.0;
  for (int k = 0; k <= max_k; ++k) {
    const PolyCoeffs f = PolyCoeffs::monomial(static_cast<std::size_t>(k));
    for (double z : zs)
      defect = std::max(defect, std::abs(comb.apply(f, z) + d.remainder.apply(f, z) - op.apply(f, z)));
  }
  return defect / scale;
}

double remainder_annihilation_defect(const Sl2Decomposition& d, const ZOperator& op, Interval domain,
                                     std::size_t samples) {
  const std::vector<double> zs = numkit::chebyshev_nodes(domain, samples);
  const double scale = operator_scale(op, zs, std::max(d.N, 2));
  double defect = 0.0;
  for (int k = 0; k <= d.N; ++k) {
    const PolyCoeffs f = PolyCoeffs::monomial(static_cast<std::size_t>(k));
    for (double z : zs) defect = std::max(defect, std::abs(d.remainder.apply(f, z)));
  }
  return defect / scale;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> pchip_slopes(const std::vector<double>& t, const std::vector<double>& y) {
  const std::size_t n = t.size();
  std::vector<double> m(n, 0.0), delta(n - 1), h(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = t[i + 1] - t[i];
    delta[i] = (y[i + 1] - y[i]) / h[i];
  }
  m[0] = delta[0];
  m[n - 1] = delta[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) continue;
    const double w1 = 2.0 * h[i] + h[i - 1], w2 = h[i] + 2.0 * h[i - 1];
    m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
  }
  return m;
}

double pchip_eval(const std::vector<double>& t, const std::vector<double>& y, const std::vector<double>& m,
                  double x) {
  auto it = std::upper_bound(t.begin(), t.end(), x);
  std::size_t i = it == t.begin() ? 0 : static_cast<std::size_t>(it - t.begin()) - 1;
  if (i + 1 >= t.size()) i = t.size() - 2;
  const double h = t[i + 1] - t[i];
  const double s = (x - t[i]) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  return h00 * y[i] + h10 * h * m[i] + h01 * y[i + 1] + h11 * h * m[i + 1];
}

double inv_w_integral(const susy::QesModel& m, double x) {
  return numkit::integrate([&m](double t) { return 1.0 / m.w_plus(t); }, m.x_ref, x);
}

}  // namespace

ZMap::ZMap(const susy::QesModel& model, std::vector<double> xs, std::vector<double> zs)
    : model_(model), xs_(std::move(xs)), zs_(std::move(zs)) {
  if (xs_.size() != zs_.size() || xs_.size() < 3) throw UsageError("ZMap: need matching samples (>= 3)");
  const bool inc = zs_.back() > zs_.front();
  for (std::size_t i = 0; i + 1 < zs_.size(); ++i) {
    if (!(xs_[i + 1] > xs_[i]) || (inc ? !(zs_[i + 1] > zs_[i]) : !(zs_[i + 1] < zs_[i])))
      throw DomainError("ZMap: z(x) is not strictly monotone on the samples");
  }
  slope_z_of_x_ = pchip_slopes(xs_, zs_);
  z_sorted_ = zs_;
  x_by_z_ = xs_;
  if (!inc) {
    std::reverse(z_sorted_.begin(), z_sorted_.end());
    std::reverse(x_by_z_.begin(), x_by_z_.end());
  }
  slope_x_of_z_ = pchip_slopes(z_sorted_, x_by_z_);
}

Interval ZMap::z_range() const noexcept { return {z_sorted_.front(), z_sorted_.back()}; }

double ZMap::z_of_x(double x) const {
  model_.check_branch(x);
  return model_.z_gauge * std::exp(2.0 * model_.epsilon * inv_w_integral(model_, x));
}

Taylor ZMap::z_expand(double x) const {
  model_.check_branch(x);
  const Taylor inv = 1.0 / model_.w_plus.expand(x);
  return model_.z_gauge * exp(2.0 * model_.epsilon * inv.integral(inv_w_integral(model_, x)));
}

double ZMap::dz_dx(double x) const { return 2.0 * model_.epsilon * z_of_x(x) / model_.w_plus(x); }

double ZMap::z_interp(double x) const { return pchip_eval(xs_, zs_, slope_z_of_x_, x); }

double ZMap::x_of_z(double z) const {
  const Interval r = z_range();
  const double slack = 1e-12 * std::max(std::abs(r.lo), std::abs(r.hi));
  if (!(z > 0.0) || z < r.lo - slack || z > r.hi + slack) {
    std::ostringstream os;
    os.precision(17);
    os << "ZMap: z = " << z << " outside mapped range [" << r.lo << ", " << r.hi << "]";
    throw DomainError(os.str());
  }
  double x = pchip_eval(z_sorted_, x_by_z_, slope_x_of_z_, z);
  x = std::clamp(x, xs_.front(), xs_.back());
  // Newton on log z(x) - log z, derivative 2 eps / W+.
  const double target = std::log(z / model_.z_gauge);
  for (int it = 0; it < 50; ++it) {
    const double f = 2.0 * model_.epsilon * inv_w_integral(model_, x) - target;
    const double step = f / (2.0 * model_.epsilon / model_.w_plus(x));
    double next = x - step;
    if (!model_.x_domain.contains(next) || next == x) break;
    // Stay on the branch.
    if (std::signbit(model_.w_plus(next)) != std::signbit(model_.w_plus(model_.x_ref))) next = 0.5 * (x + next);
    x = next;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(x))) break;
  }
  return x;
}

ZMap build_zmap(const susy::QesModel& model, const numkit::Grid1d& grid) {
  model.validate();
  std::vector<double> xs = grid.points();
  std::vector<double> inv(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    model.check_branch(xs[i]);
    inv[i] = 1.0 / model.w_plus(xs[i]);
  }
  std::vector<double> f = numkit::cumulative_integral(inv, grid, grid.x_min());
  const double offset = inv_w_integral(model, grid.x_min());
  std::vector<double> zs(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) zs[i] = model.z_gauge * std::exp(2.0 * model.epsilon * (f[i] + offset));
  return ZMap(model, std::move(xs), std::move(zs));
}

ZOperator gauge_operator_t(const susy::QesModel& model, const ZMap& zmap) {
  const double eps = model.epsilon;
  ZOperator t;
  t.q2 = [zmap, eps](double z) {
    const double w = zmap.model().w_plus(zmap.x_of_z(z));
    return -2.0 * eps * eps * z * z / (w * w);
  };
  t.q1 = PolyCoeffs{0.0, eps};
  t.q0 = PolyCoeffs{};
  t.z_domain = zmap.z_range();
  return t;
}

double gauge_conjugation_check(const susy::QesModel& model, const PolyCoeffs& f,
                               const std::vector<double>& probes, double fd_step) {
  const SmoothFunction1d eta = susy::eigenstate(model, 0);
  const SmoothFunction1d v = susy::potential_v(model);
  auto z_at = [&model](double x) {
    model.check_branch(x);
    return model.z_gauge * std::exp(2.0 * model.epsilon * inv_w_integral(model, x));
  };
  auto big_f = [&](double x) { return eta(x) * f(z_at(x)); };
  const PolyCoeffs f1 = f.derivative(), f2 = f1.derivative();
  double defect = 0.0;
  for (double x : probes) {
    for (double s : model.w_plus_zeros) {
      if (std::abs(x - s) <= 2.0 * fd_step) throw SingularityError("gauge_conjugation_check: probe at singularity", s);
    }
    const double e = eta(x);
    const double lhs = (-model.mass_factor * numkit::second_derivative_fd(big_f, x, fd_step) + v(x) * big_f(x)) / e;
    const double z = z_at(x);
    const double w = model.w_plus(x);
    const double q2 = -2.0 * model.epsilon * model.epsilon * z * z / (w * w);
    const double rhs = q2 * f2(z) + model.epsilon * z * f1(z);
    defect = std::max(defect, std::abs(lhs - rhs));
  }
  return defect;
}

EquivalenceResult quartic_equivalence_test(const susy::QesModel& model, const ZMap& zmap, double tol,
                                           std::size_t samples) {
  if (samples < 16) throw UsageError("quartic_equivalence_test: need at least 16 samples");
  if (!(tol > 0.0)) throw UsageError("quartic_equivalence_test: tolerance must be positive");
  const Interval full = zmap.z_range();
  const double margin = 0.02 * full.width();
  const Interval range{full.lo + margin, full.hi - margin};
  if (!(range.width() > 0.0)) throw UsageError("quartic_equivalence_test: degenerate z range");
  auto g = [&](double z) {
    const double w = model.w_plus(zmap.x_of_z(z));
    return z * z / (w * w);
  };
  const std::vector<double> nodes = numkit::chebyshev_nodes(range, samples);
  std::vector<double> ys(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) ys[i] = g(nodes[i]);
  const numkit::PolyFit fit = numkit::fit_polynomial(nodes, ys, 4);

  const std::vector<double> held = numkit::chebyshev_nodes(range, 2 * samples + 1);
  double err = 0.0, scale = 0.0;
  for (double z : held) {
    const double gz = g(z);
    err = std::max(err, std::abs(gz - fit.poly(z)));
    scale = std::max(scale, std::abs(gz));
  }
  EquivalenceResult r;
  r.fit_residual = err / scale;
  r.equivalent = r.fit_residual < tol;
  r.borderline = r.fit_residual >= tol && r.fit_residual <= 100.0 * tol;
  for (std::size_t k = 0; k < 5; ++k) r.c[k] = fit.poly[k];
  return r;
}

}  // namespace qes::sl2
