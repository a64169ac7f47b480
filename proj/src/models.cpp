#include "qes/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qes/errors.hpp"

namespace qes::models {

using std::numbers::pi;
using std::numbers::sqrt2;

susy::QesModel razavy_model(double A, double alpha) {
  if (!(A > 0.0) || !(alpha > 0.0)) throw UsageError("razavy_model: A and alpha must be positive");
  susy::QesModel m;
  m.name = "razavy";
  m.w_plus = SmoothFunction1d::from_formula(
      "A sinh(alpha x)", [A, alpha](const auto& x) { return A * sinh(alpha * x); });
  m.epsilon = alpha * A / 2.0;
  m.x_domain = {0.0, std::numeric_limits<double>::infinity()};
  m.x_ref = 1.0;
  m.z_gauge = std::tanh(alpha * m.x_ref / 2.0);
  m.w_plus_zeros = {0.0};
  m.window = {0.4 / alpha, 6.0 / alpha};
  return m;
}

susy::QesModel sextic_model(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw UsageError("sextic_model: a and b must be positive");
  susy::QesModel m;
  m.name = "sextic";
  m.w_plus = SmoothFunction1d::from_formula(
      "a x + b x^3", [a, b](const auto& x) { return a * x + b * x * x * x; });
  m.epsilon = a / 2.0;
  m.x_domain = {0.0, std::numeric_limits<double>::infinity()};
  m.x_ref = 1.0;
  m.z_gauge = m.x_ref / std::sqrt(a + b * m.x_ref * m.x_ref);
  m.w_plus_zeros = {0.0};
  m.window = {0.2, 3.0};
  return m;
}

SmoothFunction1d harmonic_potential() {
  return SmoothFunction1d::from_formula("x^2/2", [](const auto& x) { return 0.5 * x * x; });
}

susy::QesModel polynomial_model(const PolyCoeffs& w_plus, double epsilon, Interval branch, double x_ref,
                                double z_gauge) {
  susy::QesModel m;
  m.name = "polynomial";
  m.w_plus = SmoothFunction1d::from_formula("W+(x)", [w_plus](const auto& x) { return w_plus(x); });
  m.epsilon = epsilon;
  m.x_domain = branch;
  m.x_ref = x_ref;
  m.z_gauge = z_gauge;
  m.window = {branch.lo + 0.1 * (x_ref - branch.lo), std::isfinite(branch.hi) ? branch.hi - 0.1 * (branch.hi - x_ref) : x_ref + 2.0};
  m.validate();
  return m;
}

Interval default_box(const std::string& model_name) {
  if (model_name == "harmonic") return {-10.0, 10.0};
  return {-6.0, 6.0};
}

// ---------------------------------------------------------------------------

ScalarFieldModel scalar_field_model(double B, double C, double K) {
  if (!std::isfinite(B) || !std::isfinite(C)) throw UsageError("scalar_field_model: non-finite parameters");
  if (B == C) throw UsageError("scalar_field_model: B = C makes omega_1^2 coincide with the zero mode");
  ScalarFieldModel m;
  m.B = B;
  m.C = C;
  m.A = 2.0 * (B + C);
  m.K = K;
  const double r = m.largest_root();
  if (r > 0.0) {
    const double root = std::sqrt(r);
    m.rho_start = root + 1e-4 * std::max(1.0, root);
    m.rho_stop = 2.0 * root;
  } else {
    m.rho_start = 0.0;
    m.rho_stop = 2.0;
  }
  return m;
}

double ScalarFieldModel::largest_root() const noexcept { return std::max({A, B, C}); }

Interval ScalarFieldModel::u_window() const noexcept {
  const double r = std::max(largest_root(), 0.0);
  const double s = std::max(1.0, std::abs(r));
  return {r + 0.1 * s, r + 3.0 * s};
}

SmoothFunction1d ScalarFieldModel::cubic_in_rho_squared() const {
  return SmoothFunction1d::from_formula("P(rho)", [a = A, b = B, c = C](const auto& rho) {
    const auto u = rho * rho;
    return (u - a) * (u - b) * (u - c);
  });
}

SmoothFunction1d ScalarFieldModel::v_s() const {
  return SmoothFunction1d::from_formula("V_s", [a = A, b = B, c = C, k = K](const auto& rho) {
    const auto u = rho * rho;
    return 0.5 * ((u - a) * (u - b) * (u - c) + k);
  });
}

SmoothFunction1d ScalarFieldModel::v_s_prime() const { return derivative(v_s()).renamed("V_s'"); }
SmoothFunction1d ScalarFieldModel::v_s_second() const {
  return derivative(derivative(v_s())).renamed("V_s''");
}

ProfileResult soliton_profile(const ScalarFieldModel& m, Interval y_span, double h) {
  const SmoothFunction1d p = m.cubic_in_rho_squared();
  const double rho0 = m.rho_start;
  const double p0 = p(rho0);
  const double scale = std::max(1.0, std::pow(std::abs(rho0), 6.0));
  if (p0 < -1e-12 * scale) throw DomainError("soliton_profile: start lies where (rho^2-A)(rho^2-B)(rho^2-C) < 0");

  auto rhs = [&p](double, double rho) { return std::sqrt(std::max(p(rho), 0.0)); };
  const double stop_at = m.rho_stop;
  ProfileResult out;
  out.trajectory = numkit::integrate_ode_1st(rhs, rho0, y_span.lo, y_span.hi, h,
                                             [stop_at](double, double rho) { return rho > stop_at; });

  const auto& pts = out.trajectory.points;
  const SmoothFunction1d vp = m.v_s_prime();
  const double a = m.A, b = m.B, c = m.C;
  out.max_zero_mode_defect = 0.0;
  out.max_static_defect = 0.0;
  // stencil spacing kept clear of roundoff when h is small
  const double spacing = 5e-4 / std::max(1.0, std::abs(m.largest_root()));
  const std::size_t s = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(spacing / h - 1e-9)));
  const double hs = static_cast<double>(s) * h;
  for (std::size_t i = 2 * s; i + 2 * s < pts.size(); ++i) {
    bool uniform = true;
    for (std::size_t j = i - 2 * s; j < i + 2 * s; ++j) uniform = uniform && std::abs(pts[j + 1].t - pts[j].t - h) <= 1e-9 * h;
    if (!uniform) continue;
    const double ym2 = pts[i - 2 * s].y, ym1 = pts[i - s].y, y0 = pts[i].y, yp1 = pts[i + s].y, yp2 = pts[i + 2 * s].y;
    const double d1 = (-yp2 + 8.0 * yp1 - 8.0 * ym1 + ym2) / (12.0 * hs);
    const double d2 = (-yp2 + 16.0 * yp1 - 30.0 * y0 + 16.0 * ym1 - ym2) / (12.0 * hs * hs);
    const double u = y0 * y0;
    const double eta0 = std::sqrt(std::max((u - a) * (u - b) * (u - c), 0.0));
    out.max_zero_mode_defect = std::max(out.max_zero_mode_defect, std::abs(d1 - eta0));
    out.max_static_defect = std::max(out.max_static_defect, std::abs(d2 - vp(y0)));
  }
  return out;
}

UOperator stability_operator_u(const ScalarFieldModel& m) {
  const double a = m.A, b = m.B, c = m.C;
  const double s1 = a + b + c, s2 = a * b + a * c + b * c, s3 = a * b * c;
  UOperator op;
  op.A = a;
  op.B = b;
  op.C = c;
  // 4 u (u-A)(u-B)(u-C) = 4 (u^4 - s1 u^3 + s2 u^2 - s3 u)
  op.q2 = PolyCoeffs{0.0, -4.0 * s3, 4.0 * s2, -4.0 * s1, 4.0};
  op.q1 = PolyCoeffs{-2.0 * s3, 4.0 * s2, -6.0 * s1, 8.0};
  op.q0 = PolyCoeffs{0.0, 6.0 * s1, -15.0};
  return op;
}

double UOperator::apply(const SmoothFunction1d& eta, double u) const {
  const Taylor e = eta.expand(u);
  return q2(u) * e.derivative(2) + q1(u) * e.derivative(1) + q0(u) * e.value();
}

double UOperator::omega_squared_at(const SmoothFunction1d& eta, double u) const {
  return sigma2() - apply(eta, u) / eta(u);
}

double UOperator::residual(const SmoothFunction1d& eta, double omega2, Interval window, std::size_t samples) const {
  const numkit::Grid1d grid(window.lo, window.hi, samples);
  double res = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double u = grid.point(i);
    const double e = eta(u);
    res = std::max(res, std::abs(apply(eta, u) - (sigma2() - omega2) * e));
    scale = std::max(scale, std::abs(e));
  }
  if (!(scale > 0.0)) throw UsageError("UOperator::residual: eta vanishes on the window");
  return res / scale;
}

SmoothFunction1d zero_mode_u(const ScalarFieldModel& m) {
  return SmoothFunction1d::from_formula(
      "eta0(u)", [a = m.A, b = m.B, c = m.C](const auto& u) { return sqrt((u - a) * (u - b) * (u - c)); },
      {m.largest_root(), std::numeric_limits<double>::infinity()});
}

SmoothFunction1d first_mode_u(const ScalarFieldModel& m) {
  return SmoothFunction1d::from_formula(
      "eta1(u)", [a = m.A, b = m.B, c = m.C](const auto& u) { return sqrt(u - a) * (u - 0.5 * (b + c)); },
      {m.A, std::numeric_limits<double>::infinity()});
}

SmoothFunction1d z_of_u(const ScalarFieldModel& m) {
  return SmoothFunction1d::from_formula(
      "z(u)", [b = m.B, c = m.C](const auto& u) { return (u - 0.5 * (b + c)) / sqrt((u - b) * (u - c)); },
      {std::max(m.B, m.C), std::numeric_limits<double>::infinity()}, {std::max(m.B, m.C)});
}

sl2::ZOperator scalar_z_operator(const ScalarFieldModel& m) {
  const double b = m.B, c = m.C;
  const double sum = b + c, diff = b - c;
  sl2::ZOperator op;
  op.q2 = [sum, diff](double z) {
    const double w = z * z - 1.0;
    return 3.0 * sum * sum * w * w + 2.0 * std::abs(diff) * sum * z * std::pow(w, 1.5) - diff * diff * z * z * w;
  };
  op.q1 = PolyCoeffs{0.0, 2.0 * diff * diff};
  op.q0 = PolyCoeffs{};
  op.z_domain = {1.0, std::numeric_limits<double>::infinity()};
  if (sum == 0.0) op.q2_poly = PolyCoeffs{0.0, 0.0, diff * diff, 0.0, -diff * diff};
  return op;
}

double z_u_consistency(const ScalarFieldModel& m, const PolyCoeffs& phi, Interval u_window, std::size_t samples) {
  const UOperator lu = stability_operator_u(m);
  const SmoothFunction1d eta0 = zero_mode_u(m);
  const SmoothFunction1d z = z_of_u(m);
  const sl2::ZOperator t = scalar_z_operator(m);
  const SmoothFunction1d eta(
      "eta0*phi(z(u))", [eta0, z, phi](double u) { return eta0.expand(u) * phi(z.expand(u)); }, eta0.domain());
  const numkit::Grid1d grid(u_window.lo, u_window.hi, samples);
  double defect = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double u = grid.point(i);
    const double lhs = (lu.sigma2() * eta(u) - lu.apply(eta, u)) / eta0(u);
    defect = std::max(defect, std::abs(lhs - t.apply(phi, z(u))));
  }
  return defect;
}

// ---------------------------------------------------------------------------

namespace {

void require_positive_b(double B, const char* who) {
  if (!(B > 0.0)) throw UsageError(std::string(who) + ": B must be positive");
}

// theta = -2 sqrt2 B x; the cell is theta in (0, pi/2).
Interval pt_cell(double B) { return {-pi / (4.0 * sqrt2 * B), 0.0}; }

}  // namespace

PoschlTellerBundle poschl_teller_bundle(double B) {
  require_positive_b(B, "poschl_teller_bundle");
  const double k = 2.0 * sqrt2 * B;
  const Interval cell = pt_cell(B);
  susy::QesModel m;
  m.name = "poschl_teller";
  m.w_plus = SmoothFunction1d::from_formula(
      "4 sqrt2 B tan(-2 sqrt2 B x)", [B, k](const auto& x) { return 4.0 * sqrt2 * B * tan(-k * x); }, cell,
      {cell.lo, cell.hi});
  m.epsilon = 8.0 * B * B;
  m.x_domain = cell;
  m.x_ref = -pi / (8.0 * sqrt2 * B);
  m.z_gauge = 1.0 / std::sin(pi / 4.0);
  m.w_plus_zeros = {cell.lo, cell.hi};
  m.window = {-(pi / 2.0 - 0.05) / k, -0.05 / k};
  m.validate();
  PoschlTellerBundle out{m, susy::potential_v(m), susy::partner_potential(m), cell};
  return out;
}

SmoothFunction1d poschl_teller_v_closed(double B) {
  require_positive_b(B, "poschl_teller_v_closed");
  const double k = 2.0 * sqrt2 * B;
  const Interval cell = pt_cell(B);
  return SmoothFunction1d::from_formula(
      "15B^2 tan^2 + 14B^2",
      [B, k](const auto& x) {
        const auto t = tan(-k * x);
        return 15.0 * B * B * t * t + 14.0 * B * B;
      },
      cell, {cell.lo, cell.hi});
}

SmoothFunction1d poschl_teller_v_bar_closed(double B) {
  require_positive_b(B, "poschl_teller_v_bar_closed");
  const double k = 2.0 * sqrt2 * B;
  const Interval cell = pt_cell(B);
  return SmoothFunction1d::from_formula(
      "8B^2 cot^2 + 3B^2 tan^2 + 10B^2",
      [B, k](const auto& x) {
        const auto t = tan(-k * x);
        return 8.0 * B * B / (t * t) + 3.0 * B * B * t * t + 10.0 * B * B;
      },
      cell, {cell.lo, cell.hi});
}

double x_of_u(double B, double u) {
  require_positive_b(B, "x_of_u");
  if (!(u > B)) throw DomainError("x_of_u: need u > B");
  return -std::acos(B / u) / (2.0 * sqrt2 * B);
}

SmoothFunction1d partner_tower(double B, unsigned n) {
  require_positive_b(B, "partner_tower");
  const double k = 2.0 * sqrt2 * B;
  const Interval cell = pt_cell(B);
  return SmoothFunction1d::from_formula(
      "psibar_" + std::to_string(n + 1),
      [k, n](const auto& x) {
        const auto s = sin(-k * x);
        const auto c = cos(-k * x);
        return pow(c, 1.5) * s * s * numkit::hyp2f1_poly(n, 3.5 + n, 2.5, s * s);
      },
      cell, {cell.lo, cell.hi});
}

double tower_energy_reference(double B, unsigned n) {
  const double m = 7.0 + 4.0 * n;
  return B * B * m * m;
}

namespace {

template <class T>
T second_hyp_term(unsigned n, const T& s2) {
  if (n == 0) return T(0.0);
  return numkit::hyp2f1_poly(n - 1, 4.5 + n, 3.5, s2);
}

}  // namespace

SmoothFunction1d mapped_tower(double B, unsigned n, TowerVariable variable) {
  require_positive_b(B, "mapped_tower");
  const double lead = 4.0 * n * (3.5 + n);
  if (variable == TowerVariable::kX) {
    const double k = 2.0 * sqrt2 * B;
    const Interval cell = pt_cell(B);
    return SmoothFunction1d::from_formula(
        "psi_" + std::to_string(n + 2),
        [k, n, lead](const auto& x) {
          const auto s = sin(-k * x);
          const auto c = cos(-k * x);
          const auto c52 = pow(c, 2.5);
          return 15.0 * c52 * s * numkit::hyp2f1_poly(n, 3.5 + n, 2.5, s * s) -
                 lead * c52 * s * s * s * second_hyp_term(n, s * s);
        },
        cell, {cell.lo, cell.hi});
  }
  const double b4 = B * B * B * B;
  return SmoothFunction1d::from_formula(
      "eta_" + std::to_string(n + 2) + "(u)",
      [B, n, lead, b4](const auto& u) {
        const auto w = u * u - B * B;
        const auto arg = w / (u * u);
        return 15.0 * b4 * pow(u, -3.5) * sqrt(w) * numkit::hyp2f1_poly(n, 3.5 + n, 2.5, arg) -
               lead * b4 * pow(u, -5.5) * pow(w, 1.5) * second_hyp_term(n, arg);
      },
      {B, std::numeric_limits<double>::infinity()}, {B});
}

SmoothFunction1d mapped_tower_u_as_printed(double B, unsigned n) {
  require_positive_b(B, "mapped_tower_u_as_printed");
  const double lead = 4.0 * n * (3.5 + n);
  const double b6 = std::pow(B, 6.0);
  return SmoothFunction1d::from_formula(
      "eta_" + std::to_string(n + 2) + "(u) as printed",
      [B, n, lead, b6](const auto& u) {
        const auto w = u * u - B * B;
        const auto arg = w / (u * u);
        return 15.0 * b6 * pow(u, -3.5) * sqrt(w) * numkit::hyp2f1_poly(n, 3.5 + n, 2.5, arg) -
               lead * pow(u, 0.5) * pow(w, 1.5) * second_hyp_term(n, arg);
      },
      {B, std::numeric_limits<double>::infinity()}, {B});
}

}  // namespace qes::models
