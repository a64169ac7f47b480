#pragma once

#include <string>

#include "qes/numkit.hpp"
#include "qes/sl2.hpp"
#include "qes/smooth_function.hpp"
#include "qes/susy.hpp"

namespace qes::models {

/// Razavy model, W+ = A sinh(alpha x), eps = alpha A / 2, branch x > 0.
/// z is gauged to tanh(alpha x / 2).
susy::QesModel razavy_model(double A, double alpha);

/// Sextic oscillator, W+ = a x + b x^3, eps = a / 2, branch x > 0.
/// z is gauged to x / sqrt(a + b x^2).
susy::QesModel sextic_model(double a, double b);

/// Control model for solver self-tests: V = x^2 / 2.
SmoothFunction1d harmonic_potential();

/// Model with polynomial W+ supplied by the user.
susy::QesModel polynomial_model(const PolyCoeffs& w_plus, double epsilon, Interval branch, double x_ref,
                                double z_gauge = 1.0);

/// Default full-line box for numerical spectra of the catalog models.
Interval default_box(const std::string& model_name);

/// Scalar field with 2 V_s(rho) - K = (rho^2 - A)(rho^2 - B)(rho^2 - C), A = 2(B + C).
struct ScalarFieldModel {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double K = 0.0;
  double rho_start = 0.0;  // where the profile integration begins
  double rho_stop = 0.0;   // profile integration halts past this value

  /// (rho^2 - A)(rho^2 - B)(rho^2 - C) as a function of rho.
  SmoothFunction1d cubic_in_rho_squared() const;
  SmoothFunction1d v_s() const;
  SmoothFunction1d v_s_prime() const;
  SmoothFunction1d v_s_second() const;
  /// omega_1^2 = 2 (B - C)^2.
  double omega1_squared() const noexcept { return 2.0 * (B - C) * (B - C); }
  double largest_root() const noexcept;
  /// Default window in u = rho^2 for mode checks, clear of the roots.
  Interval u_window() const noexcept;
};

ScalarFieldModel scalar_field_model(double B, double C, double K = 0.0);

struct ProfileResult {
  numkit::Trajectory trajectory;
  double max_zero_mode_defect;  // |d rho/dy (finite differences) - eta0(rho^2)|
  double max_static_defect;     // |d^2 rho/dy^2 (finite differences) - V_s'(rho)|
};

/// RK4 profile d rho/dy = +sqrt((rho^2-A)(rho^2-B)(rho^2-C)) from m.rho_start,
/// stopping before rho exceeds m.rho_stop. Defects use five-point differences
/// over a whole number of steps spanning at least 5e-4 / max(1, largest root).
ProfileResult soliton_profile(const ScalarFieldModel& m, Interval y_span, double h);

/// Stability operator in u = rho^2:
/// L = q2 d^2/du^2 + q1 d/du + q0 with L eta = (AB + AC + BC - omega^2) eta.
struct UOperator {
  PolyCoeffs q2, q1, q0;
  double A, B, C;

  double sigma2() const noexcept { return A * B + A * C + B * C; }
  double apply(const SmoothFunction1d& eta, double u) const;
  /// omega^2 implied pointwise, sigma2 - (L eta)/eta.
  double omega_squared_at(const SmoothFunction1d& eta, double u) const;
  /// max |L eta - (sigma2 - omega2) eta| / max |eta| over samples.
  double residual(const SmoothFunction1d& eta, double omega2, Interval window, std::size_t samples = 257) const;
};

UOperator stability_operator_u(const ScalarFieldModel& m);

/// eta0(u) = sqrt((u-A)(u-B)(u-C)), omega^2 = 0.
SmoothFunction1d zero_mode_u(const ScalarFieldModel& m);
/// eta1(u) = sqrt(u-A) (u - (B+C)/2), omega^2 = 2 (B-C)^2.
SmoothFunction1d first_mode_u(const ScalarFieldModel& m);

/// z = (u - (B+C)/2) / sqrt((u-B)(u-C)).
SmoothFunction1d z_of_u(const ScalarFieldModel& m);

/// Operator of the phi equation after eta = eta0 phi and the z substitution:
/// q2 d^2/dz^2 + 2 (B-C)^2 z d/dz with eigenvalue omega^2, where
/// q2 = 3 (B+C)^2 (z^2-1)^2 + 2 |B-C| (B+C) z (z^2-1)^{3/2} - (B-C)^2 z^2 (z^2-1)
/// on u > max(A, B, C). q2 is polynomial only when B = -C.
sl2::ZOperator scalar_z_operator(const ScalarFieldModel& m);

/// max over u of |(sigma2 eta - L eta)/eta0 - (T phi)(z(u))| with eta = eta0 phi(z(u)).
double z_u_consistency(const ScalarFieldModel& m, const PolyCoeffs& phi, Interval u_window,
                       std::size_t samples = 64);

/// The B = -C reduction: W+ = 4 sqrt2 B tan(-2 sqrt2 B x), eps = 8 B^2, on the
/// cell where sin and cos of -2 sqrt2 B x are both positive.
struct PoschlTellerBundle {
  susy::QesModel model;
  SmoothFunction1d v;
  SmoothFunction1d v_bar;
  Interval cell;  // open cell, ends are singular
};

PoschlTellerBundle poschl_teller_bundle(double B);

/// Closed forms 15 B^2 tan^2 + 14 B^2 and 8 B^2 cot^2 + 3 B^2 tan^2 + 10 B^2.
SmoothFunction1d poschl_teller_v_closed(double B);
SmoothFunction1d poschl_teller_v_bar_closed(double B);

/// x on the cell corresponding to u (cos(-2 sqrt2 B x) = B / u).
double x_of_u(double B, double u);

/// cos^{3/2} sin^2 2F1(-n, 7/2 + n; 5/2; sin^2) with argument -2 sqrt2 B x.
SmoothFunction1d partner_tower(double B, unsigned n);
/// Nominal tower energy B^2 (7 + 4n)^2. Under -1/2 d^2/dx^2 the Rayleigh
/// quotient of the tower state measures B^2 ((7 + 4n)^2 - 1).
double tower_energy_reference(double B, unsigned n);

enum class TowerVariable { kX, kU };

/// (-d/dx + W) image of partner_tower, written in closed form in x; in u it is
/// sqrt(u(u^2 - B^2)) times psi/psi0, i.e. a solution of the u-equation.
SmoothFunction1d mapped_tower(double B, unsigned n, TowerVariable variable);

/// The u-form with the second term carried as u^{1/2} (u^2 - B^2)^{3/2};
/// kept for comparison with the gauge-consistent form above.
SmoothFunction1d mapped_tower_u_as_printed(double B, unsigned n);

}  // namespace qes::models
