#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qes/smooth_function.hpp"

namespace qes::susy {

/// A QES model generated by W+ with algebraic energy epsilon.
///
/// All analytic eigenstates and the z-map are anchored at x_ref on the working
/// branch `x_domain`, on which W+ keeps one sign. z_gauge fixes the free
/// multiplicative constant of z, z(x_ref) = z_gauge.
struct QesModel {
  std::string name;
  SmoothFunction1d w_plus;
  double epsilon = 0.0;
  Interval x_domain;
  double x_ref = 0.0;
  double mass_factor = 0.5;
  double z_gauge = 1.0;
  std::vector<double> w_plus_zeros;  // singular points of W and W1
  Interval window;                   // default verification window inside the branch

  /// Throws UsageError when a structural invariant is violated.
  void validate() const;
  /// Throws DomainError if W+ at x has left the sign of W+(x_ref).
  void check_branch(double x) const;
};

SmoothFunction1d make_w(const QesModel& model);
SmoothFunction1d make_w1(const QesModel& model);

enum class PotentialRoute { kSusy, kWPlus };

/// V = W^2/2 - W'/2 (kSusy) or the equivalent expression in W+ (kWPlus).
SmoothFunction1d potential_v(const QesModel& model, PotentialRoute route = PotentialRoute::kSusy);

/// Partner potential W^2/2 + W'/2.
SmoothFunction1d partner_potential(const QesModel& model);

/// psi_0 (which = 0, E = 0) or psi_1 (which = 1, E = epsilon), built from
/// sqrt(W+) exp(-1/2 int W+) exp(-/+ eps int 1/W+) with integrals from x_ref.
/// Unnormalized; defined on the working branch only.
SmoothFunction1d eigenstate(const QesModel& model, int which);

/// The same two states from the superpotentials: exp(-int W) and
/// (-d/dx + W) exp(-int W1).
SmoothFunction1d eigenstate_from_superpotentials(const QesModel& model, int which);

/// exp(-int W1) and its energy (epsilon) under the partner Hamiltonian.
std::pair<SmoothFunction1d, double> partner_ground_state(const QesModel& model);

/// (-d/dx + W) f.
SmoothFunction1d intertwine(const SmoothFunction1d& w, const SmoothFunction1d& f);

/// Gauge prefactor eta(x) with psi_n = eta * phi_n(z), and chi = -log(eta).
struct GaugeData {
  SmoothFunction1d prefactor;
  SmoothFunction1d chi;
};
GaugeData gauge_data(const QesModel& model);

struct EigenpairCheck {
  double energy;     // Rayleigh quotient
  double residual;   // max |H psi - E psi| / max |psi|
  double constancy;  // spread of (H psi)/psi where |psi| > 1e-3 max |psi|
  double max_abs_psi;
  double edge_growth;  // max(|psi(lo)|, |psi(hi)|) / max |psi| on the window
};

/// Measures how well psi is an eigenfunction of -m d^2 + V on the window.
EigenpairCheck verify_eigenpair(const SmoothFunction1d& psi, const SmoothFunction1d& potential,
                                double mass_factor, Interval window, std::size_t samples = 2001,
                                double singularity_margin = 1e-3);

}  // namespace qes::susy
