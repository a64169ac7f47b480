#include "qes/susy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qes/errors.hpp"
#include "qes/numkit.hpp"

namespace qes::susy {

namespace {

std::string fmt_x(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

Taylor w_from(const Taylor& w, double eps) { return 0.5 * w + (eps - 0.5 * w.deriv()) / w; }
Taylor w1_from(const Taylor& w, double eps) { return 0.5 * w - (eps - 0.5 * w.deriv()) / w; }

// Taylor expansion of int_{x_ref}^{x} f at x, given the expansion of f at x.
Taylor antiderivative(const SmoothFunction1d& f, double x_ref, double x, const Taylor& fx) {
  const double v = numkit::integrate([&f](double t) { return f(t); }, x_ref, x);
  return fx.integral(v);
}

}  // namespace

void QesModel::validate() const {
  if (!w_plus.valid()) throw UsageError(name + ": W+ not set");
  if (!std::isfinite(epsilon) || epsilon == 0.0)
    throw UsageError(name + ": epsilon must be finite and nonzero (z-map degenerates at 0)");
  if (mass_factor != 0.5)
    throw UsageError(name + ": the SUSY construction assumes the -1/2 d^2/dx^2 convention");
  if (!x_domain.contains(x_ref)) throw UsageError(name + ": x_ref outside the working branch");
  if (!(z_gauge > 0.0) || !std::isfinite(z_gauge)) throw UsageError(name + ": z_gauge must be positive");
  const double w0 = w_plus(x_ref);
  if (w0 == 0.0) throw UsageError(name + ": W+ vanishes at x_ref");
}

void QesModel::check_branch(double x) const {
  if (!x_domain.contains(x))
    throw DomainError(name + ": x = " + fmt_x(x) + " outside the working branch");
  const double w0 = w_plus(x_ref);
  const double w = w_plus(x);
  if (w == 0.0 || std::signbit(w) != std::signbit(w0))
    throw SingularityError(name + ": W+ changes sign between x_ref and x = " + fmt_x(x) +
                               " (branch violation)", x);
}

SmoothFunction1d make_w(const QesModel& model) {
  const SmoothFunction1d wp = model.w_plus;
  const double eps = model.epsilon;
  return SmoothFunction1d(
      "W", [wp, eps](double x) { return w_from(wp.expand(x), eps); }, wp.domain(),
      model.w_plus_zeros);
}

SmoothFunction1d make_w1(const QesModel& model) {
  const SmoothFunction1d wp = model.w_plus;
  const double eps = model.epsilon;
  return SmoothFunction1d(
      "W1", [wp, eps](double x) { return w1_from(wp.expand(x), eps); }, wp.domain(),
      model.w_plus_zeros);
}

SmoothFunction1d potential_v(const QesModel& model, PotentialRoute route) {
  const SmoothFunction1d wp = model.w_plus;
  const double eps = model.epsilon;
  if (route == PotentialRoute::kSusy) {
    return SmoothFunction1d(
        "V", [wp, eps](double x) {
          const Taylor w = w_from(wp.expand(x), eps);
          return 0.5 * w * w - 0.5 * w.deriv();
        },
        wp.domain(), model.w_plus_zeros);
  }
  return SmoothFunction1d(
      "V[W+]", [wp, eps](double x) {
        const Taylor w = wp.expand(x);
        const Taylor w1 = w.deriv();
        const Taylor w2 = w1.deriv();
        const Taylor ww = w * w;
        return ww / 8.0 + 0.5 * eps * eps / ww + 0.5 * eps - 0.5 * w1 - w1 * w1 / (8.0 * ww) +
               w2 / (4.0 * w);
      },
      wp.domain(), model.w_plus_zeros);
}

SmoothFunction1d partner_potential(const QesModel& model) {
  const SmoothFunction1d wp = model.w_plus;
  const double eps = model.epsilon;
  return SmoothFunction1d(
      "Vbar", [wp, eps](double x) {
        const Taylor w = w_from(wp.expand(x), eps);
        return 0.5 * w * w + 0.5 * w.deriv();
      },
      wp.domain(), model.w_plus_zeros);
}

SmoothFunction1d eigenstate(const QesModel& model, int which) {
  model.validate();
  if (which != 0 && which != 1) throw UsageError("eigenstate: which must be 0 or 1");
  const double sign = which == 0 ? -1.0 : 1.0;
  const QesModel m = model;
  const SmoothFunction1d inv_wp(
      "1/W+", [wp = m.w_plus](double x) { return 1.0 / wp.expand(x); }, m.w_plus.domain(),
      m.w_plus_zeros);
  return SmoothFunction1d(
      which == 0 ? "psi0" : "psi1",
      [m, inv_wp, sign](double x) {
        m.check_branch(x);
        const Taylor w = m.w_plus.expand(x);
        const Taylor int_w = antiderivative(m.w_plus, m.x_ref, x, w);
        const Taylor int_inv = antiderivative(inv_wp, m.x_ref, x, 1.0 / w);
        const Taylor log_abs_w = log(w.value() < 0.0 ? -w : w);
        return exp(0.5 * log_abs_w - 0.5 * int_w + sign * m.epsilon * int_inv);
      },
      m.x_domain, m.w_plus_zeros);
}

namespace {

SmoothFunction1d exp_minus_integral(const QesModel& m, const SmoothFunction1d& w, std::string name) {
  return SmoothFunction1d(
      std::move(name),
      [m, w](double x) {
        m.check_branch(x);
        return exp(-antiderivative(w, m.x_ref, x, w.expand(x)));
      },
      m.x_domain, m.w_plus_zeros);
}

}  // namespace

SmoothFunction1d eigenstate_from_superpotentials(const QesModel& model, int which) {
  model.validate();
  if (which == 0) return exp_minus_integral(model, make_w(model), "exp(-int W)");
  if (which == 1) return intertwine(make_w(model), exp_minus_integral(model, make_w1(model), "exp(-int W1)"));
  throw UsageError("eigenstate_from_superpotentials: which must be 0 or 1");
}

std::pair<SmoothFunction1d, double> partner_ground_state(const QesModel& model) {
  model.validate();
  return {exp_minus_integral(model, make_w1(model), "psibar0"), model.epsilon};
}

SmoothFunction1d intertwine(const SmoothFunction1d& w, const SmoothFunction1d& f) {
  return SmoothFunction1d(
      "(-d/dx + W)" + f.name(),
      [w, f](double x) {
        const Taylor fx = f.expand(x);
        return w.expand(x) * fx - fx.deriv();
      },
      f.domain(), f.singularities());
}

GaugeData gauge_data(const QesModel& model) {
  SmoothFunction1d pre = eigenstate(model, 0).renamed("eta");
  SmoothFunction1d chi(
      "chi", [pre](double x) { return -log(pre.expand(x)); }, pre.domain(), pre.singularities());
  return {std::move(pre), std::move(chi)};
}

EigenpairCheck verify_eigenpair(const SmoothFunction1d& psi, const SmoothFunction1d& potential,
                                double mass_factor, Interval window, std::size_t samples,
                                double singularity_margin) {
  if (samples < 5) throw UsageError("verify_eigenpair: need at least 5 samples");
  if (samples % 2 == 0) ++samples;
  psi.check_window(window, singularity_margin);
  potential.check_window(window, singularity_margin);

  const numkit::Grid1d grid(window.lo, window.hi, samples);
  std::vector<double> val(samples), hval(samples);
  double max_psi = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = grid.point(i);
    const Taylor p = psi.expand(x);
    if (p.order() < 2) throw DomainError("verify_eigenpair: psi lacks a second derivative");
    val[i] = p.value();
    hval[i] = -mass_factor * p.derivative(2) + potential(x) * p.value();
    max_psi = std::max(max_psi, std::abs(val[i]));
  }
  if (!(max_psi > 0.0)) throw UsageError("verify_eigenpair: psi vanishes on the whole window");

  // Composite Simpson weights.
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double wgt = (i == 0 || i + 1 == samples) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    num += wgt * val[i] * hval[i];
    den += wgt * val[i] * val[i];
  }
  const double energy = num / den;

  double residual = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < samples; ++i) {
    residual = std::max(residual, std::abs(hval[i] - energy * val[i]));
    if (std::abs(val[i]) > 1e-3 * max_psi) {
      const double r = hval[i] / val[i];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
  }
  const double edge = std::max(std::abs(val.front()), std::abs(val.back())) / max_psi;
  return {energy, residual / max_psi, hi - lo, max_psi, edge};
}

}  // namespace qes::susy
