#include "qes/numkit.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace qes::numkit {

Grid1d::Grid1d(double x_min, double x_max, std::size_t n) : x_min_(x_min), x_max_(x_max), n_(n) {
  if (!(x_min < x_max)) throw UsageError("Grid1d: x_min must be < x_max");
  if (n < 3) throw UsageError("Grid1d: need at least 3 points");
  h_ = (x_max - x_min) / static_cast<double>(n - 1);
}

std::vector<double> Grid1d::points() const {
  std::vector<double> xs(n_);
  for (std::size_t i = 0; i < n_; ++i) xs[i] = point(i);
  return xs;
}

TridiagSym discretize_hamiltonian(const SmoothFunction1d& potential, const Grid1d& grid,
                                  double mass_factor) {
  if (!(mass_factor > 0.0)) throw UsageError("discretize_hamiltonian: mass_factor must be positive");
  const double h2 = grid.spacing() * grid.spacing();
  TridiagSym m;
  m.diag.resize(grid.size());
  m.offdiag.assign(grid.size() - 1, -mass_factor / h2);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.point(i);
    double v;
    try {
      v = potential(x);
    } catch (const DomainError& e) {
      std::ostringstream os;
      os.precision(17);
      os << "discretize_hamiltonian: potential not finite at x = " << x << " (" << e.what() << ")";
      throw DomainError(os.str());
    }
    m.diag[i] = 2.0 * mass_factor / h2 + v;
  }
  return m;
}

std::size_t sturm_count(const TridiagSym& m, double x) {
  double emax2 = 1.0;
  for (double e : m.offdiag) emax2 = std::max(emax2, e * e);
  const double pivmin = DBL_MIN * emax2;
  std::size_t count = 0;
  double q = m.diag[0] - x;
  if (std::abs(q) < pivmin) q = -pivmin;
  if (q < 0) ++count;
  for (std::size_t i = 1; i < m.diag.size(); ++i) {
    const double e = m.offdiag[i - 1];
    q = (m.diag[i] - x) - e * e / q;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0) ++count;
  }
  return count;
}

std::vector<double> eigenvalues_lowest(const TridiagSym& m, std::size_t k) {
  const std::size_t n = m.size();
  if (n == 0 || m.offdiag.size() + 1 != n) throw UsageError("eigenvalues_lowest: malformed matrix");
  if (k < 1 || k > n) throw UsageError("eigenvalues_lowest: k must be in [1, n]");

  double glo = m.diag[0], ghi = m.diag[0];
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (i > 0 ? std::abs(m.offdiag[i - 1]) : 0.0) + (i + 1 < n ? std::abs(m.offdiag[i]) : 0.0);
    glo = std::min(glo, m.diag[i] - r);
    ghi = std::max(ghi, m.diag[i] + r);
  }
  const double pad = DBL_EPSILON * std::max(std::abs(glo), std::abs(ghi)) + DBL_MIN;
  glo -= pad;
  ghi += pad;

  std::vector<double> out(k);
  double lo_start = glo;
  for (std::size_t j = 0; j < k; ++j) {
    double lo = lo_start, hi = ghi;
    for (int it = 0; it < 4000; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (hi - lo <= 2.0 * DBL_EPSILON * std::max(std::abs(lo), std::abs(hi))) break;
      if (sturm_count(m, mid) > j) hi = mid;
      else lo = mid;
    }
    out[j] = 0.5 * (lo + hi);
    lo_start = lo;  // eigenvalue j+1 is not below eigenvalue j
  }
  return out;
}

SpectralResult lowest_spectrum(const SmoothFunction1d& potential, Interval box,
                               std::size_t n_coarse, std::size_t n_fine, double mass_factor,
                               std::size_t k) {
  if (n_fine <= n_coarse) throw UsageError("lowest_spectrum: n_fine must exceed n_coarse");
  const Grid1d coarse(box.lo, box.hi, n_coarse);
  const Grid1d fine(box.lo, box.hi, n_fine);
  SpectralResult r{{}, {}, eigenvalues_lowest(discretize_hamiltonian(potential, coarse, mass_factor), k),
                   eigenvalues_lowest(discretize_hamiltonian(potential, fine, mass_factor), k), fine};
  const double ratio = coarse.spacing() / fine.spacing();
  const double denom = ratio * ratio - 1.0;
  r.eigenvalues.resize(k);
  r.refinement_error.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    r.eigenvalues[i] = r.fine[i] + (r.fine[i] - r.coarse[i]) / denom;
    r.refinement_error[i] = std::abs(r.eigenvalues[i] - r.fine[i]);
  }
  return r;
}

namespace {

// Integral over [x_i, x_i + s*h] of the Lagrange interpolant through a stencil of
// up to four nodes around interval i; s in [0, 1].
double interval_integral(std::span<const double> f, double h, std::size_t i, double s) {
  const std::size_t n = f.size();
  const std::size_t m = std::min<std::size_t>(4, n);
  const std::size_t start =
      std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(i) - 1, 0, static_cast<std::ptrdiff_t>(n - m));
  auto interp = [&](double t) {  // t in node units relative to node i
    double acc = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      const double ta = static_cast<double>(start + a) - static_cast<double>(i);
      double w = 1.0;
      for (std::size_t b = 0; b < m; ++b) {
        if (b == a) continue;
        const double tb = static_cast<double>(start + b) - static_cast<double>(i);
        w *= (t - tb) / (ta - tb);
      }
      acc += w * f[start + a];
    }
    return acc;
  };
  // Three-point Gauss-Legendre is exact through degree five.
  static const double g = std::sqrt(0.6);
  const double half = 0.5 * s;
  return half * h * (5.0 * interp(half * (1 - g)) + 8.0 * interp(half) + 5.0 * interp(half * (1 + g))) / 9.0;
}

}  // namespace

std::vector<double> cumulative_integral(std::span<const double> samples, const Grid1d& grid,
                                        double x_ref) {
  if (samples.size() != grid.size()) throw UsageError("cumulative_integral: sample count mismatch");
  if (!grid.interval().contains(x_ref)) throw UsageError("cumulative_integral: x_ref outside grid");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i])) {
      std::ostringstream os;
      os << "cumulative_integral: integrand not finite at x = " << grid.point(i);
      throw DomainError(os.str());
    }
  }
  const double h = grid.spacing();
  const std::size_t n = grid.size();
  std::vector<double> from_start(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) from_start[i + 1] = from_start[i] + interval_integral(samples, h, i, 1.0);

  const double pos = (x_ref - grid.x_min()) / h;
  std::size_t cell = static_cast<std::size_t>(std::floor(pos));
  if (cell >= n - 1) cell = n - 2;
  const double frac = pos - static_cast<double>(cell);
  const double at_ref = from_start[cell] + interval_integral(samples, h, cell, frac);
  for (double& v : from_start) v -= at_ref;
  return from_start;
}

std::vector<double> cumulative_integral(const SmoothFunction1d& f, const Grid1d& grid, double x_ref) {
  std::vector<double> samples(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) samples[i] = f(grid.point(i));
  return cumulative_integral(samples, grid, x_ref);
}

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;

// Bisection with an absolute target shared out in proportion to width. The
// target is set from the L1 norm, so integrals that nearly cancel do not
// chase a relative accuracy below roundoff.
double adapt(const std::function<double(double)>& f, double a, double b, double target, int depth) {
  double err = 0.0, l1 = 0.0;
  const double v = Kronrod::integrate(f, a, b, 0, 0.0, &err, &l1);
  err *= 0.5 * std::abs(b - a);  // boost reports the error on the reference interval [-1, 1]
  if (err <= target || depth == 0) return v;
  const double mid = 0.5 * (a + b);
  return adapt(f, a, mid, 0.5 * target, depth - 1) + adapt(f, mid, b, 0.5 * target, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  if (a == b) return 0.0;
  // Tiny spans (e.g. a few ulps from a reference point) stall the error
  // estimate; a fixed rule is exact there to working precision.
  if (std::abs(b - a) <= 1e-6 * std::max(1.0, std::max(std::abs(a), std::abs(b)))) {
    const double v = boost::math::quadrature::gauss<double, 7>::integrate(f, a, b);
    if (!std::isfinite(v)) throw DomainError("integrate: non-finite result");
    return v;
  }
  double err = 0.0, l1 = 0.0;
  Kronrod::integrate(f, a, b, 0, 0.0, &err, &l1);
  const double target = std::max(rel_tol * l1, 4.0 * std::numeric_limits<double>::epsilon() * l1);
  const double v = adapt(f, a, b, target, 30);
  if (!std::isfinite(v)) throw DomainError("integrate: non-finite result");
  return v;
}

const char* to_string(Completion c) {
  switch (c) {
    case Completion::kReachedEnd: return "reached_end";
    case Completion::kStopped: return "stopped";
    case Completion::kNonFinite: return "non_finite";
  }
  return "?";
}

Trajectory integrate_ode_1st(const OdeRhs& rhs, double y0, double t0, double t_end, double h,
                             const StopRule& stop) {
  if (!(h > 0.0)) throw UsageError("integrate_ode_1st: step must be positive");
  if (!std::isfinite(rhs(t0, y0))) throw DomainError("integrate_ode_1st: rhs not finite at start");
  Trajectory tr;
  tr.points.push_back({t0, y0});
  const double dir = t_end >= t0 ? 1.0 : -1.0;
  const std::size_t steps = static_cast<std::size_t>(std::ceil(std::abs(t_end - t0) / h - 1e-9));
  double y = y0;
  for (std::size_t s = 0; s < steps; ++s) {
    const double t = t0 + dir * static_cast<double>(s) * h;
    const double t_next = (s + 1 == steps) ? t_end : t0 + dir * static_cast<double>(s + 1) * h;
    const double dt = t_next - t;
    const double k1 = rhs(t, y);
    const double k2 = rhs(t + 0.5 * dt, y + 0.5 * dt * k1);
    const double k3 = rhs(t + 0.5 * dt, y + 0.5 * dt * k2);
    const double k4 = rhs(t + dt, y + dt * k3);
    const double y_next = y + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    if (!std::isfinite(y_next)) {
      tr.completion = Completion::kNonFinite;
      return tr;
    }
    if (stop && stop(t_next, y_next)) {
      tr.completion = Completion::kStopped;
      return tr;
    }
    y = y_next;
    tr.points.push_back({t_next, y});
  }
  return tr;
}

void detail::check_hyp2f1_args(unsigned n, double c) {
  for (unsigned k = 0; k < n; ++k) {
    if (c + k == 0.0) throw DomainError("hyp2f1_poly: Pochhammer (c)_k vanishes");
  }
}

std::vector<double> chebyshev_nodes(Interval range, std::size_t count) {
  std::vector<double> xs(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double c = std::cos((2.0 * static_cast<double>(k) + 1.0) * std::numbers::pi / (2.0 * static_cast<double>(count)));
    xs[count - 1 - k] = range.mid() + 0.5 * range.width() * c;
  }
  return xs;
}

PolyFit fit_polynomial(std::span<const double> x, std::span<const double> y, unsigned degree) {
  if (x.size() != y.size()) throw UsageError("fit_polynomial: size mismatch");
  if (x.size() < degree + 1) throw UsageError("fit_polynomial: too few samples");
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double center = 0.5 * (*lo_it + *hi_it);
  const double scale = 0.5 * (*hi_it - *lo_it);
  if (!(scale > 0.0)) throw UsageError("fit_polynomial: degenerate sampling");

  Eigen::MatrixXd a(x.size(), degree + 1);
  Eigen::VectorXd rhs(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = (x[i] - center) / scale;
    double p = 1.0;
    for (unsigned k = 0; k <= degree; ++k) {
      a(i, k) = p;
      p *= t;
    }
    rhs(i) = y[i];
  }
  const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(rhs);

  // sum_k coef_k ((z - center)/scale)^k expanded in powers of z.
  PolyCoeffs shifted{-center / scale, 1.0 / scale};
  PolyCoeffs power{1.0};
  PolyCoeffs out{0.0};
  for (unsigned k = 0; k <= degree; ++k) {
    out += power * coef(k);
    power = power * shifted;
  }
  double res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) res = std::max(res, std::abs(out(x[i]) - y[i]));
  return {out, res};
}

double second_derivative_fd(const std::function<double(double)>& f, double x, double h) {
  return (-f(x + 2 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2 * h)) / (12.0 * h * h);
}

double first_derivative_fd(const std::function<double(double)>& f, double x, double h) {
  return (-f(x + 2 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2 * h)) / (12.0 * h);
}

}  // namespace qes::numkit
