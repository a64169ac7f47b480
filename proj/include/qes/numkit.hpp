#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qes/errors.hpp"
#include "qes/poly.hpp"
#include "qes/smooth_function.hpp"

namespace qes::numkit {

/// Uniform grid x_i = x_min + i*h, i = 0..n-1, h = (x_max - x_min)/(n - 1).
class Grid1d {
 public:
  Grid1d(double x_min, double x_max, std::size_t n);

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  std::size_t size() const noexcept { return n_; }
  double spacing() const noexcept { return h_; }
  double point(std::size_t i) const noexcept { return x_min_ + static_cast<double>(i) * h_; }
  std::vector<double> points() const;
  Interval interval() const noexcept { return {x_min_, x_max_}; }

 private:
  double x_min_;
  double x_max_;
  std::size_t n_;
  double h_;
};

/// Real symmetric tridiagonal matrix.
struct TridiagSym {
  std::vector<double> diag;
  std::vector<double> offdiag;  // length diag.size() - 1

  std::size_t size() const noexcept { return diag.size(); }
};

/// -mass_factor * d^2/dx^2 + V on the grid, Dirichlet walls one step outside
/// each end: diag = 2 m / h^2 + V(x_i), offdiag = -m / h^2.
TridiagSym discretize_hamiltonian(const SmoothFunction1d& potential, const Grid1d& grid,
                                  double mass_factor);

/// Number of eigenvalues strictly below `x` (Sturm sequence count).
std::size_t sturm_count(const TridiagSym& m, double x);

/// The k smallest eigenvalues in ascending order, by bisection on Sturm counts.
std::vector<double> eigenvalues_lowest(const TridiagSym& m, std::size_t k);

struct SpectralResult {
  std::vector<double> eigenvalues;       // Richardson-extrapolated
  std::vector<double> refinement_error;  // |extrapolated - fine|
  std::vector<double> coarse;            // raw eigenvalues on the coarse grid
  std::vector<double> fine;              // raw eigenvalues on the fine grid
  Grid1d grid_used;                      // the fine grid
};

/// Lowest k eigenvalues of -m d^2 + V on [box.lo, box.hi] from two grids with
/// one Richardson step assuming O(h^2) error.
SpectralResult lowest_spectrum(const SmoothFunction1d& potential, Interval box,
                               std::size_t n_coarse, std::size_t n_fine, double mass_factor,
                               std::size_t k);

/// F(x_i) = integral of f from x_ref to x_i. Each grid interval is integrated
/// with the cubic through the four surrounding nodes, so F is exact for cubics
/// and O(h^4) accurate.
std::vector<double> cumulative_integral(const SmoothFunction1d& f, const Grid1d& grid,
                                        double x_ref);
std::vector<double> cumulative_integral(std::span<const double> samples, const Grid1d& grid,
                                        double x_ref);

/// Adaptive Gauss-Kronrod quadrature of a smooth integrand on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-14);

struct TrajectoryPoint {
  double t;
  double y;
};

enum class Completion { kReachedEnd, kStopped, kNonFinite };

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  Completion completion = Completion::kReachedEnd;

  bool stopped_early() const noexcept { return completion != Completion::kReachedEnd; }
};

using OdeRhs = std::function<double(double t, double y)>;
using StopRule = std::function<bool(double t, double y)>;

/// Classical RK4 for y' = rhs(t, y). A point for which `stop` fires (or on
/// which rhs turns non-finite) ends the trajectory and is not included.
Trajectory integrate_ode_1st(const OdeRhs& rhs, double y0, double t0, double t_end, double h,
                             const StopRule& stop = {});

const char* to_string(Completion c);

namespace detail {
void check_hyp2f1_args(unsigned n, double c);
}

/// Terminating Gauss series 2F1(-n, b; c; x) = sum_{k<=n} (-n)_k (b)_k / ((c)_k k!) x^k.
template <class T>
T hyp2f1_poly(unsigned n, double b, double c, const T& x) {
  detail::check_hyp2f1_args(n, c);
  T acc(1.0);
  for (int k = static_cast<int>(n) - 1; k >= 0; --k) {
    const double r = (k - static_cast<double>(n)) * (b + k) / ((c + k) * (k + 1.0));
    acc = 1.0 + (r * x) * acc;
  }
  return acc;
}

/// Chebyshev points of the first kind mapped onto [lo, hi].
std::vector<double> chebyshev_nodes(Interval range, std::size_t count);

struct PolyFit {
  PolyCoeffs poly;           // monomial coefficients in the original variable
  double max_abs_residual;   // on the fitting samples
};

/// Least-squares polynomial of the given degree (fit on a rescaled variable).
PolyFit fit_polynomial(std::span<const double> x, std::span<const double> y, unsigned degree);

/// Five-point central second derivative.
double second_derivative_fd(const std::function<double(double)>& f, double x, double h);
/// Five-point central first derivative.
double first_derivative_fd(const std::function<double(double)>& f, double x, double h);

}  // namespace qes::numkit
