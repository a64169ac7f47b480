#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "qes/taylor.hpp"

namespace qes {

/// Closed interval [lo, hi]; infinite ends allowed.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double x) const noexcept { return x >= lo && x <= hi; }
  bool contains(const Interval& o) const noexcept { return o.lo >= lo && o.hi <= hi; }
  double width() const noexcept { return hi - lo; }
  double mid() const noexcept { return 0.5 * (lo + hi); }
  static Interval real_line() { return {}; }
};

/// A real function of one variable with analytic derivatives.
///
/// The rule returns the truncated Taylor expansion at a point; value, first and
/// second derivatives are read from it. Evaluation outside the domain, or a
/// non-finite result, throws. Singularities are declared by the caller and
/// only used for diagnostics and window checks.
class SmoothFunction1d {
 public:
  using Rule = std::function<Taylor(double)>;

  SmoothFunction1d() = default;
  SmoothFunction1d(std::string name, Rule rule, Interval domain = Interval::real_line(),
                   std::vector<double> singularities = {});

  /// Builds the rule from a formula generic in its scalar type.
  template <class F>
  static SmoothFunction1d from_formula(std::string name, F formula,
                                       Interval domain = Interval::real_line(),
                                       std::vector<double> singularities = {}) {
    return SmoothFunction1d(
        std::move(name), [formula](double x) { return Taylor(formula(Taylor::variable(x))); },
        domain, std::move(singularities));
  }

  Taylor expand(double x) const;
  double operator()(double x) const { return expand(x).value(); }
  double d1(double x) const;
  double d2(double x) const;

  const std::string& name() const noexcept { return name_; }
  const Interval& domain() const noexcept { return domain_; }
  const std::vector<double>& singularities() const noexcept { return singularities_; }
  bool valid() const noexcept { return static_cast<bool>(rule_); }

  /// Throws SingularityError if any declared singularity lies within `margin`
  /// of the window, DomainError if the window leaves the domain.
  void check_window(const Interval& window, double margin = 1e-3) const;

  SmoothFunction1d with_domain(Interval domain) const;
  SmoothFunction1d renamed(std::string name) const;

 private:
  std::string name_;
  Rule rule_;
  Interval domain_;
  std::vector<double> singularities_;
};

/// Pointwise combinations; domains intersect, singularity lists merge.
SmoothFunction1d operator+(const SmoothFunction1d& a, const SmoothFunction1d& b);
SmoothFunction1d operator-(const SmoothFunction1d& a, const SmoothFunction1d& b);
SmoothFunction1d operator*(const SmoothFunction1d& a, const SmoothFunction1d& b);
SmoothFunction1d scaled(const SmoothFunction1d& f, double s);
/// x -> f'(x) as a function (one Taylor order lower).
SmoothFunction1d derivative(const SmoothFunction1d& f);

}  // namespace qes
