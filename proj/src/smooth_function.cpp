#include "qes/smooth_function.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qes/errors.hpp"

namespace qes {

namespace {

std::string where(const std::string& name, double x) {
  std::ostringstream os;
  os.precision(17);
  os << name << " at x = " << x;
  return os.str();
}

Interval intersect(const Interval& a, const Interval& b) {
  return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
}

std::vector<double> merge(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out = a;
  out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

SmoothFunction1d::SmoothFunction1d(std::string name, Rule rule, Interval domain,
                                   std::vector<double> singularities)
    : name_(std::move(name)),
      rule_(std::move(rule)),
      domain_(domain),
      singularities_(std::move(singularities)) {
  if (!(domain_.lo < domain_.hi)) throw UsageError("empty domain for " + name_);
}

Taylor SmoothFunction1d::expand(double x) const {
  if (!domain_.contains(x)) throw DomainError(where(name_, x) + ": outside domain");
  for (double s : singularities_) {
    if (x == s) throw SingularityError(where(name_, x) + ": declared singularity", x);
  }
  Taylor t = rule_(x);
  if (!isfinite(t)) {
    double nearest = x;
    double best = std::numeric_limits<double>::infinity();
    for (double s : singularities_) {
      if (std::abs(s - x) < best) { best = std::abs(s - x); nearest = s; }
    }
    if (best < 1e-2) throw SingularityError(where(name_, x) + ": non-finite near singularity", nearest);
    throw DomainError(where(name_, x) + ": non-finite value");
  }
  return t;
}

double SmoothFunction1d::d1(double x) const {
  const Taylor t = expand(x);
  if (t.order() < 1) throw DomainError(where(name_, x) + ": first derivative unavailable");
  return t.derivative(1);
}

double SmoothFunction1d::d2(double x) const {
  const Taylor t = expand(x);
  if (t.order() < 2) throw DomainError(where(name_, x) + ": second derivative unavailable");
  return t.derivative(2);
}

void SmoothFunction1d::check_window(const Interval& window, double margin) const {
  if (!domain_.contains(window)) {
    std::ostringstream os;
    os << name_ << ": window [" << window.lo << ", " << window.hi << "] leaves domain ["
       << domain_.lo << ", " << domain_.hi << "]";
    throw DomainError(os.str());
  }
  for (double s : singularities_) {
    if (s >= window.lo - margin && s <= window.hi + margin) {
      std::ostringstream os;
      os << name_ << ": window [" << window.lo << ", " << window.hi
         << "] within margin " << margin << " of singularity at " << s
         << "; shift the reference point or shrink the window";
      throw SingularityError(os.str(), s);
    }
  }
}

SmoothFunction1d SmoothFunction1d::with_domain(Interval domain) const {
  SmoothFunction1d f = *this;
  f.domain_ = domain;
  return f;
}

SmoothFunction1d SmoothFunction1d::renamed(std::string name) const {
  SmoothFunction1d f = *this;
  f.name_ = std::move(name);
  return f;
}

SmoothFunction1d operator+(const SmoothFunction1d& a, const SmoothFunction1d& b) {
  return SmoothFunction1d(
      "(" + a.name() + " + " + b.name() + ")",
      [a, b](double x) { return a.expand(x) + b.expand(x); },
      intersect(a.domain(), b.domain()), merge(a.singularities(), b.singularities()));
}

SmoothFunction1d operator-(const SmoothFunction1d& a, const SmoothFunction1d& b) {
  return SmoothFunction1d(
      "(" + a.name() + " - " + b.name() + ")",
      [a, b](double x) { return a.expand(x) - b.expand(x); },
      intersect(a.domain(), b.domain()), merge(a.singularities(), b.singularities()));
}

SmoothFunction1d operator*(const SmoothFunction1d& a, const SmoothFunction1d& b) {
  return SmoothFunction1d(
      a.name() + "*" + b.name(),
      [a, b](double x) { return a.expand(x) * b.expand(x); },
      intersect(a.domain(), b.domain()), merge(a.singularities(), b.singularities()));
}

SmoothFunction1d scaled(const SmoothFunction1d& f, double s) {
  return SmoothFunction1d(
      f.name(), [f, s](double x) { return f.expand(x) * s; }, f.domain(), f.singularities());
}

SmoothFunction1d derivative(const SmoothFunction1d& f) {
  return SmoothFunction1d(
      f.name() + "'", [f](double x) { return f.expand(x).deriv(); }, f.domain(),
      f.singularities());
}

}  // namespace qes
