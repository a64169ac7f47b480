#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace qes {

/// Truncated Taylor expansion f(x0 + t) = sum_k c[k] t^k, k <= order().
///
/// Arithmetic propagates the lowest order of the operands, and deriv()
/// drops one order, so a quantity built from derivatives of its inputs
/// (W from W+, V from W, ...) carries exactly as many valid coefficients as
/// the inputs support.
class Taylor {
 public:
  static constexpr int kMaxOrder = 6;

  constexpr Taylor() = default;
  constexpr Taylor(double value) : order_(kMaxOrder) { c_[0] = value; }  // NOLINT(implicit)

  static Taylor variable(double x0) {
    Taylor t(x0);
    t.c_[1] = 1.0;
    return t;
  }

  int order() const noexcept { return order_; }
  double operator[](int k) const noexcept { return c_[k]; }
  double& operator[](int k) noexcept { return c_[k]; }

  double value() const noexcept { return c_[0]; }
  /// k-th derivative at x0 (requires k <= order()).
  double derivative(int k) const noexcept {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return c_[k] * f;
  }

  /// Derivative with respect to the expansion variable, one order lower.
  Taylor deriv() const {
    Taylor r = zero(std::max(order_ - 1, 0));
    for (int k = 0; k < order_; ++k) r.c_[k] = (k + 1) * c_[k + 1];
    if (order_ == 0) r.c_[0] = 0.0;
    return r;
  }

  /// Antiderivative with the given constant term, one order higher.
  Taylor integral(double constant) const {
    Taylor r = zero(std::min(order_ + 1, kMaxOrder));
    r.c_[0] = constant;
    for (int k = 1; k <= r.order_; ++k) r.c_[k] = c_[k - 1] / k;
    return r;
  }

  static Taylor zero(int order) {
    Taylor t;
    t.order_ = order;
    return t;
  }

  Taylor& operator+=(const Taylor& o) {
    order_ = std::min(order_, o.order_);
    for (int k = 0; k <= kMaxOrder; ++k) c_[k] += o.c_[k];
    clear_tail();
    return *this;
  }
  Taylor& operator-=(const Taylor& o) {
    order_ = std::min(order_, o.order_);
    for (int k = 0; k <= kMaxOrder; ++k) c_[k] -= o.c_[k];
    clear_tail();
    return *this;
  }
  Taylor& operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
  }
  Taylor& operator*=(const Taylor& o) {
    const int n = std::min(order_, o.order_);
    std::array<double, kMaxOrder + 1> r{};
    for (int k = 0; k <= n; ++k)
      for (int i = 0; i <= k; ++i) r[k] += c_[i] * o.c_[k - i];
    c_ = r;
    order_ = n;
    return *this;
  }
  Taylor& operator/=(const Taylor& o) {
    const int n = std::min(order_, o.order_);
    std::array<double, kMaxOrder + 1> q{};
    for (int k = 0; k <= n; ++k) {
      double acc = c_[k];
      for (int i = 1; i <= k; ++i) acc -= o.c_[i] * q[k - i];
      q[k] = acc / o.c_[0];
    }
    c_ = q;
    order_ = n;
    return *this;
  }

 private:
  void clear_tail() {
    for (int k = order_ + 1; k <= kMaxOrder; ++k) c_[k] = 0.0;
  }

  std::array<double, kMaxOrder + 1> c_{};
  int order_ = kMaxOrder;
};

inline Taylor operator-(Taylor a) { return a *= -1.0; }
inline Taylor operator+(Taylor a, const Taylor& b) { return a += b; }
inline Taylor operator-(Taylor a, const Taylor& b) { return a -= b; }
inline Taylor operator*(Taylor a, const Taylor& b) { return a *= b; }
inline Taylor operator/(Taylor a, const Taylor& b) { return a /= b; }
inline Taylor operator+(Taylor a, double b) { a[0] += b; return a; }
inline Taylor operator+(double b, Taylor a) { a[0] += b; return a; }
inline Taylor operator-(Taylor a, double b) { a[0] -= b; return a; }
inline Taylor operator-(double b, Taylor a) { a *= -1.0; a[0] += b; return a; }
inline Taylor operator*(Taylor a, double b) { return a *= b; }
inline Taylor operator*(double b, Taylor a) { return a *= b; }
inline Taylor operator/(Taylor a, double b) { return a *= 1.0 / b; }
inline Taylor operator/(double b, const Taylor& a) { return Taylor(b) / a; }

inline Taylor exp(const Taylor& a) {
  Taylor e = Taylor::zero(a.order());
  e[0] = std::exp(a[0]);
  for (int k = 1; k <= a.order(); ++k) {
    double acc = 0.0;
    for (int i = 1; i <= k; ++i) acc += i * a[i] * e[k - i];
    e[k] = acc / k;
  }
  return e;
}

inline Taylor log(const Taylor& a) {
  Taylor l = Taylor::zero(a.order());
  l[0] = std::log(a[0]);
  for (int k = 1; k <= a.order(); ++k) {
    double acc = 0.0;
    for (int i = 1; i < k; ++i) acc += i * l[i] * a[k - i];
    l[k] = (a[k] - acc / k) / a[0];
  }
  return l;
}

inline Taylor pow(const Taylor& a, double p) {
  Taylor y = Taylor::zero(a.order());
  y[0] = std::pow(a[0], p);
  for (int k = 1; k <= a.order(); ++k) {
    double acc = 0.0;
    for (int i = 1; i <= k; ++i) acc += (p * i - (k - i)) * a[i] * y[k - i];
    y[k] = acc / (k * a[0]);
  }
  return y;
}

inline Taylor sqrt(const Taylor& a) { return pow(a, 0.5); }

namespace detail {
// sign = -1 gives (sin, cos), sign = +1 gives (sinh, cosh).
inline void sincos_like(const Taylor& a, double sign, double s0, double c0, Taylor& s, Taylor& c) {
  s = Taylor::zero(a.order());
  c = Taylor::zero(a.order());
  s[0] = s0;
  c[0] = c0;
  for (int k = 1; k <= a.order(); ++k) {
    double as = 0.0, ac = 0.0;
    for (int i = 1; i <= k; ++i) {
      as += i * a[i] * c[k - i];
      ac += i * a[i] * s[k - i];
    }
    s[k] = as / k;
    c[k] = sign * ac / k;
  }
}
}  // namespace detail

inline Taylor sin(const Taylor& a) {
  Taylor s, c;
  detail::sincos_like(a, -1.0, std::sin(a[0]), std::cos(a[0]), s, c);
  return s;
}
inline Taylor cos(const Taylor& a) {
  Taylor s, c;
  detail::sincos_like(a, -1.0, std::sin(a[0]), std::cos(a[0]), s, c);
  return c;
}
inline Taylor tan(const Taylor& a) {
  Taylor s, c;
  detail::sincos_like(a, -1.0, std::sin(a[0]), std::cos(a[0]), s, c);
  return s / c;
}
inline Taylor sinh(const Taylor& a) {
  Taylor s, c;
  detail::sincos_like(a, 1.0, std::sinh(a[0]), std::cosh(a[0]), s, c);
  return s;
}
inline Taylor cosh(const Taylor& a) {
  Taylor s, c;
  detail::sincos_like(a, 1.0, std::sinh(a[0]), std::cosh(a[0]), s, c);
  return c;
}
inline Taylor tanh(const Taylor& a) {
  Taylor s, c;
  detail::sincos_like(a, 1.0, std::sinh(a[0]), std::cosh(a[0]), s, c);
  return s / c;
}
inline Taylor atan(const Taylor& a) {
  Taylor r = (a.deriv() / (1.0 + a * a)).integral(std::atan(a[0]));
  return r;
}

// Plain-double overloads so templated formulas compile for both types.
using std::sin, std::cos, std::tan, std::sinh, std::cosh, std::tanh;
using std::exp, std::log, std::sqrt, std::pow, std::atan;

inline bool isfinite(const Taylor& a) {
  for (int k = 0; k <= a.order(); ++k)
    if (!std::isfinite(a[k])) return false;
  return true;
}

}  // namespace qes
