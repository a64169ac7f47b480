#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace qes {

/// Dense real polynomial, coeffs[k] multiplies z^k.
class PolyCoeffs {
 public:
  PolyCoeffs() = default;
  PolyCoeffs(std::initializer_list<double> c) : c_(c) {}
  explicit PolyCoeffs(std::vector<double> c) : c_(std::move(c)) {}

  static PolyCoeffs monomial(std::size_t k, double scale = 1.0);

  const std::vector<double>& coeffs() const noexcept { return c_; }
  /// Coefficient of z^k (zero past the stored length).
  double operator[](std::size_t k) const noexcept { return k < c_.size() ? c_[k] : 0.0; }
  std::size_t size() const noexcept { return c_.size(); }

  /// Highest index with a nonzero coefficient, -1 for the zero polynomial.
  int degree() const noexcept;
  bool is_zero() const noexcept { return degree() < 0; }

  template <class T>
  T operator()(const T& z) const {
    T acc(0.0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
    return acc;
  }

  PolyCoeffs derivative() const;
  PolyCoeffs truncated(std::size_t max_degree) const;
  /// Terms of degree > max_degree only.
  PolyCoeffs tail(std::size_t max_degree) const;
  PolyCoeffs trimmed() const;

  PolyCoeffs& operator+=(const PolyCoeffs& o);
  PolyCoeffs& operator-=(const PolyCoeffs& o);
  PolyCoeffs& operator*=(double s);

  std::string to_string(const char* var = "z") const;

 private:
  std::vector<double> c_;
};

PolyCoeffs operator+(PolyCoeffs a, const PolyCoeffs& b);
PolyCoeffs operator-(PolyCoeffs a, const PolyCoeffs& b);
PolyCoeffs operator*(const PolyCoeffs& a, const PolyCoeffs& b);
PolyCoeffs operator*(PolyCoeffs a, double s);
PolyCoeffs operator*(double s, PolyCoeffs a);

/// Largest absolute coefficient difference.
double max_abs_diff(const PolyCoeffs& a, const PolyCoeffs& b);

}  // namespace qes
