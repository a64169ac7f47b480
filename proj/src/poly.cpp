#include "qes/poly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace qes {

PolyCoeffs PolyCoeffs::monomial(std::size_t k, double scale) {
  std::vector<double> c(k + 1, 0.0);
  c[k] = scale;
  return PolyCoeffs(std::move(c));
}

int PolyCoeffs::degree() const noexcept {
  for (int k = static_cast<int>(c_.size()) - 1; k >= 0; --k) {
    if (c_[k] != 0.0) return k;
  }
  return -1;
}

PolyCoeffs PolyCoeffs::derivative() const {
  if (c_.size() <= 1) return {};
  std::vector<double> d(c_.size() - 1);
  for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
  return PolyCoeffs(std::move(d));
}

PolyCoeffs PolyCoeffs::truncated(std::size_t max_degree) const {
  std::vector<double> c(c_.begin(), c_.begin() + std::min(c_.size(), max_degree + 1));
  return PolyCoeffs(std::move(c));
}

PolyCoeffs PolyCoeffs::tail(std::size_t max_degree) const {
  std::vector<double> c = c_;
  for (std::size_t k = 0; k < c.size() && k <= max_degree; ++k) c[k] = 0.0;
  return PolyCoeffs(std::move(c)).trimmed();
}

PolyCoeffs PolyCoeffs::trimmed() const {
  const int d = degree();
  return PolyCoeffs(std::vector<double>(c_.begin(), c_.begin() + (d + 1)));
}

PolyCoeffs& PolyCoeffs::operator+=(const PolyCoeffs& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
  for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
  return *this;
}

PolyCoeffs& PolyCoeffs::operator-=(const PolyCoeffs& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
  for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
  return *this;
}

PolyCoeffs& PolyCoeffs::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

std::string PolyCoeffs::to_string(const char* var) const {
  std::string out;
  char buf[64];
  for (std::size_t k = 0; k < c_.size(); ++k) {
    if (c_[k] == 0.0) continue;
    if (!out.empty()) out += c_[k] < 0 ? " - " : " + ";
    else if (c_[k] < 0) out += "-";
    std::snprintf(buf, sizeof buf, "%.17g", std::abs(c_[k]));
    out += buf;
    if (k >= 1) out += std::string("*") + var;
    if (k >= 2) out += "^" + std::to_string(k);
  }
  return out.empty() ? "0" : out;
}

PolyCoeffs operator+(PolyCoeffs a, const PolyCoeffs& b) { return a += b; }
PolyCoeffs operator-(PolyCoeffs a, const PolyCoeffs& b) { return a -= b; }
PolyCoeffs operator*(PolyCoeffs a, double s) { return a *= s; }
PolyCoeffs operator*(double s, PolyCoeffs a) { return a *= s; }

PolyCoeffs operator*(const PolyCoeffs& a, const PolyCoeffs& b) {
  if (a.size() == 0 || b.size() == 0) return {};
  std::vector<double> c(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return PolyCoeffs(std::move(c));
}

double max_abs_diff(const PolyCoeffs& a, const PolyCoeffs& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < std::max(a.size(), b.size()); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace qes
