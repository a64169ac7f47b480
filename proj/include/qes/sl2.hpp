#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qes/numkit.hpp"
#include "qes/poly.hpp"
#include "qes/smooth_function.hpp"
#include "qes/susy.hpp"

namespace qes::sl2 {

enum class GeneratorKind { kPlus, kZero, kMinus };

/// j+ = -z^2 d/dz + N z, j0 = z d/dz - N/2, j- = d/dz acting on polynomials.
struct Sl2Generator {
  GeneratorKind kind;
  int N;
};

PolyCoeffs apply_generator(const Sl2Generator& g, const PolyCoeffs& p);

struct CommutatorReport {
  int N;
  int max_degree;
  double max_defect;  // over [j0, j+] - j+, [j0, j-] + j-, [j+, j-] - 2 j0 on all z^k
};

CommutatorReport commutator_check(int N, int max_degree);

/// Second-order operator with polynomial coefficients q2 d^2 + q1 d + q0.
struct PolyOperator {
  PolyCoeffs q2, q1, q0;

  PolyCoeffs apply(const PolyCoeffs& f) const;
  double apply(const PolyCoeffs& f, double z) const;
  PolyOperator& operator+=(const PolyOperator& o);
};
PolyOperator operator*(double s, const PolyOperator& op);

/// Operator q2(z) d^2/dz^2 + q1(z) d/dz + q0(z); q1 and q0 are polynomials,
/// q2 is a general callable (with an exact polynomial form when known).
struct ZOperator {
  std::function<double(double)> q2;
  PolyCoeffs q1;
  PolyCoeffs q0;
  Interval z_domain;
  std::optional<PolyCoeffs> q2_poly;

  double apply(const PolyCoeffs& f, double z) const;
  /// Action on a function given by its Taylor expansion at z.
  double apply(const Taylor& f, double z) const;
  double q2_at(double z) const;
};

ZOperator make_zoperator(const PolyOperator& op, Interval z_domain);

/// Ordered basis of the quadratic combination.
enum class Basis : int {
  kPlusPlus = 0,   // j+ j+
  kPlusMinus,      // j+ j-
  kZeroZero,       // j0 j0
  kMinusMinus,     // j- j-
  kPlusZero,       // j+ j0
  kZeroMinus,      // j0 j-
  kPlus,           // j+
  kZero,           // j0
  kMinus,          // j-
  kIdentity,       // 1
};
inline constexpr std::size_t kBasisSize = 10;
std::string_view basis_name(std::size_t i);

/// (q2, q1, q0) of a basis element in the N representation.
PolyOperator basis_operator(Basis b, int N);

/// The representation-dependent relation j0^2 + j+ j- - j0 = (N/2)(N/2 + 1)
/// as a coefficient vector that maps to the zero operator.
std::array<double, kBasisSize> casimir_null_vector(int N);

/// The decomposition is unique only up to the Casimir relation; the gauge
/// fixes that freedom by pinning one coefficient (or taking minimum norm).
enum class Sl2Gauge { kZeroConstant, kZeroPlusMinus, kMinimumNorm };

struct Sl2Decomposition {
  int N = 1;
  Sl2Gauge gauge = Sl2Gauge::kZeroConstant;
  std::array<double, kBasisSize> coefficients{};
  PolyCoeffs quartic_part;               // q2 terms of degree <= 4 carried by the combination
  ZOperator remainder;                   // (q2 - quartic_part) d^2/dz^2
  std::optional<PolyCoeffs> remainder_poly;
  bool q2_polynomial = false;            // q2 recognized as a polynomial
  double q2_fit_residual = 0.0;          // relative, on held-out samples
  double solve_residual = 0.0;           // coefficient mismatch of the linear solve

  PolyOperator combination() const;
  /// (combination + remainder) applied to f at z.
  double apply(const PolyCoeffs& f, double z) const;
};

Sl2Decomposition decompose_operator(const ZOperator& op, int N, Interval fit_domain,
                                    Sl2Gauge gauge = Sl2Gauge::kZeroConstant);

/// Max relative mismatch between decomposition and operator on z^k, k <= max_k,
/// at `samples` Chebyshev points of the domain.
double round_trip_defect(const Sl2Decomposition& d, const ZOperator& op, Interval domain,
                         int max_k, std::size_t samples = 32);
/// Max |remainder z^k| over k <= N at the samples, relative to the operator scale.
double remainder_annihilation_defect(const Sl2Decomposition& d, const ZOperator& op,
                                     Interval domain, std::size_t samples = 32);

/// z(x) = z_gauge exp(2 eps int_{x_ref}^x dt/W+), tabulated on a grid of the
/// working branch, with accurate pointwise evaluation and inversion.
class ZMap {
 public:
  ZMap(const susy::QesModel& model, std::vector<double> xs, std::vector<double> zs);

  const std::vector<double>& xs() const noexcept { return xs_; }
  const std::vector<double>& zs() const noexcept { return zs_; }
  Interval z_range() const noexcept;
  bool increasing() const noexcept { return zs_.back() > zs_.front(); }
  const susy::QesModel& model() const noexcept { return model_; }

  /// Accurate z(x) by adaptive quadrature from x_ref.
  double z_of_x(double x) const;
  /// Taylor expansion of z at x.
  Taylor z_expand(double x) const;
  /// dz/dx = 2 eps z / W+.
  double dz_dx(double x) const;
  /// Sampled interpolant of z (monotone cubic).
  double z_interp(double x) const;
  /// Inverse map: monotone cubic guess on the samples, polished by Newton.
  double x_of_z(double z) const;

 private:
  susy::QesModel model_;
  std::vector<double> xs_, zs_;
  std::vector<double> slope_x_of_z_;  // PCHIP slopes for x(z), in z order
  std::vector<double> slope_z_of_x_;  // PCHIP slopes for z(x)
  std::vector<double> z_sorted_, x_by_z_;
};

ZMap build_zmap(const susy::QesModel& model, const numkit::Grid1d& grid);

/// T = -2 eps^2 z^2 / W+(x(z))^2 d^2/dz^2 + eps z d/dz.
ZOperator gauge_operator_t(const susy::QesModel& model, const ZMap& zmap);

/// max |H[eta f(z(x))]/eta(x) - (T f)(z(x))| over the probes (five-point FD).
double gauge_conjugation_check(const susy::QesModel& model, const PolyCoeffs& f,
                               const std::vector<double>& probes, double fd_step = 2e-3);

struct EquivalenceResult {
  bool equivalent = false;
  bool borderline = false;
  std::array<double, 5> c{};  // z^2/W+^2 = c0 + c1 z + ... + c4 z^4
  double fit_residual = 0.0;  // relative sup-norm on held-out samples
};

/// Tests whether z^2 / W+(z)^2 is a quartic polynomial in z.
EquivalenceResult quartic_equivalence_test(const susy::QesModel& model, const ZMap& zmap,
                                           double tol = 1e-6, std::size_t samples = 32);

}  // namespace qes::sl2
