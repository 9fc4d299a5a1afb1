#pragma once

#include <complex>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fatou {

using cplx = std::complex<double>;

/// Monic, 0-fixed polynomial f(z) = a1 z + a2 z^2 + ... + a_{d-1} z^{d-1} + z^d.
///
/// Only the d-1 free coefficients are stored; the constant term is zero and
/// the leading coefficient is one, so f(0) == 0 holds exactly.
class Polynomial {
 public:
  Polynomial(int degree, std::vector<cplx> coeffs);

  /// z^d.
  static Polynomial power(int degree);

  int degree() const noexcept { return degree_; }
  /// (a1, ..., a_{d-1}).
  std::span<const cplx> coeffs() const noexcept { return coeffs_; }
  /// a_k for 0 <= k <= d (a_0 = 0, a_d = 1).
  cplx coefficient(int k) const;
  /// All d+1 coefficients in ascending order.
  std::vector<cplx> ascending() const;
  /// Sum of |a_k| over the free coefficients.
  double free_coefficient_norm() const;

  cplx operator()(cplx z) const noexcept { return evaluate(z); }
  cplx evaluate(cplx z) const noexcept;
  cplx derivative(cplx z) const noexcept;
  /// (f(z), f'(z)) in one Horner pass.
  std::pair<cplx, cplx> evaluate_with_derivative(cplx z) const noexcept;
  /// f(z) / z^d, evaluated as 1 + a_{d-1}/z + ... + a_1/z^{d-1}.
  cplx ratio_to_leading(cplx z) const noexcept;

  cplx iterate(cplx z, int n) const noexcept;
  /// (f^n(z), (f^n)'(z)).
  std::pair<cplx, cplx> iterate_with_derivative(cplx z, int n) const noexcept;

  /// Coefficients of f' in ascending order (degree d-1).
  std::vector<cplx> derivative_ascending() const;

  bool operator==(const Polynomial&) const = default;

 private:
  int degree_;
  std::vector<cplx> coeffs_;
};

std::string describe(const Polynomial& f);

}  // namespace fatou
