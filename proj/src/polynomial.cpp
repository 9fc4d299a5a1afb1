#include "fatou/polynomial.hpp"

#include <cmath>
#include <sstream>

#include "fatou/error.hpp"

namespace fatou {

Polynomial::Polynomial(int degree, std::vector<cplx> coeffs)
    : degree_(degree), coeffs_(std::move(coeffs)) {
  if (degree_ < 2) {
    throw Error(ErrorCode::InvalidArgument, "degree must be at least 2");
  }
  if (static_cast<int>(coeffs_.size()) != degree_ - 1) {
    throw Error(ErrorCode::InvalidArgument,
                "expected " + std::to_string(degree_ - 1) + " coefficients, got " +
                    std::to_string(coeffs_.size()));
  }
  for (const cplx& a : coeffs_) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
      throw Error(ErrorCode::InvalidArgument, "non-finite coefficient");
    }
  }
}

Polynomial Polynomial::power(int degree) {
  return Polynomial(degree, std::vector<cplx>(static_cast<std::size_t>(std::max(degree - 1, 0))));
}

cplx Polynomial::coefficient(int k) const {
  if (k == 0) return 0.0;
  if (k == degree_) return 1.0;
  if (k < 0 || k > degree_) {
    throw Error(ErrorCode::InvalidArgument, "coefficient index out of range");
  }
  return coeffs_[static_cast<std::size_t>(k - 1)];
}

std::vector<cplx> Polynomial::ascending() const {
  std::vector<cplx> out(static_cast<std::size_t>(degree_) + 1);
  for (int k = 0; k <= degree_; ++k) out[static_cast<std::size_t>(k)] = coefficient(k);
  return out;
}

double Polynomial::free_coefficient_norm() const {
  double s = 0.0;
  for (const cplx& a : coeffs_) s += std::abs(a);
  return s;
}

cplx Polynomial::evaluate(cplx z) const noexcept {
  // z * (a1 + z * (a2 + ... + z * (a_{d-1} + z)))
  cplx acc = 1.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = *it + z * acc;
  return z * acc;
}

cplx Polynomial::derivative(cplx z) const noexcept { return evaluate_with_derivative(z).second; }

std::pair<cplx, cplx> Polynomial::evaluate_with_derivative(cplx z) const noexcept {
  cplx p = 1.0;
  cplx dp = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    dp = p + z * dp;
    p = *it + z * p;
  }
  // constant term
  dp = p + z * dp;
  p = z * p;
  return {p, dp};
}

cplx Polynomial::ratio_to_leading(cplx z) const noexcept {
  const cplx w = 1.0 / z;
  cplx acc = 0.0;
  for (const cplx& a : coeffs_) acc = (acc + a) * w;
  return 1.0 + acc;
}

cplx Polynomial::iterate(cplx z, int n) const noexcept {
  for (int i = 0; i < n; ++i) z = evaluate(z);
  return z;
}

std::pair<cplx, cplx> Polynomial::iterate_with_derivative(cplx z, int n) const noexcept {
  cplx dz = 1.0;
  for (int i = 0; i < n; ++i) {
    auto [v, d] = evaluate_with_derivative(z);
    dz *= d;
    z = v;
  }
  return {z, dz};
}

std::vector<cplx> Polynomial::derivative_ascending() const {
  std::vector<cplx> out(static_cast<std::size_t>(degree_));
  for (int k = 1; k <= degree_; ++k) {
    out[static_cast<std::size_t>(k - 1)] = static_cast<double>(k) * coefficient(k);
  }
  return out;
}

std::string describe(const Polynomial& f) {
  std::ostringstream os;
  os.precision(17);
  os << "z^" << f.degree();
  for (int k = f.degree() - 1; k >= 1; --k) {
    const cplx a = f.coefficient(k);
    if (a == cplx(0.0)) continue;
    os << " + (" << a.real() << (a.imag() < 0 ? "-" : "+") << std::abs(a.imag()) << "i)z";
    if (k > 1) os << "^" << k;
  }
  return os.str();
}

}  // namespace fatou
