#pragma once

#include <complex>

namespace fatou {

using cplx = std::complex<double>;

/// Axis-aligned rectangle in the plane.
struct Box {
  cplx center{0.0, 0.0};
  double width = 4.0;
  double height = 4.0;

  double left() const { return center.real() - 0.5 * width; }
  double right() const { return center.real() + 0.5 * width; }
  double bottom() const { return center.imag() - 0.5 * height; }
  double top() const { return center.imag() + 0.5 * height; }
  bool contains(cplx z) const {
    return z.real() >= left() && z.real() <= right() && z.imag() >= bottom() && z.imag() <= top();
  }

  static Box square(cplx center, double side) { return {center, side, side}; }
};

}  // namespace fatou
