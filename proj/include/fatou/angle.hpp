#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fatou/geometry.hpp"

namespace fatou {

using u128 = unsigned __int128;

/// Exact rational angle num/den in [0, 1), always reduced.  Denominators are
/// capped at 2^63; anything larger raises Overflow.
class Angle {
 public:
  static constexpr u128 kMaxDenominator = u128{1} << 63;

  Angle() = default;
  /// Reduces num/den mod 1.
  Angle(u128 num, u128 den);

  static Angle parse(std::string_view text);

  u128 numerator() const noexcept { return num_; }
  u128 denominator() const noexcept { return den_; }
  double to_double() const noexcept;
  std::string to_string() const;

  /// d * theta mod 1.
  Angle times(std::uint64_t d) const;

  friend bool operator==(const Angle&, const Angle&) = default;
  friend bool operator<(const Angle& a, const Angle& b) { return a.num_ * b.den_ < b.num_ * a.den_; }

 private:
  u128 num_ = 0;
  u128 den_ = 1;
};

Angle map_angle(const Angle& theta, int d);

using AngleCycle = std::vector<Angle>;

/// All cycles of exact period `period` under theta -> d theta, each starting
/// at its smallest member, sorted by that member.
std::vector<AngleCycle> periodic_angles(int d, int period);

struct AngleOrbit {
  int preperiod = 0;
  int period = 1;
};

/// Exact preperiod and period; Overflow when preperiod + period > max_len.
AngleOrbit angle_orbit(const Angle& theta, int d, int max_len);

/// S(theta1, theta2): the sector swept counterclockwise from theta1 to theta2.
struct SectorSpec {
  Angle theta1;
  Angle theta2;
  std::optional<cplx> root_hint;

  SectorSpec(Angle t1, Angle t2, std::optional<cplx> hint = std::nullopt);
  /// Whether theta lies strictly inside the counterclockwise arc.
  bool contains(const Angle& theta) const;
};

std::string to_string(u128 v);

}  // namespace fatou
