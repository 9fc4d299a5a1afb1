#include "fatou/angle.hpp"

#include <algorithm>
#include <charconv>
#include <map>

#include "fatou/error.hpp"

namespace fatou {

namespace {

u128 gcd(u128 a, u128 b) {
  while (b != 0) {
    const u128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

u128 parse_u128(std::string_view s) {
  if (s.empty()) throw Error(ErrorCode::InvalidArgument, "empty integer in angle");
  u128 v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') throw Error(ErrorCode::InvalidArgument, "bad digit in angle");
    const u128 next = v * 10 + static_cast<u128>(c - '0');
    if (next / 10 != v) throw Error(ErrorCode::Overflow, "angle component too large");
    v = next;
  }
  return v;
}

}  // namespace

std::string to_string(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

Angle::Angle(u128 num, u128 den) {
  if (den == 0) throw Error(ErrorCode::InvalidArgument, "zero denominator");
  num %= den;
  const u128 g = gcd(num, den);
  num_ = num / g;
  den_ = den / g;
  if (num_ == 0) den_ = 1;
  if (den_ > kMaxDenominator) throw Error(ErrorCode::Overflow, "denominator exceeds 2^63");
}

Angle Angle::parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    const u128 n = parse_u128(text);
    return Angle(n, 1);
  }
  return Angle(parse_u128(text.substr(0, slash)), parse_u128(text.substr(slash + 1)));
}

double Angle::to_double() const noexcept {
  return static_cast<double>(num_) / static_cast<double>(den_);
}

std::string Angle::to_string() const { return fatou::to_string(num_) + "/" + fatou::to_string(den_); }

Angle Angle::times(std::uint64_t d) const {
  // num < den <= 2^63 and d < 2^64 keep the product below 2^127.
  return Angle((num_ % den_) * static_cast<u128>(d), den_);
}

Angle map_angle(const Angle& theta, int d) {
  if (d < 2) throw Error(ErrorCode::InvalidArgument, "degree must be >= 2");
  return theta.times(static_cast<std::uint64_t>(d));
}

std::vector<AngleCycle> periodic_angles(int d, int period) {
  if (d < 2 || period < 1) throw Error(ErrorCode::InvalidArgument, "need d >= 2, period >= 1");
  u128 dp = 1;
  for (int i = 0; i < period; ++i) {
    dp *= static_cast<u128>(d);
    if (dp - 1 > Angle::kMaxDenominator) throw Error(ErrorCode::Overflow, "d^p - 1 exceeds 2^63");
  }
  const u128 den = dp - 1;
  if (den > (u128{1} << 24)) throw Error(ErrorCode::Overflow, "enumeration too large");
  std::vector<AngleCycle> cycles;
  std::vector<bool> seen(static_cast<std::size_t>(den), false);
  for (u128 k = 0; k < den; ++k) {
    if (seen[static_cast<std::size_t>(k)]) continue;
    AngleCycle orbit;
    u128 j = k;
    do {
      seen[static_cast<std::size_t>(j)] = true;
      orbit.emplace_back(j, den);
      j = (j * static_cast<u128>(d)) % den;
    } while (j != k);
    if (static_cast<int>(orbit.size()) == period) cycles.push_back(std::move(orbit));
  }
  for (auto& c : cycles) std::rotate(c.begin(), std::min_element(c.begin(), c.end()), c.end());
  std::sort(cycles.begin(), cycles.end(),
            [](const AngleCycle& a, const AngleCycle& b) { return a.front() < b.front(); });
  return cycles;
}

AngleOrbit angle_orbit(const Angle& theta, int d, int max_len) {
  if (max_len < 1) throw Error(ErrorCode::InvalidArgument, "max_len must be >= 1");
  std::map<std::pair<u128, u128>, int> first_seen;
  Angle a = theta;
  for (int n = 0; n <= max_len; ++n) {
    const auto key = std::make_pair(a.numerator(), a.denominator());
    if (auto it = first_seen.find(key); it != first_seen.end()) {
      return {it->second, n - it->second};
    }
    first_seen.emplace(key, n);
    a = map_angle(a, d);
  }
  throw Error(ErrorCode::Overflow, "orbit longer than max_len");
}

SectorSpec::SectorSpec(Angle t1, Angle t2, std::optional<cplx> hint)
    : theta1(t1), theta2(t2), root_hint(hint) {
  if (t1 == t2) throw Error(ErrorCode::InvalidArgument, "sector angles must differ");
}

bool SectorSpec::contains(const Angle& theta) const {
  if (theta1 < theta2) return theta1 < theta && theta < theta2;
  return theta1 < theta || theta < theta2;
}

}  // namespace fatou
