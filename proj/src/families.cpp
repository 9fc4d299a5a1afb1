#include "fatou/families.hpp"

#include <cmath>
#include <string>

#include "fatou/error.hpp"

namespace fatou {

namespace {
constexpr double kSingular = 1e-12;
}

cplx fc_free_critical(cplx c) {
  const cplx c3 = c * c * c;
  if (std::abs(c) < kSingular || std::abs(c3 - 2.0) < kSingular) {
    throw Error(ErrorCode::SingularParameter, "c (c^3 - 2) = 0");
  }
  return (c3 * c3 - 2.0 * c3 + 3.0) / (2.0 * c * c * (c3 - 2.0));
}

Polynomial family_fc(cplx c) {
  const cplx cp = fc_free_critical(c);
  return Polynomial(4, {0.0, 2.0 * c * cp, -(4.0 / 3.0) * (c + cp)});
}

Polynomial family_fa(cplx a) {
  if (std::abs(a) < kSingular) throw Error(ErrorCode::SingularParameter, "a = 0");
  return Polynomial(4, {0.0, a * a + 2.0 / a, -(2.0 * a + 1.0 / (a * a))});
}

cplx fa_resit_closed_form(cplx a) {
  const cplx t = a * a * a - 1.0;
  if (std::abs(t) < kSingular) throw Error(ErrorCode::SingularParameter, "a^3 = 1");
  return 1.0 - 2.0 / t - 1.0 / (t * t);
}

std::string_view to_string(Family f) { return f == Family::fc ? "fc" : "fa"; }

Family parse_family(std::string_view s) {
  if (s == "fc") return Family::fc;
  if (s == "fa") return Family::fa;
  throw Error(ErrorCode::InvalidArgument, "unknown family '" + std::string(s) + "'");
}

Polynomial family_member(Family family, cplx parameter) {
  return family == Family::fc ? family_fc(parameter) : family_fa(parameter);
}

}  // namespace fatou
