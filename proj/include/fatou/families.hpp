#pragma once

#include <string_view>

#include "fatou/polynomial.hpp"

namespace fatou {

/// c' = (c^6 - 2c^3 + 3) / (2 c^2 (c^3 - 2)), the free critical point of f_c.
cplx fc_free_critical(cplx c);

/// f_c(z) = 2 c c' z^2 - (4/3)(c + c') z^3 + z^4; critical points 0, c, c'
/// and f_c(c) is fixed.  Throws SingularParameter when c (c^3 - 2) = 0.
Polynomial family_fc(cplx c);

/// f_a(z) = (a^2 + 2/a) z^2 - (2a + 1/a^2) z^3 + z^4, with f_a(a) = a and
/// f_a'(a) = 1.  Throws SingularParameter when a = 0.
Polynomial family_fa(cplx a);

/// Closed form of resit(f_a, a) = 1 - 2/(a^3 - 1) - 1/(a^3 - 1)^2.
/// Throws SingularParameter at a^3 = 1 (triple fixed point).
cplx fa_resit_closed_form(cplx a);

enum class Family { fc, fa };
std::string_view to_string(Family f);
Family parse_family(std::string_view s);
Polynomial family_member(Family family, cplx parameter);

}  // namespace fatou
