#pragma once

#include <cmath>

namespace pmrd::detail {

// std::pow is the hot spot of every stencil sweep; small integer exponents
// dominate in practice (stoichiometry 1..3, m = 2).
inline double power(double x, double e) {
    if (e == 1.0) return x;
    if (e == 2.0) return x * x;
    if (e == 3.0) return x * x * x;
    if (e == 0.0) return 1.0;
    return std::pow(x, e);
}

}  // namespace pmrd::detail
