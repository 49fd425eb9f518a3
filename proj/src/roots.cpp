#include "pmrd/roots.hpp"

#include <utility>

#include "pmrd/errors.hpp"

namespace pmrd {

RootResult safeguarded_newton(const ValueAndSlope& fn, double lo, double hi, double xtol,
                              int max_iterations) {
    double flo = 0.0, fhi = 0.0, slope = 0.0;
    fn(lo, flo, slope);
    fn(hi, fhi, slope);
    if (flo == 0.0) return {lo, 0, true};
    if (fhi == 0.0) return {hi, 0, true};
    if ((flo > 0.0) == (fhi > 0.0)) throw InternalInconsistency("root is not bracketed");

    // Orient so that f(xl) < 0 < f(xh).
    double xl = lo, xh = hi;
    if (flo > 0.0) std::swap(xl, xh);

    double x = 0.5 * (lo + hi);
    double step_old = std::abs(hi - lo);
    double step = step_old;
    double f = 0.0;
    fn(x, f, slope);

    for (int it = 1; it <= max_iterations; ++it) {
        const bool newton_leaves = ((x - xh) * slope - f) * ((x - xl) * slope - f) > 0.0;
        const bool too_slow = std::abs(2.0 * f) > std::abs(step_old * slope);
        step_old = step;
        if (newton_leaves || too_slow || slope == 0.0) {
            step = 0.5 * (xh - xl);
            x = xl + step;
        } else {
            step = f / slope;
            x -= step;
        }
        if (std::abs(step) < xtol) return {x, it, true};
        fn(x, f, slope);
        if (f == 0.0) return {x, it, true};
        if (f < 0.0)
            xl = x;
        else
            xh = x;
        if (std::abs(xh - xl) < xtol) return {x, it, true};
    }
    return {x, max_iterations, false};
}

}  // namespace pmrd
