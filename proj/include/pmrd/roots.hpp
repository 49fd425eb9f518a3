#pragma once

#include <cmath>
#include <functional>

namespace pmrd {

struct RootResult {
    double x = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Value and derivative of a scalar function at x.
using ValueAndSlope = std::function<void(double x, double& value, double& slope)>;

/// Newton iteration confined to the bracket [lo, hi]. Any Newton step that
/// leaves the current bracket, or fails to halve the previous step length,
/// is replaced by a bisection step. f(lo) and f(hi) must differ in sign.
///
/// Terminates when the bracket shrinks below `xtol` or f vanishes exactly.
RootResult safeguarded_newton(const ValueAndSlope& fn, double lo, double hi, double xtol,
                              int max_iterations = 200);

}  // namespace pmrd
