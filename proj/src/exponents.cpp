#include "pmrd/exponents.hpp"

#include <algorithm>
#include <cmath>

#include "pmrd/errors.hpp"

namespace pmrd {

namespace {

void check_common(int d, double m, double p0) {
    if (d < 1) throw DomainError("spatial dimension must be >= 1");
    if (!(m >= 1.0)) throw DomainError("porous-medium exponent must be >= 1");
    if (!(p0 > 1.0)) throw DomainError("initial exponent must be > 1");
}

constexpr double kThresholdBand = 1e-13;

double critical(int d) { return (static_cast<double>(d) + 2.0) / 2.0; }

Monotonicity classify(std::size_t increases, std::size_t decreases) {
    if (increases > 0 && decreases > 0) return Monotonicity::Mixed;
    if (increases > 0) return Monotonicity::Increasing;
    if (decreases > 0) return Monotonicity::Decreasing;
    return Monotonicity::Constant;
}

}  // namespace

double Exponent::value() const {
    if (unbounded_) throw DomainError("exponent is unbounded");
    return value_;
}

Exponent smoothing_exponent(int d, double m, double p0) {
    check_common(d, m, p0);
    if (p0 >= critical(d)) return Exponent::unbounded();
    const double dd = d;
    return Exponent::finite((m * dd + 2.0) * p0 / (dd + 2.0 - 2.0 * p0));
}

double p_next(int d, double m, double p0, double p_n) {
    check_common(d, m, p0);
    const double dd = d;
    const double denom = p0 * (dd - 2.0) + 2.0;
    // Positive for d >= 2; the recursion is only used for d >= 3.
    if (!(denom > 0.0)) throw DomainError("p-recursion denominator is not positive");
    return p_n * dd * (p0 - 1.0) / denom + dd * ((m - 1.0) * (p0 - 1.0) + p0) / denom;
}

FixedPoint p_fixed_point(int d, double m, double p0) {
    check_common(d, m, p0);
    const double dd = d;
    const double denom = dd + 2.0 - 2.0 * p0;
    if (denom == 0.0) return {FixedPointKind::Unbounded, 0.0};
    const double value = dd * ((m - 1.0) * (p0 - 1.0) + p0) / denom;
    return {denom > 0.0 ? FixedPointKind::Finite : FixedPointKind::Negative, value};
}

PIteration p_iteration(int d, double m, double p0, int n_max, std::optional<double> start) {
    check_common(d, m, p0);
    if (n_max < 0) throw DomainError("step count must be >= 0");
    n_max = std::min(n_max, kMaxBootstrapSteps);
    const double first = start.value_or(p0);
    if (!(first > 0.0)) throw DomainError("starting exponent must be positive");

    PIteration out;
    out.fixed_point = p_fixed_point(d, m, p0);
    out.sequence.push_back(first);

    if (d <= 2) {
        // Without the Sobolev gain of d >= 3 one smoothing round already
        // yields every finite exponent.
        out.unbounded = true;
        out.predicted = out.observed = Monotonicity::Increasing;
        return out;
    }

    const FixedPoint& fp = out.fixed_point;
    if (fp.kind == FixedPointKind::Finite) {
        out.predicted = first < fp.value   ? Monotonicity::Increasing
                        : first > fp.value ? Monotonicity::Decreasing
                                           : Monotonicity::Constant;
    } else {
        out.predicted = Monotonicity::Increasing;
    }

    // Consecutive terms within this band of a finite fixed point are
    // indistinguishable from it in double precision.
    const double band = fp.kind == FixedPointKind::Finite ? 1e-12 * std::abs(fp.value) : 0.0;
    std::size_t inc = 0, dec = 0;
    double cur = first;
    for (int n = 0; n < n_max; ++n) {
        const double nxt = p_next(d, m, p0, cur);
        if (!std::isfinite(nxt) || nxt > 1e300) {
            out.unbounded = true;
            break;
        }
        out.sequence.push_back(nxt);
        const bool settled = band > 0.0 && std::abs(cur - fp.value) <= band &&
                             std::abs(nxt - fp.value) <= band;
        if (!settled) {
            if (nxt > cur) ++inc;
            if (nxt < cur) ++dec;
        }
        if (nxt == cur) break;
        cur = nxt;
    }
    out.observed = classify(inc, dec);
    return out;
}

double sobolev_exponent(int d, double m, double p_n) {
    if (d < 3) throw DomainError("Sobolev exponent d r / (d - 2) requires d >= 3");
    const double dd = d;
    return dd * (m - 1.0 + p_n) / (dd - 2.0);
}

ThetaResult theta_exponent(int d, double p0, double p_next_value, std::optional<double> sobolev) {
    if (d < 1) throw DomainError("spatial dimension must be >= 1");
    if (!(p0 > 1.0) || !(p_next_value > p0))
        throw DomainError("theta requires p_next > p0 > 1");
    const double dd = d;
    ThetaResult out;
    out.theta = 1.0 - (2.0 / dd) * ((p0 - 1.0) / p0) * (p_next_value / (p_next_value - 1.0));
    if (!(out.theta > 0.0 && out.theta < 1.0))
        throw InconsistentParameters("interpolation exponent theta = " + std::to_string(out.theta) +
                                     " lies outside (0, 1)");
    if (sobolev) {
        const double lhs = (p0 - 1.0) / (p0 * (p_next_value - 1.0));
        const double rhs = (1.0 - out.theta) / p_next_value + out.theta / *sobolev;
        out.identity_residual = lhs - rhs;
    }
    return out;
}

double q_threshold(int d, double m, double nu) {
    const double dd = d;
    return (dd * (nu - m) + 2.0 * (nu - 1.0)) / 2.0;
}

QIteration q_iteration(int d, double m, double nu, double q0) {
    check_common(d, m, q0);
    if (!(nu >= 1.0)) throw DomainError("growth exponent nu must be >= 1");
    const double dd = d;
    QIteration out;
    out.threshold = q_threshold(d, m, nu);
    out.trigger = (dd + 2.0) * nu / 2.0;
    out.sequence.push_back(q0);

    double q = q0;
    for (int n = 0; n <= kMaxBootstrapSteps; ++n) {
        // A nonpositive denominator means q_n >= trigger as well.
        if (q >= out.trigger) {
            out.triggered = true;
            out.steps_to_linf = n;
            return out;
        }
        if (n == kMaxBootstrapSteps) break;
        const double next = (m * dd + 2.0) * q / (nu * (dd + 2.0) - 2.0 * q);
        out.sequence.push_back(next);
        // The ratio q_{n+1}/q_n grows with q_n, so one non-increasing step
        // means the sequence never climbs. The threshold is an unstable fixed
        // point, so a start on it must not be pushed off by rounding.
        if (!(next > q * (1.0 + kThresholdBand))) return out;
        q = next;
    }
    return out;
}

}  // namespace pmrd
