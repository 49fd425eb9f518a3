#pragma once

#include <optional>
#include <vector>

namespace pmrd {

/// Integrability exponent that is either a finite number or unbounded
/// (every finite exponent is reached).
class Exponent {
public:
    static Exponent finite(double v) { return Exponent(v, false); }
    static Exponent unbounded() { return Exponent(0.0, true); }

    bool is_unbounded() const noexcept { return unbounded_; }
    /// Throws DomainError when unbounded.
    double value() const;

    friend bool operator==(const Exponent&, const Exponent&) = default;

private:
    Exponent(double v, bool u) : value_(v), unbounded_(u) {}
    double value_;
    bool unbounded_;
};

enum class Monotonicity { Increasing, Decreasing, Constant, Mixed };

enum class FixedPointKind {
    Finite,    // positive finite limit candidate
    Unbounded, // p0 = (d+2)/2
    Negative   // p0 > (d+2)/2: no finite positive fixed point
};

struct FixedPoint {
    FixedPointKind kind = FixedPointKind::Finite;
    double value = 0.0;  // the (possibly negative) formula value when not Unbounded
};

struct PIteration {
    std::vector<double> sequence;
    /// Observed ordering of consecutive terms (ignoring terms that already
    /// sit on the fixed point to rounding).
    Monotonicity observed = Monotonicity::Constant;
    /// Ordering predicted by the fixed-point classification.
    Monotonicity predicted = Monotonicity::Constant;
    FixedPoint fixed_point;
    /// True when the recursion is not used because one round already
    /// reaches every finite exponent (d <= 2), or the terms overflowed.
    bool unbounded = false;
};

struct QIteration {
    std::vector<double> sequence;
    double threshold = 0.0;  // (d(nu - m) + 2(nu - 1)) / 2
    double trigger = 0.0;    // (d + 2) nu / 2
    bool triggered = false;
    std::optional<int> steps_to_linf;
};

struct ThetaResult {
    double theta = 0.0;
    /// Residual of the interpolation identity when a Sobolev exponent is supplied.
    std::optional<double> identity_residual;
};

inline constexpr int kMaxBootstrapSteps = 10000;

/// Gain in integrability from one application of the porous-medium smoothing
/// estimate with source in L^{p0}.
Exponent smoothing_exponent(int d, double m, double p0);

/// One step of the p-recursion (coefficients depend on p0), starting at p_n.
double p_next(int d, double m, double p0, double p_n);

/// Sequence p_0 = start (default p0), p_1, ... up to n_max further terms.
PIteration p_iteration(int d, double m, double p0, int n_max, std::optional<double> start = {});

FixedPoint p_fixed_point(int d, double m, double p0);

/// Sobolev exponent s_n = d (m - 1 + p_n) / (d - 2), d >= 3.
double sobolev_exponent(int d, double m, double p_n);

ThetaResult theta_exponent(int d, double p0, double p_next_value,
                           std::optional<double> sobolev = {});

QIteration q_iteration(int d, double m, double nu, double q0);

double q_threshold(int d, double m, double nu);

}  // namespace pmrd
