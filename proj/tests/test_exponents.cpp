#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pmrd/errors.hpp"
#include "pmrd/exponents.hpp"

namespace pmrd {
namespace {

TEST(SmoothingExponent, CaseSplitAtCriticalExponent) {
    EXPECT_TRUE(smoothing_exponent(3, 2.0, 2.5).is_unbounded());
    EXPECT_DOUBLE_EQ(smoothing_exponent(3, 2.0, 2.0).value(), 16.0);
    EXPECT_DOUBLE_EQ(smoothing_exponent(2, 1.0, 1.5).value(), 6.0);
    EXPECT_THROW(smoothing_exponent(3, 2.0, 2.5).value(), DomainError);
}

TEST(SmoothingExponent, GainsIntegrabilityWhenFinite) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> m_d(1.0, 5.0), p_d(1.0001, 4.0);
    for (int k = 0; k < 1000; ++k) {
        const int d = 1 + static_cast<int>(rng() % 6);
        const double m = m_d(rng), p0 = p_d(rng);
        const Exponent s = smoothing_exponent(d, m, p0);
        if (!s.is_unbounded()) EXPECT_GT(s.value(), p0);
    }
}

TEST(SmoothingExponent, RejectsInvalidParameters) {
    EXPECT_THROW(smoothing_exponent(0, 2.0, 2.0), DomainError);
    EXPECT_THROW(smoothing_exponent(3, 0.5, 2.0), DomainError);
    EXPECT_THROW(smoothing_exponent(3, 2.0, 1.0), DomainError);
}

TEST(PIteration, FirstStepByHand) {
    EXPECT_DOUBLE_EQ(p_next(3, 2.0, 2.0, 2.0), 3.75);
    const auto it = p_iteration(3, 2.0, 2.0, 1);
    ASSERT_EQ(it.sequence.size(), 2u);
    EXPECT_DOUBLE_EQ(it.sequence[1], 3.75);
}

TEST(PIteration, ConvergesToFiniteFixedPoint) {
    const FixedPoint fp = p_fixed_point(3, 2.0, 2.0);
    EXPECT_EQ(fp.kind, FixedPointKind::Finite);
    EXPECT_DOUBLE_EQ(fp.value, 9.0);
    const auto it = p_iteration(3, 2.0, 2.0, 200);
    EXPECT_NEAR(it.sequence.back(), 9.0, 1e-10);
    EXPECT_EQ(it.observed, Monotonicity::Increasing);
    EXPECT_EQ(it.predicted, Monotonicity::Increasing);
}

TEST(PIteration, FixedPointIsStationary) {
    const double fp = p_fixed_point(3, 2.0, 2.0).value;
    EXPECT_NEAR(p_next(3, 2.0, 2.0, fp), fp, 1e-12 * fp);
    const auto it = p_iteration(3, 2.0, 2.0, 10, fp);
    EXPECT_EQ(it.observed, Monotonicity::Constant);
}

TEST(PIteration, StartAboveFixedPointDecreases) {
    const auto it = p_iteration(4, 1.5, 2.0, 50, 20.0);
    EXPECT_EQ(it.predicted, Monotonicity::Decreasing);
    EXPECT_EQ(it.observed, Monotonicity::Decreasing);
}

TEST(PIteration, SupercriticalStartHasNoFiniteFixedPoint) {
    const FixedPoint fp = p_fixed_point(3, 1.0, 3.0);
    EXPECT_EQ(fp.kind, FixedPointKind::Negative);
    EXPECT_DOUBLE_EQ(fp.value, -9.0);
    const auto it = p_iteration(3, 1.0, 3.0, 30);
    EXPECT_EQ(it.observed, Monotonicity::Increasing);
    for (std::size_t n = 1; n < it.sequence.size(); ++n) EXPECT_GT(it.sequence[n], it.sequence[n - 1]);
}

TEST(PIteration, CriticalStartHasUnboundedFixedPoint) {
    EXPECT_EQ(p_fixed_point(3, 2.0, 2.5).kind, FixedPointKind::Unbounded);
}

TEST(PIteration, LowDimensionsAreUnboundedAfterOneRound) {
    const auto it = p_iteration(2, 2.0, 1.5, 10);
    EXPECT_TRUE(it.unbounded);
    EXPECT_EQ(it.sequence.size(), 1u);
}

TEST(PIteration, MonotonicityMatchesClassification) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> m_d(1.0, 4.0), p_d(1.01, 6.0), s_d(0.5, 40.0);
    for (int k = 0; k < 1000; ++k) {
        const int d = 3 + static_cast<int>(rng() % 5);
        const double m = m_d(rng), p0 = p_d(rng), start = s_d(rng);
        const auto it = p_iteration(d, m, p0, 25, start);
        const auto fp = p_fixed_point(d, m, p0);
        const bool expect_increasing =
            (p0 < (d + 2.0) / 2.0 && start < fp.value) || p0 >= (d + 2.0) / 2.0;
        if (expect_increasing)
            EXPECT_EQ(it.observed, Monotonicity::Increasing) << d << ' ' << m << ' ' << p0 << ' ' << start;
        else
            EXPECT_NE(it.observed, Monotonicity::Increasing) << d << ' ' << m << ' ' << p0 << ' ' << start;
        EXPECT_EQ(it.observed, it.predicted);
    }
}

TEST(Theta, HandValueAndInterpolationIdentity) {
    const double s = sobolev_exponent(3, 2.0, 2.0);
    EXPECT_DOUBLE_EQ(s, 9.0);
    const auto r = theta_exponent(3, 2.0, 3.75, s);
    EXPECT_NEAR(r.theta, 6.0 / 11.0, 1e-15);
    ASSERT_TRUE(r.identity_residual.has_value());
    EXPECT_LE(std::abs(*r.identity_residual), 1e-12);
}

TEST(Theta, OutOfRangeIsInconsistent) {
    EXPECT_THROW(theta_exponent(1, 2.0, 3.0), InconsistentParameters);
    EXPECT_THROW(theta_exponent(3, 2.0, 1.5), DomainError);
}

TEST(QIteration, TriggersAfterOneStep) {
    const auto q = q_iteration(3, 2.0, 2.0, 3.0);
    EXPECT_DOUBLE_EQ(q.threshold, 1.0);
    EXPECT_DOUBLE_EQ(q.trigger, 5.0);
    ASSERT_EQ(q.sequence.size(), 2u);
    EXPECT_DOUBLE_EQ(q.sequence[1], 6.0);
    EXPECT_TRUE(q.triggered);
    EXPECT_EQ(q.steps_to_linf, 1);
}

TEST(QIteration, ThresholdStartIsStationaryAndDoesNotTrigger) {
    for (const auto& [d, m, nu] : {std::tuple{3, 2.0, 3.0}, std::tuple{4, 1.5, 3.0}, std::tuple{5, 1.2, 2.5}}) {
        const double q0 = q_threshold(d, m, nu);
        ASSERT_GT(q0, 1.0);
        const auto q = q_iteration(d, m, nu, q0);
        EXPECT_FALSE(q.triggered);
        ASSERT_EQ(q.sequence.size(), 2u);
        EXPECT_NEAR(q.sequence[1], q0, 1e-12 * q0);
    }
}

TEST(QIteration, LinearCaseClimbsInFiniteSteps) {
    const auto q = q_iteration(3, 1.0, 1.0, 1.01);
    EXPECT_DOUBLE_EQ(q.threshold, 0.0);
    EXPECT_TRUE(q.triggered);
    ASSERT_TRUE(q.steps_to_linf.has_value());
    for (std::size_t n = 1; n < q.sequence.size(); ++n) EXPECT_GT(q.sequence[n], q.sequence[n - 1]);
}

TEST(QIteration, IncreasesExactlyAboveThreshold) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> m_d(1.0, 4.0), nu_d(1.0, 5.0), q_d(1.001, 20.0);
    for (int k = 0; k < 1000; ++k) {
        const int d = 1 + static_cast<int>(rng() % 7);
        const double m = m_d(rng), nu = nu_d(rng), q0 = q_d(rng);
        const auto q = q_iteration(d, m, nu, q0);
        if (q0 >= q.trigger) continue;
        const bool increased = q.sequence.size() > 1 && q.sequence[1] > q0;
        EXPECT_EQ(increased, q0 > q.threshold) << d << ' ' << m << ' ' << nu << ' ' << q0;
        EXPECT_EQ(q.triggered, q0 > q.threshold);
    }
}

TEST(QIteration, DualityExponentClearsThresholdUnderBoundednessCondition) {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> nu_d(1.0, 6.0), gap(1e-6, 3.0);
    for (int k = 0; k < 1000; ++k) {
        const int d = 3 + static_cast<int>(rng() % 6);
        const double nu = nu_d(rng);
        const double m = std::max(1.0, nu - 4.0 / (d + 2.0)) + gap(rng);
        EXPECT_GT(m + 1.0, q_threshold(d, m, nu));
    }
}

}  // namespace
}  // namespace pmrd
