#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pmrd/equilibrium.hpp"
#include "pmrd/errors.hpp"
#include "pmrd/roots.hpp"
#include "support.hpp"

namespace pmrd {
namespace {

using testing::reaction;

TEST(ConservedMasses, SingleLawExamples) {
    auto m = conserved_masses(reaction({1.0}, {1.0}), std::vector{1.0}, std::vector{0.0});
    EXPECT_EQ(m.at(0, 0), 1.0);
    m = conserved_masses(reaction({2.0}, {1.0}), std::vector{1.0}, std::vector{1.0});
    EXPECT_EQ(m.at(0, 0), 3.0);
}

TEST(ConservedMasses, IndependentSubsetIsFirstRowAndColumn) {
    const auto m = conserved_masses(reaction({1.0, 1.0}, {1.0}), std::vector{1.0, 2.0}, std::vector{0.0});
    EXPECT_EQ(m.at(0, 0), 1.0);
    EXPECT_EQ(m.at(1, 0), 2.0);
    const std::vector<std::pair<std::size_t, std::size_t>> expected{{0, 0}, {1, 0}};
    EXPECT_EQ(m.independent_laws, expected);
}

TEST(ConservedMasses, LawCountAndReconstruction) {
    const auto sys = reaction({1.0, 2.0, 1.5}, {2.0, 3.0});
    const auto m = conserved_masses(sys, std::vector{0.3, 1.2, 2.0}, std::vector{0.7, 0.1});
    EXPECT_EQ(m.independent_laws.size(), 4u);  // M + N - 1
    const auto full = m.reconstruct_full(sys);
    ASSERT_EQ(full.size(), m.values.size());
    for (std::size_t k = 0; k < full.size(); ++k) EXPECT_NEAR(full[k], m.values[k], 1e-14 * m.max_value());
}

TEST(ConservedMasses, AllZeroIsDegenerate) {
    EXPECT_THROW(conserved_masses(reaction({1.0}, {1.0}), std::vector{0.0}, std::vector{0.0}), DegenerateMass);
}

TEST(ConservedMasses, NegativeAverageRejected) {
    EXPECT_THROW(conserved_masses(reaction({1.0}, {1.0}), std::vector{-1.0}, std::vector{1.0}), DomainError);
}

TEST(SolveEquilibrium, SymmetricConversionSplitsMassEvenly) {
    const auto sys = reaction({1.0}, {1.0});
    for (double mass : {1e-3, 0.5, 1.0, 7.0, 1e3}) {
        const auto eq = solve_equilibrium(sys, conserved_masses(sys, std::vector{mass}, std::vector{0.0}));
        EXPECT_NEAR(eq.a_inf[0], mass / 2.0, 1e-12 * mass);
        EXPECT_NEAR(eq.b_inf[0], mass / 2.0, 1e-12 * mass);
    }
}

TEST(SolveEquilibrium, DimerizationWithMassThree) {
    // a + 2b = 3 and a^2 = b give 2a^2 + a - 3 = 0, so a = b = 1.
    const auto sys = reaction({2.0}, {1.0});
    const auto eq = solve_equilibrium(sys, conserved_masses(sys, std::vector{1.0}, std::vector{1.0}));
    EXPECT_NEAR(eq.a_inf[0], 1.0, 1e-12);
    EXPECT_NEAR(eq.b_inf[0], 1.0, 1e-12);
    EXPECT_LE(eq.residual_balance, 1e-12);
    EXPECT_LE(eq.residual_mass, 1e-12 * 3.0);
}

TEST(SolveEquilibrium, BalancedInputIsAFixedPoint) {
    const auto sys = reaction({2.0}, {1.0});
    const auto eq = solve_equilibrium(sys, conserved_masses(sys, std::vector{2.0}, std::vector{4.0}));
    EXPECT_NEAR(eq.xi, 0.0, 1e-13);
    EXPECT_NEAR(eq.a_inf[0], 2.0, 1e-12);
    EXPECT_NEAR(eq.b_inf[0], 4.0, 1e-12);
}

TEST(SolveEquilibrium, RateConstantsShiftTheBalance) {
    auto sys = reaction({1.0}, {1.0});
    sys.k_f = 3.0;  // 3a = b with a + b = 4
    const auto eq = solve_equilibrium(sys, conserved_masses(sys, std::vector{4.0}, std::vector{0.0}));
    EXPECT_NEAR(eq.a_inf[0], 1.0, 1e-12);
    EXPECT_NEAR(eq.b_inf[0], 3.0, 1e-12);
}

TEST(SolveEquilibrium, MissingReactantMakesTheIntervalEmpty) {
    // With a_2 absent and no b present nothing can react: no positive equilibrium.
    const auto sys = reaction({1.0, 1.0}, {1.0});
    const auto mass = conserved_masses(sys, std::vector{1.0, 0.0}, std::vector{0.0});
    EXPECT_THROW(solve_equilibrium(sys, mass), DegenerateMass);
}

struct RandomCase {
    ReactionSystem sys;
    MassVector mass;
};

RandomCase random_case(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coef(1.0, 3.0), avg(0.0, 10.0);
    const std::size_t M = 1 + rng() % 4, N = 1 + rng() % 4;
    std::vector<double> alpha(M), beta(N), a(M), b(N);
    for (auto& x : alpha) x = coef(rng);
    for (auto& x : beta) x = coef(rng);
    for (auto& x : a) x = avg(rng) + 1e-3;
    for (auto& x : b) x = avg(rng);
    auto sys = reaction(alpha, beta);
    auto mass = conserved_masses(sys, a, b);
    return {std::move(sys), std::move(mass)};
}

TEST(SolveEquilibrium, SatisfiesEveryLawOnRandomSystems) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const auto c = random_case(rng);
        const auto eq = solve_equilibrium(c.sys, c.mass);
        double lhs = 1.0, rhs = 1.0;
        for (std::size_t i = 0; i < c.sys.num_a(); ++i) {
            EXPECT_GT(eq.a_inf[i], 0.0);
            lhs *= std::pow(eq.a_inf[i], c.sys.alpha[i]);
        }
        for (std::size_t j = 0; j < c.sys.num_b(); ++j) {
            EXPECT_GT(eq.b_inf[j], 0.0);
            rhs *= std::pow(eq.b_inf[j], c.sys.beta[j]);
        }
        EXPECT_LE(std::abs(lhs - rhs), 1e-12 * (1.0 + lhs));
        for (std::size_t i = 0; i < c.sys.num_a(); ++i)
            for (std::size_t j = 0; j < c.sys.num_b(); ++j) {
                const double law = c.sys.beta[j] * eq.a_inf[i] + c.sys.alpha[i] * eq.b_inf[j];
                EXPECT_LE(std::abs(law - c.mass.at(i, j)), 1e-12 * c.mass.max_value());
            }
    }
}

TEST(Oracle, AgreesWithRootSolveOnRandomSystems) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const auto c = random_case(rng);
        const auto eq = solve_equilibrium(c.sys, c.mass);
        const auto ref = entropy_minimization_oracle(c.sys, c.mass);
        const auto x = eq.flat(), y = ref.flat();
        for (std::size_t s = 0; s < x.size(); ++s) EXPECT_NEAR(x[s], y[s], 1e-8 * (1.0 + std::abs(y[s])));
    }
}

TEST(Oracle, ReproducesAnalyticCases) {
    auto sys = reaction({1.0}, {1.0});
    auto eq = entropy_minimization_oracle(sys, conserved_masses(sys, std::vector{1.0}, std::vector{0.0}));
    EXPECT_NEAR(eq.a_inf[0], 0.5, 1e-10);
    sys = reaction({2.0}, {1.0});
    eq = entropy_minimization_oracle(sys, conserved_masses(sys, std::vector{1.0}, std::vector{1.0}));
    EXPECT_NEAR(eq.a_inf[0], 1.0, 1e-10);
    EXPECT_NEAR(eq.b_inf[0], 1.0, 1e-10);
}

TEST(Oracle, FreeEnergyIsConvexAlongTheReactionLine) {
    const auto sys = reaction({2.0, 1.0}, {1.5});
    const auto mass = conserved_masses(sys, std::vector{1.0, 2.0}, std::vector{0.5});
    const auto [lo, hi] = extent_interval(sys, mass);
    const int n = 200;
    const double h = (hi - lo) / n;
    for (int k = 1; k < n - 1; ++k) {
        const double x = lo + h * (k + 0.5);
        const double second = reaction_line_free_energy(sys, mass, x - h) - 2.0 * reaction_line_free_energy(sys, mass, x) +
                              reaction_line_free_energy(sys, mass, x + h);
        EXPECT_GE(second, -1e-12);
    }
}

TEST(Oracle, SlopeBlowsUpTowardsTheInterval) {
    const auto sys = reaction({1.0}, {1.0});
    const auto mass = conserved_masses(sys, std::vector{1.0}, std::vector{1.0});
    const auto [lo, hi] = extent_interval(sys, mass);
    const auto slope = [&](double x) {
        const double h = 1e-12;
        return (reaction_line_free_energy(sys, mass, x + h) - reaction_line_free_energy(sys, mass, x)) / h;
    };
    EXPECT_LT(slope(lo + 1e-9), -10.0);
    EXPECT_GT(slope(hi - 2e-9), 10.0);
}

TEST(SafeguardedNewton, FindsBracketedRoot) {
    const auto r = safeguarded_newton(
        [](double x, double& v, double& dv) {
            v = x * x - 2.0;
            dv = 2.0 * x;
        },
        0.0, 2.0, 1e-15);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.x, std::sqrt(2.0), 1e-14);
}

TEST(SafeguardedNewton, RejectsMissingSignChange) {
    const ValueAndSlope fn = [](double x, double& v, double& dv) {
        v = x * x + 1.0;
        dv = 2.0 * x;
    };
    EXPECT_THROW(safeguarded_newton(fn, -1.0, 1.0, 1e-12), InternalInconsistency);
}

}  // namespace
}  // namespace pmrd
