#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pmrd/entropy.hpp"
#include "pmrd/errors.hpp"
#include "support.hpp"

namespace pmrd {
namespace {

using std::numbers::pi;
using testing::reaction;

FieldSet single(std::vector<double> f) {
    FieldSet fs;
    fs.species.push_back(std::move(f));
    return fs;
}

TEST(Entropy, ReferenceValues) {
    const Grid g(8);
    EXPECT_EQ(entropy(g, FieldSet::constant(g, std::vector{1.0, 1.0})), 0.0);
    EXPECT_NEAR(entropy(g, FieldSet::constant(g, std::vector{std::numbers::e})), 1.0, 1e-15);
    EXPECT_NEAR(entropy(g, FieldSet::constant(g, std::vector{0.0, 0.0})), 2.0, 1e-15);
    EXPECT_THROW(entropy(g, single(std::vector<double>(8, -1.0))), DomainError);
}

TEST(Entropy, NonnegativeOnRandomFields) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 6.0);
    const Grid g(16);
    for (int k = 0; k < 200; ++k) {
        std::vector<double> f(16);
        for (auto& v : f) v = u(rng);
        EXPECT_GE(entropy(g, single(f)), 0.0);
    }
}

TEST(EntropyProduction, VanishesAtDetailedBalance) {
    const Grid g(10);
    const auto sys = reaction({2.0}, {1.0});
    const auto p = entropy_production(g, sys, FieldSet::constant(g, std::vector{1.0, 1.0}));
    EXPECT_EQ(p.value, 0.0);
    EXPECT_FALSE(p.infinite);
}

TEST(EntropyProduction, ReactiveTermOfConstantState) {
    const Grid g(10);
    const auto p = entropy_production(g, reaction({1.0}, {1.0}), FieldSet::constant(g, std::vector{4.0, 1.0}));
    EXPECT_EQ(p.diffusive, 0.0);
    EXPECT_NEAR(p.value, 4.1588830833596719, 1e-13);
}

TEST(EntropyProduction, OneVanishingMonomialIsFlaggedInfinite) {
    const Grid g(4);
    const auto p = entropy_production(g, reaction({1.0}, {1.0}), FieldSet::constant(g, std::vector{1.0, 0.0}));
    EXPECT_TRUE(p.infinite);
    EXPECT_EQ(p.value, kInfiniteProduction);
    EXPECT_EQ(reactive_integrand(0.0, 0.0), 0.0);
    EXPECT_TRUE(std::isinf(reactive_integrand(0.0, 2.0)));
}

TEST(EntropyProduction, NonnegativeOnRandomFields) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.01, 4.0);
    const Grid g(12);
    const auto sys = reaction({1.0, 2.0}, {1.5}, 1.5, 3.0);
    for (int k = 0; k < 200; ++k) {
        FieldSet fs;
        for (int s = 0; s < 3; ++s) {
            std::vector<double> f(12);
            for (auto& v : f) v = u(rng);
            fs.species.push_back(f);
        }
        EXPECT_GE(entropy_production(g, sys, fs).value, 0.0);
    }
}

TEST(EntropyProduction, MatchesTimeDerivativeOfEntropy) {
    // Semi-discrete dE/dt = sum_s sum_k ln(u) (d Lap(u^m) + f) vol.
    const Grid g(256);
    const auto sys = reaction({1.0}, {2.0}, 2.0, 1.5);
    FieldSet fs;
    fs.species.push_back(g.sample([](double x, double) { return 1.5 + 0.5 * std::cos(pi * x); }));
    fs.species.push_back(g.sample([](double x, double) { return 0.7 - 0.3 * std::cos(2.0 * pi * x); }));
    double dEdt = 0.0;
    const auto coeff = sys.diffusion();
    const auto exps = sys.exponents();
    std::vector<double> u(2), f(2);
    for (std::size_t s = 0; s < 2; ++s) {
        const auto lap = neumann_laplacian_of_power(g, fs[s], exps[s], coeff[s]);
        for (std::size_t k = 0; k < g.size(); ++k) dEdt += std::log(fs[s][k]) * lap[k] * g.cell_volume();
    }
    for (std::size_t k = 0; k < g.size(); ++k) {
        fs.gather(k, u);
        evaluate_reactions_flat(sys, u, f);
        for (std::size_t s = 0; s < 2; ++s) dEdt += std::log(u[s]) * f[s] * g.cell_volume();
    }
    const double D = entropy_production(g, sys, fs).value;
    EXPECT_NEAR(-dEdt, D, 1e-3 * D);
}

TEST(EntropyProduction, GeneralSystemUsesMinusFLogU) {
    const Grid g(4);
    GeneralSystem gs = to_general(reaction({1.0}, {1.0}));
    const auto via_general = entropy_production(g, gs, FieldSet::constant(g, std::vector{4.0, 1.0}));
    EXPECT_NEAR(via_general.value, 3.0 * std::log(4.0), 1e-13);
}

TEST(RelativeEntropy, ZeroAtEquilibrium) {
    const Grid g(6);
    const auto r = relative_entropy(g, FieldSet::constant(g, std::vector{0.5, 2.0}), std::vector{0.5, 2.0});
    EXPECT_NEAR(r.total, 0.0, 1e-15);
    EXPECT_NEAR(r.I1, 0.0, 1e-15);
    EXPECT_NEAR(r.I2, 0.0, 1e-15);
}

TEST(RelativeEntropy, ConstantFieldsHaveNoFluctuationPart) {
    const Grid g(6);
    const auto r = relative_entropy(g, FieldSet::constant(g, std::vector{2.0}), std::vector{1.0});
    EXPECT_NEAR(r.I1, 0.0, 1e-15);
    EXPECT_NEAR(r.total, r.I2, 1e-15);
    EXPECT_NEAR(r.total, 2.0 * std::log(2.0) - 1.0, 1e-15);
}

TEST(RelativeEntropy, StepProfile) {
    const Grid g(64);
    const auto r = relative_entropy(g, single(g.sample([](double x, double) { return x < 0.5 ? 2.0 : 0.0; })),
                                    std::vector{1.0});
    EXPECT_NEAR(r.I2, 0.0, 1e-15);
    EXPECT_NEAR(r.I1, std::log(2.0), 1e-14);
    EXPECT_NEAR(r.total, std::log(2.0), 1e-14);
}

TEST(RelativeEntropy, RejectsNonpositiveEquilibrium) {
    const Grid g(4);
    EXPECT_THROW(relative_entropy(g, FieldSet::constant(g, std::vector{1.0}), std::vector{0.0}), DomainError);
}

TEST(RelativeEntropy, AdditiveOnRandomFields) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    const Grid g(20);
    for (int k = 0; k < 200; ++k) {
        FieldSet fs;
        for (int s = 0; s < 2; ++s) {
            std::vector<double> f(20);
            for (auto& v : f) v = u(rng);
            fs.species.push_back(f);
        }
        const auto r = relative_entropy(g, fs, std::vector{0.8, 1.9});
        EXPECT_NEAR(r.total, r.I1 + r.I2, 1e-10 * (1.0 + r.total));
        EXPECT_GE(r.total, -1e-12);
    }
}

TEST(SqrtDecomposition, FluctuationsHaveZeroMean) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    const Grid g(30);
    const auto sys = reaction({1.0, 2.0}, {1.0});
    FieldSet fs;
    for (int s = 0; s < 3; ++s) {
        std::vector<double> f(30);
        for (auto& v : f) v = u(rng);
        fs.species.push_back(f);
    }
    const auto sq = sqrt_decomposition(g, sys, fs);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_NEAR(average(g, sq.delta[i]), 0.0, 1e-12);
        const double norm2 = std::pow(lp_norm(g, sq.delta[i], 2.0), 2.0);
        EXPECT_NEAR(norm2, average(g, fs[i]) - sq.A_avg[i] * sq.A_avg[i], 1e-12);
    }
    EXPECT_NEAR(sq.A_alpha[3], std::sqrt(fs[0][3]) * fs[1][3], 1e-12);
}

TEST(Lsi, PositiveAndRefinementStable) {
    const auto ratio = [](std::size_t n) {
        const Grid g(n);
        return lsi_ratio(g, g.sample([](double x, double) { return 1.0 + 0.1 * std::cos(pi * x); }), 1.0).ratio;
    };
    const double r64 = ratio(64), r128 = ratio(128);
    EXPECT_GT(r64, 0.0);
    EXPECT_LE(std::abs(r64 - r128) / r128, 0.01);
}

TEST(Lsi, LinearRatioIsScaleInvariant) {
    const Grid g(50);
    const auto u = g.sample([](double x, double) { return 1.0 + 0.4 * std::sin(3.0 * x); });
    auto v = u;
    for (auto& x : v) x *= 7.5;
    EXPECT_NEAR(lsi_ratio(g, u, 1.0).ratio, lsi_ratio(g, v, 1.0).ratio, 1e-9 * lsi_ratio(g, u, 1.0).ratio);
}

TEST(Lsi, SecondaryQuotientAtLeastOne) {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    const Grid g(25);
    for (int k = 0; k < 500; ++k) {
        std::vector<double> f(25);
        for (auto& v : f) v = u(rng);
        EXPECT_GE(lsi_ratio(g, f, 2.0).entropy_over_sqrt_gap, 1.0 - 1e-10);
    }
}

TEST(Lsi, ConstantFieldIsUndefined) {
    const Grid g(8);
    EXPECT_THROW(lsi_ratio(g, std::vector<double>(8, 2.0), 1.5), DomainError);
    EXPECT_THROW(lsi_ratio(g, std::vector<double>(8, 0.0), 1.5), DomainError);
}

FieldSet conversion_state(const Grid& g, double a_level, double amplitude) {
    FieldSet fs;
    fs.species.push_back(std::vector<double>(g.size(), a_level));
    fs.species.push_back(g.sample([&](double x, double) { return amplitude * (1.0 + std::cos(pi * x)); }));
    return fs;
}

TEST(IndirectDiffusion, ConstantSmallSpeciesHasZeroRhs) {
    const Grid g(32);
    FieldSet fs = FieldSet::constant(g, std::vector{1.0, 1e-3});
    const auto r = indirect_diffusion_ratio(g, reaction({1.0}, {1.0}), fs, 1, 1e-2);
    EXPECT_EQ(r.rhs, 0.0);
    EXPECT_TRUE(std::isinf(r.ratio));
}

TEST(IndirectDiffusion, BoundedBelowAcrossAmplitudes) {
    const Grid g(64);
    const auto sys = reaction({1.0}, {1.0});
    double lowest = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 20; ++k) {
        const double amp = 1e-3 * k;
        const auto r = indirect_diffusion_ratio(g, sys, conversion_state(g, 1.0, amp), 1, 0.05);
        EXPECT_GT(r.rhs, 0.0);
        lowest = std::min(lowest, r.ratio);
    }
    EXPECT_GT(lowest, 0.0);
}

TEST(IndirectDiffusion, LargeReactantTinyProductGivesLargeRatio) {
    const Grid g(64);
    const auto r = indirect_diffusion_ratio(g, reaction({1.0}, {1.0}), conversion_state(g, 50.0, 1e-4), 1, 1.0);
    EXPECT_GT(r.ratio, 1e3);
}

TEST(IndirectDiffusion, PreconditionNamesTheSpecies) {
    const Grid g(8);
    try {
        indirect_diffusion_ratio(g, reaction({1.0}, {1.0, 1.0}), FieldSet::constant(g, std::vector{1.0, 0.0, 2.0}),
                                 2, 0.1);
        FAIL() << "expected a precondition error";
    } catch (const PreconditionError& e) {
        EXPECT_NE(std::string(e.what()).find("b_2"), std::string::npos);
    }
}

TEST(Eep, SyntheticRecordAndSkip) {
    DiagnosticsRecord rec;
    rec.t = 0.0;
    rec.D = 0.25;
    rec.rel_E = 0.25;
    EXPECT_DOUBLE_EQ(*eep_ratio(rec), 1.0);
    rec.t = std::exp(1.0) - 1.0;  // Theta = 1/2
    EXPECT_NEAR(*eep_ratio(rec), 2.0, 1e-15);
    rec.rel_E = 0.0;
    EXPECT_FALSE(eep_ratio(rec).has_value());
}

TEST(Ckp, PositiveSkippedAtEquilibriumAndRefinementStable) {
    const Grid g4(4);
    EXPECT_FALSE(ckp_ratio(g4, FieldSet::constant(g4, std::vector{1.0, 2.0}), std::vector{1.0, 2.0}).has_value());
    EXPECT_GT(*ckp_ratio(g4, FieldSet::constant(g4, std::vector{1.5, 1.5}), std::vector{1.0, 2.0}), 0.0);

    const auto ratio = [](std::size_t n, double eps) {
        const Grid g(n);
        FieldSet fs;
        fs.species.push_back(g.sample([eps](double x, double) { return 0.5 * (1.0 + eps * std::cos(pi * x)); }));
        fs.species.push_back(g.sample([eps](double x, double) { return 0.5 * (1.0 - eps * std::cos(pi * x)); }));
        return *ckp_ratio(g, fs, std::vector{0.5, 0.5});
    };
    const double r64 = ratio(64, 0.1), r128 = ratio(128, 0.1);
    EXPECT_LE(std::abs(r64 - r128) / r128, 0.01);
    double prev = ratio(128, 1e-1);
    for (double eps : {1e-2, 1e-3}) {
        const double r = ratio(128, eps);
        EXPECT_GT(r, 0.0);
        EXPECT_LE(std::abs(r - prev) / prev, 0.05);
        prev = r;
    }
}

TEST(Phi, DiagonalAndReferenceValues) {
    for (double x : {1e-3, 0.5, 1.0, 42.0}) EXPECT_DOUBLE_EQ(phi(x, x), 2.0);
    EXPECT_NEAR(phi(std::numbers::e, 1.0), 2.3762040064959655, 1e-13);
    EXPECT_GT(phi(4.0, 1.0), phi(2.0, 1.0));
    EXPECT_EQ(phi(0.0, 3.0), 1.0);
    EXPECT_THROW(phi(0.0, 0.0), DomainError);
}

TEST(Phi, ContinuousAcrossTheDiagonal) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> xd(0.1, 10.0), ed(-1e-3, 1e-3);
    for (int k = 0; k < 10000; ++k) {
        const double x = xd(rng), eps = ed(rng);
        EXPECT_LE(std::abs(phi(x, x * (1.0 + eps)) - 2.0), 10.0 * std::abs(eps) + 1e-12);
    }
}

TEST(Phi, IncreasingInFirstArgument) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> d(1e-3, 20.0);
    for (int k = 0; k < 10000; ++k) {
        const double y = d(rng), x1 = d(rng), x2 = d(rng);
        const double lo = std::min(x1, x2), hi = std::max(x1, x2);
        EXPECT_LE(phi(lo, y), phi(hi, y) + 1e-12);
    }
}

TEST(ElementaryInequalities, HoldOnRandomPairs) {
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> d(0.0, 10.0);
    for (int k = 0; k < 10000; ++k) {
        const double x = d(rng), y = d(rng);
        const double gap = (std::sqrt(x) - std::sqrt(y)) * (std::sqrt(x) - std::sqrt(y));
        if (x > 0.0 && y > 0.0) {
            EXPECT_GE(reactive_integrand(x, y), 4.0 * gap - 1e-12);
            EXPECT_GE(x * std::log(x / y) - x + y, gap - 1e-12);
        }
        EXPECT_GE((x - y) * (x - y), 0.5 * x * x - y * y - 1e-12);
    }
}

TEST(DecayFit, ExactExponential) {
    std::vector<double> t, dist;
    for (int k = 0; k <= 50; ++k) {
        t.push_back(0.1 * k);
        dist.push_back(3.0 * std::exp(-2.0 * 0.1 * k));
    }
    const auto fit = fit_decay_rate(t, dist);
    EXPECT_NEAR(fit.lambda, 2.0, 1e-12);
    EXPECT_NEAR(fit.C, 3.0, 1e-11);
    EXPECT_LE(fit.residual, 1e-12);
    EXPECT_EQ(fit.samples, 51u);
}

TEST(DecayFit, ConstantDistanceHasZeroRate) {
    const std::vector<double> t{0, 1, 2, 3, 4, 5}, dist(6, 0.7);
    EXPECT_NEAR(fit_decay_rate(t, dist).lambda, 0.0, 1e-15);
}

TEST(DecayFit, FloorAndWindowFilterSamples) {
    std::vector<double> t, dist;
    for (int k = 0; k < 10; ++k) {
        t.push_back(k);
        dist.push_back(k < 6 ? std::exp(-static_cast<double>(k)) : 1e-20);
    }
    EXPECT_EQ(fit_decay_rate(t, dist).samples, 6u);
    EXPECT_THROW(fit_decay_rate(t, dist, {2.0, 100.0}), FitError);
}

Trajectory snapshots(const Grid& g, const std::vector<double>& times,
                     const std::function<double(double, double)>& field) {
    Trajectory traj(g);
    traj.species_names = {"u1"};
    traj.p_norms = {1.0};
    for (double t : times) {
        TrajectoryRecord rec;
        rec.diag.t = t;
        rec.snapshot = single(g.sample([&](double x, double) { return field(t, x); }));
        traj.records.push_back(std::move(rec));
    }
    return traj;
}

TEST(SpacetimeNorm, ConstantInTime) {
    const Grid g(10);
    std::vector<double> times;
    for (int k = 0; k <= 20; ++k) times.push_back(0.25 * k);
    const auto st = spacetime_norm(snapshots(g, times, [](double, double) { return 1.7; }), 0, 3.0);
    EXPECT_NEAR(st.norm, 1.7 * std::pow(5.0, 1.0 / 3.0), 1e-12);
    EXPECT_NEAR(st.growth_exponent, 0.0, 1e-12);
}

TEST(SpacetimeNorm, DecayingFieldKeepsInitialSup) {
    const Grid g(16);
    std::vector<double> times;
    for (int k = 0; k <= 10; ++k) times.push_back(0.5 * k);
    const auto st = spacetime_norm(
        snapshots(g, times, [](double t, double x) { return 1.0 + std::exp(-t) * std::cos(pi * x); }), 0, 2.0);
    for (double s : st.running_sup) EXPECT_DOUBLE_EQ(s, st.running_sup.front());
    EXPECT_LE(std::abs(st.growth_exponent), 0.1);
}

TEST(SpacetimeNorm, RequiresSnapshots) {
    Trajectory traj(Grid(4));
    traj.records.push_back({});
    EXPECT_THROW(spacetime_norm(traj, 0, 2.0), PreconditionError);
}

}  // namespace
}  // namespace pmrd
