#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace pmrd {

/// Single reversible mass-action reaction
///   alpha_1 A_1 + ... + alpha_M A_M  <=>  beta_1 B_1 + ... + beta_N B_N
/// with porous-medium diffusion d_i Lap(a_i^{m_i}) and h_j Lap(b_j^{p_j}).
///
/// Species are ordered (a_1..a_M, b_1..b_N) wherever a flat layout is used.
struct ReactionSystem {
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> d;
    std::vector<double> h;
    std::vector<double> m;
    std::vector<double> p;
    double k_f = 1.0;
    double k_b = 1.0;

    std::size_t num_a() const noexcept { return alpha.size(); }
    std::size_t num_b() const noexcept { return beta.size(); }
    std::size_t num_species() const noexcept { return alpha.size() + beta.size(); }

    /// Throws InvalidSystem on any violated invariant.
    void validate() const;

    /// Diffusion coefficients in flat species order.
    std::vector<double> diffusion() const;
    /// Porous-medium exponents in flat species order.
    std::vector<double> exponents() const;
};

/// Pointwise reaction map u -> f(u); writes S values into `out`.
using ReactionMap = std::function<void(std::span<const double> u, std::span<double> out)>;

/// General system du_i/dt - d_i Lap(u_i^{m_i}) = f_i(u).
struct GeneralSystem {
    std::size_t species = 0;
    std::vector<double> m;
    std::vector<double> d;
    ReactionMap f;
    std::vector<double> lambda;
    double nu = 1.0;

    void validate() const;
};

struct ExponentReport {
    double nu = 1.0;
    int dimension = 1;
    std::vector<double> exponents;
    std::vector<bool> existence_ok;
    std::vector<bool> boundedness_ok;
    std::vector<double> duality_exponent;

    double existence_threshold() const;
    double boundedness_threshold() const;
    bool all_existence() const;
    bool all_boundedness() const;
};

struct SampleViolation {
    std::vector<double> u;
    double value = 0.0;
    std::size_t species = 0;
};

struct ConditionCheck {
    bool certified = false;  // proved analytically rather than sampled
    std::size_t samples = 0;
    std::size_t violation_count = 0;
    std::vector<SampleViolation> violations;  // first few only

    bool passed() const noexcept { return violation_count == 0; }
};

struct ConditionReport {
    ConditionCheck mass_dissipation;  // (M): sum lambda_i f_i <= 0
    ConditionCheck quasi_positivity;  // (P): f_i >= 0 where u_i = 0
    std::vector<double> growth_constant;  // (G): fitted C per species
    double nu = 1.0;
};

struct SamplingOptions {
    std::size_t samples = 10000;
    double box_max = 10.0;
    std::uint64_t seed = 42;
    double tolerance = 1e-12;
    std::size_t max_reported = 16;
};

/// Either system family; the solver and diagnostics accept both.
using System = std::variant<ReactionSystem, GeneralSystem>;

std::size_t species_count(const System& sys);
/// a1..aM, b1..bN for system (R); u1..uS otherwise.
std::vector<std::string> species_names(const System& sys);
std::vector<double> diffusion_coefficients(const System& sys);
std::vector<double> diffusion_exponents(const System& sys);
void validate(const System& sys);

double max_growth_exponent(std::span<const double> alpha, std::span<const double> beta);

/// k_f a^alpha - k_b b^beta; inputs must be nonnegative.
double reaction_rate(const ReactionSystem& sys, std::span<const double> a, std::span<const double> b);

struct ReactionTerms {
    std::vector<double> f;
    std::vector<double> g;
};

ReactionTerms evaluate_reactions(const ReactionSystem& sys, std::span<const double> a,
                                 std::span<const double> b);

/// Flat-order evaluation into `out` (size M+N); no allocation.
void evaluate_reactions_flat(const ReactionSystem& sys, std::span<const double> u,
                             std::span<double> out);

/// Views a ReactionSystem as a general system with the conservation weights
/// lambda_i = 1/(M alpha_i), lambda_j = 1/(N beta_j).
GeneralSystem to_general(const ReactionSystem& sys);

ConditionReport check_conditions(const GeneralSystem& sys, const SamplingOptions& opts = {});
ConditionReport check_conditions(const ReactionSystem& sys, const SamplingOptions& opts = {});

ExponentReport check_exponent_conditions(const ReactionSystem& sys, int dimension);
ExponentReport check_exponent_conditions(const GeneralSystem& sys, int dimension);

/// f_i / (1 + eps * sum_k |f_k|). Operates in place on a precomputed f.
void regularize(std::span<double> f, double eps);
std::vector<double> regularized_reactions(const GeneralSystem& sys, std::span<const double> u,
                                          double eps);
std::vector<double> regularized_reactions(const ReactionSystem& sys, std::span<const double> u,
                                          double eps);

}  // namespace pmrd
