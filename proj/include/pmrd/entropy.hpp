#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pmrd/equilibrium.hpp"
#include "pmrd/grid.hpp"
#include "pmrd/network.hpp"
#include "pmrd/trajectory.hpp"

namespace pmrd {

/// Stand-in value for an entropy production that is genuinely infinite.
inline constexpr double kInfiniteProduction = 1e30;

/// sum over species and cells of (u ln u - u + 1) vol, with 0 ln 0 = 0.
double entropy(const Grid& grid, const FieldSet& fields);

struct EntropyProduction {
    double value = 0.0;  // diffusive + reactive, or kInfiniteProduction
    double diffusive = 0.0;
    double reactive = 0.0;
    bool infinite = false;
};

/// -dE/dt along system (R): diffusive terms d_i m_i int u^{m_i-2}|grad u|^2
/// plus the reactive term int (x - y) ln(x / y) with x = a^alpha, y = b^beta.
EntropyProduction entropy_production(const Grid& grid, const ReactionSystem& sys,
                                     const FieldSet& fields);
/// Same for a general system: diffusive terms minus int sum f_i(u) ln u_i.
EntropyProduction entropy_production(const Grid& grid, const GeneralSystem& sys,
                                     const FieldSet& fields);
EntropyProduction entropy_production(const Grid& grid, const System& sys, const FieldSet& fields);

/// (x - y) ln(x / y) with r(x,x) = 0 and r(0,0) = 0; infinite if exactly one vanishes.
double reactive_integrand(double x, double y);

struct RelativeEntropy {
    double total = 0.0;
    double I1 = 0.0;  // spatial fluctuation part, sum int u ln(u / ubar)
    double I2 = 0.0;  // average part, sum ubar ln(ubar / u_inf) - ubar + u_inf
};

/// Relative entropy against a positive state; verifies total = I1 + I2.
RelativeEntropy relative_entropy(const Grid& grid, const FieldSet& fields,
                                 std::span<const double> equilibrium);

/// Square-root variables A_i = sqrt(a_i), B_j = sqrt(b_j) and their
/// fluctuations around the averages.
struct SqrtDecomposition {
    std::vector<std::vector<double>> A;
    std::vector<std::vector<double>> B;
    std::vector<double> A_avg;
    std::vector<double> B_avg;
    std::vector<std::vector<double>> delta;
    std::vector<std::vector<double>> eta;
    std::vector<double> A_alpha;  // prod A_i^alpha_i per cell
    std::vector<double> B_beta;   // prod B_j^beta_j per cell
};

SqrtDecomposition sqrt_decomposition(const Grid& grid, const ReactionSystem& sys,
                                     const FieldSet& fields);

struct LsiRatio {
    /// int |grad u|^2 / u^{2-m}  over  ubar^{m-1} int u ln(u / ubar)
    double ratio = 0.0;
    /// int u ln(u / ubar) over int (sqrt u - sqrt ubar)^2, at least 1
    double entropy_over_sqrt_gap = 0.0;
    /// int u ln(u / ubar) over ||sqrt u - avg(sqrt u)||^2
    double entropy_over_sqrt_variance = 0.0;
};

LsiRatio lsi_ratio(const Grid& grid, std::span<const double> field, double m);

struct IndirectDiffusion {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;  // +inf when rhs = 0
};

/// Both sides of the indirect diffusion transfer inequality, where the first
/// `J` b-species are the ones with small mass (avg(b_j) <= eps).
IndirectDiffusion indirect_diffusion_ratio(const Grid& grid, const ReactionSystem& sys,
                                           const FieldSet& fields, std::size_t J, double eps);

/// 1 / (1 + ln(1 + t)).
double eep_time_factor(double t);

/// D / (Theta(t) rel_E); empty once rel_E is at the equilibrium floor.
std::optional<double> eep_ratio(const DiagnosticsRecord& record);

/// rel_E / sum ||u_i - u_inf||_1^2; empty when the fields equal the equilibrium.
std::optional<double> ckp_ratio(const Grid& grid, const FieldSet& fields,
                                std::span<const double> equilibrium);

/// (x ln(x/y) - x + y) / (sqrt x - sqrt y)^2, extended by 2 on the diagonal.
double phi(double x, double y);

struct DecayFit {
    double lambda = 0.0;
    double C = 0.0;
    double residual = 0.0;  // RMS of log-scale residuals
    std::size_t samples = 0;
};

struct TimeWindow {
    double from = 0.0;
    double to = std::numeric_limits<double>::infinity();
};

/// Least-squares line through (t, ln dist). Samples below 1e-12 times the
/// first distance, or outside the window, are dropped.
DecayFit fit_decay_rate(std::span<const double> t, std::span<const double> dist,
                        TimeWindow window = {});
DecayFit fit_decay_rate(const Trajectory& traj, double p, TimeWindow window = {});

struct SpacetimeNorm {
    double norm = 0.0;  // (int_0^T ||u||_q^q dt)^{1/q}
    std::vector<double> t;
    std::vector<double> running_sup;  // sup over [0, t] of ||u||_inf
    /// Slope of ln(running_sup) against ln(1 + t) over the second half of
    /// the run; NaN with fewer than two usable samples.
    double growth_exponent = kNaN;
};

SpacetimeNorm spacetime_norm(const Trajectory& traj, std::size_t species, double exponent);

/// Everything diagnose() needs besides the state.
struct DiagnosticsContext {
    explicit DiagnosticsContext(Grid g) : grid(std::move(g)) {}

    Grid grid;
    System system;
    std::optional<MassVector> mass;
    std::optional<EquilibriumResult> equilibrium;
    std::vector<double> p_norms{1.0, 2.0};
};

/// Builds a context, solving for the equilibrium of system (R) when the
/// initial data carry positive mass.
DiagnosticsContext make_diagnostics_context(const Grid& grid, const System& sys,
                                            const FieldSet& initial, std::vector<double> p_norms);

DiagnosticsRecord diagnose(const DiagnosticsContext& ctx, double t, const FieldSet& fields);

/// First sampled time at which every average is at least half its
/// equilibrium value.
std::optional<double> first_time_above_half_equilibrium(const Trajectory& traj,
                                                        const EquilibriumResult& eq);

}  // namespace pmrd
