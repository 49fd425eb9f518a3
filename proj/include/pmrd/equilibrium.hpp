#pragma once

#include <span>
#include <utility>
#include <vector>

#include "pmrd/network.hpp"

namespace pmrd {

/// Conserved quantities M_ij = beta_j abar_i + alpha_i bbar_j of system (R).
struct MassVector {
    std::size_t num_a = 0;
    std::size_t num_b = 0;
    std::vector<double> values;  // row-major, values[i * num_b + j]
    /// The M+N-1 laws used by the solver: (0,j) for all j, then (i,0) for i >= 1.
    std::vector<std::pair<std::size_t, std::size_t>> independent_laws;
    /// A state satisfying every law; the initial averages when built by
    /// conserved_masses. Left empty, it is rebuilt from the independent laws.
    std::vector<double> a_ref;
    std::vector<double> b_ref;

    double at(std::size_t i, std::size_t j) const { return values[i * num_b + j]; }
    double max_value() const;

    /// Rebuilds every M_ij from the independent laws and the stoichiometry.
    std::vector<double> reconstruct_full(const ReactionSystem& sys) const;
};

struct EquilibriumResult {
    std::vector<double> a_inf;
    std::vector<double> b_inf;
    double xi = 0.0;  // reaction extent relative to the reference state
    double residual_balance = 0.0;
    double residual_mass = 0.0;

    /// Flat order (a_1..a_M, b_1..b_N).
    std::vector<double> flat() const;
};

MassVector conserved_masses(const ReactionSystem& sys, std::span<const double> a_avg,
                            std::span<const double> b_avg);

/// Unique positive detailed-balance state for the given masses, found by
/// a bracketed root solve of the balance equation along the reaction extent.
EquilibriumResult solve_equilibrium(const ReactionSystem& sys, const MassVector& mass);

/// Independent cross-check: minimizes the free energy along the reaction
/// line by golden-section search carried out in quad precision.
EquilibriumResult entropy_minimization_oracle(const ReactionSystem& sys, const MassVector& mass);

/// Free energy sum phi(a_i(xi)) + sum phi(b_j(xi)) - xi ln(k_f/k_b) along the
/// reaction line through the reference state of `mass`. Exposed for tests.
double reaction_line_free_energy(const ReactionSystem& sys, const MassVector& mass, double xi);

/// Open interval of admissible extents (all components positive).
std::pair<double, double> extent_interval(const ReactionSystem& sys, const MassVector& mass);

}  // namespace pmrd
