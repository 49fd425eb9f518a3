#pragma once

#include <functional>
#include <vector>

#include "pmrd/entropy.hpp"
#include "pmrd/grid.hpp"
#include "pmrd/network.hpp"
#include "pmrd/trajectory.hpp"

namespace pmrd {

enum class Scheme { Explicit, SemiImplicit };

struct SimConfig {
    System system;
    Grid grid;
    FieldSet initial;
    double t_end = 1.0;
    double cfl_safety = 0.5;
    double sample_interval = 0.1;
    double epsilon = 0.0;  // reaction regularization f / (1 + eps sum |f|)
    Scheme scheme = Scheme::Explicit;
    std::vector<double> p_norms{1.0, 2.0};
    bool store_snapshots = false;

    /// Throws on any violated constraint (InputError family).
    void validate() const;
};

struct StepResult {
    FieldSet state;
    double dt = 0.0;  // step actually taken after any halvings
    int rejections = 0;
};

inline constexpr int kMaxStepHalvings = 40;

/// Diffusion CFL for the lagged form div(m u^{m-1} grad u), combined with a
/// limiter on the relative consumption rate of the reactions.
double stable_dt(const SimConfig& config, const FieldSet& state);

/// Forward Euler; halves dt until the result is nonnegative.
StepResult step_explicit(const SimConfig& config, const FieldSet& state, double dt);

/// Linearly implicit diffusion with lagged secant face coefficients and
/// explicit reactions; halves dt until the result is nonnegative.
StepResult step_semi_implicit(const SimConfig& config, const FieldSet& state, double dt);

using RecordCallback = std::function<void(const TrajectoryRecord&)>;

/// Integrates to t_end, sampling diagnostics every sample_interval and at
/// t_end exactly. The final record always carries a field snapshot.
Trajectory simulate(const SimConfig& config, const RecordCallback& on_record = {});

/// Largest deviation over time and all (i, j) of the conservation-law values
/// from their initial values.
double check_discrete_conservation(const ReactionSystem& sys, const Trajectory& traj);

}  // namespace pmrd
