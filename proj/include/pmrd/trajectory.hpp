#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pmrd/grid.hpp"

namespace pmrd {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Diagnostics of one sampled state. Quantities that need the equilibrium
/// (relative entropy, distances, ratios) are NaN when none is available.
struct DiagnosticsRecord {
    double t = 0.0;
    double E = 0.0;
    double D = 0.0;
    bool D_infinite = false;  // some cell has exactly one vanishing monomial
    double rel_E = kNaN;
    std::vector<double> masses;    // conservation-law values, law order (i,j) row-major
    std::vector<double> averages;  // per species
    std::vector<double> lp_dist;   // sum over species of ||u - u_inf||_p, per configured p
    std::vector<double> min;
    std::vector<double> max;
    std::vector<double> lsi_ratios;  // per species, NaN for (near) constant fields
    double eep_ratio = kNaN;
    double ckp_ratio = kNaN;
};

struct TrajectoryRecord {
    DiagnosticsRecord diag;
    std::optional<FieldSet> snapshot;

    double t() const noexcept { return diag.t; }
};

/// Time-ordered samples of a run; the first record is at t = 0.
struct Trajectory {
    explicit Trajectory(Grid g) : grid(std::move(g)) {}

    Grid grid;
    std::vector<std::string> species_names;
    std::vector<double> p_norms;
    std::vector<TrajectoryRecord> records;
    std::size_t steps = 0;
    std::size_t rejections = 0;

    bool has_snapshots() const;
    /// Index of `p` in p_norms; throws DomainError when it was not sampled.
    std::size_t p_index(double p) const;
};

}  // namespace pmrd
