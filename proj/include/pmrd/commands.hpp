#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pmrd/config.hpp"
#include "pmrd/entropy.hpp"
#include "pmrd/trajectory.hpp"

namespace pmrd {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitInput = 2, kExitRuntime = 3 };

/// Post-processed view of a trajectory as written to summary.json.
struct RunSummary {
    struct Fit {
        double p = 1.0;
        std::optional<DecayFit> fit;
        std::string skipped_reason;  // set when fit is empty
    };

    std::size_t records = 0;
    double t_final = 0.0;
    std::vector<Fit> fits;
    /// Largest conservation-law drift relative to the largest law value;
    /// empty for general systems.
    std::optional<double> conservation_drift;
    double drift_tolerance = 1e-10;
    std::size_t entropy_violations = 0;   // E rose by more than 1e-8 (1 + |E|)
    std::size_t negative_production = 0;  // D < -1e-10
    std::size_t negative_values = 0;
    std::optional<double> k2_empirical;   // running minimum of the EEP ratio
    std::optional<double> half_equilibrium_time;

    bool invariants_hold() const;
};

RunSummary summarize(const ConfigFile& cfg, const Trajectory& traj,
                     const std::optional<EquilibriumResult>& eq);

/// Parses `args` (without the program name) and runs one subcommand.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pmrd
