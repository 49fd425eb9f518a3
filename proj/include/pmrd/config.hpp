#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pmrd/expression.hpp"
#include "pmrd/grid.hpp"
#include "pmrd/network.hpp"
#include "pmrd/solver.hpp"

namespace pmrd {

/// How one species is initialised.
struct InitialProfile {
    struct Constant {
        double value;
    };
    /// `left` for x < split, `right` otherwise.
    struct Step {
        double left;
        double right;
        double split;
    };
    std::variant<Constant, Step, Expression> shape;

    std::vector<double> sample(const Grid& grid) const;
};

/// A parsed configuration file.
///
/// The format is a small subset of TOML: `[section]` headers, `key = value`
/// lines, `#` comments, numbers, double-quoted strings, booleans and
/// (possibly multi-line) arrays. Unknown sections and keys are rejected.
struct ConfigFile {
    System system;
    /// Spatial dimension used by the exponent checks; defaults to the grid's.
    std::optional<int> dimension;
    std::optional<Grid> grid;
    std::vector<std::optional<InitialProfile>> initial;  // one slot per species

    double t_end = 1.0;
    Scheme scheme = Scheme::Explicit;
    double cfl_safety = 0.5;
    double sample_interval = 0.1;
    double epsilon = 0.0;

    std::vector<double> p_norms{1.0, 2.0};
    bool snapshots = false;
    /// Start of the decay-fit window; defaults to t_end / 5.
    std::optional<double> fit_from;

    /// Dimension for the theory checks; ConfigError when neither
    /// [system] dimension nor [grid] is given.
    int theory_dimension() const;
    /// Requires [grid] and a profile for every species.
    FieldSet initial_fields() const;
    SimConfig sim_config() const;
};

ConfigFile parse_config(std::istream& in);
ConfigFile parse_config_string(const std::string& text);
ConfigFile load_config(const std::string& path);

}  // namespace pmrd
