#include "pmrd/commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "pmrd/equilibrium.hpp"
#include "pmrd/errors.hpp"
#include "pmrd/exponents.hpp"
#include "pmrd/format.hpp"
#include "pmrd/network.hpp"
#include "pmrd/solver.hpp"

namespace pmrd {

using nlohmann::json;

namespace {

constexpr double kEntropyStepTolerance = 1e-8;
constexpr double kProductionFloor = -1e-10;

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

template <class T>
json optional_json(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

// ---------------------------------------------------------------------------
// CSV layouts

std::vector<std::string> law_labels(const System& sys) {
    std::vector<std::string> out;
    if (const auto* r = std::get_if<ReactionSystem>(&sys)) {
        for (std::size_t i = 0; i < r->num_a(); ++i)
            for (std::size_t j = 0; j < r->num_b(); ++j)
                out.push_back("M_" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
    } else {
        out.push_back("weighted_mass");
    }
    return out;
}

void write_diagnostics_header(std::ostream& os, const System& sys, const std::vector<double>& p_norms) {
    const auto names = species_names(sys);
    os << "t,E,D,rel_E";
    for (const auto& l : law_labels(sys)) os << ',' << l;
    for (double p : p_norms) os << ",dist_L" << format_double(p);
    for (const auto& n : names) os << ",min_" << n << ",max_" << n;
    for (const auto& n : names) os << ",avg_" << n;
    for (const auto& n : names) os << ",lsi_" << n;
    os << ",eep_ratio,ckp_ratio,D_infinite\n";
}

void write_diagnostics_row(std::ostream& os, const DiagnosticsRecord& r) {
    const auto put = [&os](double v) { os << ',' << format_double(v); };
    os << format_double(r.t);
    put(r.E);
    put(r.D);
    put(r.rel_E);
    for (double v : r.masses) put(v);
    for (double v : r.lp_dist) put(v);
    for (std::size_t s = 0; s < r.min.size(); ++s) {
        put(r.min[s]);
        put(r.max[s]);
    }
    for (double v : r.averages) put(v);
    for (double v : r.lsi_ratios) put(v);
    put(r.eep_ratio);
    put(r.ckp_ratio);
    os << ',' << (r.D_infinite ? 1 : 0) << '\n';
}

void write_trajectory_header(std::ostream& os, const Grid& grid, const std::vector<std::string>& names) {
    os << "t,cell,x";
    if (grid.dim() == 2) os << ",y";
    for (const auto& n : names) os << ',' << n;
    os << '\n';
}

void write_trajectory_rows(std::ostream& os, const Grid& grid, double t, const FieldSet& fields) {
    for (std::size_t k = 0; k < grid.size(); ++k) {
        os << format_double(t) << ',' << k << ',' << format_double(grid.x(k));
        if (grid.dim() == 2) os << ',' << format_double(grid.y(k));
        for (const auto& f : fields.species) os << ',' << format_double(f[k]);
        os << '\n';
    }
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_cell(const std::string& s, int line) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
        throw ConfigError("trajectory: malformed number '" + s + "'", line);
    return v;
}

/// Reads the snapshots of a trajectory.csv written by `simulate`.
std::vector<std::pair<double, FieldSet>> read_trajectory_csv(std::istream& in, const Grid& grid,
                                                             const std::vector<std::string>& names) {
    std::ostringstream expected;
    write_trajectory_header(expected, grid, names);
    std::string header;
    if (!std::getline(in, header) || header + "\n" != expected.str())
        throw ConfigError("trajectory: header does not match the configured system and grid", 1);

    const std::size_t offset = grid.dim() == 2 ? 4 : 3;
    std::vector<std::pair<double, FieldSet>> out;
    std::string line;
    int line_no = 1;
    std::size_t next_cell = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != offset + names.size()) throw ConfigError("trajectory: wrong column count", line_no);
        const double t = parse_cell(cells[0], line_no);
        const auto cell = static_cast<std::size_t>(parse_cell(cells[1], line_no));
        if (cell != next_cell) throw ConfigError("trajectory: cells out of order", line_no);
        if (cell == 0) {
            if (!out.empty() && !(t > out.back().first))
                throw ConfigError("trajectory: times must increase", line_no);
            FieldSet fs;
            fs.species.assign(names.size(), std::vector<double>(grid.size(), 0.0));
            out.emplace_back(t, std::move(fs));
        } else if (t != out.back().first) {
            throw ConfigError("trajectory: incomplete snapshot", line_no);
        }
        for (std::size_t s = 0; s < names.size(); ++s)
            out.back().second[s][cell] = parse_cell(cells[offset + s], line_no);
        next_cell = (cell + 1) % grid.size();
    }
    if (next_cell != 0) throw ConfigError("trajectory: last snapshot is incomplete", line_no);
    if (out.empty()) throw ConfigError("trajectory: no snapshots", line_no);
    return out;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw DomainError("cannot write '" + path.string() + "'");
    return os;
}

// ---------------------------------------------------------------------------
// JSON views

json check_json(const ConditionCheck& c) {
    json out{{"passed", c.passed()}, {"certified", c.certified}, {"samples", c.samples},
             {"violations", c.violation_count}};
    json examples = json::array();
    for (const auto& v : c.violations)
        examples.push_back({{"u", v.u}, {"value", v.value}, {"species", v.species}});
    out["examples"] = examples;
    return out;
}

json summary_json(const RunSummary& s) {
    json fits = json::array();
    for (const auto& f : s.fits) {
        if (f.fit)
            fits.push_back({{"p", f.p},
                            {"lambda", f.fit->lambda},
                            {"C", f.fit->C},
                            {"residual", f.fit->residual},
                            {"samples", f.fit->samples}});
        else
            fits.push_back({{"p", f.p}, {"skipped", f.skipped_reason}});
    }
    return {{"records", s.records},
            {"t_final", s.t_final},
            {"decay_fits", fits},
            {"conservation_drift", optional_json(s.conservation_drift)},
            {"conservation_tolerance", s.drift_tolerance},
            {"entropy_violations", s.entropy_violations},
            {"negative_production", s.negative_production},
            {"negative_values", s.negative_values},
            {"K2_empirical", optional_json(s.k2_empirical)},
            {"half_equilibrium_time", optional_json(s.half_equilibrium_time)},
            {"invariants_ok", s.invariants_hold()}};
}

json equilibrium_json(const System& sys, const std::optional<EquilibriumResult>& eq) {
    if (!eq) return nullptr;
    json values = json::object();
    const auto names = species_names(sys);
    const auto flat = eq->flat();
    for (std::size_t s = 0; s < names.size(); ++s) values[names[s]] = flat[s];
    return values;
}

// ---------------------------------------------------------------------------
// Subcommands

ConfigFile read_config(const std::string& path) { return load_config(path); }

int cmd_check(const std::string& path, bool as_json, std::uint64_t seed, std::ostream& out) {
    const ConfigFile cfg = read_config(path);
    const int dim = cfg.theory_dimension();
    SamplingOptions opts;
    opts.seed = seed;

    const ExponentReport rep =
        std::visit([dim](const auto& s) { return check_exponent_conditions(s, dim); }, cfg.system);
    const ConditionReport cond =
        std::visit([&opts](const auto& s) { return check_conditions(s, opts); }, cfg.system);
    const auto names = species_names(cfg.system);
    const bool is_r = std::holds_alternative<ReactionSystem>(cfg.system);

    if (as_json) {
        json species = json::array();
        for (std::size_t s = 0; s < names.size(); ++s)
            species.push_back({{"name", names[s]},
                               {"exponent", rep.exponents[s]},
                               {"existence", static_cast<bool>(rep.existence_ok[s])},
                               {"boundedness", static_cast<bool>(rep.boundedness_ok[s])},
                               {"duality_exponent", rep.duality_exponent[s]}});
        json doc{{"system", is_r ? "R" : "general"},
                 {"nu", rep.nu},
                 {"dimension", rep.dimension},
                 {"existence_threshold", rep.existence_threshold()},
                 {"boundedness_threshold", rep.boundedness_threshold()},
                 {"species", species},
                 {"all_existence", rep.all_existence()},
                 {"all_boundedness", rep.all_boundedness()},
                 {"conditions",
                  {{"mass_dissipation", check_json(cond.mass_dissipation)},
                   {"quasi_positivity", check_json(cond.quasi_positivity)},
                   {"growth_constant", cond.growth_constant},
                   {"nu", cond.nu}}}};
        out << doc.dump(2) << '\n';
        return kExitOk;
    }

    const auto verdict = [](bool ok) { return ok ? "pass" : "fail"; };
    out << "system = " << (is_r ? "R" : "general") << '\n';
    out << "nu = " << format_double(rep.nu) << '\n';
    out << "dimension = " << rep.dimension << '\n';
    out << "existence_threshold = " << format_double(rep.existence_threshold()) << '\n';
    out << "boundedness_threshold = " << format_double(rep.boundedness_threshold()) << '\n';
    out << "species,exponent,existence,boundedness,duality_exponent\n";
    for (std::size_t s = 0; s < names.size(); ++s)
        out << names[s] << ',' << format_double(rep.exponents[s]) << ',' << verdict(rep.existence_ok[s]) << ','
            << verdict(rep.boundedness_ok[s]) << ',' << format_double(rep.duality_exponent[s]) << '\n';
    const auto describe = [&](const char* label, const ConditionCheck& c) {
        out << label << " = " << verdict(c.passed());
        if (c.certified) out << " (certified)";
        else out << " (" << c.violation_count << " violations in " << c.samples << " samples)";
        out << '\n';
    };
    describe("mass_dissipation", cond.mass_dissipation);
    describe("quasi_positivity", cond.quasi_positivity);
    out << "existence = " << verdict(rep.all_existence()) << '\n';
    out << "boundedness = " << verdict(rep.all_boundedness()) << '\n';
    return kExitOk;
}

int cmd_equilibrium(const std::string& path, bool as_json, std::ostream& out) {
    const ConfigFile cfg = read_config(path);
    const auto* sys = std::get_if<ReactionSystem>(&cfg.system);
    if (!sys) throw DomainError("equilibrium needs a reaction system (type = \"R\")");
    if (!cfg.grid) throw ConfigError("missing [grid] section", 0);
    const FieldSet init = cfg.initial_fields();
    std::vector<double> a, b;
    for (std::size_t i = 0; i < sys->num_a(); ++i) a.push_back(average(*cfg.grid, init[i]));
    for (std::size_t j = 0; j < sys->num_b(); ++j) b.push_back(average(*cfg.grid, init[sys->num_a() + j]));
    const MassVector mass = conserved_masses(*sys, a, b);
    const EquilibriumResult eq = solve_equilibrium(*sys, mass);

    const auto names = species_names(cfg.system);
    const auto flat = eq.flat();
    if (as_json) {
        json doc{{"equilibrium", equilibrium_json(cfg.system, eq)},
                 {"xi", eq.xi},
                 {"residual_balance", eq.residual_balance},
                 {"residual_mass", eq.residual_mass}};
        out << doc.dump(2) << '\n';
        return kExitOk;
    }
    out << "quantity,value\n";
    for (std::size_t s = 0; s < names.size(); ++s) out << names[s] << ',' << format_double(flat[s]) << '\n';
    out << "xi," << format_double(eq.xi) << '\n';
    out << "residual_balance," << format_double(eq.residual_balance) << '\n';
    out << "residual_mass," << format_double(eq.residual_mass) << '\n';
    return kExitOk;
}

int cmd_simulate(const std::string& path, const std::string& out_dir, bool as_json, std::ostream& out,
                 std::ostream& err) {
    const ConfigFile cfg = read_config(path);
    const SimConfig sim = cfg.sim_config();
    sim.validate();
    const DiagnosticsContext ctx = make_diagnostics_context(sim.grid, sim.system, sim.initial, sim.p_norms);

    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    std::ofstream diag_csv = open_output(dir / "diagnostics.csv");
    std::ofstream traj_csv = open_output(dir / "trajectory.csv");
    const auto names = species_names(sim.system);
    write_diagnostics_header(diag_csv, sim.system, sim.p_norms);
    write_trajectory_header(traj_csv, sim.grid, names);

    Trajectory seen(sim.grid);
    seen.species_names = names;
    seen.p_norms = sim.p_norms;
    const auto on_record = [&](const TrajectoryRecord& rec) {
        write_diagnostics_row(diag_csv, rec.diag);
        if (rec.snapshot) write_trajectory_rows(traj_csv, sim.grid, rec.t(), *rec.snapshot);
        diag_csv.flush();
        traj_csv.flush();
        seen.records.push_back({rec.diag, std::nullopt});
    };

    json doc;
    int code = kExitOk;
    try {
        const Trajectory traj = simulate(sim, on_record);
        seen.steps = traj.steps;
        seen.rejections = traj.rejections;
        const RunSummary summary = summarize(cfg, seen, ctx.equilibrium);
        doc = summary_json(summary);
        doc["status"] = summary.invariants_hold() ? "ok" : "invariant_violation";
        if (!summary.invariants_hold()) code = kExitRuntime;
    } catch (const RuntimeFailure& e) {
        doc = summary_json(summarize(cfg, seen, ctx.equilibrium));
        doc["status"] = "error";
        doc["error"] = e.what();
        err << "error: " << e.what() << '\n';
        code = kExitRuntime;
    }
    doc["steps"] = seen.steps;
    doc["rejections"] = seen.rejections;
    doc["scheme"] = sim.scheme == Scheme::Explicit ? "explicit" : "semi-implicit";
    doc["equilibrium"] = equilibrium_json(sim.system, ctx.equilibrium);

    std::ofstream summary_file = open_output(dir / "summary.json");
    summary_file << doc.dump(2) << '\n';
    if (as_json) out << doc.dump(2) << '\n';
    return code;
}

int cmd_diagnose(const std::string& path, const std::string& trajectory_path, const std::string& out_dir,
                 bool as_json, std::ostream& out) {
    const ConfigFile cfg = read_config(path);
    const SimConfig sim = cfg.sim_config();
    const DiagnosticsContext ctx = make_diagnostics_context(sim.grid, sim.system, sim.initial, sim.p_norms);
    std::ifstream in(trajectory_path);
    if (!in) throw ConfigError("cannot open trajectory '" + trajectory_path + "'", 0);
    const auto names = species_names(sim.system);
    const auto snapshots = read_trajectory_csv(in, sim.grid, names);

    Trajectory traj(sim.grid);
    traj.species_names = names;
    traj.p_norms = sim.p_norms;
    for (const auto& [t, fields] : snapshots) traj.records.push_back({diagnose(ctx, t, fields), fields});

    std::ostringstream csv;
    write_diagnostics_header(csv, sim.system, sim.p_norms);
    for (const auto& rec : traj.records) write_diagnostics_row(csv, rec.diag);
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream f = open_output(std::filesystem::path(out_dir) / "diagnostics.csv");
        f << csv.str();
    }

    const RunSummary summary = summarize(cfg, traj, ctx.equilibrium);
    if (as_json) {
        json doc = summary_json(summary);
        doc["equilibrium"] = equilibrium_json(sim.system, ctx.equilibrium);
        if (traj.records.size() >= 2) {
            json growth = json::object();
            const auto exps = diffusion_exponents(sim.system);
            for (std::size_t s = 0; s < names.size(); ++s) {
                const SpacetimeNorm st = spacetime_norm(traj, s, exps[s] + 1.0);
                growth[names[s]] = {{"duality_norm", st.norm}, {"growth_exponent", number_or_null(st.growth_exponent)}};
            }
            doc["spacetime"] = growth;
        }
        out << doc.dump(2) << '\n';
    } else if (out_dir.empty()) {
        out << csv.str();
    }
    return summary.invariants_hold() ? kExitOk : kExitRuntime;
}

const char* monotonicity_name(Monotonicity m) {
    switch (m) {
        case Monotonicity::Increasing: return "increasing";
        case Monotonicity::Decreasing: return "decreasing";
        case Monotonicity::Constant: return "constant";
        case Monotonicity::Mixed: return "mixed";
    }
    return "unknown";
}

struct BootstrapArgs {
    int d = 3;
    double m = 2.0;
    std::optional<double> nu;
    std::optional<double> p0;
    std::optional<double> q0;
    int steps = 50;
    bool json = false;
    std::string out_file;
};

int cmd_bootstrap(const BootstrapArgs& a, std::ostream& out) {
    if (a.p0.has_value() == a.q0.has_value()) throw DomainError("give exactly one of --p0 and --q0");
    if (a.steps < 0) throw DomainError("--steps must be >= 0");

    std::ostringstream csv;
    json doc;
    std::vector<std::pair<std::string, std::string>> facts;

    if (a.p0) {
        const Exponent s = smoothing_exponent(a.d, a.m, *a.p0);
        const PIteration it = p_iteration(a.d, a.m, *a.p0, a.steps);
        csv << "n,p\n";
        for (std::size_t n = 0; n < it.sequence.size(); ++n) csv << n << ',' << format_double(it.sequence[n]) << '\n';
        const std::string s_text = s.is_unbounded() ? "unbounded" : format_double(s.value());
        std::string fp_text;
        switch (it.fixed_point.kind) {
            case FixedPointKind::Finite: fp_text = format_double(it.fixed_point.value); break;
            case FixedPointKind::Unbounded: fp_text = "unbounded"; break;
            case FixedPointKind::Negative: fp_text = "none (formula value " + format_double(it.fixed_point.value) + ")"; break;
        }
        facts = {{"s", s_text},
                 {"fixed_point", fp_text},
                 {"observed", monotonicity_name(it.observed)},
                 {"predicted", monotonicity_name(it.predicted)},
                 {"unbounded", it.unbounded ? "true" : "false"}};
        doc = {{"mode", "p"},
               {"sequence", it.sequence},
               {"s", s.is_unbounded() ? json("unbounded") : json(s.value())},
               {"fixed_point", fp_text},
               {"observed", monotonicity_name(it.observed)},
               {"predicted", monotonicity_name(it.predicted)},
               {"unbounded", it.unbounded}};
    } else {
        if (!a.nu) throw DomainError("--q0 needs --nu");
        const QIteration it = q_iteration(a.d, a.m, *a.nu, *a.q0);
        csv << "n,q\n";
        for (std::size_t n = 0; n < it.sequence.size(); ++n) csv << n << ',' << format_double(it.sequence[n]) << '\n';
        facts = {{"threshold", format_double(it.threshold)},
                 {"trigger", format_double(it.trigger)},
                 {"triggered", it.triggered ? "true" : "false"}};
        if (it.steps_to_linf) facts.emplace_back("steps", std::to_string(*it.steps_to_linf));
        else facts.emplace_back("status", "non-triggering");
        doc = {{"mode", "q"},
               {"sequence", it.sequence},
               {"threshold", it.threshold},
               {"trigger", it.trigger},
               {"triggered", it.triggered},
               {"steps", optional_json(it.steps_to_linf)}};
    }

    if (!a.out_file.empty()) {
        std::ofstream f = open_output(a.out_file);
        f << csv.str();
    }
    if (a.json) {
        out << doc.dump(2) << '\n';
        return kExitOk;
    }
    if (a.out_file.empty()) out << csv.str() << '\n';
    for (const auto& [k, v] : facts) out << k << " = " << v << '\n';
    return kExitOk;
}

}  // namespace

bool RunSummary::invariants_hold() const {
    const bool drift_ok = !conservation_drift || *conservation_drift <= drift_tolerance;
    return drift_ok && entropy_violations == 0 && negative_production == 0 && negative_values == 0;
}

RunSummary summarize(const ConfigFile& cfg, const Trajectory& traj, const std::optional<EquilibriumResult>& eq) {
    RunSummary s;
    s.records = traj.records.size();
    if (traj.records.empty()) return s;
    s.t_final = traj.records.back().t();
    s.drift_tolerance = cfg.scheme == Scheme::Explicit ? 1e-10 : 1e-8;

    if (const auto* r = std::get_if<ReactionSystem>(&cfg.system)) {
        const auto& m0 = traj.records.front().diag.masses;
        const double scale = m0.empty() ? 0.0 : *std::max_element(m0.begin(), m0.end());
        const double drift = check_discrete_conservation(*r, traj);
        s.conservation_drift = scale > 0.0 ? drift / scale : drift;
    }

    for (std::size_t k = 0; k < traj.records.size(); ++k) {
        const auto& d = traj.records[k].diag;
        if (d.D < kProductionFloor) ++s.negative_production;
        for (double v : d.min)
            if (v < 0.0) ++s.negative_values;
        if (k > 0) {
            const double prev = traj.records[k - 1].diag.E;
            if (d.E > prev + kEntropyStepTolerance * (1.0 + std::abs(prev))) ++s.entropy_violations;
        }
        if (std::isfinite(d.eep_ratio)) s.k2_empirical = std::min(s.k2_empirical.value_or(d.eep_ratio), d.eep_ratio);
    }

    const TimeWindow window{cfg.fit_from.value_or(s.t_final / 5.0), s.t_final};
    for (double p : traj.p_norms) {
        RunSummary::Fit f;
        f.p = p;
        if (!eq) {
            f.skipped_reason = "no equilibrium";
        } else {
            try {
                f.fit = fit_decay_rate(traj, p, window);
            } catch (const FitError& e) {
                f.skipped_reason = e.what();
            }
        }
        s.fits.push_back(std::move(f));
    }
    if (eq) s.half_equilibrium_time = first_time_above_half_equilibrium(traj, *eq);
    return s;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Porous-medium reaction-diffusion simulator and entropy-method verification tool", "pmrd"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string trajectory_path;
    bool as_json = false;
    std::uint64_t seed = 42;
    BootstrapArgs boot;

    auto* check = app.add_subcommand("check", "Check the structural and exponent conditions of a system");
    check->add_option("--config", config_path, "Config file")->required();
    check->add_flag("--json", as_json, "Machine-readable JSON output");
    check->add_option("--seed", seed, "Seed of the condition sampler");

    auto* equil = app.add_subcommand("equilibrium", "Detailed-balance equilibrium of the initial masses");
    equil->add_option("--config", config_path, "Config file")->required();
    equil->add_flag("--json", as_json, "JSON instead of CSV");

    auto* sim = app.add_subcommand("simulate", "Integrate the system and write trajectory and diagnostics");
    sim->add_option("--config", config_path, "Config file")->required();
    sim->add_option("--out", out_dir, "Output directory")->required();
    sim->add_flag("--json", as_json, "Also print summary.json to stdout");
    sim->add_option("--seed", seed, "Accepted for symmetry; the run is deterministic");

    auto* diag = app.add_subcommand("diagnose", "Recompute diagnostics from a stored trajectory.csv");
    diag->add_option("--config", config_path, "Config file the trajectory was produced with")->required();
    diag->add_option("--trajectory", trajectory_path, "trajectory.csv written by simulate")->required();
    diag->add_option("--out", out_dir, "Directory for diagnostics.csv (default: stdout)");
    diag->add_flag("--json", as_json, "Print the run summary as JSON");

    auto* bs = app.add_subcommand("bootstrap", "Exponent bootstrap sequences (p or q iteration)");
    bs->add_option("--d", boot.d, "Spatial dimension")->required()->check(CLI::PositiveNumber);
    bs->add_option("--m", boot.m, "Porous-medium exponent")->required();
    bs->add_option("--nu", boot.nu, "Growth exponent of the reactions (q iteration)");
    auto* p0 = bs->add_option("--p0", boot.p0, "Starting exponent of the p iteration");
    auto* q0 = bs->add_option("--q0", boot.q0, "Starting exponent of the q iteration");
    p0->excludes(q0);
    bs->add_option("--steps", boot.steps, "Maximum number of p-iteration steps");
    bs->add_option("--out", boot.out_file, "Write the sequence CSV to this file");
    bs->add_flag("--json", boot.json, "JSON output");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        if (check->parsed()) return cmd_check(config_path, as_json, seed, out);
        if (equil->parsed()) return cmd_equilibrium(config_path, as_json, out);
        if (sim->parsed()) return cmd_simulate(config_path, out_dir, as_json, out, err);
        if (diag->parsed()) return cmd_diagnose(config_path, trajectory_path, out_dir, as_json, out);
        if (bs->parsed()) return cmd_bootstrap(boot, out);
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const RuntimeFailure& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitUsage;
}

}  // namespace pmrd
