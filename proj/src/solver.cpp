#include "pmrd/solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "pmrd/errors.hpp"
#include "pmrd/format.hpp"
#include "powers.hpp"

namespace pmrd {

namespace {

constexpr double kConsumptionFloor = 1e-12;

// Semi-implicit results above -kSolverNoise * max|rhs| are linear-solver
// rounding on vacuum cells, not a loss of positivity of the scheme.
constexpr double kSolverNoise = 1e-12;

// Diffusion right-hand side and reaction terms of one state.
struct Rhs {
    std::vector<std::vector<double>> diffusion;  // coeff Lap_h(u^m)
    std::vector<std::vector<double>> reaction;   // f(u), regularized
};

class Evaluator {
public:
    explicit Evaluator(const SimConfig& cfg)
        : cfg_(cfg),
          coeff_(diffusion_coefficients(cfg.system)),
          exps_(diffusion_exponents(cfg.system)),
          S_(species_count(cfg.system)),
          n_(cfg.grid.size()),
          u_(S_),
          f_(S_),
          powered_(n_) {}

    void evaluate(const FieldSet& state, Rhs& rhs) {
        rhs.diffusion.resize(S_);
        rhs.reaction.resize(S_);
        for (std::size_t s = 0; s < S_; ++s) {
            const auto& field = state[s];
            for (std::size_t k = 0; k < n_; ++k) powered_[k] = detail::power(field[k], exps_[s]);
            rhs.diffusion[s].resize(n_);
            laplacian_into(cfg_.grid, powered_, coeff_[s], rhs.diffusion[s]);
            rhs.reaction[s].resize(n_);
        }
        reactions(state, rhs.reaction);
    }

    void reactions(const FieldSet& state, std::vector<std::vector<double>>& out) {
        const auto* rs = std::get_if<ReactionSystem>(&cfg_.system);
        const auto* gs = std::get_if<GeneralSystem>(&cfg_.system);
        for (std::size_t k = 0; k < n_; ++k) {
            state.gather(k, u_);
            if (rs)
                evaluate_reactions_flat(*rs, u_, f_);
            else
                gs->f(u_, f_);
            regularize(f_, cfg_.epsilon);
            for (std::size_t s = 0; s < S_; ++s) out[s][k] = f_[s];
        }
    }

    double stable_dt(const FieldSet& state, const Rhs& rhs) const {
        const Grid& g = cfg_.grid;
        const double hmin = std::min(g.hx(), g.dim() == 2 ? g.hy() : g.hx());
        double diff_dt = std::numeric_limits<double>::infinity();
        double consumption = 0.0;
        for (std::size_t s = 0; s < S_; ++s) {
            const auto& field = state[s];
            const double umax = *std::max_element(field.begin(), field.end());
            const double speed = coeff_[s] * exps_[s] * detail::power(umax, exps_[s] - 1.0);
            if (speed > 0.0) diff_dt = std::min(diff_dt, hmin * hmin / (2.0 * g.dim() * speed));
            for (std::size_t k = 0; k < n_; ++k) {
                const double loss = -rhs.reaction[s][k];
                if (loss > 0.0) consumption = std::max(consumption, loss / (kConsumptionFloor + field[k]));
            }
        }
        const double react_dt = 1.0 / (1.0 + consumption);
        return cfg_.cfl_safety * std::min(diff_dt, react_dt);
    }

    const std::vector<double>& coeff() const { return coeff_; }
    const std::vector<double>& exps() const { return exps_; }
    std::size_t species() const { return S_; }

private:
    const SimConfig& cfg_;
    std::vector<double> coeff_;
    std::vector<double> exps_;
    std::size_t S_;
    std::size_t n_;
    std::vector<double> u_;
    std::vector<double> f_;
    std::vector<double> powered_;
};

std::string negative_report(const FieldSet& state) {
    for (std::size_t s = 0; s < state.num_species(); ++s)
        for (std::size_t k = 0; k < state[s].size(); ++k)
            if (!(state[s][k] >= 0.0)) {
                std::ostringstream os;
                os << "species " << s << " cell " << k << " value " << format_double(state[s][k]);
                return os.str();
            }
    return "no negative value";
}

StepResult explicit_from_rhs(const FieldSet& state, const Rhs& rhs, double dt) {
    StepResult out;
    out.state = state;
    for (int attempt = 0; attempt <= kMaxStepHalvings; ++attempt) {
        bool ok = true;
        for (std::size_t s = 0; s < state.num_species(); ++s) {
            const auto& u = state[s];
            auto& v = out.state[s];
            const auto& dif = rhs.diffusion[s];
            const auto& rea = rhs.reaction[s];
            for (std::size_t k = 0; k < u.size(); ++k) {
                v[k] = u[k] + dt * (dif[k] + rea[k]);
                ok = ok && v[k] >= 0.0;
            }
        }
        if (ok) {
            out.dt = dt;
            return out;
        }
        if (attempt == kMaxStepHalvings) break;
        dt *= 0.5;
        ++out.rejections;
    }
    throw StiffnessError("explicit step rejected " + std::to_string(kMaxStepHalvings) +
                         " times (dt = " + format_double(dt) + "); first negative: " +
                         negative_report(out.state));
}

// Face coefficient (uR^m - uL^m) / (uR - uL) so that the lagged operator
// applied to u reproduces Lap_h(u^m) exactly.
double secant_coefficient(double ul, double ur, double m) {
    if (ul == ur) return m * detail::power(ul, m - 1.0);
    return (detail::power(ur, m) - detail::power(ul, m)) / (ur - ul);
}

std::vector<double> implicit_diffusion_solve(const Grid& grid, const std::vector<double>& u,
                                             const std::vector<double>& rhs, double coeff, double m,
                                             double dt) {
    const std::size_t n = grid.size();
    const std::size_t nx = grid.nx();
    const std::size_t ny = grid.ny();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(5 * n);
    std::vector<double> diag(n, 1.0);
    const auto add_face = [&](std::size_t k, std::size_t l, double inv_h2) {
        const double w = dt * coeff * secant_coefficient(u[k], u[l], m) * inv_h2;
        if (w == 0.0) return;
        diag[k] += w;
        diag[l] += w;
        trip.emplace_back(static_cast<int>(k), static_cast<int>(l), -w);
        trip.emplace_back(static_cast<int>(l), static_cast<int>(k), -w);
    };
    const double ix2 = 1.0 / (grid.hx() * grid.hx());
    const double iy2 = 1.0 / (grid.hy() * grid.hy());
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i) {
            const std::size_t k = i + nx * j;
            if (i + 1 < nx) add_face(k, k + 1, ix2);
            if (grid.dim() == 2 && j + 1 < ny) add_face(k, k + nx, iy2);
        }
    for (std::size_t k = 0; k < n; ++k) trip.emplace_back(static_cast<int>(k), static_cast<int>(k), diag[k]);

    Eigen::SparseMatrix<double> A(static_cast<int>(n), static_cast<int>(n));
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(1e-10);
    cg.setMaxIterations(static_cast<Eigen::Index>(10 * n));
    cg.compute(A);
    const Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(n));
    const Eigen::Map<const Eigen::VectorXd> guess(u.data(), static_cast<Eigen::Index>(n));
    const Eigen::VectorXd x = cg.solveWithGuess(b, guess);
    if (cg.info() != Eigen::Success)
        throw LinearSolverError("conjugate gradient did not reach 1e-10 in " + std::to_string(10 * n) +
                                " iterations (error " + format_double(cg.error()) + ")");
    return {x.data(), x.data() + n};
}

StepResult semi_implicit_from_rhs(const SimConfig& cfg, const Evaluator& ev, const FieldSet& state,
                                  const Rhs& rhs, double dt) {
    StepResult out;
    out.state = state;
    const std::size_t n = cfg.grid.size();
    std::vector<double> b(n);
    for (int attempt = 0; attempt <= kMaxStepHalvings; ++attempt) {
        bool ok = true;
        for (std::size_t s = 0; s < state.num_species() && ok; ++s) {
            double scale = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                b[k] = state[s][k] + dt * rhs.reaction[s][k];
                scale = std::max(scale, std::abs(b[k]));
            }
            auto& x = out.state[s];
            x = implicit_diffusion_solve(cfg.grid, state[s], b, ev.coeff()[s], ev.exps()[s], dt);
            for (double& v : x) {
                if (v >= 0.0) continue;
                if (v >= -kSolverNoise * scale)
                    v = 0.0;
                else
                    ok = false;
            }
            // The exact solve preserves the cell sum of b; the iterative one and
            // the noise clipping only do so to the CG tolerance, which adds up
            // over many steps. A multiplicative fix keeps nonnegativity.
            const double target = std::accumulate(b.begin(), b.end(), 0.0);
            const double actual = std::accumulate(x.begin(), x.end(), 0.0);
            if (ok && target > 0.0 && actual > 0.0)
                for (double& v : x) v *= target / actual;
        }
        if (ok) {
            out.dt = dt;
            return out;
        }
        if (attempt == kMaxStepHalvings) break;
        dt *= 0.5;
        ++out.rejections;
    }
    throw StiffnessError("semi-implicit step rejected " + std::to_string(kMaxStepHalvings) +
                         " times; first negative: " + negative_report(out.state));
}

void check_state(const SimConfig& cfg, const FieldSet& state) {
    if (state.num_species() != species_count(cfg.system))
        throw DomainError("state does not match the species count");
    for (const auto& f : state.species)
        if (f.size() != cfg.grid.size()) throw DomainError("state does not match the grid");
    state.require_nonnegative();
}

}  // namespace

void SimConfig::validate() const {
    pmrd::validate(system);
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw DomainError("t_end must be >= 0");
    if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) throw DomainError("cfl_safety must lie in (0, 1]");
    if (!(sample_interval > 0.0)) throw DomainError("sample_interval must be > 0");
    if (!(epsilon >= 0.0)) throw DomainError("epsilon must be >= 0");
    for (double p : p_norms)
        if (!(p >= 1.0)) throw DomainError("diagnostic p-norms must be >= 1");
    if (initial.num_species() != species_count(system))
        throw DomainError("initial data do not match the species count");
    for (const auto& f : initial.species)
        if (f.size() != grid.size()) throw DomainError("initial data do not match the grid");
    initial.require_nonnegative();
}

double stable_dt(const SimConfig& config, const FieldSet& state) {
    check_state(config, state);
    Evaluator ev(config);
    Rhs rhs;
    ev.evaluate(state, rhs);
    return ev.stable_dt(state, rhs);
}

StepResult step_explicit(const SimConfig& config, const FieldSet& state, double dt) {
    check_state(config, state);
    if (!(dt > 0.0)) throw DomainError("time step must be > 0");
    Evaluator ev(config);
    Rhs rhs;
    ev.evaluate(state, rhs);
    return explicit_from_rhs(state, rhs, dt);
}

StepResult step_semi_implicit(const SimConfig& config, const FieldSet& state, double dt) {
    check_state(config, state);
    if (!(dt > 0.0)) throw DomainError("time step must be > 0");
    Evaluator ev(config);
    Rhs rhs;
    ev.reactions(state, rhs.reaction = std::vector<std::vector<double>>(
                            state.num_species(), std::vector<double>(config.grid.size())));
    return semi_implicit_from_rhs(config, ev, state, rhs, dt);
}

Trajectory simulate(const SimConfig& config, const RecordCallback& on_record) {
    config.validate();
    const DiagnosticsContext ctx =
        make_diagnostics_context(config.grid, config.system, config.initial, config.p_norms);

    Trajectory traj(config.grid);
    traj.species_names = species_names(config.system);
    traj.p_norms = config.p_norms;

    FieldSet state = config.initial;
    double t = 0.0;
    const auto emit = [&](bool final_record) {
        TrajectoryRecord rec;
        rec.diag = diagnose(ctx, t, state);
        if (config.store_snapshots || final_record) rec.snapshot = state;
        traj.records.push_back(std::move(rec));
        if (on_record) on_record(traj.records.back());
    };

    emit(config.t_end == 0.0);
    if (config.t_end == 0.0) return traj;

    Evaluator ev(config);
    Rhs rhs;
    for (std::size_t k = 1; t < config.t_end; ++k) {
        const double target = std::min(static_cast<double>(k) * config.sample_interval, config.t_end);
        while (t < target) {
            ev.evaluate(state, rhs);
            const double remaining = target - t;
            const double dt = std::min(ev.stable_dt(state, rhs), remaining);
            StepResult step = config.scheme == Scheme::Explicit
                                  ? explicit_from_rhs(state, rhs, dt)
                                  : semi_implicit_from_rhs(config, ev, state, rhs, dt);
            state = std::move(step.state);
            t = step.dt == remaining ? target : t + step.dt;
            ++traj.steps;
            traj.rejections += static_cast<std::size_t>(step.rejections);
        }
        emit(target == config.t_end);
    }
    return traj;
}

double check_discrete_conservation(const ReactionSystem& sys, const Trajectory& traj) {
    if (traj.records.empty()) return 0.0;
    const std::size_t M = sys.num_a();
    const auto& first = traj.records.front().diag.averages;
    if (first.size() != sys.num_species()) throw DomainError("trajectory does not match the system");
    double drift = 0.0;
    for (const auto& rec : traj.records) {
        const auto& avg = rec.diag.averages;
        for (std::size_t i = 0; i < M; ++i)
            for (std::size_t j = 0; j < sys.num_b(); ++j) {
                const double m0 = sys.beta[j] * first[i] + sys.alpha[i] * first[M + j];
                const double mt = sys.beta[j] * avg[i] + sys.alpha[i] * avg[M + j];
                drift = std::max(drift, std::abs(mt - m0));
            }
    }
    return drift;
}

}  // namespace pmrd
