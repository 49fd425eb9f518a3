#include "pmrd/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pmrd/errors.hpp"
#include "powers.hpp"

namespace pmrd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Relative entropy below this is treated as "at equilibrium".
constexpr double kEquilibriumFloor = 1e-13;

double entropy_density(double u) { return u > 0.0 ? u * std::log(u) - u + 1.0 : 1.0; }

double squared_l2(const Grid& grid, std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s * grid.cell_volume();
}

double diffusive_production(const Grid& grid, std::span<const double> coeff,
                            std::span<const double> exps, const FieldSet& fields) {
    double total = 0.0;
    for (std::size_t s = 0; s < fields.num_species(); ++s)
        total += coeff[s] * exps[s] * gradient_quadratic_form(grid, fields[s], exps[s]);
    return total;
}

void require_species(const FieldSet& fields, std::size_t n) {
    if (fields.num_species() != n) throw DomainError("field set does not match the species count");
}

}  // namespace

double entropy(const Grid& grid, const FieldSet& fields) {
    double total = 0.0;
    for (const auto& f : fields.species) {
        if (f.size() != grid.size()) throw DomainError("field length does not match the grid");
        double s = 0.0;
        for (double u : f) {
            if (!(u >= 0.0)) throw DomainError("entropy of a negative field");
            s += entropy_density(u);
        }
        total += s * grid.cell_volume();
    }
    return total;
}

double reactive_integrand(double x, double y) {
    if (x == y) return 0.0;
    if (x == 0.0 || y == 0.0) return kInf;
    return (x - y) * (std::log(x) - std::log(y));
}

EntropyProduction entropy_production(const Grid& grid, const ReactionSystem& sys,
                                     const FieldSet& fields) {
    require_species(fields, sys.num_species());
    fields.require_nonnegative();
    EntropyProduction out;
    const auto coeff = sys.diffusion();
    const auto exps = sys.exponents();
    out.diffusive = diffusive_production(grid, coeff, exps, fields);

    const std::size_t M = sys.num_a();
    double reactive = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double x = sys.k_f, y = sys.k_b;
        for (std::size_t i = 0; i < M; ++i) x *= detail::power(fields[i][k], sys.alpha[i]);
        for (std::size_t j = 0; j < sys.num_b(); ++j) y *= detail::power(fields[M + j][k], sys.beta[j]);
        const double r = reactive_integrand(x, y);
        if (std::isinf(r)) {
            out.infinite = true;
            break;
        }
        reactive += r;
    }
    if (out.infinite) {
        out.reactive = kInfiniteProduction;
        out.value = kInfiniteProduction;
    } else {
        out.reactive = reactive * grid.cell_volume();
        out.value = out.diffusive + out.reactive;
    }
    return out;
}

EntropyProduction entropy_production(const Grid& grid, const GeneralSystem& sys,
                                     const FieldSet& fields) {
    require_species(fields, sys.species);
    fields.require_nonnegative();
    EntropyProduction out;
    out.diffusive = diffusive_production(grid, sys.d, sys.m, fields);

    std::vector<double> u(sys.species), f(sys.species);
    double reactive = 0.0;
    for (std::size_t k = 0; k < grid.size() && !out.infinite; ++k) {
        fields.gather(k, u);
        sys.f(u, f);
        for (std::size_t i = 0; i < sys.species; ++i) {
            if (f[i] == 0.0) continue;
            if (u[i] == 0.0) {
                out.infinite = true;
                break;
            }
            reactive -= f[i] * std::log(u[i]);
        }
    }
    if (out.infinite) {
        out.reactive = kInfiniteProduction;
        out.value = kInfiniteProduction;
    } else {
        out.reactive = reactive * grid.cell_volume();
        out.value = out.diffusive + out.reactive;
    }
    return out;
}

EntropyProduction entropy_production(const Grid& grid, const System& sys, const FieldSet& fields) {
    return std::visit([&](const auto& s) { return entropy_production(grid, s, fields); }, sys);
}

RelativeEntropy relative_entropy(const Grid& grid, const FieldSet& fields,
                                 std::span<const double> equilibrium) {
    require_species(fields, equilibrium.size());
    for (double v : equilibrium)
        if (!(v > 0.0)) throw DomainError("equilibrium must be strictly positive");
    const double vol = grid.cell_volume();
    RelativeEntropy out;
    for (std::size_t s = 0; s < fields.num_species(); ++s) {
        const auto& u = fields[s];
        const double ueq = equilibrium[s];
        const double ubar = average(grid, u);
        double total = 0.0, fluct = 0.0;
        for (double x : u) {
            if (!(x >= 0.0)) throw DomainError("relative entropy of a negative field");
            if (x > 0.0) {
                total += x * std::log(x / ueq) - x + ueq;
                fluct += x * std::log(x / ubar);
            } else {
                total += ueq;
            }
        }
        out.total += total * vol;
        out.I1 += fluct * vol;
        out.I2 += ubar > 0.0 ? ubar * std::log(ubar / ueq) - ubar + ueq : ueq;
    }
    if (std::abs(out.total - (out.I1 + out.I2)) > 1e-10 * (1.0 + std::abs(out.total)))
        throw InternalInconsistency("relative entropy additivity violated");
    return out;
}

SqrtDecomposition sqrt_decomposition(const Grid& grid, const ReactionSystem& sys,
                                     const FieldSet& fields) {
    require_species(fields, sys.num_species());
    fields.require_nonnegative();
    const std::size_t M = sys.num_a();
    const std::size_t n = grid.size();
    SqrtDecomposition out;
    auto split = [&](std::size_t s, auto& roots, auto& avgs, auto& fluct) {
        std::vector<double> r(n);
        std::transform(fields[s].begin(), fields[s].end(), r.begin(), [](double v) { return std::sqrt(v); });
        // A constant field must have exactly zero fluctuation, which the
        // rounded cell sum does not guarantee.
        const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
        const double mean = *lo == *hi ? *lo : average(grid, r);
        std::vector<double> d(n);
        std::transform(r.begin(), r.end(), d.begin(), [mean](double v) { return v - mean; });
        roots.push_back(std::move(r));
        avgs.push_back(mean);
        fluct.push_back(std::move(d));
    };
    for (std::size_t i = 0; i < M; ++i) split(i, out.A, out.A_avg, out.delta);
    for (std::size_t j = 0; j < sys.num_b(); ++j) split(M + j, out.B, out.B_avg, out.eta);

    out.A_alpha.assign(n, 1.0);
    out.B_beta.assign(n, 1.0);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < M; ++i) out.A_alpha[k] *= detail::power(out.A[i][k], sys.alpha[i]);
        for (std::size_t j = 0; j < sys.num_b(); ++j) out.B_beta[k] *= detail::power(out.B[j][k], sys.beta[j]);
    }
    return out;
}

LsiRatio lsi_ratio(const Grid& grid, std::span<const double> field, double m) {
    const double ubar = average(grid, field);
    if (!(ubar > 0.0)) throw DomainError("LSI ratio needs a positive average");
    const double vol = grid.cell_volume();
    double ent = 0.0, gap = 0.0, root_mean = 0.0;
    for (double u : field) {
        if (!(u >= 0.0)) throw DomainError("LSI ratio of a negative field");
        if (u > 0.0) ent += u * std::log(u / ubar);
        const double g = std::sqrt(u) - std::sqrt(ubar);
        gap += g * g;
        root_mean += std::sqrt(u);
    }
    ent *= vol;
    gap *= vol;
    root_mean *= vol;
    // Below this the entropy is rounding noise of a constant field.
    if (!(ent > 1e-14 * ubar)) throw DomainError("LSI ratio is undefined for a constant field");
    double var = 0.0;
    for (double u : field) {
        const double g = std::sqrt(u) - root_mean;
        var += g * g;
    }
    var *= vol;

    LsiRatio out;
    out.ratio = gradient_quadratic_form(grid, field, m) / (std::pow(ubar, m - 1.0) * ent);
    out.entropy_over_sqrt_gap = ent / gap;
    out.entropy_over_sqrt_variance = ent / var;
    return out;
}

IndirectDiffusion indirect_diffusion_ratio(const Grid& grid, const ReactionSystem& sys,
                                           const FieldSet& fields, std::size_t J, double eps) {
    if (J < 1 || J > sys.num_b()) throw DomainError("J must lie in 1..N");
    const std::size_t M = sys.num_a();
    for (std::size_t j = 0; j < J; ++j) {
        const double mass = average(grid, fields[M + j]);
        if (mass > eps)
            throw PreconditionError("avg(b_" + std::to_string(j + 1) + ") = " + std::to_string(mass) +
                                    " exceeds eps = " + std::to_string(eps));
    }
    const SqrtDecomposition sq = sqrt_decomposition(grid, sys, fields);
    IndirectDiffusion out;
    for (const auto& d : sq.delta) out.lhs += squared_l2(grid, d);
    for (std::size_t j = J; j < sys.num_b(); ++j) out.lhs += squared_l2(grid, sq.eta[j]);
    std::vector<double> gap(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) gap[k] = sq.A_alpha[k] - sq.B_beta[k];
    out.lhs += squared_l2(grid, gap);
    for (std::size_t j = 0; j < J; ++j) out.rhs += squared_l2(grid, sq.eta[j]);
    out.ratio = out.rhs > 0.0 ? out.lhs / out.rhs : kInf;
    return out;
}

double eep_time_factor(double t) { return 1.0 / (1.0 + std::log1p(t)); }

std::optional<double> eep_ratio(const DiagnosticsRecord& record) {
    if (!(record.rel_E > kEquilibriumFloor)) return std::nullopt;
    return record.D / (eep_time_factor(record.t) * record.rel_E);
}

std::optional<double> ckp_ratio(const Grid& grid, const FieldSet& fields,
                                std::span<const double> equilibrium) {
    const RelativeEntropy rel = relative_entropy(grid, fields, equilibrium);
    double denom = 0.0;
    for (std::size_t s = 0; s < fields.num_species(); ++s) {
        double l1 = 0.0;
        for (double u : fields[s]) l1 += std::abs(u - equilibrium[s]);
        l1 *= grid.cell_volume();
        denom += l1 * l1;
    }
    if (denom == 0.0) return std::nullopt;
    return rel.total / denom;
}

double phi(double x, double y) {
    if (!(x >= 0.0) || !(y >= 0.0)) throw DomainError("phi needs nonnegative arguments");
    if (x == 0.0 && y == 0.0) throw DomainError("phi(0, 0) is undefined");
    if (y == 0.0) return kInf;
    if (x == 0.0) return 1.0;
    // With t = sqrt(x/y) = 1 + s: phi = (2 t^2 ln t - t^2 + 1) / (t - 1)^2.
    const double s = std::sqrt(x / y) - 1.0;
    if (std::abs(s) < 1e-3) return 2.0 + s * (2.0 / 3.0 + s * (-1.0 / 6.0 + s / 15.0));
    const double rx = std::sqrt(x), ry = std::sqrt(y);
    const double num = x * std::log(x / y) - x + y;
    return num / ((rx - ry) * (rx - ry));
}

DecayFit fit_decay_rate(std::span<const double> t, std::span<const double> dist, TimeWindow window) {
    if (t.size() != dist.size()) throw DomainError("time and distance series differ in length");
    if (t.empty()) throw FitError("no samples to fit");
    const double floor = 1e-12 * dist[0];
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] < window.from || t[k] > window.to) continue;
        if (!(dist[k] > floor) || !std::isfinite(dist[k])) continue;
        xs.push_back(t[k]);
        ys.push_back(std::log(dist[k]));
    }
    if (xs.size() < 5)
        throw FitError("decay fit needs at least 5 samples above the floor, got " + std::to_string(xs.size()));
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        mx += xs[k];
        my += ys[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sxx += (xs[k] - mx) * (xs[k] - mx);
        sxy += (xs[k] - mx) * (ys[k] - my);
    }
    if (sxx == 0.0) throw FitError("decay fit needs distinct sample times");
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double ss = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double r = ys[k] - (intercept + slope * xs[k]);
        ss += r * r;
    }
    DecayFit out;
    out.lambda = -slope;
    out.C = std::exp(intercept);
    out.residual = std::sqrt(ss / n);
    out.samples = xs.size();
    return out;
}

DecayFit fit_decay_rate(const Trajectory& traj, double p, TimeWindow window) {
    const std::size_t idx = traj.p_index(p);
    std::vector<double> t, dist;
    for (const auto& rec : traj.records) {
        t.push_back(rec.t());
        dist.push_back(rec.diag.lp_dist.at(idx));
    }
    return fit_decay_rate(t, dist, window);
}

SpacetimeNorm spacetime_norm(const Trajectory& traj, std::size_t species, double exponent) {
    if (!traj.has_snapshots())
        throw PreconditionError("trajectory has no field snapshots; enable snapshot sampling");
    if (!(exponent >= 1.0)) throw DomainError("space-time exponent must be >= 1");
    SpacetimeNorm out;
    std::vector<double> power_integral;
    double sup = 0.0;
    for (const auto& rec : traj.records) {
        const auto& f = rec.snapshot->species.at(species);
        double s = 0.0, mx = 0.0;
        for (double u : f) {
            s += detail::power(u, exponent);
            mx = std::max(mx, u);
        }
        power_integral.push_back(s * traj.grid.cell_volume());
        sup = std::max(sup, mx);
        out.t.push_back(rec.t());
        out.running_sup.push_back(sup);
    }
    double integral = 0.0;
    for (std::size_t k = 1; k < out.t.size(); ++k)
        integral += 0.5 * (out.t[k] - out.t[k - 1]) * (power_integral[k] + power_integral[k - 1]);
    out.norm = std::pow(integral, 1.0 / exponent);

    const double t_end = out.t.back();
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < out.t.size(); ++k) {
        if (out.t[k] < 0.5 * t_end || !(out.running_sup[k] > 0.0)) continue;
        xs.push_back(std::log1p(out.t[k]));
        ys.push_back(std::log(out.running_sup[k]));
    }
    if (xs.size() >= 2) {
        double mx = 0.0, my = 0.0;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            mx += xs[k];
            my += ys[k];
        }
        mx /= static_cast<double>(xs.size());
        my /= static_cast<double>(xs.size());
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            sxx += (xs[k] - mx) * (xs[k] - mx);
            sxy += (xs[k] - mx) * (ys[k] - my);
        }
        if (sxx > 0.0) out.growth_exponent = sxy / sxx;
    }
    return out;
}

DiagnosticsContext make_diagnostics_context(const Grid& grid, const System& sys,
                                            const FieldSet& initial, std::vector<double> p_norms) {
    DiagnosticsContext ctx(grid);
    ctx.system = sys;
    ctx.p_norms = std::move(p_norms);
    for (double p : ctx.p_norms)
        if (!(p >= 1.0)) throw DomainError("diagnostic p-norms must be >= 1");
    if (const auto* r = std::get_if<ReactionSystem>(&sys)) {
        require_species(initial, r->num_species());
        std::vector<double> a, b;
        for (std::size_t i = 0; i < r->num_a(); ++i) a.push_back(average(grid, initial[i]));
        for (std::size_t j = 0; j < r->num_b(); ++j) b.push_back(average(grid, initial[r->num_a() + j]));
        try {
            ctx.mass = conserved_masses(*r, a, b);
            ctx.equilibrium = solve_equilibrium(*r, *ctx.mass);
        } catch (const DegenerateMass&) {
            ctx.equilibrium.reset();
        }
    }
    return ctx;
}

DiagnosticsRecord diagnose(const DiagnosticsContext& ctx, double t, const FieldSet& fields) {
    const Grid& grid = ctx.grid;
    const std::size_t S = species_count(ctx.system);
    require_species(fields, S);

    DiagnosticsRecord rec;
    rec.t = t;
    rec.E = entropy(grid, fields);
    const EntropyProduction prod = entropy_production(grid, ctx.system, fields);
    rec.D = prod.value;
    rec.D_infinite = prod.infinite;

    for (std::size_t s = 0; s < S; ++s) {
        rec.averages.push_back(average(grid, fields[s]));
        const auto [lo, hi] = std::minmax_element(fields[s].begin(), fields[s].end());
        rec.min.push_back(*lo);
        rec.max.push_back(*hi);
    }

    if (const auto* r = std::get_if<ReactionSystem>(&ctx.system)) {
        const std::size_t M = r->num_a();
        for (std::size_t i = 0; i < M; ++i)
            for (std::size_t j = 0; j < r->num_b(); ++j)
                rec.masses.push_back(r->beta[j] * rec.averages[i] + r->alpha[i] * rec.averages[M + j]);
    } else {
        const auto& g = std::get<GeneralSystem>(ctx.system);
        double weighted = 0.0;
        for (std::size_t s = 0; s < S; ++s) weighted += g.lambda[s] * rec.averages[s];
        rec.masses.push_back(weighted);
    }

    const auto exps = diffusion_exponents(ctx.system);
    for (std::size_t s = 0; s < S; ++s) {
        try {
            rec.lsi_ratios.push_back(lsi_ratio(grid, fields[s], exps[s]).ratio);
        } catch (const DomainError&) {
            rec.lsi_ratios.push_back(kNaN);
        }
    }

    rec.lp_dist.assign(ctx.p_norms.size(), kNaN);
    if (ctx.equilibrium) {
        const std::vector<double> eq = ctx.equilibrium->flat();
        rec.rel_E = relative_entropy(grid, fields, eq).total;
        std::vector<double> diff(grid.size());
        for (std::size_t q = 0; q < ctx.p_norms.size(); ++q) {
            double total = 0.0;
            for (std::size_t s = 0; s < S; ++s) {
                for (std::size_t k = 0; k < grid.size(); ++k) diff[k] = fields[s][k] - eq[s];
                total += lp_norm(grid, diff, ctx.p_norms[q]);
            }
            rec.lp_dist[q] = total;
        }
        rec.eep_ratio = eep_ratio(rec).value_or(kNaN);
        rec.ckp_ratio = ckp_ratio(grid, fields, eq).value_or(kNaN);
    }
    return rec;
}

std::optional<double> first_time_above_half_equilibrium(const Trajectory& traj,
                                                        const EquilibriumResult& eq) {
    const std::vector<double> target = eq.flat();
    for (const auto& rec : traj.records) {
        bool ok = rec.diag.averages.size() == target.size();
        for (std::size_t s = 0; ok && s < target.size(); ++s) ok = rec.diag.averages[s] >= 0.5 * target[s];
        if (ok) return rec.t();
    }
    return std::nullopt;
}

bool Trajectory::has_snapshots() const {
    return !records.empty() &&
           std::all_of(records.begin(), records.end(), [](const auto& r) { return r.snapshot.has_value(); });
}

std::size_t Trajectory::p_index(double p) const {
    for (std::size_t k = 0; k < p_norms.size(); ++k)
        if (p_norms[k] == p) return k;
    throw DomainError("p = " + std::to_string(p) + " was not sampled in this trajectory");
}

}  // namespace pmrd
