#include "pmrd/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <type_traits>

#include "pmrd/errors.hpp"
#include "powers.hpp"

namespace pmrd {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidSystem(what);
}

bool all_of_range(const std::vector<double>& v, auto pred) {
    return std::all_of(v.begin(), v.end(), pred);
}

double euclidean_norm(std::span<const double> u) {
    double s = 0.0;
    for (double x : u) s += x * x;
    return std::sqrt(s);
}

}  // namespace

void ReactionSystem::validate() const {
    const auto M = alpha.size();
    const auto N = beta.size();
    require(M >= 1 && N >= 1, "reaction system needs at least one species on each side");
    require(d.size() == M && m.size() == M, "lengths of alpha, d and m must agree");
    require(h.size() == N && p.size() == N, "lengths of beta, h and p must agree");
    require(all_of_range(alpha, [](double x) { return x >= 1.0; }), "alpha_i must be >= 1");
    require(all_of_range(beta, [](double x) { return x >= 1.0; }), "beta_j must be >= 1");
    require(all_of_range(d, [](double x) { return x > 0.0; }), "d_i must be > 0");
    require(all_of_range(h, [](double x) { return x > 0.0; }), "h_j must be > 0");
    require(all_of_range(m, [](double x) { return x > 1.0; }), "m_i must be > 1");
    require(all_of_range(p, [](double x) { return x > 1.0; }), "p_j must be > 1");
    require(k_f > 0.0 && k_b > 0.0, "rate constants must be > 0");
}

std::vector<double> ReactionSystem::diffusion() const {
    std::vector<double> out(d);
    out.insert(out.end(), h.begin(), h.end());
    return out;
}

std::vector<double> ReactionSystem::exponents() const {
    std::vector<double> out(m);
    out.insert(out.end(), p.begin(), p.end());
    return out;
}

void GeneralSystem::validate() const {
    require(species >= 1, "general system needs at least one species");
    require(m.size() == species && d.size() == species && lambda.size() == species,
            "lengths of m, d and lambda must equal the species count");
    require(static_cast<bool>(f), "reaction map is not set");
    // m = 1 (linear diffusion) is accepted as the limiting case.
    require(all_of_range(m, [](double x) { return x >= 1.0; }), "m_i must be >= 1");
    require(all_of_range(d, [](double x) { return x > 0.0; }), "d_i must be > 0");
    require(all_of_range(lambda, [](double x) { return x > 0.0; }), "lambda_i must be > 0");
    require(nu >= 1.0, "nu must be >= 1");
}

double ExponentReport::existence_threshold() const { return std::max(nu - 1.0, 1.0); }

double ExponentReport::boundedness_threshold() const {
    return nu - 4.0 / (static_cast<double>(dimension) + 2.0);
}

bool ExponentReport::all_existence() const {
    return std::all_of(existence_ok.begin(), existence_ok.end(), [](bool b) { return b; });
}

bool ExponentReport::all_boundedness() const {
    return std::all_of(boundedness_ok.begin(), boundedness_ok.end(), [](bool b) { return b; });
}

std::size_t species_count(const System& sys) {
    return std::visit(
        [](const auto& s) -> std::size_t {
            if constexpr (std::is_same_v<std::decay_t<decltype(s)>, ReactionSystem>)
                return s.num_species();
            else
                return s.species;
        },
        sys);
}

std::vector<std::string> species_names(const System& sys) {
    std::vector<std::string> names;
    if (const auto* r = std::get_if<ReactionSystem>(&sys)) {
        for (std::size_t i = 0; i < r->num_a(); ++i) names.push_back("a" + std::to_string(i + 1));
        for (std::size_t j = 0; j < r->num_b(); ++j) names.push_back("b" + std::to_string(j + 1));
    } else {
        for (std::size_t i = 0; i < species_count(sys); ++i) names.push_back("u" + std::to_string(i + 1));
    }
    return names;
}

std::vector<double> diffusion_coefficients(const System& sys) {
    if (const auto* r = std::get_if<ReactionSystem>(&sys)) return r->diffusion();
    return std::get<GeneralSystem>(sys).d;
}

std::vector<double> diffusion_exponents(const System& sys) {
    if (const auto* r = std::get_if<ReactionSystem>(&sys)) return r->exponents();
    return std::get<GeneralSystem>(sys).m;
}

void validate(const System& sys) {
    std::visit([](const auto& s) { s.validate(); }, sys);
}

double max_growth_exponent(std::span<const double> alpha, std::span<const double> beta) {
    if (alpha.empty() || beta.empty()) throw InvalidSystem("stoichiometry vectors must be nonempty");
    for (double x : alpha)
        if (x < 1.0) throw InvalidSystem("alpha_i must be >= 1");
    for (double x : beta)
        if (x < 1.0) throw InvalidSystem("beta_j must be >= 1");
    const double sa = std::accumulate(alpha.begin(), alpha.end(), 0.0);
    const double sb = std::accumulate(beta.begin(), beta.end(), 0.0);
    return std::max(sa, sb);
}

double reaction_rate(const ReactionSystem& sys, std::span<const double> a,
                     std::span<const double> b) {
    double fwd = sys.k_f;
    for (std::size_t i = 0; i < a.size(); ++i) fwd *= detail::power(a[i], sys.alpha[i]);
    double bwd = sys.k_b;
    for (std::size_t j = 0; j < b.size(); ++j) bwd *= detail::power(b[j], sys.beta[j]);
    return fwd - bwd;
}

ReactionTerms evaluate_reactions(const ReactionSystem& sys, std::span<const double> a,
                                 std::span<const double> b) {
    if (a.size() != sys.num_a() || b.size() != sys.num_b())
        throw DomainError("concentration vector lengths do not match the system");
    for (double x : a)
        if (!(x >= 0.0)) throw DomainError("negative concentration in a");
    for (double x : b)
        if (!(x >= 0.0)) throw DomainError("negative concentration in b");
    const double r = reaction_rate(sys, a, b);
    ReactionTerms out;
    out.f.resize(a.size());
    out.g.resize(b.size());
    for (std::size_t i = 0; i < a.size(); ++i) out.f[i] = -sys.alpha[i] * r;
    for (std::size_t j = 0; j < b.size(); ++j) out.g[j] = sys.beta[j] * r;
    return out;
}

void evaluate_reactions_flat(const ReactionSystem& sys, std::span<const double> u,
                             std::span<double> out) {
    const auto M = sys.num_a();
    const double r = reaction_rate(sys, u.first(M), u.subspan(M));
    for (std::size_t i = 0; i < M; ++i) out[i] = -sys.alpha[i] * r;
    for (std::size_t j = 0; j < sys.num_b(); ++j) out[M + j] = sys.beta[j] * r;
}

GeneralSystem to_general(const ReactionSystem& sys) {
    sys.validate();
    GeneralSystem g;
    g.species = sys.num_species();
    g.m = sys.exponents();
    g.d = sys.diffusion();
    g.nu = max_growth_exponent(sys.alpha, sys.beta);
    const double M = static_cast<double>(sys.num_a());
    const double N = static_cast<double>(sys.num_b());
    for (double a : sys.alpha) g.lambda.push_back(1.0 / (M * a));
    for (double b : sys.beta) g.lambda.push_back(1.0 / (N * b));
    g.f = [sys](std::span<const double> u, std::span<double> out) {
        evaluate_reactions_flat(sys, u, out);
    };
    return g;
}

ConditionReport check_conditions(const GeneralSystem& sys, const SamplingOptions& opts) {
    sys.validate();
    const std::size_t S = sys.species;
    ConditionReport rep;
    rep.nu = sys.nu;
    rep.growth_constant.assign(S, 0.0);
    rep.mass_dissipation.samples = opts.samples;
    rep.quasi_positivity.samples = opts.samples;

    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> box(0.0, opts.box_max);
    std::vector<double> u(S), f(S);

    auto record = [&](ConditionCheck& check, double value, std::size_t species) {
        ++check.violation_count;
        if (check.violations.size() < opts.max_reported) check.violations.push_back({u, value, species});
    };

    for (std::size_t s = 0; s < opts.samples; ++s) {
        for (auto& x : u) x = box(rng);
        sys.f(u, f);

        double weighted = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < S; ++i) {
            weighted += sys.lambda[i] * f[i];
            scale += std::abs(sys.lambda[i] * f[i]);
        }
        if (weighted > opts.tolerance * (1.0 + scale)) record(rep.mass_dissipation, weighted, 0);

        const double denom = 1.0 + std::pow(euclidean_norm(u), sys.nu);
        for (std::size_t i = 0; i < S; ++i)
            rep.growth_constant[i] = std::max(rep.growth_constant[i], std::abs(f[i]) / denom);

        for (std::size_t i = 0; i < S; ++i) {
            const double saved = u[i];
            u[i] = 0.0;
            sys.f(u, f);
            if (f[i] < -opts.tolerance * (1.0 + std::abs(f[i]))) record(rep.quasi_positivity, f[i], i);
            u[i] = saved;
        }
    }
    return rep;
}

ConditionReport check_conditions(const ReactionSystem& sys, const SamplingOptions& opts) {
    // (M) and (P) hold by construction: the weighted sum cancels identically
    // and the only negative term of f_i carries the factor a_i^{alpha_i}.
    ConditionReport rep = check_conditions(to_general(sys), opts);
    rep.mass_dissipation.certified = true;
    rep.quasi_positivity.certified = true;
    return rep;
}

namespace {

ExponentReport exponent_report(double nu, std::vector<double> exps, int dimension) {
    if (dimension < 1) throw DomainError("spatial dimension must be >= 1");
    ExponentReport rep;
    rep.nu = nu;
    rep.dimension = dimension;
    rep.exponents = std::move(exps);
    const double ex = rep.existence_threshold();
    const double bd = rep.boundedness_threshold();
    for (double mi : rep.exponents) {
        rep.existence_ok.push_back(mi > ex);
        rep.boundedness_ok.push_back(dimension < 3 || mi > bd);
        rep.duality_exponent.push_back(mi + 1.0);
    }
    return rep;
}

}  // namespace

ExponentReport check_exponent_conditions(const ReactionSystem& sys, int dimension) {
    return exponent_report(max_growth_exponent(sys.alpha, sys.beta), sys.exponents(), dimension);
}

ExponentReport check_exponent_conditions(const GeneralSystem& sys, int dimension) {
    return exponent_report(sys.nu, sys.m, dimension);
}

void regularize(std::span<double> f, double eps) {
    if (eps < 0.0) throw DomainError("regularization epsilon must be >= 0");
    if (eps == 0.0) return;
    double total = 0.0;
    for (double x : f) total += std::abs(x);
    const double scale = 1.0 / (1.0 + eps * total);
    for (double& x : f) x *= scale;
}

std::vector<double> regularized_reactions(const GeneralSystem& sys, std::span<const double> u,
                                          double eps) {
    for (double x : u)
        if (!(x >= 0.0)) throw DomainError("negative concentration");
    std::vector<double> f(sys.species);
    sys.f(u, f);
    regularize(f, eps);
    return f;
}

std::vector<double> regularized_reactions(const ReactionSystem& sys, std::span<const double> u,
                                          double eps) {
    if (u.size() != sys.num_species()) throw DomainError("state length does not match the system");
    for (double x : u)
        if (!(x >= 0.0)) throw DomainError("negative concentration");
    std::vector<double> f(sys.num_species());
    evaluate_reactions_flat(sys, u, f);
    regularize(f, eps);
    return f;
}

}  // namespace pmrd
