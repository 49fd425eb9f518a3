#include "pmrd/equilibrium.hpp"

#include <quadmath.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "pmrd/errors.hpp"
#include "pmrd/roots.hpp"
#include "powers.hpp"

namespace pmrd {

namespace {

struct ReferenceState {
    std::vector<double> a;
    std::vector<double> b;
};

ReferenceState reference_state(const ReactionSystem& sys, const MassVector& mass) {
    if (!mass.a_ref.empty() && !mass.b_ref.empty()) return {mass.a_ref, mass.b_ref};
    // b_1 = 0 pins the free direction; laws (i,1) give a_i, laws (1,j) give b_j.
    ReferenceState ref;
    ref.a.resize(sys.num_a());
    ref.b.resize(sys.num_b());
    for (std::size_t i = 0; i < sys.num_a(); ++i) ref.a[i] = mass.at(i, 0) / sys.beta[0];
    for (std::size_t j = 0; j < sys.num_b(); ++j)
        ref.b[j] = (mass.at(0, j) - sys.beta[j] * ref.a[0]) / sys.alpha[0];
    ref.b[0] = 0.0;
    return ref;
}

void check_shape(const ReactionSystem& sys, const MassVector& mass) {
    sys.validate();
    if (mass.num_a != sys.num_a() || mass.num_b != sys.num_b() ||
        mass.values.size() != sys.num_a() * sys.num_b())
        throw DomainError("mass vector shape does not match the reaction system");
}

std::pair<double, double> interval_of(const ReactionSystem& sys, const ReferenceState& ref) {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < sys.num_b(); ++j) lo = std::max(lo, -ref.b[j] / sys.beta[j]);
    for (std::size_t i = 0; i < sys.num_a(); ++i) hi = std::min(hi, ref.a[i] / sys.alpha[i]);
    if (!(lo < hi)) throw DegenerateMass("no positive equilibrium: the admissible extent interval is empty");
    return {lo, hi};
}

EquilibriumResult finish(const ReactionSystem& sys, const MassVector& mass, const ReferenceState& ref,
                         double xi) {
    EquilibriumResult res;
    res.xi = xi;
    res.a_inf.resize(sys.num_a());
    res.b_inf.resize(sys.num_b());
    for (std::size_t i = 0; i < sys.num_a(); ++i) res.a_inf[i] = ref.a[i] - sys.alpha[i] * xi;
    for (std::size_t j = 0; j < sys.num_b(); ++j) res.b_inf[j] = ref.b[j] + sys.beta[j] * xi;
    for (double v : res.a_inf)
        if (!(v > 0.0)) throw InternalInconsistency("equilibrium component is not positive");
    for (double v : res.b_inf)
        if (!(v > 0.0)) throw InternalInconsistency("equilibrium component is not positive");
    res.residual_balance = std::abs(reaction_rate(sys, res.a_inf, res.b_inf));
    double worst = 0.0;
    for (std::size_t i = 0; i < sys.num_a(); ++i)
        for (std::size_t j = 0; j < sys.num_b(); ++j)
            worst = std::max(worst, std::abs(sys.beta[j] * res.a_inf[i] + sys.alpha[i] * res.b_inf[j] -
                                             mass.at(i, j)));
    res.residual_mass = worst;
    return res;
}

}  // namespace

double MassVector::max_value() const {
    return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

std::vector<double> MassVector::reconstruct_full(const ReactionSystem& sys) const {
    MassVector pruned = *this;
    pruned.a_ref.clear();
    pruned.b_ref.clear();
    const ReferenceState ref = reference_state(sys, pruned);
    std::vector<double> full(num_a * num_b);
    for (std::size_t i = 0; i < num_a; ++i)
        for (std::size_t j = 0; j < num_b; ++j)
            full[i * num_b + j] = sys.beta[j] * ref.a[i] + sys.alpha[i] * ref.b[j];
    return full;
}

std::vector<double> EquilibriumResult::flat() const {
    std::vector<double> out(a_inf);
    out.insert(out.end(), b_inf.begin(), b_inf.end());
    return out;
}

MassVector conserved_masses(const ReactionSystem& sys, std::span<const double> a_avg,
                            std::span<const double> b_avg) {
    sys.validate();
    if (a_avg.size() != sys.num_a() || b_avg.size() != sys.num_b())
        throw DomainError("average vector lengths do not match the reaction system");
    bool any_positive = false;
    for (double x : a_avg) {
        if (!(x >= 0.0)) throw DomainError("averages must be nonnegative");
        any_positive = any_positive || x > 0.0;
    }
    for (double x : b_avg) {
        if (!(x >= 0.0)) throw DomainError("averages must be nonnegative");
        any_positive = any_positive || x > 0.0;
    }
    if (!any_positive) throw DegenerateMass("all initial averages are zero");

    MassVector mv;
    mv.num_a = sys.num_a();
    mv.num_b = sys.num_b();
    mv.values.resize(mv.num_a * mv.num_b);
    for (std::size_t i = 0; i < mv.num_a; ++i)
        for (std::size_t j = 0; j < mv.num_b; ++j)
            mv.values[i * mv.num_b + j] = sys.beta[j] * a_avg[i] + sys.alpha[i] * b_avg[j];
    for (std::size_t j = 0; j < mv.num_b; ++j) mv.independent_laws.emplace_back(0, j);
    for (std::size_t i = 1; i < mv.num_a; ++i) mv.independent_laws.emplace_back(i, 0);
    mv.a_ref.assign(a_avg.begin(), a_avg.end());
    mv.b_ref.assign(b_avg.begin(), b_avg.end());
    return mv;
}

std::pair<double, double> extent_interval(const ReactionSystem& sys, const MassVector& mass) {
    check_shape(sys, mass);
    return interval_of(sys, reference_state(sys, mass));
}

EquilibriumResult solve_equilibrium(const ReactionSystem& sys, const MassVector& mass) {
    check_shape(sys, mass);
    const ReferenceState ref = reference_state(sys, mass);
    const auto [lo, hi] = interval_of(sys, ref);

    // G(xi) = k_f a(xi)^alpha - k_b b(xi)^beta, strictly decreasing on (lo, hi).
    const auto G = [&](double xi, double& value, double& slope) {
        double fwd = sys.k_f, dfwd = 0.0;
        for (std::size_t i = 0; i < sys.num_a(); ++i) {
            const double ai = std::max(ref.a[i] - sys.alpha[i] * xi, 0.0);
            fwd *= detail::power(ai, sys.alpha[i]);
            if (ai > 0.0) dfwd -= sys.alpha[i] * sys.alpha[i] / ai;
        }
        double bwd = sys.k_b, dbwd = 0.0;
        for (std::size_t j = 0; j < sys.num_b(); ++j) {
            const double bj = std::max(ref.b[j] + sys.beta[j] * xi, 0.0);
            bwd *= detail::power(bj, sys.beta[j]);
            if (bj > 0.0) dbwd += sys.beta[j] * sys.beta[j] / bj;
        }
        value = fwd - bwd;
        slope = fwd * dfwd - bwd * dbwd;
    };

    // A few plain bisections shrink the bracket away from the endpoints,
    // where the slope can be unbounded, before Newton takes over.
    double xl = lo, xh = hi, v = 0.0, s = 0.0;
    for (int k = 0; k < 8; ++k) {
        const double mid = 0.5 * (xl + xh);
        G(mid, v, s);
        if (v == 0.0) return finish(sys, mass, ref, mid);
        (v > 0.0 ? xl : xh) = mid;
    }
    const double xtol = 1e-14 * (hi - lo);
    const RootResult root = safeguarded_newton(G, xl, xh, xtol);
    if (!root.converged) throw InternalInconsistency("equilibrium root solve did not converge");
    return finish(sys, mass, ref, root.x);
}

double reaction_line_free_energy(const ReactionSystem& sys, const MassVector& mass, double xi) {
    check_shape(sys, mass);
    const ReferenceState ref = reference_state(sys, mass);
    const auto phi = [](double x) { return x > 0.0 ? x * std::log(x) - x + 1.0 : 1.0; };
    double total = -xi * std::log(sys.k_f / sys.k_b);
    for (std::size_t i = 0; i < sys.num_a(); ++i) total += phi(ref.a[i] - sys.alpha[i] * xi);
    for (std::size_t j = 0; j < sys.num_b(); ++j) total += phi(ref.b[j] + sys.beta[j] * xi);
    return total;
}

EquilibriumResult entropy_minimization_oracle(const ReactionSystem& sys, const MassVector& mass) {
    check_shape(sys, mass);
    const ReferenceState ref = reference_state(sys, mass);
    const auto [lo, hi] = interval_of(sys, ref);

    using quad = __float128;
    const quad tilt = logq(static_cast<quad>(sys.k_f)) - logq(static_cast<quad>(sys.k_b));
    const auto objective = [&](quad xi) {
        quad total = -xi * tilt;
        const auto phi = [](quad x) -> quad { return x > 0 ? x * logq(x) - x + 1 : quad(1); };
        for (std::size_t i = 0; i < sys.num_a(); ++i)
            total += phi(static_cast<quad>(ref.a[i]) - static_cast<quad>(sys.alpha[i]) * xi);
        for (std::size_t j = 0; j < sys.num_b(); ++j)
            total += phi(static_cast<quad>(ref.b[j]) + static_cast<quad>(sys.beta[j]) * xi);
        return total;
    };

    const quad inv_phi = (sqrtq(quad(5)) - 1) / 2;
    quad a = lo, b = hi;
    quad c = b - inv_phi * (b - a);
    quad d = a + inv_phi * (b - a);
    quad fc = objective(c), fd = objective(d);
    const quad xtol = static_cast<quad>(1e-15) * (b - a);
    for (int it = 0; it < 400 && (b - a) > xtol; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
    }
    return finish(sys, mass, ref, static_cast<double>((a + b) / 2));
}

}  // namespace pmrd
