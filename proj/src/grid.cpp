#include "pmrd/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "pmrd/errors.hpp"
#include "pmrd/format.hpp"
#include "powers.hpp"

namespace pmrd {

namespace {

void require_cells(std::size_t n) {
    if (n < 2) throw DomainError("a grid needs at least 2 cells per axis");
}

void require_nonnegative(std::span<const double> field) {
    for (double v : field)
        if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("field value is negative or not finite");
}

void require_size(const Grid& grid, std::span<const double> field) {
    if (field.size() != grid.size()) throw DomainError("field length does not match the grid");
}

// Face weight ((uL+uR)/2)^{m-2}, zero when both sides vanish.
double face_weight(double ul, double ur, double m) {
    const double mean = 0.5 * (ul + ur);
    if (mean == 0.0) return 0.0;
    return detail::power(mean, m - 2.0);
}

}  // namespace

Grid::Grid(std::size_t n) : dim_(1), nx_(n), ny_(1), hx_(1.0 / static_cast<double>(n)), hy_(1.0) {
    require_cells(n);
}

Grid::Grid(std::size_t nx, std::size_t ny)
    : dim_(2), nx_(nx), ny_(ny), hx_(1.0 / static_cast<double>(nx)), hy_(1.0 / static_cast<double>(ny)) {
    require_cells(nx);
    require_cells(ny);
}

std::vector<double> Grid::sample(const std::function<double(double, double)>& fn) const {
    std::vector<double> out(size());
    for (std::size_t k = 0; k < size(); ++k) out[k] = fn(x(k), dim_ == 2 ? y(k) : 0.5);
    return out;
}

void FieldSet::gather(std::size_t cell, std::span<double> out) const {
    for (std::size_t i = 0; i < species.size(); ++i) out[i] = species[i][cell];
}

void FieldSet::require_nonnegative() const {
    for (const auto& f : species) pmrd::require_nonnegative(f);
}

bool FieldSet::all_nonnegative() const noexcept {
    for (const auto& f : species)
        for (double v : f)
            if (!(v >= 0.0)) return false;
    return true;
}

FieldSet FieldSet::constant(const Grid& grid, std::span<const double> values) {
    FieldSet fs;
    for (double v : values) fs.species.emplace_back(grid.size(), v);
    return fs;
}

void laplacian_into(const Grid& grid, std::span<const double> w, double coeff, std::span<double> out) {
    const std::size_t nx = grid.nx();
    const std::size_t ny = grid.ny();
    const double cx = coeff / (grid.hx() * grid.hx());
    if (grid.dim() == 1) {
        // Reflected ghost cells contribute nothing at the two ends.
        out[0] = cx * (w[1] - w[0]);
        for (std::size_t i = 1; i + 1 < nx; ++i) out[i] = cx * (w[i - 1] - 2.0 * w[i] + w[i + 1]);
        out[nx - 1] = cx * (w[nx - 2] - w[nx - 1]);
        return;
    }
    const double cy = coeff / (grid.hy() * grid.hy());
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            const std::size_t k = i + nx * j;
            double acc = 0.0;
            if (i > 0) acc += cx * (w[k - 1] - w[k]);
            if (i + 1 < nx) acc += cx * (w[k + 1] - w[k]);
            if (j > 0) acc += cy * (w[k - nx] - w[k]);
            if (j + 1 < ny) acc += cy * (w[k + nx] - w[k]);
            out[k] = acc;
        }
    }
}

std::vector<double> neumann_laplacian_of_power(const Grid& grid, std::span<const double> field,
                                               double m, double coeff) {
    require_size(grid, field);
    require_nonnegative(field);
    if (!(m >= 1.0)) throw DomainError("porous-medium exponent must be >= 1");
    if (!(coeff > 0.0)) throw DomainError("diffusion coefficient must be > 0");
    std::vector<double> powered(field.size());
    std::transform(field.begin(), field.end(), powered.begin(),
                   [m](double u) { return detail::power(u, m); });
    std::vector<double> out(field.size());
    laplacian_into(grid, powered, coeff, out);
    return out;
}

double average(const Grid& grid, std::span<const double> field) {
    require_size(grid, field);
    double s = 0.0;
    for (double v : field) s += v;
    return s * grid.cell_volume();
}

double lp_norm(const Grid& grid, std::span<const double> field, double p) {
    require_size(grid, field);
    if (!(p >= 1.0)) throw DomainError("lp_norm requires p >= 1");
    if (std::isinf(p)) {
        double mx = 0.0;
        for (double v : field) mx = std::max(mx, std::abs(v));
        return mx;
    }
    double s = 0.0;
    for (double v : field) s += detail::power(std::abs(v), p);
    return std::pow(s * grid.cell_volume(), 1.0 / p);
}

double gradient_quadratic_form(const Grid& grid, std::span<const double> u, double m) {
    require_size(grid, u);
    require_nonnegative(u);
    const std::size_t nx = grid.nx();
    const std::size_t ny = grid.ny();
    const double vol = grid.cell_volume();
    const double ix2 = 1.0 / (grid.hx() * grid.hx());
    const double iy2 = 1.0 / (grid.hy() * grid.hy());
    double total = 0.0;
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            const std::size_t k = i + nx * j;
            if (i + 1 < nx) {
                const double diff = u[k + 1] - u[k];
                if (diff != 0.0) total += diff * diff * ix2 * face_weight(u[k], u[k + 1], m);
            }
            if (grid.dim() == 2 && j + 1 < ny) {
                const double diff = u[k + nx] - u[k];
                if (diff != 0.0) total += diff * diff * iy2 * face_weight(u[k], u[k + nx], m);
            }
        }
    }
    return total * vol;
}

void write_fields_csv(std::ostream& os, const Grid& grid, const FieldSet& fields,
                      const std::vector<std::string>& names) {
    os << "cell,x";
    if (grid.dim() == 2) os << ",y";
    for (const auto& n : names) os << ',' << n;
    os << '\n';
    for (std::size_t k = 0; k < grid.size(); ++k) {
        os << k << ',' << format_double(grid.x(k));
        if (grid.dim() == 2) os << ',' << format_double(grid.y(k));
        for (std::size_t s = 0; s < fields.num_species(); ++s) os << ',' << format_double(fields[s][k]);
        os << '\n';
    }
}

}  // namespace pmrd
