#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace pmrd {

/// Uniform cell-centered mesh on the unit interval or unit square, so the
/// total measure is exactly one and averages equal integrals.
class Grid {
public:
    /// 1D grid with n cells.
    explicit Grid(std::size_t n);
    /// 2D grid with nx by ny cells.
    Grid(std::size_t nx, std::size_t ny);

    int dim() const noexcept { return dim_; }
    std::size_t nx() const noexcept { return nx_; }
    std::size_t ny() const noexcept { return ny_; }
    std::size_t size() const noexcept { return nx_ * ny_; }
    double hx() const noexcept { return hx_; }
    double hy() const noexcept { return hy_; }
    double cell_volume() const noexcept { return hx_ * hy_; }

    std::size_t index(std::size_t ix, std::size_t iy = 0) const noexcept { return ix + nx_ * iy; }
    /// Cell center coordinates.
    double x(std::size_t k) const noexcept { return (static_cast<double>(k % nx_) + 0.5) * hx_; }
    double y(std::size_t k) const noexcept { return (static_cast<double>(k / nx_) + 0.5) * hy_; }

    /// Samples a function of (x, y) at cell centers; y = 0.5 on 1D grids.
    std::vector<double> sample(const std::function<double(double, double)>& fn) const;

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    int dim_;
    std::size_t nx_;
    std::size_t ny_;
    double hx_;
    double hy_;
};

/// Nonnegative cell values for every species, in the system's flat order.
struct FieldSet {
    std::vector<std::vector<double>> species;

    std::size_t num_species() const noexcept { return species.size(); }
    std::vector<double>& operator[](std::size_t i) { return species[i]; }
    const std::vector<double>& operator[](std::size_t i) const { return species[i]; }

    /// Value of every species at one cell.
    void gather(std::size_t cell, std::span<double> out) const;
    /// Throws DomainError if any value is negative or not finite.
    void require_nonnegative() const;
    bool all_nonnegative() const noexcept;

    static FieldSet constant(const Grid& grid, std::span<const double> values);
};

/// coeff * Lap_h(field^m) with zero-flux reflection at the boundary.
std::vector<double> neumann_laplacian_of_power(const Grid& grid, std::span<const double> field,
                                               double m, double coeff);

/// Same operator, writing into `out` and skipping validation. `powered`
/// must already hold field^m.
void laplacian_into(const Grid& grid, std::span<const double> powered, double coeff,
                    std::span<double> out);

double average(const Grid& grid, std::span<const double> field);

/// (sum |u|^p vol)^{1/p}; p = infinity gives the max norm.
double lp_norm(const Grid& grid, std::span<const double> field, double p);

/// Face-centered approximation of the integral of |grad u|^2 u^{m-2}.
double gradient_quadratic_form(const Grid& grid, std::span<const double> field, double m);

/// CSV with columns cell, x[, y], then one column per species name.
void write_fields_csv(std::ostream& os, const Grid& grid, const FieldSet& fields,
                      const std::vector<std::string>& names);

}  // namespace pmrd
