#pragma once

#include <functional>
#include <span>
#include <vector>

namespace stochfrac {

// Uniform symmetric 1-D grid. Cell i covers [x_{i-1/2}, x_{i+1/2}) with
// x_i = i*dx and i in {-K, ..., K}, so the truncated domain is
// [-(K+1/2)dx, (K+1/2)dx) and the cell centers reach +-K*dx.
struct Grid1D {
    double dx = 1.0;
    int k_cells = 1;

    Grid1D() = default;
    Grid1D(double dx_, int k_cells_);

    int cell_count() const { return 2 * k_cells + 1; }
    double center(int i) const { return i * dx; }
    double left_edge(int i) const { return (i - 0.5) * dx; }
    double right_edge(int i) const { return (i + 0.5) * dx; }
    double half_width() const { return k_cells * dx; }

    bool operator==(const Grid1D&) const = default;
};

// Piecewise-constant lattice function: one cell-average value per grid cell.
class LatticeFunction {
public:
    LatticeFunction() = default;
    explicit LatticeFunction(const Grid1D& grid);
    LatticeFunction(const Grid1D& grid, std::vector<double> values);

    const Grid1D& grid() const { return grid_; }
    int k() const { return grid_.k_cells; }
    int size() const { return static_cast<int>(values_.size()); }

    // Cell-index access, i in [-K, K].
    double operator[](int i) const { return values_[static_cast<size_t>(i + grid_.k_cells)]; }
    double& operator[](int i) { return values_[static_cast<size_t>(i + grid_.k_cells)]; }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    double mass() const;     // sum v_i * dx
    double l1_norm() const;  // sum |v_i| * dx
    double l2_norm() const;  // sqrt(sum v_i^2 * dx)
    double min_value() const;
    double max_value() const;
    bool all_finite() const;

private:
    Grid1D grid_;
    std::vector<double> values_;
};

// Cell averages of u0 by per-cell Gauss-Legendre quadrature of the given
// order (exact for polynomials of degree <= 2*order-1). Cells containing a
// breakpoint are split there before quadrature so kinks do not degrade the
// order. Throws std::invalid_argument when u0 is non-finite at a node.
LatticeFunction project_initial(const std::function<double(double)>& u0,
                                const Grid1D& grid, int quad_order = 5,
                                std::span<const double> breakpoints = {});

// Cell-average restriction onto a grid coarser by an integer factor.
// Odd ratio: coarse cells are unions of whole fine cells (block means).
// Even ratio: coarse cell boundaries fall on fine cell centers; the two
// straddling fine cells enter with weight 1/2, and coarse cells reaching
// past the fine domain use the constant boundary extension U_{+-K}.
LatticeFunction coarsen(const LatticeFunction& fine, int ratio);

// sum_i |a_i - b_i| * dx over the truncated domain; grids must match.
double l1_distance(const LatticeFunction& a, const LatticeFunction& b);

// sum_i |a_{i+1} - a_i| over interior neighbor pairs.
double bv_seminorm(const LatticeFunction& a);

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace stochfrac
