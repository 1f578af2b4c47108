#include "stochfrac/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace stochfrac {

Grid1D::Grid1D(double dx_, int k_cells_) : dx(dx_), k_cells(k_cells_) {
    if (!(dx > 0.0) || !std::isfinite(dx))
        throw std::invalid_argument("Grid1D: dx must be positive and finite");
    if (k_cells < 1) throw std::invalid_argument("Grid1D: k_cells must be >= 1");
}

LatticeFunction::LatticeFunction(const Grid1D& grid)
    : grid_(grid), values_(static_cast<size_t>(grid.cell_count()), 0.0) {}

LatticeFunction::LatticeFunction(const Grid1D& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (static_cast<int>(values_.size()) != grid_.cell_count())
        throw std::invalid_argument("LatticeFunction: value count does not match grid");
}

double LatticeFunction::mass() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s * grid_.dx;
}

double LatticeFunction::l1_norm() const {
    double s = 0.0;
    for (double v : values_) s += std::abs(v);
    return s * grid_.dx;
}

double LatticeFunction::l2_norm() const {
    double s = 0.0;
    for (double v : values_) s += v * v;
    return std::sqrt(s * grid_.dx);
}

double LatticeFunction::min_value() const {
    return *std::min_element(values_.begin(), values_.end());
}

double LatticeFunction::max_value() const {
    return *std::max_element(values_.begin(), values_.end());
}

bool LatticeFunction::all_finite() const {
    for (double v : values_)
        if (!std::isfinite(v)) return false;
    return true;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
    nodes.assign(static_cast<size_t>(n), 0.0);
    weights.assign(static_cast<size_t>(n), 0.0);
    const double eps = 1e-15;
    const int half = (n + 1) / 2;
    for (int k = 0; k < half; ++k) {
        // Newton iteration on P_n from the Chebyshev-like initial guess.
        double x = std::cos(M_PI * (k + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            if (n == 1) { p1 = x; }
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            double pn = (n == 1) ? x : p1;
            double pm = (n == 1) ? 1.0 : p0;
            dp = n * (x * pn - pm) / (x * x - 1.0);
            double dx_step = pn / dp;
            x -= dx_step;
            if (std::abs(dx_step) < eps) break;
        }
        nodes[static_cast<size_t>(k)] = -x;
        nodes[static_cast<size_t>(n - 1 - k)] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[static_cast<size_t>(k)] = w;
        weights[static_cast<size_t>(n - 1 - k)] = w;
    }
}

namespace {

double integrate_segment(const std::function<double(double)>& f, double a, double b,
                         std::span<const double> nodes, std::span<const double> w,
                         int cell_index) {
    const double mid = 0.5 * (a + b);
    const double hw = 0.5 * (b - a);
    double s = 0.0;
    for (size_t q = 0; q < nodes.size(); ++q) {
        const double x = mid + hw * nodes[q];
        const double fx = f(x);
        if (!std::isfinite(fx)) {
            std::ostringstream msg;
            msg << "project_initial: non-finite initial value at x=" << x << " (cell "
                << cell_index << ")";
            throw std::invalid_argument(msg.str());
        }
        s += w[q] * fx;
    }
    return s * hw;
}

}  // namespace

LatticeFunction project_initial(const std::function<double(double)>& u0, const Grid1D& grid,
                                int quad_order, std::span<const double> breakpoints) {
    if (quad_order < 1) throw std::invalid_argument("project_initial: quad_order must be >= 1");
    std::vector<double> nodes, w;
    gauss_legendre(quad_order, nodes, w);

    std::vector<double> bps(breakpoints.begin(), breakpoints.end());
    std::sort(bps.begin(), bps.end());

    LatticeFunction out(grid);
    for (int i = -grid.k_cells; i <= grid.k_cells; ++i) {
        const double xl = grid.left_edge(i);
        const double xr = grid.right_edge(i);
        double acc = 0.0;
        double seg_lo = xl;
        for (double bp : bps) {
            if (bp > seg_lo && bp < xr) {
                acc += integrate_segment(u0, seg_lo, bp, nodes, w, i);
                seg_lo = bp;
            }
        }
        acc += integrate_segment(u0, seg_lo, xr, nodes, w, i);
        out[i] = acc / grid.dx;
    }
    return out;
}

LatticeFunction coarsen(const LatticeFunction& fine, int ratio) {
    if (ratio < 2) throw std::invalid_argument("coarsen: ratio must be >= 2");
    const Grid1D& fg = fine.grid();
    const int kf = fg.k_cells;

    if (ratio % 2 == 1 && (2 * kf + 1) % ratio == 0) {
        // Coarse cells are unions of `ratio` whole fine cells.
        const int kc = ((2 * kf + 1) / ratio - 1) / 2;
        Grid1D cg(fg.dx * ratio, kc);
        LatticeFunction out(cg);
        const int half = (ratio - 1) / 2;
        for (int j = -kc; j <= kc; ++j) {
            double s = 0.0;
            for (int m = -half; m <= half; ++m) s += fine[ratio * j + m];
            out[j] = s / ratio;
        }
        return out;
    }

    if (ratio % 2 == 0 && kf % ratio == 0) {
        // Coarse boundaries fall on fine cell centers; exact L1 projection of
        // the boundary-extended piecewise-constant function.
        const int kc = kf / ratio;
        Grid1D cg(fg.dx * ratio, kc);
        LatticeFunction out(cg);
        const int half = ratio / 2;
        auto ext = [&](int i) { return fine[std::clamp(i, -kf, kf)]; };
        for (int j = -kc; j <= kc; ++j) {
            const int c = ratio * j;
            double s = 0.5 * ext(c - half) + 0.5 * ext(c + half);
            for (int m = -half + 1; m <= half - 1; ++m) s += ext(c + m);
            out[j] = s / ratio;
        }
        return out;
    }

    throw std::invalid_argument("coarsen: fine cell count is not divisible by ratio");
}

double l1_distance(const LatticeFunction& a, const LatticeFunction& b) {
    if (!(a.grid() == b.grid()))
        throw std::invalid_argument("l1_distance: grids do not match");
    auto va = a.values();
    auto vb = b.values();
    double s = 0.0;
    for (size_t i = 0; i < va.size(); ++i) s += std::abs(va[i] - vb[i]);
    return s * a.grid().dx;
}

double bv_seminorm(const LatticeFunction& a) {
    auto v = a.values();
    double s = 0.0;
    for (size_t i = 0; i + 1 < v.size(); ++i) s += std::abs(v[i + 1] - v[i]);
    return s;
}

}  // namespace stochfrac
