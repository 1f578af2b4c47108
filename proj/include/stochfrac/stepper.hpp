#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "stochfrac/flux.hpp"
#include "stochfrac/fractional_kernel.hpp"
#include "stochfrac/grid.hpp"
#include "stochfrac/noise.hpp"

namespace stochfrac {

// The data quadruple (f, A, sigma, u0) plus the fractional order.
struct ProblemSpec {
    FluxSpec flux;
    std::function<double(double)> a_fn;  // nondecreasing, A(0) = 0
    double a_lipschitz = 1.0;
    NoiseSpec noise;
    std::function<double(double)> u0;
    std::vector<double> u0_breakpoints;  // kinks of u0, split before quadrature
    double lambda = 0.5;

    // The configuration of the numerical experiments: clipped Burgers flux,
    // A(u) = (u - 1/2)^+, sigma(u) = u^+(1-u)^+, bump initial data supported
    // on (-1, 1).
    static ProblemSpec experiment(double lambda, FluxScheme scheme = FluxScheme::godunov,
                                  bool noise_on = true);
};

struct SchemeState {
    LatticeFunction u;
    double t = 0.0;
    long long step_index = 0;
};

// Raised when a step produces a non-finite value.
class PathAbort : public std::runtime_error {
public:
    PathAbort(long long step_index, int cell);
    long long step_index;
    int cell;
};

struct CflReport {
    double dt;              // safety / (2 L_F / dx + L_A G_0 / dx)
    double flux_ratio;      // ||f'|| dt / dx
    double nonlocal_ratio;  // G_0 dt / dx
};

CflReport cfl_dt(const ProblemSpec& spec, const WeightKernel& kernel, double dx,
                 double safety = 0.5);

// out[i] = [F(U_i, U_{i+1}) - F(U_{i-1}, U_i)] / dx with constant extension
// beyond the truncated domain.
LatticeFunction advective_term(const LatticeFunction& u, const FluxSpec& flux);

// out[i] = (1/dx) [ sum_{|j|<K} G_{j-i} A(U_j)
//                   + A(U_{-K}) T(K+i) + A(U_K) T(K-i) ]
// where T(B) = sum_{j>=B} G_j is the boundary-extension tail correction.
// Requires kernel.i_max() >= 2K and matching dx.
LatticeFunction nonlocal_term(const LatticeFunction& u, const WeightKernel& kernel,
                              const std::function<double(double)>& a_fn);

struct EvolveOptions {
    std::ostream* trace = nullptr;     // per-step CSV: step,t,min,max,mass,bv
    std::ostream* warnings = nullptr;  // CFL violations (warn-only)
    int quad_order = 5;
};

// One explicit Euler-Maruyama step of the fully discrete scheme,
//   U^{n+1}_i = U^n_i - dt (advective + nonlocal)[i] + sigma(U^n_i) dW_n,
// with dW_n the path increment over [t, t+dt) aggregated to level dt.
SchemeState step(const SchemeState& state, double dt, const ProblemSpec& spec,
                 const WeightKernel& kernel, const BrownianPath* path);

// Scheme driver bound to one (problem, grid, kernel) triple. Reuses scratch
// buffers across steps; one instance per path/thread, sharing only the
// immutable kernel.
class Evolver {
public:
    Evolver(ProblemSpec spec, const Grid1D& grid, const WeightKernel* kernel);

    const Grid1D& grid() const { return grid_; }
    const ProblemSpec& problem() const { return spec_; }

    LatticeFunction initial_state(int quad_order = 5) const;

    void step_in_place(SchemeState& state, double dt, const BrownianPath* path);

    // Runs from t = 0 to t_end recording the state at each snapshot time
    // (each must be an integer multiple of dt). Deterministic given the path.
    std::vector<std::pair<double, LatticeFunction>> evolve(
        double dt, double t_end, std::span<const double> snapshot_times,
        const BrownianPath* path, const EvolveOptions& options = {});

    // Same, but starting from an already projected initial lattice (shared
    // across the paths of a study).
    std::vector<std::pair<double, LatticeFunction>> evolve_from(
        const LatticeFunction& initial, double dt, double t_end,
        std::span<const double> snapshot_times, const BrownianPath* path,
        const EvolveOptions& options = {});

private:
    ProblemSpec spec_;
    Grid1D grid_;
    const WeightKernel* kernel_;
    std::vector<double> weights_full_;  // G_m at index m + 2K, m in [-2K, 2K]
    std::vector<double> tails_;         // T(B), B in [0, 2K]
    std::vector<double> a_buf_, faces_buf_, rhs_buf_;
};

}  // namespace stochfrac
