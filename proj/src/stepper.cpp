#include "stochfrac/stepper.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

namespace stochfrac {

namespace {

// Sixteen independent partial sums: four vector accumulators after
// vectorization, so the reduction is FMA-throughput-bound instead of
// latency-bound. The summation order is fixed, so results are reproducible
// run to run and across thread counts.
double dot16(const double* w, const double* a, int n) {
    double s[16] = {0.0};
    int j = 0;
    for (; j + 16 <= n; j += 16)
        for (int m = 0; m < 16; ++m) s[m] += w[j + m] * a[j + m];
    const double t0 = ((s[0] + s[1]) + (s[2] + s[3])) + ((s[4] + s[5]) + (s[6] + s[7]));
    const double t1 = ((s[8] + s[9]) + (s[10] + s[11])) + ((s[12] + s[13]) + (s[14] + s[15]));
    double t = t0 + t1;
    for (; j < n; ++j) t += w[j] * a[j];
    return t;
}

// out[s] = (1/dx) [ sum over interior j of G_{j-s} a[j] + a[0] T(s) + a[2K] T(2K-s) ]
// in storage indices s = i + K. a[] holds A(U). Interior means |cell| < K;
// cells outside contribute through the constant-extension tails.
void nonlocal_into(std::span<const double> a, int k, double dx,
                   std::span<const double> weights_full, std::span<const double> tails,
                   std::span<double> out) {
    const int n = 2 * k + 1;
    const double a_left = a[0];
    const double a_right = a[static_cast<size_t>(n - 1)];
    // Support of A(U) over interior cells; zero coefficients contribute
    // nothing, so the dot window shrinks to the nonzero span.
    int slo = 1, shi = n - 2;
    while (slo <= shi && a[static_cast<size_t>(slo)] == 0.0) ++slo;
    while (shi >= slo && a[static_cast<size_t>(shi)] == 0.0) --shi;
    const double inv_dx = 1.0 / dx;
    const double* wbase = weights_full.data() + 2 * k;
    const double* abase = a.data();
    for (int s = 0; s < n; ++s) {
        double v = 0.0;
        if (slo <= shi) v = dot16(wbase + (slo - s), abase + slo, shi - slo + 1);
        v += a_left * tails[static_cast<size_t>(s)];
        v += a_right * tails[static_cast<size_t>(n - 1 - s)];
        out[static_cast<size_t>(s)] = v * inv_dx;
    }
}

void advective_into(std::span<const double> u, int k, double dx, const FluxSpec& flux,
                    std::span<double> faces, std::span<double> out) {
    const int n = 2 * k + 1;
    // faces[s] = F(U_s, U_{s+1}) with constant extension past the last cell.
    for (int s = 0; s < n - 1; ++s)
        faces[static_cast<size_t>(s)] =
            numerical_flux(flux, u[static_cast<size_t>(s)], u[static_cast<size_t>(s + 1)]);
    faces[static_cast<size_t>(n - 1)] =
        numerical_flux(flux, u[static_cast<size_t>(n - 1)], u[static_cast<size_t>(n - 1)]);
    const double face_left = numerical_flux(flux, u[0], u[0]);
    const double inv_dx = 1.0 / dx;
    out[0] = (faces[0] - face_left) * inv_dx;
    for (int s = 1; s < n; ++s)
        out[static_cast<size_t>(s)] =
            (faces[static_cast<size_t>(s)] - faces[static_cast<size_t>(s - 1)]) * inv_dx;
}

void check_kernel(const Grid1D& grid, const WeightKernel& kernel) {
    if (kernel.dx() != grid.dx)
        throw std::invalid_argument("nonlocal term: kernel dx does not match grid dx");
    if (kernel.i_max() < 2 * grid.k_cells)
        throw std::invalid_argument("nonlocal term: kernel i_max must be >= 2K");
}

}  // namespace

PathAbort::PathAbort(long long step_index_, int cell_)
    : std::runtime_error([&] {
          std::ostringstream msg;
          msg << "non-finite state at step " << step_index_ << ", cell " << cell_;
          return msg.str();
      }()),
      step_index(step_index_),
      cell(cell_) {}

ProblemSpec ProblemSpec::experiment(double lambda, FluxScheme scheme, bool noise_on) {
    ProblemSpec p;
    p.flux = FluxSpec::clipped_burgers(scheme);
    p.a_fn = [](double u) { return std::max(u - 0.5, 0.0); };
    p.a_lipschitz = 1.0;
    p.noise = noise_on ? NoiseSpec::experiment() : NoiseSpec::off();
    p.u0 = [](double x) { return std::abs(x) < 1.0 ? 2.0 * std::exp(1.0 / (x * x - 1.0)) : 0.0; };
    p.u0_breakpoints = {-1.0, 1.0};
    p.lambda = lambda;
    return p;
}

CflReport cfl_dt(const ProblemSpec& spec, const WeightKernel& kernel, double dx, double safety) {
    if (!(safety > 0.0) || safety > 1.0)
        throw std::invalid_argument("cfl_dt: safety must lie in (0, 1]");
    const double lf = spec.flux.scheme == FluxScheme::lax_friedrichs
                          ? 0.5 * (spec.flux.lipschitz + spec.flux.lf_theta)
                          : spec.flux.lipschitz;
    const double g0 = kernel[0];
    const double dt = safety / (2.0 * lf / dx + spec.a_lipschitz * g0 / dx);
    return {dt, spec.flux.lipschitz * dt / dx, g0 * dt / dx};
}

LatticeFunction advective_term(const LatticeFunction& u, const FluxSpec& flux) {
    const int k = u.k();
    LatticeFunction out(u.grid());
    std::vector<double> faces(static_cast<size_t>(2 * k + 1));
    advective_into(u.values(), k, u.grid().dx, flux, faces, out.values());
    return out;
}

LatticeFunction nonlocal_term(const LatticeFunction& u, const WeightKernel& kernel,
                              const std::function<double(double)>& a_fn) {
    check_kernel(u.grid(), kernel);
    const int k = u.k();
    std::vector<double> wfull(static_cast<size_t>(4 * k + 1));
    for (int m = -2 * k; m <= 2 * k; ++m) wfull[static_cast<size_t>(m + 2 * k)] = kernel[m];
    std::vector<double> tails(static_cast<size_t>(2 * k + 1));
    for (int b = 0; b <= 2 * k; ++b) tails[static_cast<size_t>(b)] = kernel.tail(b);
    std::vector<double> a(static_cast<size_t>(2 * k + 1));
    auto vu = u.values();
    for (size_t s = 0; s < a.size(); ++s) a[s] = a_fn(vu[s]);
    LatticeFunction out(u.grid());
    nonlocal_into(a, k, u.grid().dx, wfull, tails, out.values());
    return out;
}

Evolver::Evolver(ProblemSpec spec, const Grid1D& grid, const WeightKernel* kernel)
    : spec_(std::move(spec)), grid_(grid), kernel_(kernel) {
    if (!kernel_) throw std::invalid_argument("Evolver: kernel is required");
    check_kernel(grid_, *kernel_);
    const int k = grid_.k_cells;
    weights_full_.resize(static_cast<size_t>(4 * k + 1));
    for (int m = -2 * k; m <= 2 * k; ++m)
        weights_full_[static_cast<size_t>(m + 2 * k)] = (*kernel_)[m];
    tails_.resize(static_cast<size_t>(2 * k + 1));
    for (int b = 0; b <= 2 * k; ++b) tails_[static_cast<size_t>(b)] = kernel_->tail(b);
    const size_t n = static_cast<size_t>(grid_.cell_count());
    a_buf_.resize(n);
    faces_buf_.resize(n);
    rhs_buf_.resize(n);
}

LatticeFunction Evolver::initial_state(int quad_order) const {
    return project_initial(spec_.u0, grid_, quad_order, spec_.u0_breakpoints);
}

void Evolver::step_in_place(SchemeState& state, double dt, const BrownianPath* path) {
    const int k = grid_.k_cells;
    const int n = 2 * k + 1;
    auto u = state.u.values();

    for (int s = 0; s < n; ++s) a_buf_[static_cast<size_t>(s)] = spec_.a_fn(u[static_cast<size_t>(s)]);
    nonlocal_into(a_buf_, k, grid_.dx, weights_full_, tails_, rhs_buf_);
    advective_into(u, k, grid_.dx, spec_.flux, faces_buf_, a_buf_);  // a_buf_ now holds adv

    double dw = 0.0;
    if (spec_.noise.mode == NoiseSpec::Mode::scalar) {
        if (!path) throw std::invalid_argument("step: noise enabled but no path given");
        dw = coarse_increment(*path, dt, static_cast<int>(state.step_index), 0);
    } else if (spec_.noise.mode == NoiseSpec::Mode::finite_cylindrical) {
        if (!path) throw std::invalid_argument("step: noise enabled but no path given");
        for (int m = 0; m < spec_.noise.n_modes(); ++m)
            dw += spec_.noise.mode_coeffs[static_cast<size_t>(m)] *
                  coarse_increment(*path, dt, static_cast<int>(state.step_index), m);
    }

    for (int s = 0; s < n; ++s) {
        double v = u[static_cast<size_t>(s)] -
                   dt * (a_buf_[static_cast<size_t>(s)] + rhs_buf_[static_cast<size_t>(s)]);
        if (spec_.noise.mode == NoiseSpec::Mode::scalar)
            v += spec_.noise.sigma(u[static_cast<size_t>(s)]) * dw;
        else if (spec_.noise.mode == NoiseSpec::Mode::finite_cylindrical)
            v += spec_.noise.h_base(u[static_cast<size_t>(s)]) * dw;
        if (!std::isfinite(v)) throw PathAbort(state.step_index, s - k);
        u[static_cast<size_t>(s)] = v;
    }
    state.step_index += 1;
    state.t = static_cast<double>(state.step_index) * dt;
}

std::vector<std::pair<double, LatticeFunction>> Evolver::evolve(
    double dt, double t_end, std::span<const double> snapshot_times, const BrownianPath* path,
    const EvolveOptions& options) {
    return evolve_from(initial_state(options.quad_order), dt, t_end, snapshot_times, path,
                       options);
}

std::vector<std::pair<double, LatticeFunction>> Evolver::evolve_from(
    const LatticeFunction& initial, double dt, double t_end,
    std::span<const double> snapshot_times, const BrownianPath* path,
    const EvolveOptions& options) {
    if (!(dt > 0.0)) throw std::invalid_argument("evolve: dt must be positive");
    if (!(initial.grid() == grid_))
        throw std::invalid_argument("evolve: initial state grid does not match");
    const double steps_real = t_end / dt;
    const long long n_steps = std::llround(steps_real);
    if (n_steps < 0 || std::abs(steps_real - static_cast<double>(n_steps)) > 1e-9)
        throw std::invalid_argument("evolve: t_end must be an integer multiple of dt");

    std::vector<long long> snap_steps;
    snap_steps.reserve(snapshot_times.size());
    for (double ts : snapshot_times) {
        const double r = ts / dt;
        const long long s = std::llround(r);
        if (s < 0 || s > n_steps || std::abs(r - static_cast<double>(s)) > 1e-9)
            throw std::invalid_argument(
                "evolve: snapshot times must be integer multiples of dt within [0, t_end]");
        snap_steps.push_back(s);
    }

    if (options.warnings) {
        const CflReport cfl = cfl_dt(spec_, *kernel_, grid_.dx, 1.0);
        if (dt > cfl.dt)
            *options.warnings << "warning: dt=" << dt << " exceeds the CFL bound " << cfl.dt
                              << " (flux ratio " << spec_.flux.lipschitz * dt / grid_.dx
                              << ", nonlocal ratio " << (*kernel_)[0] * dt / grid_.dx << ")\n";
    }

    SchemeState state{initial, 0.0, 0};
    std::vector<std::pair<double, LatticeFunction>> snaps;
    snaps.reserve(snapshot_times.size());

    auto trace_row = [&](const SchemeState& st) {
        if (!options.trace) return;
        *options.trace << st.step_index << ',' << st.t << ',' << st.u.min_value() << ','
                       << st.u.max_value() << ',' << st.u.mass() << ',' << bv_seminorm(st.u)
                       << '\n';
    };
    if (options.trace) *options.trace << "step,t,min_u,max_u,mass,bv\n";
    trace_row(state);

    auto record_if_requested = [&](const SchemeState& st) {
        for (size_t q = 0; q < snap_steps.size(); ++q)
            if (snap_steps[q] == st.step_index)
                snaps.emplace_back(snapshot_times[q], st.u);
    };
    record_if_requested(state);

    for (long long s = 0; s < n_steps; ++s) {
        step_in_place(state, dt, path);
        trace_row(state);
        record_if_requested(state);
    }
    return snaps;
}

SchemeState step(const SchemeState& state, double dt, const ProblemSpec& spec,
                 const WeightKernel& kernel, const BrownianPath* path) {
    Evolver ev(spec, state.u.grid(), &kernel);
    SchemeState next = state;
    ev.step_in_place(next, dt, path);
    return next;
}

}  // namespace stochfrac
