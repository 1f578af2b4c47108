#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stochfrac/diagnostics.hpp"
#include "stochfrac/flux.hpp"
#include "stochfrac/stepper.hpp"

namespace stochfrac {

// One resolution of the ladder: an Euler-Maruyama step and its grid width.
struct Level {
    double dt;
    double dx;
};

// Full description of a Monte Carlo convergence study: the reference
// resolution, the coarse ladder, the path count, the seed and the problem
// selection. The default ladder pairs dt in {2^-9..2^-5} with
// dx in {6/768..6/48} on [-3,3], matching a constant CFL ratio of 1/4;
// the reference continues the ladder at dt = 2^-12, dx = 2^-10.
struct RunConfig {
    double half_width = 3.0;
    double t_end = 1.0;
    double lambda = 0.5;
    double dt_ref = 0x1p-12;
    double dx_ref = 0x1p-10;
    std::vector<Level> levels = default_ladder();  // ascending dx
    int n_paths = 200;
    std::uint64_t seed = 0;
    std::vector<double> snapshot_times = {0.25, 0.5, 0.75, 1.0};
    FluxScheme flux_scheme = FluxScheme::godunov;
    bool noise_on = true;
    // "experiment": the clipped-Burgers / (u-1/2)^+ / u^+(1-u)^+ setup.
    // "frozen": f = A = 0 and noise off, isolating projection/restriction.
    std::string problem_name = "experiment";
    int quad_order = 5;
    int threads = 0;  // 0 = hardware concurrency; never affects results
    double cfl_safety = 0.5;
    double abort_fraction_limit = 1e-3;

    static std::vector<Level> default_ladder();
    static RunConfig desk(double lambda);   // 200 paths
    static RunConfig paper(double lambda);  // 5000 paths

    // Throws std::invalid_argument naming the violated invariant:
    // dyadic alignment of all dt with dt_ref and the snapshot times,
    // integer cell counts, and integer dx ratios against the reference.
    void validate() const;

    int k_ref() const;
    int k_of(const Level& level) const;
    ProblemSpec problem() const;

    // Canonical key=value rendering (threads excluded: they must not change
    // any output byte) and its FNV-1a 64-bit hash, embedded in reports.
    std::string canonical_text() const;
    std::uint64_t config_hash() const;
};

struct RateRow {
    double dt = 0.0;
    double dx = 0.0;
    double error = 0.0;
    double se = 0.0;  // Monte Carlo standard error at the maximizing snapshot
    std::optional<double> rate;
};

struct RateReport {
    double lambda = 0.0;
    std::uint64_t seed = 0;
    int n_paths = 0;
    int n_aborted = 0;
    std::uint64_t config_hash = 0;
    std::vector<RateRow> rows;  // ascending dx, first row has no rate
};

// Error := max over snapshot times of the path-mean of
// || u_level(t) - restrict(u_ref(t)) ||_{L1}, with the reference and every
// coarse level driven by the same Brownian path (coarse increments are exact
// partial sums of the fine ones). Throws if more than abort_fraction_limit
// of the paths abort.
RateReport run_error_study(const RunConfig& config);

// rate[k-1] = log2(errors[k]/errors[k-1]) / log2(dxs[k]/dxs[k-1]).
std::vector<double> estimate_rate(std::span<const double> errors, std::span<const double> dxs);

struct LevelApriori {
    Level level;
    double u0_l1 = 0.0;
    double u0_bv = 0.0;
    EnsembleStats stats;
    AprioriReport report;
    FieldStats overshoot;  // of the per-path worst overshoot beyond [0, M]
};

struct AprioriStudyResult {
    std::vector<LevelApriori> levels;  // config order (ascending dx)
    // Overshoot decreases with dt within 2 combined standard errors.
    bool overshoot_monotone = true;
};

// Evolves every ladder level independently (no reference run), collects the
// statistical monitors and evaluates the a priori estimates per level.
AprioriStudyResult run_apriori_study(const RunConfig& config);

const char* flux_scheme_name(FluxScheme scheme);
FluxScheme parse_flux_scheme(const std::string& name);

}  // namespace stochfrac
