#include "stochfrac/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "stochfrac/report_io.hpp"

namespace stochfrac {

namespace {

bool near_integer(double x, long long& out) {
    out = std::llround(x);
    return std::abs(x - static_cast<double>(out)) <= 1e-9 * std::max(1.0, std::abs(x));
}

long long require_integer(double x, const char* what) {
    long long n;
    if (!near_integer(x, n)) {
        std::ostringstream msg;
        msg << "RunConfig: " << what << " (" << x << " is not an integer)";
        throw std::invalid_argument(msg.str());
    }
    return n;
}

// Pulls path indices from a shared counter; results are stored per index, so
// the worker/schedule assignment cannot influence any output.
void run_workers(int n_paths, int threads, const std::function<void(int, int)>& body) {
    int n_workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    if (n_workers < 1) n_workers = 1;
    n_workers = std::min(n_workers, n_paths);

    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&](int worker_id) {
        try {
            for (;;) {
                const int p = next.fetch_add(1);
                if (p >= n_paths) break;
                body(worker_id, p);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            next.store(n_paths);  // drain remaining work
        }
    };

    if (n_workers == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(n_workers));
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker, w);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
}

FieldStats mean_se(std::span<const double> xs) {
    const size_t n = xs.size();
    if (n == 0) return {0.0, 0.0};
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(n);
    if (n < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs) {
        const double d = x - mean;
        ss += d * d;
    }
    return {mean, std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n))};
}

}  // namespace

std::vector<Level> RunConfig::default_ladder() {
    return {{0x1p-9, 0x1p-7}, {0x1p-8, 0x1p-6}, {0x1p-7, 0x1p-5},
            {0x1p-6, 0x1p-4}, {0x1p-5, 0x1p-3}};
}

RunConfig RunConfig::desk(double lambda) {
    RunConfig cfg;
    cfg.lambda = lambda;
    cfg.n_paths = 200;
    return cfg;
}

RunConfig RunConfig::paper(double lambda) {
    RunConfig cfg;
    cfg.lambda = lambda;
    cfg.n_paths = 5000;
    return cfg;
}

int RunConfig::k_ref() const {
    return static_cast<int>(require_integer(half_width / dx_ref, "half_width/dx_ref must be an integer"));
}

int RunConfig::k_of(const Level& level) const {
    return static_cast<int>(require_integer(half_width / level.dx, "half_width/dx must be an integer"));
}

ProblemSpec RunConfig::problem() const {
    if (problem_name == "experiment")
        return ProblemSpec::experiment(lambda, flux_scheme, noise_on);
    if (problem_name == "frozen") {
        ProblemSpec p = ProblemSpec::experiment(lambda, flux_scheme, false);
        FluxSpec zero;
        zero.f = [](double) { return 0.0; };
        zero.lipschitz = 0.0;
        zero.scheme = flux_scheme;
        zero.lf_theta = 0.0;
        zero.abs_slope_integral = [](double, double) { return 0.0; };
        p.flux = zero;
        p.a_fn = [](double) { return 0.0; };
        p.a_lipschitz = 0.0;
        return p;
    }
    throw std::invalid_argument("RunConfig: unknown problem '" + problem_name + "'");
}

void RunConfig::validate() const {
    if (!(half_width > 0.0)) throw std::invalid_argument("RunConfig: half_width must be positive");
    if (!(t_end > 0.0)) throw std::invalid_argument("RunConfig: t_end must be positive");
    if (!(lambda > 0.0) || !(lambda < 1.0))
        throw std::invalid_argument("RunConfig: lambda must lie in (0, 1)");
    if (!(dt_ref > 0.0) || !(dx_ref > 0.0))
        throw std::invalid_argument("RunConfig: reference steps must be positive");
    if (levels.empty()) throw std::invalid_argument("RunConfig: at least one level is required");
    if (n_paths < 1) throw std::invalid_argument("RunConfig: n_paths must be >= 1");
    if (quad_order < 1) throw std::invalid_argument("RunConfig: quad_order must be >= 1");
    if (threads < 0) throw std::invalid_argument("RunConfig: threads must be >= 0");
    if (!(cfl_safety > 0.0) || cfl_safety > 1.0)
        throw std::invalid_argument("RunConfig: cfl_safety must lie in (0, 1]");
    if (snapshot_times.empty()) throw std::invalid_argument("RunConfig: no snapshot times");
    if (problem_name != "experiment" && problem_name != "frozen")
        throw std::invalid_argument("RunConfig: unknown problem '" + problem_name + "'");

    if (k_ref() < 1) throw std::invalid_argument("RunConfig: reference grid needs K >= 1");
    require_integer(t_end / dt_ref, "t_end must be a multiple of dt_ref");

    double prev_t = 0.0;
    for (double ts : snapshot_times) {
        if (!(ts > 0.0) || ts > t_end)
            throw std::invalid_argument("RunConfig: snapshot times must lie in (0, t_end]");
        if (ts <= prev_t && prev_t != 0.0)
            throw std::invalid_argument("RunConfig: snapshot times must be strictly increasing");
        prev_t = ts;
        require_integer(ts / dt_ref, "snapshot times must be multiples of dt_ref");
    }

    double prev_dx = 0.0;
    for (const auto& level : levels) {
        if (!(level.dt > 0.0) || !(level.dx > 0.0))
            throw std::invalid_argument("RunConfig: level steps must be positive");
        if (level.dx <= prev_dx)
            throw std::invalid_argument("RunConfig: levels must be ordered by ascending dx");
        prev_dx = level.dx;
        if (k_of(level) < 1) throw std::invalid_argument("RunConfig: level grid needs K >= 1");
        require_integer(level.dt / dt_ref, "each level dt must be a multiple of dt_ref");
        require_integer(t_end / level.dt, "each level dt must divide t_end");
        for (double ts : snapshot_times)
            require_integer(ts / level.dt, "each level dt must divide the snapshot times");
        const long long ratio = require_integer(level.dx / dx_ref,
                                                "each level dx must be an integer multiple of dx_ref");
        if (ratio < 2)
            throw std::invalid_argument("RunConfig: levels must be coarser than the reference");
    }
}

std::string RunConfig::canonical_text() const {
    std::ostringstream out;
    out << "half_width=" << format_double(half_width) << '\n'
        << "t_end=" << format_double(t_end) << '\n'
        << "lambda=" << format_double(lambda) << '\n'
        << "dt_ref=" << format_double(dt_ref) << '\n'
        << "dx_ref=" << format_double(dx_ref) << '\n';
    out << "levels=";
    for (size_t l = 0; l < levels.size(); ++l) {
        if (l) out << ';';
        out << format_double(levels[l].dt) << ':' << format_double(levels[l].dx);
    }
    out << '\n';
    out << "n_paths=" << n_paths << '\n' << "seed=" << seed << '\n';
    out << "snapshots=";
    for (size_t s = 0; s < snapshot_times.size(); ++s) {
        if (s) out << ',';
        out << format_double(snapshot_times[s]);
    }
    out << '\n';
    out << "flux=" << flux_scheme_name(flux_scheme) << '\n'
        << "sigma=" << (noise_on ? "on" : "off") << '\n'
        << "problem=" << problem_name << '\n'
        << "quad_order=" << quad_order << '\n'
        << "cfl_safety=" << format_double(cfl_safety) << '\n';
    return out.str();
}

std::uint64_t RunConfig::config_hash() const { return fnv1a64(canonical_text()); }

std::vector<double> estimate_rate(std::span<const double> errors, std::span<const double> dxs) {
    if (errors.size() != dxs.size() || errors.size() < 2)
        throw std::invalid_argument("estimate_rate: need equally sized arrays of length >= 2");
    for (double e : errors)
        if (!(e > 0.0)) throw std::invalid_argument("estimate_rate: errors must be positive");
    for (double d : dxs)
        if (!(d > 0.0)) throw std::invalid_argument("estimate_rate: dx values must be positive");
    std::vector<double> rates;
    rates.reserve(errors.size() - 1);
    for (size_t k = 1; k < errors.size(); ++k)
        rates.push_back(std::log2(errors[k] / errors[k - 1]) / std::log2(dxs[k] / dxs[k - 1]));
    return rates;
}

RateReport run_error_study(const RunConfig& config) {
    config.validate();
    const ProblemSpec problem = config.problem();
    const size_t n_levels = config.levels.size();
    const size_t n_snaps = config.snapshot_times.size();

    const Grid1D ref_grid(config.dx_ref, config.k_ref());
    const WeightKernel ref_kernel =
        WeightKernel::build(config.lambda, config.dx_ref, 2 * ref_grid.k_cells);
    const LatticeFunction ref_init =
        project_initial(problem.u0, ref_grid, config.quad_order, problem.u0_breakpoints);

    std::vector<Grid1D> grids;
    std::vector<WeightKernel> kernels;
    std::vector<LatticeFunction> inits;
    std::vector<int> ratios;
    for (const auto& level : config.levels) {
        grids.emplace_back(level.dx, config.k_of(level));
        kernels.push_back(WeightKernel::build(config.lambda, level.dx, 2 * grids.back().k_cells));
        inits.push_back(
            project_initial(problem.u0, grids.back(), config.quad_order, problem.u0_breakpoints));
        ratios.push_back(static_cast<int>(std::llround(level.dx / config.dx_ref)));
    }

    const int n_fine = static_cast<int>(std::llround(config.t_end / config.dt_ref));

    // distances[l][s][p]; written once per path, reduced sequentially after
    // the join so no output depends on the thread schedule.
    std::vector<std::vector<std::vector<double>>> distances(
        n_levels, std::vector<std::vector<double>>(n_snaps, std::vector<double>(
                                                                static_cast<size_t>(config.n_paths), 0.0)));
    std::vector<char> aborted(static_cast<size_t>(config.n_paths), 0);

    run_workers(config.n_paths, config.threads, [&](int, int p) {
        Evolver ref_ev(problem, ref_grid, &ref_kernel);
        std::vector<Evolver> level_evs;
        level_evs.reserve(n_levels);
        for (size_t l = 0; l < n_levels; ++l)
            level_evs.emplace_back(problem, grids[l], &kernels[l]);

        BrownianPath path;
        if (config.noise_on)
            path = generate_path(config.seed, static_cast<std::uint64_t>(p), n_fine,
                                 config.dt_ref, 1);
        const BrownianPath* path_ptr = config.noise_on ? &path : nullptr;
        try {
            const auto ref_snaps = ref_ev.evolve_from(ref_init, config.dt_ref, config.t_end,
                                                      config.snapshot_times, path_ptr);
            for (size_t l = 0; l < n_levels; ++l) {
                const auto level_snaps =
                    level_evs[l].evolve_from(inits[l], config.levels[l].dt, config.t_end,
                                             config.snapshot_times, path_ptr);
                for (size_t s = 0; s < n_snaps; ++s) {
                    const LatticeFunction restricted = coarsen(ref_snaps[s].second, ratios[l]);
                    distances[l][s][static_cast<size_t>(p)] =
                        l1_distance(level_snaps[s].second, restricted);
                }
            }
        } catch (const PathAbort&) {
            aborted[static_cast<size_t>(p)] = 1;
        }
    });

    int n_aborted = 0;
    for (char a : aborted) n_aborted += a;
    if (static_cast<double>(n_aborted) >
        config.abort_fraction_limit * static_cast<double>(config.n_paths)) {
        std::ostringstream msg;
        msg << "run_error_study: " << n_aborted << " of " << config.n_paths
            << " paths aborted (limit " << config.abort_fraction_limit << ")";
        throw std::runtime_error(msg.str());
    }

    RateReport report;
    report.lambda = config.lambda;
    report.seed = config.seed;
    report.n_paths = config.n_paths;
    report.n_aborted = n_aborted;
    report.config_hash = config.config_hash();

    std::vector<double> errors, dxs;
    for (size_t l = 0; l < n_levels; ++l) {
        double best_mean = -1.0, best_se = 0.0;
        for (size_t s = 0; s < n_snaps; ++s) {
            std::vector<double> ok;
            ok.reserve(static_cast<size_t>(config.n_paths));
            for (int p = 0; p < config.n_paths; ++p)
                if (!aborted[static_cast<size_t>(p)])
                    ok.push_back(distances[l][s][static_cast<size_t>(p)]);
            const FieldStats st = mean_se(ok);
            if (st.mean > best_mean) {
                best_mean = st.mean;
                best_se = st.se;
            }
        }
        RateRow row;
        row.dt = config.levels[l].dt;
        row.dx = config.levels[l].dx;
        row.error = best_mean;
        row.se = best_se;
        report.rows.push_back(row);
        errors.push_back(best_mean);
        dxs.push_back(config.levels[l].dx);
    }

    if (report.rows.size() >= 2) {
        const auto rates = estimate_rate(errors, dxs);
        for (size_t k = 1; k < report.rows.size(); ++k) report.rows[k].rate = rates[k - 1];
    }
    return report;
}

AprioriStudyResult run_apriori_study(const RunConfig& config) {
    config.validate();
    const ProblemSpec problem = config.problem();
    const int n_fine = static_cast<int>(std::llround(config.t_end / config.dt_ref));
    const double m_bound = problem.noise.cutoff_m;

    AprioriStudyResult result;
    for (const auto& level : config.levels) {
        const Grid1D grid(level.dx, config.k_of(level));
        const WeightKernel kernel =
            WeightKernel::build(config.lambda, level.dx, 2 * grid.k_cells);
        const LatticeFunction init =
            project_initial(problem.u0, grid, config.quad_order, problem.u0_breakpoints);

        std::vector<PathDiagnostics> diags(static_cast<size_t>(config.n_paths));
        std::vector<double> overshoots(static_cast<size_t>(config.n_paths), 0.0);

        run_workers(config.n_paths, config.threads, [&](int, int p) {
            Evolver ev(problem, grid, &kernel);
            BrownianPath path;
            if (config.noise_on)
                path = generate_path(config.seed, static_cast<std::uint64_t>(p), n_fine,
                                     config.dt_ref, 1);
            const auto snaps = ev.evolve_from(init, level.dt, config.t_end,
                                              config.snapshot_times,
                                              config.noise_on ? &path : nullptr);
            diags[static_cast<size_t>(p)] = collect(static_cast<std::uint64_t>(p), snaps);
            overshoots[static_cast<size_t>(p)] = diags[static_cast<size_t>(p)].overshoot(m_bound);
        });

        LevelApriori la;
        la.level = level;
        la.u0_l1 = init.l1_norm();
        la.u0_bv = bv_seminorm(init);
        la.stats = aggregate(diags);
        la.report = check_apriori(la.stats, la.u0_l1, la.u0_bv, m_bound);
        la.overshoot = mean_se(overshoots);
        result.levels.push_back(std::move(la));
    }

    // Overshoot should shrink with dt: compare each level against the next
    // coarser one with a two-combined-standard-error allowance.
    result.overshoot_monotone = true;
    for (size_t l = 0; l + 1 < result.levels.size(); ++l) {
        const FieldStats& fine = result.levels[l].overshoot;
        const FieldStats& coarse = result.levels[l + 1].overshoot;
        const double slack = 2.0 * std::sqrt(fine.se * fine.se + coarse.se * coarse.se);
        if (fine.mean > coarse.mean + slack) result.overshoot_monotone = false;
    }
    return result;
}

const char* flux_scheme_name(FluxScheme scheme) {
    switch (scheme) {
        case FluxScheme::godunov: return "godunov";
        case FluxScheme::engquist_osher: return "eo";
        case FluxScheme::lax_friedrichs: return "llf";
    }
    return "?";
}

FluxScheme parse_flux_scheme(const std::string& name) {
    if (name == "godunov") return FluxScheme::godunov;
    if (name == "eo" || name == "engquist-osher") return FluxScheme::engquist_osher;
    if (name == "llf" || name == "lax-friedrichs") return FluxScheme::lax_friedrichs;
    throw std::invalid_argument("unknown flux scheme: " + name);
}

}  // namespace stochfrac
