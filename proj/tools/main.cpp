#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "stochfrac/experiment.hpp"
#include "stochfrac/report_io.hpp"

namespace fs = std::filesystem;
using namespace stochfrac;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

struct Options {
    std::string config_path;
    std::uint64_t seed = 0;
    int paths = 0;  // 0 = preset/default
    double lambda = 0.5;
    double dx = 0.03125;
    double dt = 0.0;  // 0 = derive from the CFL bound
    double t_end = 1.0;
    int k_cells = 0;  // 0 = derive from domain half-width 3
    std::string flux = "godunov";
    std::string sigma = "on";
    std::string preset;
    std::string out_dir;
    int threads = 0;
    bool trace = false;
    int imax = 20;
};

std::string out_directory(const Options& opt) {
    if (!opt.out_dir.empty()) return opt.out_dir;
    if (const char* env = std::getenv("STOCHFRAC_OUT_DIR"); env && *env) return env;
    return ".";
}

fs::path prepare_out_dir(const Options& opt) {
    fs::path dir = out_directory(opt);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::invalid_argument("cannot create output directory " + dir.string());
    return dir;
}

// Applies config-file values underneath any flags given on the command line.
void merge_config_file(const CLI::App& cmd, Options& opt) {
    if (opt.config_path.empty()) return;
    std::ifstream in(opt.config_path);
    if (!in) throw std::invalid_argument("cannot open config file " + opt.config_path);
    const auto kv = parse_config_file(in);

    auto taken = [&](const std::string& flag) {
        const CLI::Option* o = cmd.get_option_no_throw("--" + flag);
        return o != nullptr && o->count() > 0;
    };
    for (const auto& [key, value] : kv) {
        if (key == "seed") { if (!taken("seed")) opt.seed = std::stoull(value); }
        else if (key == "paths") { if (!taken("paths")) opt.paths = std::stoi(value); }
        else if (key == "lambda") { if (!taken("lambda")) opt.lambda = std::stod(value); }
        else if (key == "dx") { if (!taken("dx")) opt.dx = std::stod(value); }
        else if (key == "dt") { if (!taken("dt")) opt.dt = std::stod(value); }
        else if (key == "T") { if (!taken("T")) opt.t_end = std::stod(value); }
        else if (key == "K") { if (!taken("K")) opt.k_cells = std::stoi(value); }
        else if (key == "flux") { if (!taken("flux")) opt.flux = value; }
        else if (key == "sigma") { if (!taken("sigma")) opt.sigma = value; }
        else if (key == "preset") { if (!taken("preset")) opt.preset = value; }
        else if (key == "out") { if (!taken("out")) opt.out_dir = value; }
        else if (key == "threads") { if (!taken("threads")) opt.threads = std::stoi(value); }
        else if (key == "imax") { if (!taken("imax")) opt.imax = std::stoi(value); }
        else if (key == "trace") {
            if (!taken("trace")) opt.trace = (value == "1" || value == "true" || value == "on");
        } else {
            throw std::invalid_argument("unknown key in config file: '" + key + "'");
        }
    }
}

bool sigma_on(const Options& opt) {
    if (opt.sigma == "on") return true;
    if (opt.sigma == "off") return false;
    throw std::invalid_argument("--sigma must be 'on' or 'off'");
}

void add_common_flags(CLI::App* cmd, Options& opt) {
    cmd->add_option("--config", opt.config_path, "flat key=value configuration file");
    cmd->add_option("--seed", opt.seed, "Monte Carlo seed");
    cmd->add_option("--lambda", opt.lambda, "fractional order in (0,1)");
    cmd->add_option("--flux", opt.flux, "numerical flux: godunov|eo|llf");
    cmd->add_option("--sigma", opt.sigma, "multiplicative noise: on|off");
    cmd->add_option("--out", opt.out_dir, "output directory (or $STOCHFRAC_OUT_DIR)");
    cmd->add_option("--threads", opt.threads, "worker cap, 0 = hardware");
}

double preset_lambda(const std::string& name) {
    if (name.ends_with("lambda01")) return 0.1;
    if (name.ends_with("lambda03")) return 0.3;
    if (name.ends_with("lambda05")) return 0.5;
    if (name.ends_with("lambda065")) return 0.65;
    if (name.ends_with("lambda08")) return 0.8;
    throw std::invalid_argument("unknown preset: '" + name + "'");
}

RunConfig config_from(const Options& opt, double lambda, int default_paths) {
    RunConfig cfg = default_paths >= 5000 ? RunConfig::paper(lambda) : RunConfig::desk(lambda);
    if (opt.paths > 0) cfg.n_paths = opt.paths;
    cfg.seed = opt.seed;
    cfg.threads = opt.threads;
    cfg.flux_scheme = parse_flux_scheme(opt.flux);
    cfg.noise_on = sigma_on(opt);
    return cfg;
}

int run_rates(const Options& opt) {
    std::vector<RunConfig> studies;
    if (opt.preset.empty()) {
        studies.push_back(config_from(opt, opt.lambda, 200));
    } else if (opt.preset == "paper") {
        for (double l : {0.1, 0.3, 0.5, 0.65, 0.8}) studies.push_back(config_from(opt, l, 5000));
    } else if (opt.preset.starts_with("paper-")) {
        studies.push_back(config_from(opt, preset_lambda(opt.preset), 5000));
    } else if (opt.preset.starts_with("desk-")) {
        studies.push_back(config_from(opt, preset_lambda(opt.preset), 200));
    } else {
        throw std::invalid_argument("unknown preset: '" + opt.preset + "'");
    }

    const fs::path dir = prepare_out_dir(opt);
    for (const auto& cfg : studies) {
        cfg.validate();
        std::cerr << "running rate study: lambda=" << cfg.lambda << " paths=" << cfg.n_paths
                  << " seed=" << cfg.seed << "\n";
        const RateReport report = run_error_study(cfg);
        std::ostringstream name;
        name << "rates_lambda" << format_double(cfg.lambda) << ".csv";
        const fs::path file = dir / name.str();
        std::ofstream out(file, std::ios::binary);
        write_rate_report_csv(out, report);
        std::cout << rate_report_table(report);
        std::cout << "wrote " << file.string() << "\n";
    }
    return kExitOk;
}

int run_check(const Options& opt) {
    RunConfig cfg = config_from(opt, opt.lambda, 200);
    cfg.validate();
    std::cerr << "running a priori suite: lambda=" << cfg.lambda << " paths=" << cfg.n_paths
              << "\n";
    const AprioriStudyResult result = run_apriori_study(cfg);

    const fs::path dir = prepare_out_dir(opt);
    std::ostringstream name;
    name << "apriori_lambda" << format_double(cfg.lambda) << ".csv";
    const fs::path file = dir / name.str();
    std::ofstream out(file, std::ios::binary);
    write_apriori_csv(out, result, cfg.config_hash(), cfg.seed);
    std::cout << apriori_text(result);
    std::cout << "wrote " << file.string() << "\n";

    for (const auto& level : result.levels)
        if (level.report.has_fail()) return kExitNumerical;
    return kExitOk;
}

int run_weights(const Options& opt) {
    if (opt.imax < 1) throw std::invalid_argument("weights: --imax must be >= 1");
    if (!(opt.dx > 0.0)) throw std::invalid_argument("weights: --dx must be positive");
    const WeightKernel kernel = WeightKernel::build(opt.lambda, opt.dx, opt.imax);
    if (opt.out_dir.empty() && std::getenv("STOCHFRAC_OUT_DIR") == nullptr) {
        write_kernel_csv(std::cout, kernel, opt.seed);
        return kExitOk;
    }
    const fs::path dir = prepare_out_dir(opt);
    std::ostringstream name;
    name << "kernel_lambda" << format_double(opt.lambda) << "_dx" << format_double(opt.dx)
         << ".csv";
    const fs::path file = dir / name.str();
    std::ofstream out(file, std::ios::binary);
    write_kernel_csv(out, kernel, opt.seed);
    std::cout << "wrote " << file.string() << "\n";
    return kExitOk;
}

int run_solve(const Options& opt) {
    const double t_end = opt.t_end;
    if (!(t_end > 0.0)) throw std::invalid_argument("solve: --T must be positive");
    const int k = opt.k_cells > 0 ? opt.k_cells
                                  : static_cast<int>(std::llround(3.0 / opt.dx));
    const Grid1D grid(opt.dx, k);
    const ProblemSpec problem =
        ProblemSpec::experiment(opt.lambda, parse_flux_scheme(opt.flux), sigma_on(opt));
    const WeightKernel kernel = WeightKernel::build(opt.lambda, opt.dx, 2 * k);

    double dt = opt.dt;
    if (dt <= 0.0) {
        // Largest dyadic step below the CFL bound, so the default snapshot
        // times are exactly representable.
        const double bound = cfl_dt(problem, kernel, opt.dx, 0.5).dt;
        dt = std::exp2(std::floor(std::log2(bound)));
    }
    std::vector<double> snapshots;
    for (double ts : {0.25, 0.5, 0.75, 1.0}) {
        if (ts > t_end) continue;
        const double steps = ts / dt;
        if (std::abs(steps - std::llround(steps)) < 1e-9) snapshots.push_back(ts);
    }
    if (snapshots.empty() || snapshots.back() != t_end) {
        const double steps = t_end / dt;
        if (std::abs(steps - std::llround(steps)) > 1e-9)
            throw std::invalid_argument("solve: --T must be an integer multiple of --dt");
        snapshots.push_back(t_end);
    }

    std::ostringstream canon;
    canon << "solve\nlambda=" << format_double(opt.lambda) << "\ndx=" << format_double(opt.dx)
          << "\ndt=" << format_double(dt) << "\nT=" << format_double(t_end) << "\nK=" << k
          << "\nflux=" << opt.flux << "\nsigma=" << (sigma_on(opt) ? "on" : "off")
          << "\nseed=" << opt.seed << "\n";
    const std::uint64_t hash = fnv1a64(canon.str());

    BrownianPath path;
    const BrownianPath* path_ptr = nullptr;
    if (sigma_on(opt)) {
        const int n_fine = static_cast<int>(std::llround(t_end / dt));
        path = generate_path(opt.seed, 0, n_fine, dt, 1);
        path_ptr = &path;
    }

    const fs::path dir = prepare_out_dir(opt);
    std::ofstream trace_out;
    EvolveOptions evolve_opts;
    evolve_opts.warnings = &std::cerr;
    if (opt.trace) {
        trace_out.open(dir / "trace.csv", std::ios::binary);
        evolve_opts.trace = &trace_out;
    }

    Evolver ev(problem, grid, &kernel);
    const auto snaps = ev.evolve(dt, t_end, snapshots, path_ptr, evolve_opts);
    for (const auto& [t, u] : snaps) {
        std::ostringstream name;
        name << "profile_t" << format_double(t) << ".csv";
        const fs::path file = dir / name.str();
        std::ofstream out(file, std::ios::binary);
        write_profile_csv(out, u, hash, opt.seed);
        std::cout << "wrote " << file.string() << "  (mass=" << format_double(u.mass())
                  << ", bv=" << format_double(bv_seminorm(u)) << ")\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Finite volume solver for 1-D degenerate fractional stochastic conservation laws"};
    app.set_version_flag("--version", std::string("stochfrac ") + std::string(kVersion));
    app.require_subcommand(1);

    Options opt;

    CLI::App* solve = app.add_subcommand("solve", "run one realization and write profiles");
    add_common_flags(solve, opt);
    solve->add_option("--dx", opt.dx, "cell width");
    solve->add_option("--dt", opt.dt, "time step (default: dyadic CFL step)");
    solve->add_option("--T", opt.t_end, "final time");
    solve->add_option("--K", opt.k_cells, "truncation half-width in cells (default 3/dx)");
    solve->add_flag("--trace", opt.trace, "write per-step trace CSV");

    CLI::App* rates = app.add_subcommand("rates", "Monte Carlo convergence-rate study");
    add_common_flags(rates, opt);
    rates->add_option("--paths", opt.paths, "Monte Carlo path count");
    rates->add_option("--preset", opt.preset,
                      "paper | paper-lambda{01,03,05,065,08} | desk-lambda{...}");

    CLI::App* weights = app.add_subcommand("weights", "dump the fractional weight table");
    add_common_flags(weights, opt);
    weights->add_option("--dx", opt.dx, "cell width");
    weights->add_option("--imax", opt.imax, "largest offset to tabulate");

    CLI::App* check = app.add_subcommand("check", "statistical a priori estimate suite");
    add_common_flags(check, opt);
    check->add_option("--paths", opt.paths, "Monte Carlo path count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    }

    try {
        if (solve->parsed()) {
            merge_config_file(*solve, opt);
            return run_solve(opt);
        }
        if (rates->parsed()) {
            merge_config_file(*rates, opt);
            return run_rates(opt);
        }
        if (weights->parsed()) {
            merge_config_file(*weights, opt);
            return run_weights(opt);
        }
        if (check->parsed()) {
            merge_config_file(*check, opt);
            return run_check(opt);
        }
        std::cerr << "no subcommand given\n";
        return kExitValidation;
    } catch (const PathAbort& e) {
        std::cerr << "numerical abort: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::runtime_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}
