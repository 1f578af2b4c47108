// Acceptance suite: one PASS/FAIL line per criterion, exit code = number of
// failures. Heavy Monte Carlo studies are shared between criteria 6-8.
#include <chrono>
#include <cmath>
#include <cstring>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "stochfrac/experiment.hpp"
#include "stochfrac/report_io.hpp"

using namespace stochfrac;

namespace {

int g_failures = 0;
std::uint64_t g_seed = 42;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void report(int criterion, bool pass, const std::string& what, double seconds) {
    std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": " << what
              << "  (" << std::fixed << seconds << std::defaultfloat << " s)\n";
    std::cout.unsetf(std::ios::fixed);
    if (!pass) ++g_failures;
}

// ---------------------------------------------------------------- 1
void criterion_1() {
    Timer timer;
    const double lambdas[] = {0.1, 0.3, 0.5, 0.65, 0.8};
    const double dxs[] = {0x1p-4, 0x1p-7};
    double worst = 0.0;
    std::string worst_at;
    for (double l : lambdas) {
        for (double dx : dxs) {
            for (long long i = -50; i <= 50; ++i) {
                const double closed = fractional_weight(l, dx, i);
                const double tol = std::max(1e-9 * std::abs(closed), 1e-16);
                const double quad = weight_quadrature(l, dx, i, tol);
                const double rel = std::abs(quad - closed) / std::abs(closed);
                if (rel > worst) {
                    worst = rel;
                    std::ostringstream at;
                    at << "lambda=" << l << " dx=" << dx << " i=" << i;
                    worst_at = at.str();
                }
            }
        }
    }
    const double secs = timer.seconds();
    const bool pass = worst <= 1e-6 && secs < 30.0;
    std::ostringstream what;
    what << "weight oracle equivalence: worst rel err " << worst << " at " << worst_at
         << ", budget 30 s";
    report(1, pass, what.str(), secs);
}

// ---------------------------------------------------------------- 2
void criterion_2() {
    Timer timer;
    bool pass = true;
    std::ostringstream detail;
    const double dx = 0x1p-4;
    double worst_rowsum = 0.0;
    for (double l : {0.1, 0.3, 0.5, 0.65, 0.8}) {
        for (long long i = 1; i <= 1000; ++i) {
            if (fractional_weight(l, dx, i) != fractional_weight(l, dx, -i)) {
                pass = false;
                detail << " symmetry broken at lambda=" << l << " i=" << i << ";";
            }
            if (!(fractional_weight(l, dx, i) < 0.0)) {
                pass = false;
                detail << " nonnegative off-diagonal at lambda=" << l << " i=" << i << ";";
            }
        }
        if (!(fractional_weight(l, dx, 0) > 0.0)) {
            pass = false;
            detail << " G_0 not positive at lambda=" << l << ";";
        }
        double s = fractional_weight(l, dx, 0);
        for (long long i = 1; i <= 1000; ++i) s += 2.0 * fractional_weight(l, dx, i);
        s += 2.0 * weight_tail_sum(l, dx, 1001);
        worst_rowsum = std::max(worst_rowsum, std::abs(s));
    }
    if (worst_rowsum > 1e-12) pass = false;
    std::ostringstream what;
    what << "weight structure: symmetry, signs, row-sum residual " << worst_rowsum << detail.str();
    report(2, pass, what.str(), timer.seconds());
}

// ---------------------------------------------------------------- 3
void criterion_3() {
    Timer timer;
    const Grid1D grid(0.1, 30);
    ProblemSpec problem = ProblemSpec::experiment(0.5, FluxScheme::godunov, false);
    const WeightKernel kernel = WeightKernel::build(0.5, grid.dx, 2 * grid.k_cells);
    Evolver ev(problem, grid, &kernel);
    const double c = 0.8;  // both f(c) and A(c) are active
    SchemeState st{LatticeFunction(grid, std::vector<double>(61, c)), 0.0, 0};
    const double dt = cfl_dt(problem, kernel, grid.dx, 0.5).dt;
    for (int n = 0; n < 100; ++n) ev.step_in_place(st, dt, nullptr);
    double worst = 0.0;
    for (double v : st.u.values()) worst = std::max(worst, std::abs(v - c));
    std::ostringstream what;
    what << "constant-state fixed point after 100 steps: max drift " << worst;
    report(3, worst <= 1e-13, what.str(), timer.seconds());
}

// ---------------------------------------------------------------- 4
void criterion_4() {
    Timer timer;
    const Grid1D grid(0x1p-4, 16);
    ProblemSpec problem = ProblemSpec::experiment(0.5, FluxScheme::godunov, false);
    const WeightKernel kernel = WeightKernel::build(0.5, grid.dx, 2 * grid.k_cells);
    Evolver ev(problem, grid, &kernel);
    const double dt = cfl_dt(problem, kernel, grid.dx, 0.5).dt;
    std::mt19937 rng(31415);
    std::uniform_real_distribution<double> base(0.0, 1.0), gap(0.0, 0.5);
    int violations = 0;
    for (int trial = 0; trial < 500; ++trial) {
        LatticeFunction u(grid), v(grid);
        for (int i = -16; i <= 16; ++i) {
            u[i] = base(rng);
            v[i] = u[i] + gap(rng);
        }
        SchemeState su{u, 0.0, 0}, sv{v, 0.0, 0};
        ev.step_in_place(su, dt, nullptr);
        ev.step_in_place(sv, dt, nullptr);
        for (int i = -16; i <= 16; ++i)
            if (su.u[i] > sv.u[i]) ++violations;
    }
    std::ostringstream what;
    what << "discrete comparison principle on 500 ordered pairs: " << violations << " violations";
    report(4, violations == 0, what.str(), timer.seconds());
}

// ---------------------------------------------------------------- 5
void criterion_5() {
    Timer timer;
    bool pass = true;
    std::ostringstream detail;

    // The stated single resolution: lambda = 1/2, dx = 6/96 = 2^-4, dt = 2^-5.
    RunConfig single = RunConfig::desk(0.5);
    single.seed = g_seed;
    single.levels = {{0x1p-5, 0x1p-4}};
    const auto single_result = run_apriori_study(single);
    for (const auto& check : single_result.levels[0].report.checks) {
        if (check.status == CheckStatus::fail) {
            pass = false;
            detail << " " << check.name << "@t=" << check.t << " value=" << check.value
                   << " bound=" << check.bound << " FAIL;";
        }
    }

    // Overshoot beyond [0,1] across the five dt levels of the ladder.
    RunConfig ladder = RunConfig::desk(0.5);
    ladder.seed = g_seed;
    const auto ladder_result = run_apriori_study(ladder);
    detail << " overshoot by dt:";
    for (auto it = ladder_result.levels.rbegin(); it != ladder_result.levels.rend(); ++it)
        detail << " " << it->overshoot.mean;
    if (!ladder_result.overshoot_monotone) {
        pass = false;
        detail << " (not monotone within 2 SE)";
    }

    const double secs = timer.seconds();
    if (secs >= 300.0) pass = false;
    std::ostringstream what;
    what << "a priori statistical suite (L1, BV at 1.1 headroom, overshoot):" << detail.str()
         << " budget 300 s";
    report(5, pass, what.str(), secs);
}

// ---------------------------------------------------------------- 6-8 shared studies
struct DeskStudies {
    RateReport lambda01;
    RateReport lambda08_t4;
    std::string csv_t1, csv_t4, csv_t8;
};

std::optional<DeskStudies> g_studies;

const DeskStudies& studies() {
    if (!g_studies) {
        DeskStudies s;
        {
            RunConfig cfg = RunConfig::desk(0.1);
            cfg.seed = g_seed;
            cfg.threads = 4;
            std::cerr << "  [running desk study lambda=0.1, 200 paths]\n";
            s.lambda01 = run_error_study(cfg);
        }
        {
            RunConfig cfg = RunConfig::desk(0.8);
            cfg.seed = g_seed;
            cfg.threads = 4;
            std::cerr << "  [running desk study lambda=0.8, threads=4]\n";
            s.lambda08_t4 = run_error_study(cfg);
            std::ostringstream csv;
            write_rate_report_csv(csv, s.lambda08_t4);
            s.csv_t4 = csv.str();
        }
        g_studies = std::move(s);
    }
    return *g_studies;
}

void criterion_6() {
    Timer timer;
    const DeskStudies& s = studies();
    const double r1 = s.lambda01.rows[1].rate.value_or(-1.0);
    const double r2 = s.lambda01.rows[2].rate.value_or(-1.0);
    const double r8 = s.lambda08_t4.rows[4].rate.value_or(-1.0);
    bool pass = r1 >= 0.8 && r1 <= 1.2 && r2 >= 0.8 && r2 <= 1.2;
    if (!(r8 >= 0.35 && r8 <= 0.75)) pass = false;
    const double secs = timer.seconds();
    if (secs >= 1800.0) pass = false;
    std::ostringstream what;
    what << "desk-scale rates: lambda=0.1 finest pairs " << r1 << ", " << r2
         << " (need [0.8,1.2]); lambda=0.8 coarsest pair " << r8
         << " (need [0.35,0.75]); budget 1800 s";
    report(6, pass, what.str(), secs);
}

void criterion_7() {
    Timer timer;
    const DeskStudies& s = studies();
    const double r1 = s.lambda01.rows[1].rate.value_or(-1.0);
    const double r2 = s.lambda01.rows[2].rate.value_or(-1.0);
    const double r8 = s.lambda08_t4.rows[4].rate.value_or(-1.0);
    // Theorem floor: measured order must exceed 1 - lambda - 0.1 (lambda=0.8)
    // and 0.4 (lambda=0.1), both below the observed orders.
    const bool pass = r8 >= 0.1 && r1 >= 0.4 && r2 >= 0.4;
    std::ostringstream what;
    what << "theoretical-order sanity: lambda=0.8 rate " << r8 << " >= 0.1, lambda=0.1 rates "
         << r1 << ", " << r2 << " >= 0.4";
    report(7, pass, what.str(), timer.seconds());
}

void criterion_8() {
    Timer timer;
    DeskStudies& s = const_cast<DeskStudies&>(studies());
    {
        RunConfig cfg = RunConfig::desk(0.8);
        cfg.seed = g_seed;
        cfg.threads = 1;
        std::cerr << "  [re-running desk study lambda=0.8, threads=1]\n";
        std::ostringstream csv;
        write_rate_report_csv(csv, run_error_study(cfg));
        s.csv_t1 = csv.str();
    }
    {
        RunConfig cfg = RunConfig::desk(0.8);
        cfg.seed = g_seed;
        cfg.threads = 8;
        std::cerr << "  [re-running desk study lambda=0.8, threads=8]\n";
        std::ostringstream csv;
        write_rate_report_csv(csv, run_error_study(cfg));
        s.csv_t8 = csv.str();
    }
    const bool pass = s.csv_t1 == s.csv_t4 && s.csv_t4 == s.csv_t8 && !s.csv_t4.empty();
    std::ostringstream what;
    what << "determinism: rate CSVs byte-identical across threads {1,4,8} ("
         << s.csv_t4.size() << " bytes)";
    report(8, pass, what.str(), timer.seconds());
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> only;
    for (int a = 1; a < argc; ++a) {
        if (std::strcmp(argv[a], "--seed") == 0 && a + 1 < argc) {
            g_seed = std::strtoull(argv[++a], nullptr, 10);
        } else if (std::strcmp(argv[a], "--only") == 0 && a + 1 < argc) {
            std::istringstream list(argv[++a]);
            std::string tok;
            while (std::getline(list, tok, ',')) only.push_back(std::stoi(tok));
        } else {
            std::cerr << "usage: acceptance [--seed N] [--only 1,2,...]\n";
            return 64;
        }
    }
    auto wanted = [&](int c) {
        return only.empty() || std::find(only.begin(), only.end(), c) != only.end();
    };

    std::cout << "stochfrac acceptance suite (seed " << g_seed << ")\n";
    if (wanted(1)) criterion_1();
    if (wanted(2)) criterion_2();
    if (wanted(3)) criterion_3();
    if (wanted(4)) criterion_4();
    if (wanted(5)) criterion_5();
    if (wanted(6)) criterion_6();
    if (wanted(7)) criterion_7();
    if (wanted(8)) criterion_8();
    std::cout << (g_failures == 0 ? "all criteria passed\n" : "FAILURES PRESENT\n");
    return g_failures;
}
