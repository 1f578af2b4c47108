#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <sstream>

#include "stochfrac/experiment.hpp"
#include "stochfrac/report_io.hpp"

using namespace stochfrac;

namespace {

// Small, fast study on [-1, 1]: reference dt = 2^-7, dx = 2^-5.
RunConfig micro_config(bool noise_on = true) {
    RunConfig cfg;
    cfg.half_width = 1.0;
    cfg.t_end = 0.5;
    cfg.lambda = 0.5;
    cfg.dt_ref = 0x1p-7;
    cfg.dx_ref = 0x1p-5;
    cfg.levels = {{0x1p-5, 0x1p-3}, {0x1p-4, 0x1p-2}};
    cfg.n_paths = 8;
    cfg.seed = 9001;
    cfg.snapshot_times = {0.25, 0.5};
    cfg.noise_on = noise_on;
    cfg.threads = 1;
    return cfg;
}

}  // namespace

TEST_CASE("estimate_rate") {
    SUBCASE("halving errors with halving dx gives order 1") {
        std::vector<double> errors{1.0, 2.0, 4.0};
        std::vector<double> dxs{0.25, 0.5, 1.0};
        auto r = estimate_rate(errors, dxs);
        REQUIRE(r.size() == 2);
        CHECK(r[0] == doctest::Approx(1.0));
        CHECK(r[1] == doctest::Approx(1.0));
    }
    SUBCASE("sqrt(dx) scaling gives order 1/2") {
        std::vector<double> errors{1.0, std::sqrt(2.0), 2.0};
        std::vector<double> dxs{0.25, 0.5, 1.0};
        auto r = estimate_rate(errors, dxs);
        CHECK(r[0] == doctest::Approx(0.5));
        CHECK(r[1] == doctest::Approx(0.5));
    }
    SUBCASE("published table columns reproduce the published rates") {
        // lambda = 0.1 table; the printed errors carry two significant
        // digits, which limits agreement of the recomputed rates to ~0.03.
        std::vector<double> errors{0.52e-2, 1.07e-2, 2.05e-2, 3.81e-2, 6.97e-2};
        std::vector<double> dxs{0.78125e-2, 1.5625e-2, 3.125e-2, 6.25e-2, 12.5e-2};
        auto r = estimate_rate(errors, dxs);
        const double published[] = {1.02, 0.93, 0.89, 0.88};
        for (size_t k = 0; k < 4; ++k) CHECK(std::abs(r[k] - published[k]) <= 0.03);
    }
    SUBCASE("rejects nonpositive errors and bad shapes") {
        CHECK_THROWS_AS(estimate_rate(std::vector<double>{1.0}, std::vector<double>{1.0}),
                        std::invalid_argument);
        CHECK_THROWS_AS(
            estimate_rate(std::vector<double>{1.0, 0.0}, std::vector<double>{1.0, 2.0}),
            std::invalid_argument);
        CHECK_THROWS_AS(
            estimate_rate(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0}),
            std::invalid_argument);
    }
}

TEST_CASE("RunConfig validation") {
    auto cfg = RunConfig::desk(0.5);
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.n_paths == 200);
    CHECK(RunConfig::paper(0.1).n_paths == 5000);
    CHECK(cfg.k_ref() == 3072);
    CHECK(cfg.k_of(cfg.levels[0]) == 384);

    SUBCASE("lambda range") {
        cfg.lambda = 1.0;
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    }
    SUBCASE("levels must be coarser than the reference") {
        cfg.levels[0].dx = cfg.dx_ref;
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    }
    SUBCASE("snapshot times must divide") {
        cfg.snapshot_times = {0.3};
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    }
    SUBCASE("dt must be a multiple of dt_ref") {
        cfg.levels[0].dt = 0.3 * cfg.dt_ref;
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    }
    SUBCASE("dx ratio must be an integer") {
        cfg.levels[0].dx = 2.5 * cfg.dx_ref;
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    }
    SUBCASE("unknown problem") {
        cfg.problem_name = "mystery";
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    }
}

TEST_CASE("config hash covers the physics but not the thread count") {
    auto a = micro_config();
    auto b = micro_config();
    b.threads = 7;
    CHECK(a.config_hash() == b.config_hash());
    b.seed = 1;
    CHECK(a.config_hash() != b.config_hash());
    auto c = micro_config();
    c.lambda = 0.3;
    CHECK(a.config_hash() != c.config_hash());
}

TEST_CASE("run_error_study: determinism across reruns and thread counts") {
    auto cfg = micro_config();
    auto r1 = run_error_study(cfg);
    auto r2 = run_error_study(cfg);
    cfg.threads = 3;
    auto r3 = run_error_study(cfg);
    REQUIRE(r1.rows.size() == 2);
    CHECK(r1.n_aborted == 0);
    for (size_t l = 0; l < r1.rows.size(); ++l) {
        CHECK(r1.rows[l].error == r2.rows[l].error);  // bit-identical
        CHECK(r1.rows[l].error == r3.rows[l].error);
        CHECK(r1.rows[l].se == r3.rows[l].se);
    }
    CHECK(!r1.rows[0].rate.has_value());
    CHECK(r1.rows[1].rate.has_value());

    std::ostringstream csv1, csv3;
    write_rate_report_csv(csv1, r1);
    write_rate_report_csv(csv3, r3);
    CHECK(csv1.str() == csv3.str());
}

TEST_CASE("run_error_study: frozen dynamics isolates the projection error") {
    RunConfig cfg;
    cfg.half_width = 1.0;
    cfg.t_end = 0.5;
    cfg.lambda = 0.5;
    cfg.dt_ref = 0x1p-7;
    cfg.dx_ref = 0x1p-7;
    cfg.levels = {{0x1p-5, 0x1p-5}, {0x1p-4, 0x1p-4}};
    cfg.snapshot_times = {0.5};
    cfg.problem_name = "frozen";
    cfg.noise_on = false;
    cfg.n_paths = 1;
    cfg.threads = 1;
    auto r = run_error_study(cfg);
    // Smooth u0: the error reduces to the half-cell splitting artifact of
    // the even-ratio restriction, orders of magnitude below ||u0||_L1.
    CHECK(r.rows[0].error > 0.0);
    CHECK(r.rows[0].error < 1e-3);
    CHECK(r.rows[1].error > 0.0);
    CHECK(r.rows[1].error < 1e-3);
    CHECK(r.rows[0].se == 0.0);  // single deterministic path
}

TEST_CASE("run_error_study: deterministic self-convergence at lambda = 1/2") {
    // The experiment geometry with the noise off: the study degenerates to a
    // deterministic self-convergence run at the two finest ladder levels.
    auto cfg = RunConfig::desk(0.5);
    cfg.noise_on = false;
    cfg.n_paths = 1;
    cfg.levels = {{0x1p-9, 0x1p-7}, {0x1p-8, 0x1p-6}};
    cfg.threads = 1;
    auto r = run_error_study(cfg);
    REQUIRE(r.rows.size() == 2);
    const double rate = *r.rows[1].rate;
    CHECK(rate >= 0.5);
    CHECK(rate <= 1.1);
}

TEST_CASE("run_apriori_study on a micro config") {
    auto cfg = micro_config();
    cfg.n_paths = 16;
    auto res = run_apriori_study(cfg);
    REQUIRE(res.levels.size() == 2);
    for (const auto& level : res.levels) {
        CHECK(level.u0_l1 > 0.0);
        CHECK(level.u0_bv > 0.0);
        CHECK(level.stats.n_paths == 16);
        CHECK(level.overshoot.mean >= 0.0);
        CHECK(level.overshoot.se >= 0.0);
        CHECK(!level.report.checks.empty());
    }
}

TEST_CASE("run_apriori_study: sigma = 0 degenerates the ensemble") {
    auto cfg = micro_config(false);
    cfg.n_paths = 6;
    auto res = run_apriori_study(cfg);
    for (const auto& level : res.levels) {
        // identical paths: the SE degenerates (up to mean-rounding dust)
        for (const auto& f : level.stats.l1) CHECK(f.se <= 1e-14 * std::max(1.0, f.mean));
        for (const auto& f : level.stats.bv) CHECK(f.se <= 1e-14 * std::max(1.0, f.mean));
        CHECK(level.overshoot.se <= 1e-14);
        CHECK(!level.report.has_fail());
    }
}

TEST_CASE("config file parsing") {
    std::istringstream in(
        "# comment line\n"
        "lambda = 0.3\n"
        "paths=500   # trailing comment\n"
        "\n"
        "flux = godunov\n");
    auto kv = parse_config_file(in);
    CHECK(kv.at("lambda") == "0.3");
    CHECK(kv.at("paths") == "500");
    CHECK(kv.at("flux") == "godunov");
    CHECK(kv.size() == 3);

    std::istringstream bad("this is not a pair\n");
    CHECK_THROWS_AS(parse_config_file(bad), std::invalid_argument);
}

TEST_CASE("flux scheme names round-trip") {
    for (FluxScheme s :
         {FluxScheme::godunov, FluxScheme::engquist_osher, FluxScheme::lax_friedrichs})
        CHECK(parse_flux_scheme(flux_scheme_name(s)) == s);
    CHECK_THROWS_AS(parse_flux_scheme("upwind"), std::invalid_argument);
}
