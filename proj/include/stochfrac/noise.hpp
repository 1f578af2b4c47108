#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "stochfrac/grid.hpp"

namespace stochfrac {

// Brownian increments at the finest time resolution. Every draw is addressed
// by (seed, path_id, step, mode) through a counter-based generator, so the
// same tuple yields the same value regardless of thread or call order.
struct BrownianPath {
    double dt_fine = 0.0;
    int n_modes = 1;
    std::uint64_t seed = 0;
    std::uint64_t path_id = 0;
    std::vector<double> increments;  // mode-major: [mode * n_steps + step]

    int n_steps() const {
        return n_modes == 0 ? 0 : static_cast<int>(increments.size()) / n_modes;
    }
    double fine_increment(int step, int mode = 0) const {
        return increments[static_cast<size_t>(mode) * static_cast<size_t>(n_steps()) +
                          static_cast<size_t>(step)];
    }
};

BrownianPath generate_path(std::uint64_t seed, std::uint64_t path_id, int n_fine_steps,
                           double dt_fine, int n_modes = 1);

// One N(0, 1) draw for the given address; exposed for reproducibility tests.
double normal_draw(std::uint64_t seed, std::uint64_t path_id, std::uint32_t step,
                   std::uint32_t mode);

// W((n+1) dt) - W(n dt) at a coarser level: the exact sum of the constituent
// fine increments. level_dt must be an integer multiple of dt_fine.
double coarse_increment(const BrownianPath& path, double level_dt, int n, int mode = 0);

// Multiplicative noise coefficient. Scalar mode applies one Brownian motion
// through sigma(u); finite_cylindrical truncates W = sum_k g_k beta_k at
// n_modes terms with h_k(u) = mode_coeffs[k] * h_base(u).
struct NoiseSpec {
    enum class Mode { off, scalar, finite_cylindrical };

    Mode mode = Mode::off;
    std::function<double(double)> sigma;
    std::function<double(double)> h_base;
    std::vector<double> mode_coeffs;
    double cutoff_m = 1.0;  // sigma vanishes outside [-M, M] (assumption A5 bound)

    int n_modes() const {
        return mode == Mode::finite_cylindrical ? static_cast<int>(mode_coeffs.size()) : 1;
    }
    bool enabled() const { return mode != Mode::off; }

    static NoiseSpec off();
    static NoiseSpec scalar_noise(std::function<double(double)> sigma, double cutoff_m);
    static NoiseSpec cylindrical(std::function<double(double)> h_base,
                                 std::vector<double> mode_coeffs, double cutoff_m);
    // sigma(u) = u^+(1-u)^+ with M = 1, the configuration of the experiments.
    static NoiseSpec experiment();
};

// values[i] = sigma(U_i) * dW (scalar) or sum_k h_k(U_i) * dW_k (cylindrical)
// over the window [n*level_dt, (n+1)*level_dt).
LatticeFunction noise_term(const NoiseSpec& spec, const LatticeFunction& u,
                           const BrownianPath& path, double level_dt, int n);

}  // namespace stochfrac
