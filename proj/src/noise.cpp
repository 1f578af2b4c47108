#include "stochfrac/noise.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "stochfrac/flux.hpp"

namespace stochfrac {

namespace {

// Philox4x32-10 block cipher (Salmon et al.), the counter-based generator
// behind the reproducibility contract.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
    constexpr std::uint32_t w0 = 0x9E3779B9u, w1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += w0;
            key[1] += w1;
        }
        const std::uint64_t p0 = static_cast<std::uint64_t>(ctr[0]) * m0;
        const std::uint64_t p1 = static_cast<std::uint64_t>(ctr[2]) * m1;
        ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
               static_cast<std::uint32_t>(p1),
               static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
               static_cast<std::uint32_t>(p0)};
    }
    return ctr;
}

}  // namespace

double normal_draw(std::uint64_t seed, std::uint64_t path_id, std::uint32_t step,
                   std::uint32_t mode) {
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                              static_cast<std::uint32_t>(seed >> 32)};
    const std::array<std::uint32_t, 4> ctr = {step, mode, static_cast<std::uint32_t>(path_id),
                                              static_cast<std::uint32_t>(path_id >> 32)};
    const auto x = philox4x32(ctr, key);
    // Two 53-bit uniforms in (0,1), then one Box-Muller normal.
    const std::uint64_t b1 =
        ((static_cast<std::uint64_t>(x[0]) << 32) | x[1]) >> 11;
    const std::uint64_t b2 =
        ((static_cast<std::uint64_t>(x[2]) << 32) | x[3]) >> 11;
    const double u1 = (static_cast<double>(b1) + 0.5) * 0x1p-53;
    const double u2 = (static_cast<double>(b2) + 0.5) * 0x1p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

BrownianPath generate_path(std::uint64_t seed, std::uint64_t path_id, int n_fine_steps,
                           double dt_fine, int n_modes) {
    if (n_fine_steps < 1) throw std::invalid_argument("generate_path: n_fine_steps must be >= 1");
    if (n_modes < 1) throw std::invalid_argument("generate_path: n_modes must be >= 1");
    if (!(dt_fine > 0.0)) throw std::invalid_argument("generate_path: dt_fine must be positive");
    BrownianPath path;
    path.dt_fine = dt_fine;
    path.n_modes = n_modes;
    path.seed = seed;
    path.path_id = path_id;
    path.increments.resize(static_cast<size_t>(n_fine_steps) * static_cast<size_t>(n_modes));
    const double scale = std::sqrt(dt_fine);
    for (int k = 0; k < n_modes; ++k)
        for (int s = 0; s < n_fine_steps; ++s)
            path.increments[static_cast<size_t>(k) * n_fine_steps + s] =
                scale * normal_draw(seed, path_id, static_cast<std::uint32_t>(s),
                                    static_cast<std::uint32_t>(k));
    return path;
}

double coarse_increment(const BrownianPath& path, double level_dt, int n, int mode) {
    const double ratio = level_dt / path.dt_fine;
    const long long m = std::llround(ratio);
    if (m < 1 || m * path.dt_fine != level_dt)
        throw std::invalid_argument("coarse_increment: level_dt is not a multiple of dt_fine");
    const long long lo = n * m;
    const long long hi = lo + m;
    if (n < 0 || hi > path.n_steps())
        throw std::invalid_argument("coarse_increment: window outside the path");
    const double* base =
        path.increments.data() + static_cast<size_t>(mode) * static_cast<size_t>(path.n_steps());
    double s = 0.0;
    for (long long j = lo; j < hi; ++j) s += base[j];
    return s;
}

NoiseSpec NoiseSpec::off() {
    NoiseSpec n;
    n.mode = Mode::off;
    return n;
}

NoiseSpec NoiseSpec::scalar_noise(std::function<double(double)> sigma, double cutoff_m) {
    NoiseSpec n;
    n.mode = Mode::scalar;
    n.sigma = std::move(sigma);
    n.cutoff_m = cutoff_m;
    return n;
}

NoiseSpec NoiseSpec::cylindrical(std::function<double(double)> h_base,
                                 std::vector<double> mode_coeffs, double cutoff_m) {
    if (mode_coeffs.empty())
        throw std::invalid_argument("NoiseSpec: cylindrical mode needs at least one coefficient");
    NoiseSpec n;
    n.mode = Mode::finite_cylindrical;
    n.h_base = std::move(h_base);
    n.mode_coeffs = std::move(mode_coeffs);
    n.cutoff_m = cutoff_m;
    return n;
}

NoiseSpec NoiseSpec::experiment() { return scalar_noise(clipped_sigma, 1.0); }

LatticeFunction noise_term(const NoiseSpec& spec, const LatticeFunction& u,
                           const BrownianPath& path, double level_dt, int n) {
    LatticeFunction out(u.grid());
    if (spec.mode == NoiseSpec::Mode::off) return out;
    if (spec.mode == NoiseSpec::Mode::scalar) {
        const double dw = coarse_increment(path, level_dt, n, 0);
        auto vu = u.values();
        auto vo = out.values();
        for (size_t i = 0; i < vu.size(); ++i) vo[i] = spec.sigma(vu[i]) * dw;
        return out;
    }
    // finite_cylindrical: h_k(u) = coeffs[k] * h_base(u), so the mode sum
    // collapses to h_base(u) * sum_k coeffs[k] dW_k.
    double acc = 0.0;
    for (int k = 0; k < static_cast<int>(spec.mode_coeffs.size()); ++k)
        acc += spec.mode_coeffs[static_cast<size_t>(k)] * coarse_increment(path, level_dt, n, k);
    auto vu = u.values();
    auto vo = out.values();
    for (size_t i = 0; i < vu.size(); ++i) vo[i] = spec.h_base(vu[i]) * acc;
    return out;
}

}  // namespace stochfrac
