#include "stochfrac/flux.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stochfrac {

double clipped_burgers_flux(double u) {
    const double m = std::min(1.0, std::abs(u));
    return 0.5 * m * m;
}

double clipped_sigma(double u) {
    return std::max(u, 0.0) * std::max(1.0 - u, 0.0);
}

FluxSpec FluxSpec::burgers(FluxScheme scheme) {
    FluxSpec s;
    s.f = [](double u) { return 0.5 * u * u; };
    s.lipschitz = 1.0;  // on the admissible range [-1, 1]
    s.scheme = scheme;
    s.lf_theta = 1.0;
    s.critical_points = {0.0};
    // antiderivative of |f'(s)| = |s| is s|s|/2
    s.abs_slope_integral = [](double a, double b) {
        auto h = [](double x) { return 0.5 * x * std::abs(x); };
        return h(b) - h(a);
    };
    return s;
}

FluxSpec FluxSpec::clipped_burgers(FluxScheme scheme) {
    FluxSpec s;
    s.f = clipped_burgers_flux;
    s.lipschitz = 1.0;
    s.scheme = scheme;
    s.lf_theta = 1.0;
    s.critical_points = {-1.0, 0.0, 1.0};  // f' vanishes at 0 and beyond +-1
    s.abs_slope_integral = [](double a, double b) {
        auto h = [](double x) {
            const double m = std::min(1.0, std::abs(x));
            return std::copysign(0.5 * m * m, x);
        };
        return h(b) - h(a);
    };
    return s;
}

double numerical_flux(const FluxSpec& spec, double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b))
        throw std::invalid_argument("numerical_flux: arguments must be finite");
    switch (spec.scheme) {
        case FluxScheme::godunov: {
            const double lo = std::min(a, b);
            const double hi = std::max(a, b);
            double best = spec.f(a);
            const bool take_min = (a <= b);
            auto consider = [&](double u) {
                const double v = spec.f(u);
                if (take_min ? (v < best) : (v > best)) best = v;
            };
            consider(b);
            for (double c : spec.critical_points)
                if (c > lo && c < hi) consider(c);
            return best;
        }
        case FluxScheme::engquist_osher: {
            if (!spec.abs_slope_integral)
                throw std::invalid_argument(
                    "numerical_flux: Engquist-Osher needs abs_slope_integral");
            return 0.5 * (spec.f(a) + spec.f(b)) - 0.5 * spec.abs_slope_integral(a, b);
        }
        case FluxScheme::lax_friedrichs:
            return 0.5 * (spec.f(a) + spec.f(b)) - 0.5 * spec.lf_theta * (b - a);
    }
    throw std::logic_error("numerical_flux: unknown scheme");
}

}  // namespace stochfrac
