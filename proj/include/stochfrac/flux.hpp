#pragma once

#include <functional>
#include <vector>

namespace stochfrac {

enum class FluxScheme { godunov, engquist_osher, lax_friedrichs };

// A monotone two-point numerical flux built from a scalar flux f:
// consistent (F(u,u) = f(u)), nondecreasing in the first argument and
// nonincreasing in the second.
struct FluxSpec {
    std::function<double(double)> f;
    double lipschitz = 1.0;  // Lipschitz constant of f on the admissible range
    FluxScheme scheme = FluxScheme::godunov;
    double lf_theta = 1.0;   // Lax-Friedrichs viscosity, must be >= lipschitz

    // Interior critical points of f; Godunov takes interval extrema over the
    // endpoints plus these. An explicit list avoids root-finding.
    std::vector<double> critical_points;

    // Signed integral int_a^b |f'(s)| ds (Engquist-Osher).
    std::function<double(double, double)> abs_slope_integral;

    static FluxSpec burgers(FluxScheme scheme = FluxScheme::godunov);
    static FluxSpec clipped_burgers(FluxScheme scheme = FluxScheme::godunov);
};

double numerical_flux(const FluxSpec& spec, double a, double b);

// f(u) = (1/2) [min(1, |u|)]^2 -- Burgers flux clipped to be globally
// Lipschitz, as used when solutions stay in [0, 1].
double clipped_burgers_flux(double u);

// sigma(u) = u^+ (1-u)^+; vanishes outside [0, 1], maximum 1/4 at u = 1/2.
double clipped_sigma(double u);

}  // namespace stochfrac
