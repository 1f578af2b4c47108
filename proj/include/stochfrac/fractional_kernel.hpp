#pragma once

#include <span>
#include <vector>

namespace stochfrac {

// Normalization constant of the fractional Laplacian of order lambda in d=1:
// d_lambda = 2^(2*lambda) * Gamma((1+2*lambda)/2) / (sqrt(pi) * Gamma(1-lambda)).
double d_lambda(double lambda);

// Discrete fractional-Laplacian weight G_i (symmetric in i) on a grid of
// width dx, in closed form. The lambda = 1/2 branch is exact; for
// 0 < |lambda - 1/2| < 1e-4 the closed form cancels catastrophically and the
// quadrature route is used instead.
double fractional_weight(double lambda, double dx, long long i);

// Reference value of G_i by direct numerical integration of the defining
// double integral (inner z-integral in closed form, outer x-integral by
// adaptive Simpson) to absolute accuracy tol. Independent of the closed-form
// table. If the refinement budget runs out, the achieved accuracy is stored
// in *achieved when given, otherwise an exception reports it.
double weight_quadrature(double lambda, double dx, long long i, double tol,
                         double* achieved = nullptr);

// sum_{j >= n} G_j for n >= 1, via the zero-row-sum identity
// sum_{j >= n} G_j = -(G_0 + 2 sum_{j=1}^{n-1} G_j) / 2.
double weight_tail_sum(double lambda, double dx, long long n);

// Precomputed one-sided weight table with the partial/tail sums used by the
// truncated-domain correction. Immutable after construction; safe to share
// across threads.
class WeightKernel {
public:
    static WeightKernel build(double lambda, double dx, int i_max);

    double lambda() const { return lambda_; }
    double dx() const { return dx_; }
    double d_lambda_value() const { return d_lambda_; }
    int i_max() const { return static_cast<int>(weights_.size()) - 1; }

    // G_{|i|}; |i| must be <= i_max.
    double operator[](long long i) const;

    // S(B) = sum_{|j| < B} G_j, defined for 0 <= B <= i_max + 1.
    double central_sum(long long b) const;

    // T(B) = sum_{j >= B} G_j for 0 <= B <= i_max + 1. T(0) = G_0/2 (the row
    // sum splits into two half-lines both containing j = 0's half share);
    // T(B) = -S(B)/2 for B >= 1.
    double tail(long long b) const;

    std::span<const double> weights() const { return weights_; }

private:
    WeightKernel() = default;
    double lambda_ = 0.0;
    double dx_ = 0.0;
    double d_lambda_ = 0.0;
    std::vector<double> weights_;      // G_0 .. G_imax
    std::vector<double> central_sums_; // S(0) .. S(imax+1)
};

}  // namespace stochfrac
