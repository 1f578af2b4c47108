#include "stochfrac/fractional_kernel.hpp"

#include <cmath>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace stochfrac {

namespace {

// Lanczos approximation (g = 7, 9 coefficients), ~1e-13 relative accuracy on
// the range needed here (arguments in (0, 1.5]).
double lanczos_gamma(double x) {
    static const double coef[9] = {
        0.99999999999980993,    676.5203681218851,     -1259.1392167224028,
        771.32342877765313,     -176.61502916214059,   12.507343278686905,
        -0.13857109526572012,   9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5) {
        // Reflection formula.
        return M_PI / (std::sin(M_PI * x) * lanczos_gamma(1.0 - x));
    }
    x -= 1.0;
    double a = coef[0];
    const double t = x + 7.5;
    for (int i = 1; i < 9; ++i) a += coef[i] / (x + i);
    return std::sqrt(2.0 * M_PI) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

void check_lambda_dx(double lambda, double dx) {
    if (!(lambda > 0.0) || !(lambda < 1.0))
        throw std::invalid_argument("fractional kernel: lambda must lie in (0, 1)");
    if (!(dx > 0.0) || !std::isfinite(dx))
        throw std::invalid_argument("fractional kernel: dx must be positive and finite");
}

// Closed form at lambda = 1/2 (also the magnitude proxy near 1/2).
double weight_half(double dlam, long long i) {
    i = std::llabs(i);
    if (i == 0) return dlam * (2.0 + 2.0 * std::log(2.0));
    if (i == 1) return -dlam;
    const double di = static_cast<double>(i);
    return -dlam * std::log(di * di / (di * di - 1.0));
}

double weight_closed_general(double lambda, double dx, long long i, double dlam) {
    i = std::llabs(i);
    const long double p = 1.0L - 2.0L * static_cast<long double>(lambda);
    const long double cc =
        static_cast<long double>(dlam) * powl(static_cast<long double>(dx), p) /
        (2.0L * static_cast<long double>(lambda) * p);
    const long double two2l = powl(2.0L, 2.0L * static_cast<long double>(lambda));
    long double value;
    if (i == 0) {
        value = 2.0L * cc * (1.0L - static_cast<long double>(lambda) * two2l);
    } else if (i == 1) {
        value = cc * (powl(2.0L, p) + static_cast<long double>(lambda) * two2l - 2.0L);
    } else {
        // Second difference of j -> j^p; a small difference of large terms
        // for small lambda, hence the extended-precision accumulation.
        const long double di = static_cast<long double>(i);
        const long double bracket =
            -powl(di - 1.0L, p) + 2.0L * powl(di, p) - powl(di + 1.0L, p);
        value = -cc * bracket;
    }
    return static_cast<double>(value);
}

// mu([l, r] intersect {|z| > h/2}) with dmu = dlam |z|^(-1-2*lambda) dz.
double mu_segment(double dlam, double lambda, double h, double l, double r) {
    if (r <= l) return 0.0;
    const double cut = 0.5 * h;
    const double inv = dlam / (2.0 * lambda);
    double total = 0.0;
    if (r > cut) {
        const double a = std::max(l, cut);
        total += inv * (std::pow(a, -2.0 * lambda) - std::pow(r, -2.0 * lambda));
    }
    if (l < -cut) {
        const double b = std::min(r, -cut);
        total += inv * (std::pow(-b, -2.0 * lambda) - std::pow(-l, -2.0 * lambda));
    }
    return total;
}

struct SimpsonState {
    int evals = 0;
    int budget = 200000;
    double achieved = 0.0;
};

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth,
                        SimpsonState& st) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    st.evals += 2;
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || st.evals > st.budget) {
        st.achieved += std::abs(delta) / 15.0;
        return left + right + delta / 15.0;
    }
    if (std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, st) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, st);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol,
                 SimpsonState& st) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    st.evals += 3;
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48, st);
}

}  // namespace

double d_lambda(double lambda) {
    if (!(lambda > 0.0) || !(lambda < 1.0))
        throw std::invalid_argument("d_lambda: lambda must lie in (0, 1)");
    return std::pow(2.0, 2.0 * lambda) * lanczos_gamma(0.5 * (1.0 + 2.0 * lambda)) /
           (std::sqrt(M_PI) * lanczos_gamma(1.0 - lambda));
}

double weight_quadrature(double lambda, double dx, long long i, double tol, double* achieved) {
    check_lambda_dx(lambda, dx);
    if (!(tol > 0.0)) throw std::invalid_argument("weight_quadrature: tol must be positive");
    const double dlam = d_lambda(lambda);
    const double h = dx;
    const double xi = static_cast<double>(i) * h;
    const double mu_all = dlam / lambda * std::pow(0.5 * h, -2.0 * lambda);
    auto integrand = [&](double x) {
        const double inner = mu_segment(dlam, lambda, h, xi - 0.5 * h - x, xi + 0.5 * h - x);
        return (i == 0 ? mu_all : 0.0) - inner;
    };
    SimpsonState st;
    // Split at x = 0: the integrand has a kink there for |i| <= 1.
    double value = integrate(integrand, -0.5 * h, 0.0, 0.5 * tol, st) +
                   integrate(integrand, 0.0, 0.5 * h, 0.5 * tol, st);
    if (achieved) *achieved = st.achieved;
    if (st.achieved > tol && !achieved) {
        std::ostringstream msg;
        msg << "weight_quadrature: refinement budget exhausted, achieved accuracy "
            << st.achieved << " > tol " << tol;
        throw std::runtime_error(msg.str());
    }
    return value;
}

double fractional_weight(double lambda, double dx, long long i) {
    check_lambda_dx(lambda, dx);
    const double dlam = d_lambda(lambda);
    if (lambda == 0.5) return weight_half(dlam, i);
    if (std::abs(lambda - 0.5) < 1e-4) {
        // The generic closed form loses all digits as 1 - 2*lambda -> 0.
        const double scale = std::abs(weight_half(dlam, i));
        return weight_quadrature(lambda, dx, i, std::max(1e-10 * scale, 1e-300));
    }
    return weight_closed_general(lambda, dx, i, dlam);
}

double weight_tail_sum(double lambda, double dx, long long n) {
    check_lambda_dx(lambda, dx);
    if (n < 1) throw std::invalid_argument("weight_tail_sum: n must be >= 1");
    double s = fractional_weight(lambda, dx, 0);
    for (long long j = 1; j < n; ++j) s += 2.0 * fractional_weight(lambda, dx, j);
    return -0.5 * s;
}

WeightKernel WeightKernel::build(double lambda, double dx, int i_max) {
    check_lambda_dx(lambda, dx);
    if (i_max < 1) throw std::invalid_argument("WeightKernel: i_max must be >= 1");
    WeightKernel k;
    k.lambda_ = lambda;
    k.dx_ = dx;
    k.d_lambda_ = d_lambda(lambda);
    k.weights_.resize(static_cast<size_t>(i_max) + 1);
    for (int i = 0; i <= i_max; ++i)
        k.weights_[static_cast<size_t>(i)] = fractional_weight(lambda, dx, i);
    // S(B) = G_0 + 2 * sum_{j=1}^{B-1} G_j, S(0) = 0.
    k.central_sums_.resize(static_cast<size_t>(i_max) + 2);
    k.central_sums_[0] = 0.0;
    k.central_sums_[1] = k.weights_[0];
    for (int b = 2; b <= i_max + 1; ++b)
        k.central_sums_[static_cast<size_t>(b)] =
            k.central_sums_[static_cast<size_t>(b - 1)] + 2.0 * k.weights_[static_cast<size_t>(b - 1)];
    return k;
}

double WeightKernel::operator[](long long i) const {
    const long long a = std::llabs(i);
    if (a > i_max()) throw std::out_of_range("WeightKernel: offset beyond i_max");
    return weights_[static_cast<size_t>(a)];
}

double WeightKernel::central_sum(long long b) const {
    if (b < 0 || b > i_max() + 1)
        throw std::out_of_range("WeightKernel: central_sum range is [0, i_max+1]");
    return central_sums_[static_cast<size_t>(b)];
}

double WeightKernel::tail(long long b) const {
    if (b == 0) return 0.5 * weights_[0];
    return -0.5 * central_sum(b);
}

}  // namespace stochfrac
