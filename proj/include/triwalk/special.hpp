#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace triwalk {

inline double log_beta(double p, double q) {
    return std::lgamma(p) + std::lgamma(q) - std::lgamma(p + q);
}

namespace detail {

// Continued fraction for the incomplete beta function (modified Lentz).
// Converges quickly for z < (p+1)/(p+q+2); the caller reflects otherwise.
inline double beta_cf(double p, double q, double z) {
    constexpr double eps = 1e-16;
    constexpr double fpmin = 1e-300;
    const double qab = p + q, qap = p + 1.0, qam = p - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * z / qap;
    if (std::abs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        const int m2 = 2 * m;
        double aa = m * (q - m) * z / ((qam + m2) * (p + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(p + m) * (qab + m) * z / ((p + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) return h;
    }
    throw std::runtime_error("incomplete beta continued fraction failed to converge");
}

}  // namespace detail

/// Regularized incomplete beta function I_z(p, q).
inline double reg_inc_beta(double z, double p, double q) {
    if (!(p > 0.0) || !(q > 0.0)) throw std::domain_error("beta parameters must be positive");
    if (z < 0.0 || z > 1.0) throw std::domain_error("incomplete beta argument outside [0,1]");
    if (z == 0.0) return 0.0;
    if (z == 1.0) return 1.0;
    const double front =
        std::exp(p * std::log(z) + q * std::log1p(-z) - log_beta(p, q));
    if (z < (p + 1.0) / (p + q + 2.0)) return front * detail::beta_cf(p, q, z) / p;
    return 1.0 - front * detail::beta_cf(q, p, 1.0 - z) / q;
}

/// Density of the Beta(p, q) law at z.
inline double beta_pdf(double z, double p, double q) {
    if (z <= 0.0 || z >= 1.0) return std::numeric_limits<double>::infinity();
    return std::exp((p - 1.0) * std::log(z) + (q - 1.0) * std::log1p(-z) - log_beta(p, q));
}

/// Inverse of the regularized incomplete beta: the z with I_z(p, q) = x.
/// Bracketed Newton with bisection fallback; the closed-form derivative
/// z^{p-1}(1-z)^{q-1}/B(p,q) drives the updates. Converges to roundoff
/// (well inside the 1e-12 residual contract), which the composed triangle
/// maps need to hold their own 1e-10 targets.
inline double reg_inc_beta_inv(double x, double p, double q) {
    if (x < 0.0 || x > 1.0) throw std::domain_error("inverse beta argument outside [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    double lo = 0.0, hi = 1.0, z = 0.5;
    double best = z, best_f = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 200; ++it) {
        const double f = reg_inc_beta(z, p, q) - x;
        if (std::abs(f) < best_f) {
            best_f = std::abs(f);
            best = z;
        }
        if (f == 0.0) return z;
        if (f > 0.0) hi = z;
        else lo = z;
        const double deriv = beta_pdf(z, p, q);
        double zn = z - f / deriv;
        if (!(zn > lo) || !(zn < hi) || !std::isfinite(zn)) zn = 0.5 * (lo + hi);
        if (zn == z) zn = 0.5 * (lo + hi);
        z = zn;
        if (hi - lo < 4e-17 * (std::abs(lo) + std::abs(hi))) break;
    }
    return best;
}

}  // namespace triwalk
