#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "triwalk/geometry.hpp"
#include "triwalk/special.hpp"

namespace triwalk {

/// Exponent pair of the half-plane-to-triangle map F_{gamma,delta}:
/// the regularized incomplete beta with parameters (gamma/pi, delta/pi).
struct TriangleMapParams {
    double gamma_p = 0.0;  // gamma / pi
    double delta_p = 0.0;  // delta / pi

    static TriangleMapParams from_angles(double gamma, double delta) {
        if (!(gamma > 0.0) || !(gamma < M_PI) || !(delta > 0.0) || !(delta < M_PI))
            throw std::domain_error("triangle map angles must lie in (0, pi)");
        return {gamma / M_PI, delta / M_PI};
    }
};

/// Reflection angles (alpha, beta) of the process and corner angles
/// (lambda, mu) of the triangle it runs in; nu = pi - lambda - mu.
struct HullLawSpec {
    double alpha = 0.0;
    double beta = 0.0;
    double lambda = 0.0;
    double mu = 0.0;

    double nu() const { return M_PI - lambda - mu; }

    void validate() const {
        if (!(alpha > 0.0) || !(alpha < M_PI) || !(beta > 0.0) || !(beta < M_PI))
            throw std::domain_error("reflection angles must lie in (0, pi)");
        if (!(lambda > 0.0) || !(mu > 0.0) || !(lambda + mu < M_PI))
            throw std::domain_error("triangle angles must be positive with lambda + mu < pi");
    }
};

/// F_{gamma,delta}(z): the Schwarz-Christoffel map of [0,1] onto the base
/// of T_{gamma,delta}, i.e. I_z(gamma', delta').
inline double triangle_map(double z, const TriangleMapParams& params) {
    return reg_inc_beta(z, params.gamma_p, params.delta_p);
}

inline double triangle_map_inverse(double x, const TriangleMapParams& params) {
    return reg_inc_beta_inv(x, params.gamma_p, params.delta_p);
}

namespace detail {

inline double fmap(double gamma, double delta, double z) {
    return triangle_map(z, TriangleMapParams::from_angles(gamma, delta));
}
inline double finv(double gamma, double delta, double x) {
    return triangle_map_inverse(x, TriangleMapParams::from_angles(gamma, delta));
}

// A point of [0,1] carried together with its complement, so values within
// a few ulp of either endpoint keep full precision through compositions.
struct Split {
    double val = 0.0;
    double comp = 1.0;
};

// Inverse map with the complement supplied by the reflection law
// 1 - F^-1_{gamma,delta}(x) = F^-1_{delta,gamma}(1-x).
inline Split finv_split(double gamma, double delta, double x, double xc) {
    return {finv(gamma, delta, x), finv(delta, gamma, xc)};
}
inline void check01(double x, const char* name) {
    if (!(x >= 0.0) || !(x <= 1.0)) throw std::domain_error(std::string(name) + " outside [0,1]");
}

// Map arguments that are in [0,1] analytically but can leak out by a few
// ulp through float cancellation.
inline double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

// F_{gamma,delta} evaluated from whichever of the argument and its
// complement is the better-conditioned representation.
inline double fmap_pair(double gamma, double delta, double arg, double comp) {
    arg = clamp01(arg);
    comp = clamp01(comp);
    if (arg <= comp) return reg_inc_beta(arg, gamma / M_PI, delta / M_PI);
    return 1.0 - reg_inc_beta(comp, delta / M_PI, gamma / M_PI);
}

}  // namespace detail

/// P[X <= x]: exit point law of RBM_{alpha,beta} in T_{lambda,mu}.
inline double cdf_x(double x, const HullLawSpec& s) {
    s.validate();
    detail::check01(x, "x");
    const detail::Split w = detail::finv_split(s.lambda, s.mu, x, 1.0 - x);
    return detail::fmap_pair(s.alpha, s.beta, w.val, w.comp);
}

/// P[Y <= y]: normalized depth of the hull on the left side.
inline double cdf_y(double y, const HullLawSpec& s) {
    s.validate();
    detail::check01(y, "y");
    const detail::Split w = detail::finv_split(s.nu(), s.lambda, y, 1.0 - y);
    return detail::fmap_pair(s.beta, s.alpha, w.val, w.comp);
}

/// P[Z <= z]: normalized depth of the hull on the right side.
inline double cdf_z(double z, const HullLawSpec& s) {
    s.validate();
    detail::check01(z, "z");
    const detail::Split w = detail::finv_split(s.nu(), s.mu, z, 1.0 - z);
    return detail::fmap_pair(s.alpha, s.beta, w.val, w.comp);
}

inline double joint_cdf_xz(double x, double z, const HullLawSpec& s) {
    s.validate();
    detail::check01(x, "x");
    detail::check01(z, "z");
    const detail::Split xh = detail::finv_split(s.lambda, s.mu, x, 1.0 - x);
    const detail::Split b = detail::finv_split(s.nu(), s.mu, z, 1.0 - z);
    // 1 - xh b = (1 - xh) + xh (1 - b)
    return detail::fmap_pair(s.alpha, s.beta, xh.val * b.val,
                             xh.comp + xh.val * b.comp);
}

inline double joint_cdf_xy(double x, double y, const HullLawSpec& s) {
    s.validate();
    detail::check01(x, "x");
    detail::check01(y, "y");
    const detail::Split a = detail::finv_split(s.nu(), s.lambda, y, 1.0 - y);
    const detail::Split w = detail::finv_split(s.mu, s.lambda, 1.0 - x, x);
    return detail::fmap_pair(s.beta, s.alpha, a.val, a.comp) -
           detail::fmap_pair(s.beta, s.alpha, w.val * a.val, w.comp + w.val * a.comp);
}

inline double joint_cdf_yz(double y, double z, const HullLawSpec& s) {
    s.validate();
    detail::check01(y, "y");
    detail::check01(z, "z");
    const detail::Split a = detail::finv_split(s.nu(), s.lambda, y, 1.0 - y);
    const detail::Split b = detail::finv_split(s.nu(), s.mu, z, 1.0 - z);
    if (a.val == 0.0 || b.val == 0.0) return 0.0;  // analytic limit: no hull depth
    const double denom = a.val * b.comp + b.val;   // a + b - a b
    return detail::fmap_pair(s.alpha, s.beta, b.val / denom, a.val * b.comp / denom) +
           detail::fmap_pair(s.beta, s.alpha, a.val / denom, b.val * a.comp / denom) - 1.0;
}

/// P[X <= x, Y <= y, Z <= z]. The side parameters enter through
/// a_hat = 1 - 1/F^-1_{nu,lambda}(y), b_hat = 1/F^-1_{nu,mu}(z); limits at
/// y = 0 or z = 0 are taken analytically (the mass vanishes). With
/// A = F^-1_{nu,lambda}(y) and B = F^-1_{nu,mu}(z), the two map arguments
/// rearrange to B(1 - A(1-x_hat))/D and B(1-A)/D over D = A(1-B) + B,
/// with complements A(1 - B x_hat)/D and A/D; evaluating from these forms
/// keeps the corners of the cube at full precision.
inline double joint_cdf_xyz(double x, double y, double z, const HullLawSpec& s) {
    s.validate();
    detail::check01(x, "x");
    detail::check01(y, "y");
    detail::check01(z, "z");
    const detail::Split a = detail::finv_split(s.nu(), s.lambda, y, 1.0 - y);
    const detail::Split b = detail::finv_split(s.nu(), s.mu, z, 1.0 - z);
    if (a.val == 0.0 || b.val == 0.0) return 0.0;
    const detail::Split xh = detail::finv_split(s.lambda, s.mu, x, 1.0 - x);
    const double denom = a.val * b.comp + b.val;
    const double arg1 = b.val * (1.0 - a.val * xh.comp) / denom;
    const double comp1 = a.val * (b.comp + b.val * xh.comp) / denom;
    const double arg2 = b.val * a.comp / denom;
    const double comp2 = a.val / denom;
    if (comp1 <= 0.5 && comp2 <= 0.5) {
        // Both arguments sit near 1; subtract the reflected tails directly.
        const double bp = s.beta / M_PI, ap = s.alpha / M_PI;
        return reg_inc_beta(detail::clamp01(comp2), bp, ap) -
               reg_inc_beta(detail::clamp01(comp1), bp, ap);
    }
    return detail::fmap_pair(s.alpha, s.beta, arg1, comp1) -
           detail::fmap_pair(s.alpha, s.beta, arg2, comp2);
}

/// Conditional probability that the right side is the last side visited
/// before exiting at x.
inline double last_visit_probability(double x, const HullLawSpec& s) {
    s.validate();
    detail::check01(x, "x");
    const detail::Split w = detail::finv_split(s.lambda, s.mu, x, 1.0 - x);
    return detail::fmap_pair(M_PI - s.alpha, M_PI - s.beta, w.val, w.comp);
}

/// Law of the base depth Z' of the corner-started companion process:
/// the RBM in the same triangle started from 1, stopped on [0, w],
/// reflected at angle alpha on (0,1) and beta on (w,1):
/// 1 - F_{beta,alpha}(F^-1_{mu,lambda}(1-z)). Equals cdf_x, which is the
/// hull-law identity. The inverse sits near 1 for small z, so it is
/// carried by its complement (the reflection law of the inverse) and the
/// outer map is evaluated from that complement.
inline double corner_process_cdf(double z, const HullLawSpec& s) {
    s.validate();
    detail::check01(z, "z");
    const detail::Split w = detail::finv_split(s.mu, s.lambda, 1.0 - z, z);
    // F_{beta,alpha}(w) from whichever representation of w is sharper; at
    // an exact tie prefer the complement, which keeps the identity with
    // cdf_x exact to the last bit.
    if (w.val < w.comp)
        return 1.0 - reg_inc_beta(w.val, s.beta / M_PI, s.alpha / M_PI);
    return reg_inc_beta(w.comp, s.alpha / M_PI, s.beta / M_PI);
}

struct HullTriple {
    double x = 0.0, y = 0.0, z = 0.0;
};

/// Push hull variables through the corner-fixing conformal identification
/// between T_{from} and T_{to} (reflection angles relabel accordingly).
inline HullTriple map_hull_between_triangles(const HullTriple& vars, const AnglePair& from,
                                             const AnglePair& to) {
    for (const AnglePair* t : {&from, &to}) {
        if (!(t->alpha > 0.0) || !(t->beta > 0.0) || !(t->alpha + t->beta < M_PI))
            throw std::domain_error("triangle angles must be positive with sum below pi");
    }
    detail::check01(vars.x, "x");
    detail::check01(vars.y, "y");
    detail::check01(vars.z, "z");
    const double nu1 = M_PI - from.alpha - from.beta;
    const double nu2 = M_PI - to.alpha - to.beta;
    const detail::Split hx = detail::finv_split(from.alpha, from.beta, vars.x, 1.0 - vars.x);
    const detail::Split hy = detail::finv_split(nu1, from.alpha, vars.y, 1.0 - vars.y);
    const detail::Split hz = detail::finv_split(nu1, from.beta, vars.z, 1.0 - vars.z);
    HullTriple out;
    out.x = detail::fmap_pair(to.alpha, to.beta, hx.val, hx.comp);
    out.y = detail::fmap_pair(nu2, to.alpha, hy.val, hy.comp);
    out.z = detail::fmap_pair(nu2, to.beta, hz.val, hz.comp);
    return out;
}

/// Probability that the upside-down process started at altitude y ever
/// reaches the base, for reflection angles with alpha + beta > pi:
/// z/(z+y) with z = -sin(alpha) sin(beta) / sin(alpha+beta).
inline double reach_probability(double y, const AnglePair& angles) {
    if (!(angles.alpha > 0.0) || !(angles.alpha < M_PI) || !(angles.beta > 0.0) ||
        !(angles.beta < M_PI))
        throw std::domain_error("angles must lie in (0, pi)");
    if (!(angles.alpha + angles.beta > M_PI))
        throw std::domain_error("reach probability requires alpha + beta > pi");
    if (!(y >= 0.0)) throw std::domain_error("altitude must be nonnegative");
    const double z =
        -std::sin(angles.alpha) * std::sin(angles.beta) / std::sin(angles.alpha + angles.beta);
    return z / (z + y);
}

}  // namespace triwalk
