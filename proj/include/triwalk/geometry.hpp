#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <tuple>
#include <utility>

namespace triwalk {

/// Wedge opening angles (radians). alpha is measured on the left side,
/// beta on the right side; the wedge is the sector
/// { z : alpha - pi < arg z < -beta } below the real axis.
struct AnglePair {
    double alpha = 0.0;
    double beta = 0.0;
};

/// Integer offsets (n_left, n_right) and lattice angles (phi, psi) that fit
/// a distorted triangular lattice onto a wedge, satisfying
///   cot(alpha) = n_left  * (cot phi + cot psi) + cot phi
///   cot(beta)  = n_right * (cot phi + cot psi) + cot psi
struct LatticeSolution {
    int n_left = 0;
    int n_right = 0;
    double phi = 0.0;
    double psi = 0.0;
};

/// Lattice dimensions: u = cos(phi) sin(psi), v = sin(phi) cos(psi),
/// h = sin(phi) sin(psi). Row spacing is h, horizontal pitch is u + v.
struct LatticeDims {
    double u = 0.0;
    double v = 0.0;
    double h = 0.0;
};

/// Interior step probabilities of the isotropic walk on the lattice.
/// Steps +-(u+ih) have probability a, +-(u+v) probability b, +-(v-ih)
/// probability c, with 2(a+b+c) = 1. sigma2 is the common per-step
/// variance of the real and imaginary coordinates, 2(a+c)h^2.
struct StepProbabilities {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double lambda = 0.0;
    double sigma2 = 0.0;
};

/// Everything derived from an angle pair: lattice fit, dimensions,
/// probabilities, boundary band widths and row bookkeeping.
struct WedgeGeometry {
    AnglePair angles;
    LatticeSolution lattice;
    LatticeDims dims;
    StepProbabilities probs;
    int band_left = 0;   // N_L, number of left boundary vertices per row
    int band_right = 0;  // N_R
    int first_full = 0;  // k0, first row containing all N_L + N_R band vertices
    int row_growth = 0;  // n_left + n_right + 1, per-row vertex increment
};

namespace detail {

// Cotangent as cos/sin (never via tan). Values within snap distance of
// zero are flattened to exactly zero so that right angles produce exact
// lattice solutions instead of 1e-16 leakage into the probabilities.
inline double cot_snapped(double angle) {
    const double c = std::cos(angle) / std::sin(angle);
    return std::abs(c) < 1e-13 ? 0.0 : c;
}

inline double snap_small(double x) { return std::abs(x) < 1e-13 ? 0.0 : x; }

// ceil with a one-sided tolerance: values within 1e-12 above an integer
// count as that integer. Keeps float noise in cot(pi/4) = 1 + 2e-16 from
// bumping the lattice offsets.
inline int ceil_tol(double x) { return static_cast<int>(std::ceil(x - 1e-12)); }

inline double angle_from_cot(double c) { return std::atan2(1.0, c); }

// Solve equations (phi)/(psi) of the lattice fit for given offsets.
inline std::pair<double, double> lattice_angles(int n_left, int n_right,
                                                double cot_a, double cot_b) {
    const double s = n_left + n_right + 1;
    const double cot_phi =
        snap_small(((n_right + 1) * cot_a - n_left * cot_b) / s);
    const double cot_psi =
        snap_small(((n_left + 1) * cot_b - n_right * cot_a) / s);
    return {angle_from_cot(cot_phi), angle_from_cot(cot_psi)};
}

// Obtuse-or-right alpha: cot_a <= 0 < cot_b.
inline LatticeSolution solve_obtuse(double cot_a, double cot_b) {
    const int k = ceil_tol(cot_a + cot_b);
    if (k < 1) throw std::domain_error("wedge too thin: cot(alpha)+cot(beta) <= 0");
    // Smallest positive l with l/(k+l) > -cot_a/cot_b, strict; ties advance,
    // so near-equality at float precision must advance as well.
    int l = 1;
    while (l * cot_b <= -cot_a * (k + l) + 1e-12 * (1.0 + std::abs(cot_a) * (k + l))) {
        if (++l > (1 << 24)) throw std::domain_error("lattice offset search diverged");
    }
    LatticeSolution sol;
    sol.n_left = -l;
    sol.n_right = k + l - 1;
    std::tie(sol.phi, sol.psi) = lattice_angles(sol.n_left, sol.n_right, cot_a, cot_b);
    return sol;
}

}  // namespace detail

/// Total number of vertices on row k: N(k) = (n_left + n_right + 1) k + 1.
inline long long row_size(long long k, const LatticeSolution& sol) {
    return static_cast<long long>(sol.n_left + sol.n_right + 1) * k + 1;
}

/// First row whose vertex count reaches the full band width N_L + N_R.
/// Zero when both offsets are nonnegative (bands fit from row 1 onward).
inline int first_full_row(const LatticeSolution& sol) {
    if (sol.n_left >= 0 && sol.n_right >= 0) return 0;
    const int diff = std::abs(sol.n_left - sol.n_right);
    const int s = sol.n_left + sol.n_right + 1;
    return (diff + s - 1) / s;  // ceil(diff / s)
}

/// Fit a lattice onto the wedge W_{alpha,beta}. Requires
/// alpha, beta in (0, pi) with alpha + beta < pi.
inline LatticeSolution solve_lattice(const AnglePair& angles) {
    const double a = angles.alpha, b = angles.beta;
    constexpr double margin = 1e-8;
    if (!(a > margin) || !(b > margin) || !(a < M_PI - margin) || !(b < M_PI - margin))
        throw std::domain_error("angles must lie in (0, pi)");
    if (!(a + b < M_PI - margin))
        throw std::domain_error("wedge requires alpha + beta < pi");

    const double cot_a = detail::cot_snapped(a);
    const double cot_b = detail::cot_snapped(b);

    if (cot_a <= 0.0) return detail::solve_obtuse(cot_a, cot_b);
    if (cot_b < 0.0) {
        // Mirror: solve the reflected wedge (beta, alpha), then swap sides.
        LatticeSolution m = detail::solve_obtuse(cot_b, cot_a);
        return {m.n_right, m.n_left, m.psi, m.phi};
    }

    // Both angles in (0, pi/2]. The max(0, .) clamp handles cot_b == 0
    // (beta a right angle), where it reproduces n_right = 0, psi = pi/2,
    // cot(phi) = cot(alpha)/(n_left + 1).
    LatticeSolution sol;
    sol.n_left = std::max(0, detail::ceil_tol(cot_a) - 1);
    sol.n_right = std::max(0, detail::ceil_tol(cot_b) - 1);
    std::tie(sol.phi, sol.psi) =
        detail::lattice_angles(sol.n_left, sol.n_right, cot_a, cot_b);
    return sol;
}

/// Lattice dimensions and interior step probabilities for a lattice
/// solution. Tiny negative probabilities from float cancellation (at
/// phi + psi = pi/2 or psi = pi/2 exactly) are clamped to zero.
inline std::pair<LatticeDims, StepProbabilities> lattice_params(const LatticeSolution& sol) {
    LatticeDims d;
    d.u = std::cos(sol.phi) * std::sin(sol.psi);
    d.v = std::sin(sol.phi) * std::cos(sol.psi);
    d.h = std::sin(sol.phi) * std::sin(sol.psi);
    if (!(d.h > 0.0)) throw std::domain_error("degenerate lattice: h <= 0");

    const double cot_phi = detail::cot_snapped(sol.phi);
    const double cot_psi = detail::cot_snapped(sol.psi);
    const double sum = cot_phi + cot_psi;
    const double inv_sin2_psi = 1.0 / (std::sin(sol.psi) * std::sin(sol.psi));

    StepProbabilities p;
    p.lambda = 0.5 / (cot_phi * sum + inv_sin2_psi);
    p.a = p.lambda * cot_psi * sum;
    p.b = p.lambda * (1.0 - cot_phi * cot_psi);
    p.c = p.lambda * cot_phi * sum;
    for (double* q : {&p.a, &p.b, &p.c}) {
        if (*q < 0.0) {
            if (*q < -1e-13) throw std::domain_error("negative step probability");
            *q = 0.0;
        }
    }
    p.sigma2 = 2.0 * (p.a + p.c) * d.h * d.h;
    return {d, p};
}

/// Assemble the full geometry record for an angle pair.
inline WedgeGeometry make_geometry(const AnglePair& angles) {
    WedgeGeometry g;
    g.angles = angles;
    g.lattice = solve_lattice(angles);
    std::tie(g.dims, g.probs) = lattice_params(g.lattice);
    g.band_left = std::abs(g.lattice.n_left) + (g.lattice.n_left >= 0 ? 1 : 0);
    g.band_right = std::abs(g.lattice.n_right) + (g.lattice.n_right >= 0 ? 1 : 0);
    g.first_full = first_full_row(g.lattice);
    g.row_growth = g.lattice.n_left + g.lattice.n_right + 1;
    if (row_size(std::max(1, g.first_full), g.lattice) < g.band_left + g.band_right)
        throw std::logic_error("first full row cannot hold both boundary bands");
    return g;
}

/// Leftmost vertex of row 1; the left ray of the wedge is {t * x_left}.
inline std::complex<double> x_left(const WedgeGeometry& g) {
    const auto& d = g.dims;
    return {-d.u - g.lattice.n_left * (d.u + d.v), -d.h};
}

/// Rightmost vertex of row 1; the right ray is {t * x_right}.
inline std::complex<double> x_right(const WedgeGeometry& g) {
    const auto& d = g.dims;
    return {d.v + g.lattice.n_right * (d.u + d.v), -d.h};
}

/// Planar position of vertex (j, k): k * x_left + j (u + v).
/// j = 0 lies on the left ray, j = N(k)-1 on the right ray.
inline std::complex<double> vertex_coordinate(long long j, long long k,
                                              const WedgeGeometry& g) {
    if (k < 0 || j < 0 || j >= row_size(k, g.lattice))
        throw std::out_of_range("vertex index outside row");
    const double jd = static_cast<double>(j);
    const double kd = static_cast<double>(k);
    return kd * x_left(g) + std::complex<double>(jd * (g.dims.u + g.dims.v), 0.0);
}

}  // namespace triwalk
