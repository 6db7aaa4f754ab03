#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "triwalk/kernel.hpp"

namespace triwalk {

/// Exact probability mass over the truncated wedge, rows 0..M. Mass that
/// reaches row M stays there (absorption keeps the landing position).
struct RowDistribution {
    std::vector<std::vector<double>> mass;

    double total() const {
        double t = 0.0;
        for (const auto& row : mass)
            for (double m : row) t += m;
        return t;
    }
    double row_total(std::size_t k) const {
        double t = 0.0;
        for (double m : mass[k]) t += m;
        return t;
    }
};

inline RowDistribution initial_distribution(const WalkKernel& kernel) {
    RowDistribution d;
    d.mass.resize(kernel.absorbing_row + 1);
    for (int k = 0; k <= kernel.absorbing_row; ++k)
        d.mass[k].assign(kernel.row(k), 0.0);
    d.mass[0][0] = 1.0;
    return d;
}

inline RowDistribution propagate_step(const WalkKernel& kernel, const RowDistribution& from) {
    RowDistribution next;
    next.mass.resize(from.mass.size());
    for (std::size_t k = 0; k < from.mass.size(); ++k)
        next.mass[k].assign(from.mass[k].size(), 0.0);
    // Absorbed mass stays put.
    next.mass[kernel.absorbing_row] = from.mass[kernel.absorbing_row];
    for (int k = 0; k < kernel.absorbing_row; ++k) {
        for (long long j = 0; j < static_cast<long long>(from.mass[k].size()); ++j) {
            const double m = from.mass[k][j];
            if (m == 0.0) continue;
            for (const auto& e : transition_list(kernel, j, k))
                next.mass[k + e.dk][j + e.dj] += m * e.prob;
        }
    }
    return next;
}

/// Exact forward equation from the apex: returns distributions after
/// 0, 1, ..., n_steps steps.
inline std::vector<RowDistribution> propagate(const WalkKernel& kernel, int n_steps) {
    std::vector<RowDistribution> out;
    out.reserve(n_steps + 1);
    out.push_back(initial_distribution(kernel));
    for (int n = 0; n < n_steps; ++n) out.push_back(propagate_step(kernel, out.back()));
    return out;
}

/// Largest deviation of any row's conditional law from uniform, over rows
/// carrying more than mass_floor of probability.
inline double uniformity_deviation(const RowDistribution& dist, double mass_floor = 1e-12) {
    double dev = 0.0;
    for (const auto& row : dist.mass) {
        double t = 0.0;
        for (double m : row) t += m;
        if (t <= mass_floor) continue;
        const double target = 1.0 / static_cast<double>(row.size());
        for (double m : row) dev = std::max(dev, std::abs(m / t - target));
    }
    return dev;
}

/// Row-projection chain on {0..M}: p(k,k) = 2b, p(k,k+-1) = (a+c)N(k+-1)/N(k)
/// for 0 < k < M, p(0,1) = 1, absorbing at M.
struct Chain1D {
    int absorbing = 0;                  // M
    std::vector<double> up, stay, down; // indexed by k = 0..M-1
};

inline Chain1D chain1d(const WedgeGeometry& g, int m_row) {
    if (m_row < 1) throw std::invalid_argument("chain needs M >= 1");
    Chain1D ch;
    ch.absorbing = m_row;
    ch.up.assign(m_row, 0.0);
    ch.stay.assign(m_row, 0.0);
    ch.down.assign(m_row, 0.0);
    ch.up[0] = 1.0;
    const double ac = g.probs.a + g.probs.c;
    for (int k = 1; k < m_row; ++k) {
        const double nk = static_cast<double>(row_size(k, g.lattice));
        ch.up[k] = ac * static_cast<double>(row_size(k + 1, g.lattice)) / nk;
        ch.down[k] = ac * static_cast<double>(row_size(k - 1, g.lattice)) / nk;
        ch.stay[k] = 2.0 * g.probs.b;
    }
    return ch;
}

/// Distribution of the chain after n steps, started at 0; index M holds
/// the absorbed mass.
inline std::vector<double> chain_propagate(const Chain1D& ch, int n_steps) {
    std::vector<double> dist(ch.absorbing + 1, 0.0);
    dist[0] = 1.0;
    std::vector<double> next(dist.size());
    for (int n = 0; n < n_steps; ++n) {
        std::fill(next.begin(), next.end(), 0.0);
        next[ch.absorbing] = dist[ch.absorbing];
        for (int k = 0; k < ch.absorbing; ++k) {
            const double m = dist[k];
            if (m == 0.0) continue;
            next[k + 1] += m * ch.up[k];
            next[k] += m * ch.stay[k];
            if (k > 0) next[k - 1] += m * ch.down[k];
        }
        dist.swap(next);
    }
    return dist;
}

/// Max over rows of |row mass of the 2-D walk - 1-D chain mass| after n
/// steps, both started at the top. Exact zero up to roundoff.
inline double intertwining_residual(const WalkKernel& kernel, const Chain1D& chain, int n_steps) {
    if (chain.absorbing != kernel.absorbing_row)
        throw std::invalid_argument("kernel and chain use different truncation rows");
    const std::vector<double> marginal = chain_propagate(chain, n_steps);
    RowDistribution dist = initial_distribution(kernel);
    for (int n = 0; n < n_steps; ++n) dist = propagate_step(kernel, dist);
    double res = 0.0;
    for (int k = 0; k <= kernel.absorbing_row; ++k)
        res = std::max(res, std::abs(dist.row_total(k) - marginal[k]));
    return res;
}

namespace detail {

// Thomas solve of T x = rhs for a tridiagonal T given by its three
// diagonals (lower[i] = T[i][i-1], diag[i] = T[i][i], upper[i] = T[i][i+1]).
inline std::vector<double> solve_tridiagonal(std::vector<double> lower,
                                             std::vector<double> diag,
                                             std::vector<double> upper,
                                             std::vector<double> rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    std::vector<double> x(n);
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
    return x;
}

}  // namespace detail

/// Expected visits to each row before absorption, starting from row 0:
/// the first row of the fundamental matrix (I - Q)^-1, via a tridiagonal
/// solve of the transposed system.
struct GreenTable {
    std::vector<double> visits;   // g[k], k = 0..M-1
    double solve_residual = 0.0;  // max |(I-Q)^T g - e0|
};

inline GreenTable green_solve(const Chain1D& ch) {
    const int m = ch.absorbing;
    if (m < 2) throw std::invalid_argument("green_solve needs M >= 2");
    // (I-Q)^T g = e0 with Q the transient block: row k of Q has stay[k] on
    // the diagonal, up[k] at k+1, down[k] at k-1. Transposed, the k-th
    // equation couples g[k-1] (via up[k-1]) and g[k+1] (via down[k+1]).
    std::vector<double> lower(m, 0.0), diag(m, 0.0), upper(m, 0.0), rhs(m, 0.0);
    rhs[0] = 1.0;
    for (int k = 0; k < m; ++k) {
        diag[k] = 1.0 - ch.stay[k];
        if (k > 0) lower[k] = -ch.up[k - 1];
        if (k + 1 < m) upper[k] = -ch.down[k + 1];
    }
    GreenTable table;
    table.visits = detail::solve_tridiagonal(lower, diag, upper, rhs);
    for (int k = 0; k < m; ++k) {
        double r = diag[k] * table.visits[k];
        if (k > 0) r += lower[k] * table.visits[k - 1];
        if (k + 1 < m) r += upper[k] * table.visits[k + 1];
        table.solve_residual = std::max(table.solve_residual, std::abs(r - (k == 0 ? 1.0 : 0.0)));
    }
    if (table.solve_residual > 1e-8)
        throw std::runtime_error("green_solve residual exceeds 1e-8");
    return table;
}

/// Closed form for the expected visits to row k before absorption at M.
inline double green_closed(int k, int m_row, const WedgeGeometry& g) {
    if (k < 0 || k >= m_row) throw std::out_of_range("green_closed needs 0 <= k < M");
    const double ac = g.probs.a + g.probs.c;
    const double n1 = static_cast<double>(row_size(1, g.lattice));
    if (k == 0) return 1.0 + ac / n1 * green_closed(1, m_row, g);
    const double nk = static_cast<double>(row_size(k, g.lattice));
    const double nm = static_cast<double>(row_size(m_row, g.lattice));
    return nk * (1.0 - nk / nm) / ((n1 - 1.0) * ac);
}

/// Finite-M check of the time-reversal picture. Builds the reversed
/// kernel q[(j,k),(l,m)] = G[(l,m)] p[(l,m),(j,k)] / G[(j,k)] with
/// G[(j,k)] = g[k]/N(k), and returns the largest deviation of q from the
/// incoming transition probabilities over interior vertices in rows
/// M/4..M/2, plus the largest |Im| of the reversed expected step over
/// boundary vertices in the same rows. Both vanish as M grows.
inline double reversal_residual(const WalkKernel& kernel) {
    const auto& g = kernel.geom;
    const int m_row = kernel.absorbing_row;
    if (m_row < 2 * g.first_full + 4)
        throw std::invalid_argument("reversal check needs M >= 2 k0 + 4");
    const GreenTable green = green_solve(chain1d(g, m_row));
    const auto vertex_green = [&](long long j, long long k) {
        (void)j;
        return green.visits[k] / static_cast<double>(kernel.row(k));
    };

    const int k_lo = m_row / 4, k_hi = m_row / 2;
    // Incoming transitions per vertex for rows k_lo-1..k_hi+1.
    struct Incoming {
        long long src_j;
        int src_k;
        double prob;
        StepTriple step;
    };
    std::vector<std::vector<std::vector<Incoming>>> incoming(k_hi - k_lo + 1);
    for (int k = k_lo; k <= k_hi; ++k)
        incoming[k - k_lo].resize(kernel.row(k));
    for (int k = std::max(0, k_lo - 1); k <= std::min(m_row - 1, k_hi + 1); ++k) {
        for (long long j = 0; j < kernel.row(k); ++j) {
            for (const auto& e : transition_list(kernel, j, k)) {
                const int tk = k + e.dk;
                if (tk < k_lo || tk > k_hi) continue;
                incoming[tk - k_lo][j + e.dj].push_back({j, k, e.prob, e.step});
            }
        }
    }

    double max_q_dev = 0.0, max_im_dev = 0.0;
    for (int k = k_lo; k <= k_hi; ++k) {
        for (long long j = 0; j < kernel.row(k); ++j) {
            const auto cls = classify(kernel, j, k).cls;
            std::complex<double> mean_step;
            for (const auto& in : incoming[k - k_lo][j]) {
                const double q =
                    vertex_green(in.src_j, in.src_k) * in.prob / vertex_green(j, k);
                mean_step += q * (-step_vector(in.step, g.dims));
                if (cls == VertexClass::Interior)
                    max_q_dev = std::max(max_q_dev, std::abs(q - in.prob));
            }
            if (cls == VertexClass::LeftBoundary || cls == VertexClass::RightBoundary)
                max_im_dev = std::max(max_im_dev, std::abs(mean_step.imag()));
        }
    }
    return max_q_dev + max_im_dev;
}

/// A twice-differentiable scalar test function with its derivatives.
struct TestFunction {
    std::function<double(double)> f, df, d2f;
};

/// Discrete generator residual of the row chain against f'(x)/x + f''(x)/2
/// at scale n: rows are embedded via x = h k / (n sigma).
inline double bessel_generator_residual(const WedgeGeometry& g, int n,
                                        const TestFunction& fn, double x) {
    if (!(x > 0.0)) throw std::domain_error("x must be positive");
    const double sigma = std::sqrt(g.probs.sigma2);
    const double scale = g.dims.h / (n * sigma);
    const long long k = static_cast<long long>(std::floor(x / scale));
    if (k < 1) throw std::domain_error("n too small: embedded row below 1");
    const double ac = g.probs.a + g.probs.c;
    const double nk = static_cast<double>(row_size(k, g.lattice));
    const double nkp = static_cast<double>(row_size(k + 1, g.lattice));
    const double nkm = static_cast<double>(row_size(k - 1, g.lattice));
    const double applied =
        ac * (nkp * fn.f((k + 1) * scale) + nkm * fn.f((k - 1) * scale)) / nk +
        2.0 * g.probs.b * fn.f(k * scale) - fn.f(k * scale);
    const double target = fn.df(x) / x + 0.5 * fn.d2f(x);
    return std::abs(static_cast<double>(n) * n * applied - target);
}

/// Probability that the unrestricted row chain started at k hits row m
/// before row horizon_m, by tridiagonal solve of the Dirichlet problem.
/// As horizon_m grows this tends to N(m)/N(k), the probability of ever
/// hitting row m.
inline double hitting_probability_1d(const WedgeGeometry& g, int from_k, int target_m,
                                     int horizon_m) {
    if (!(target_m <= from_k && from_k < horizon_m))
        throw std::invalid_argument("need m <= k < horizon");
    if (from_k == target_m) return 1.0;
    const double ac = g.probs.a + g.probs.c;
    // Unknowns: rows target_m+1 .. horizon_m-1; h(target_m)=1, h(horizon)=0.
    const int n = horizon_m - target_m - 1;
    std::vector<double> lower(n, 0.0), diag(n, 0.0), upper(n, 0.0), rhs(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const int k = target_m + 1 + i;
        const double nk = static_cast<double>(row_size(k, g.lattice));
        const double up = ac * static_cast<double>(row_size(k + 1, g.lattice)) / nk;
        const double down = ac * static_cast<double>(row_size(k - 1, g.lattice)) / nk;
        diag[i] = up + down;  // 1 - stay
        if (i > 0) lower[i] = -down;
        else rhs[i] += down;  // boundary h(target_m) = 1
        if (i + 1 < n) upper[i] = -up;
    }
    const std::vector<double> h = detail::solve_tridiagonal(lower, diag, upper, rhs);
    return h[from_k - target_m - 1];
}

/// CSV with one line per (step, row): n,k,deviation of the conditional
/// row law from uniform.
inline void write_uniformity_csv(std::ostream& os, const WalkKernel& kernel, int n_steps,
                                 double mass_floor = 1e-12) {
    os << "n,k,deviation\n";
    char buf[64];
    RowDistribution dist = initial_distribution(kernel);
    for (int n = 0; n <= n_steps; ++n) {
        if (n > 0) dist = propagate_step(kernel, dist);
        for (int k = 0; k <= kernel.absorbing_row; ++k) {
            const double t = dist.row_total(k);
            if (t <= mass_floor) continue;
            double dev = 0.0;
            const double target = 1.0 / static_cast<double>(kernel.row(k));
            for (double m : dist.mass[k]) dev = std::max(dev, std::abs(m / t - target));
            std::snprintf(buf, sizeof buf, "%d,%d,%.17g\n", n, k, dev);
            os << buf;
        }
    }
}

/// CSV comparing the closed-form Green function against the linear solve.
inline void write_green_csv(std::ostream& os, const WedgeGeometry& g, int m_row) {
    const GreenTable table = green_solve(chain1d(g, m_row));
    os << "k,closed,solved,diff\n";
    char buf[96];
    for (int k = 0; k < m_row; ++k) {
        const double closed = green_closed(k, m_row, g);
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", k, closed, table.visits[k],
                      closed - table.visits[k]);
        os << buf;
    }
}

}  // namespace triwalk
