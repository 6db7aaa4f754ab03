#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "triwalk/geometry.hpp"

namespace triwalk {

/// Lattice displacement expressed in the step basis:
/// step = cu * u + cv * v + i * ch * h, with ch in {-1, 0, +1}.
/// Every legal lattice displacement has cu - cv == ch.
struct StepTriple {
    int cu = 0;
    int cv = 0;
    int ch = 0;

    friend bool operator<(const StepTriple& a, const StepTriple& b) {
        return std::tie(a.cu, a.cv, a.ch) < std::tie(b.cu, b.cv, b.ch);
    }
    friend bool operator==(const StepTriple& a, const StepTriple& b) {
        return a.cu == b.cu && a.cv == b.cv && a.ch == b.ch;
    }
};

/// One outgoing transition: geometric step, probability and the exact
/// index displacement it induces. dk = -ch; dj = cv + dk * n_left.
struct TransitionEntry {
    StepTriple step;
    double prob = 0.0;
    int dk = 0;
    int dj = 0;
};

using TransitionList = std::vector<TransitionEntry>;

enum class Side { Left, Right };

enum class VertexClass { Apex, TopBlock, LeftBoundary, RightBoundary, Interior, Absorbing };

struct ClassifiedVertex {
    VertexClass cls = VertexClass::Interior;
    int band = 0;  // band index for boundary classes (from the side)
};

inline std::complex<double> step_vector(const StepTriple& t, const LatticeDims& d) {
    return {t.cu * d.u + t.cv * d.v, t.ch * d.h};
}

namespace detail {

inline void finalize_entries(std::vector<std::pair<StepTriple, double>>& raw,
                             int n_left, TransitionList& out) {
    // Merge duplicate steps (the boundary table cases overlap at small n)
    // and drop zero entries.
    std::map<StepTriple, double> merged;
    for (const auto& [step, p] : raw)
        if (p != 0.0) merged[step] += p;
    out.clear();
    out.reserve(merged.size());
    for (const auto& [step, p] : merged) {
        TransitionEntry e;
        e.step = step;
        e.prob = p;
        e.dk = -step.ch;
        e.dj = step.cv + e.dk * n_left;
        out.push_back(e);
    }
}

// Left boundary table for band offset n >= 0, band index j in 0..n, with
// the step weights passed in so the mirrored variants can swap a and c.
inline std::vector<std::pair<StepTriple, double>> left_table_raw(int n, int j, double a,
                                                                 double b, double c) {
    if (j < 0 || j > n) throw std::out_of_range("band index outside boundary band");
    const double w = 1.0 / (n + 1);
    std::vector<std::pair<StepTriple, double>> raw;
    raw.push_back({{n - j + 1, n - j, +1}, a * w});              // to (0, k-1)
    raw.push_back({{0, 0, 0}, (2 * (n - j) + 1) * b * w});       // stay
    raw.push_back({{1, 1, 0}, (j + 1) * b * w});                 // right neighbour
    raw.push_back({{-1, -1, 0}, j * b * w});                     // left neighbour
    raw.push_back({{n - j, n + 1 - j, -1}, c * w});              // to (2n+1, k+1)
    if (j == 0) {
        raw.push_back({{-1, 0, -1}, (a + c) * n * w});           // to (n, k+1)
        raw.push_back({{-1 - n, -n, -1}, a + c});                // to (0, k+1)
    } else if (j == n) {
        raw.push_back({{-1, 0, -1}, a + c});                     // to (2n, k+1)
        for (int m = 0; m < n; ++m)
            raw.push_back({{-2 * m - 2, -2 * m - 1, -1}, (a + c) * w});
    } else {
        raw.push_back({{-1 - n, -n, -1}, (a + c) * n * w});      // to (j, k+1)
        raw.push_back({{-1, 0, -1}, (a + c) * n * w});           // to (n+j, k+1)
        raw.push_back({{-1 - (n - j), -(n - j), -1}, (a + c) * w});  // to (2j, k+1)
    }
    return raw;
}

}  // namespace detail

/// Interior six-step law.
inline TransitionList interior_transitions(const WedgeGeometry& g) {
    const auto& p = g.probs;
    std::vector<std::pair<StepTriple, double>> raw = {
        {{+1, 0, +1}, p.a}, {{-1, 0, -1}, p.a},  // +-(u + ih)
        {{+1, +1, 0}, p.b}, {{-1, -1, 0}, p.b},  // +-(u + v)
        {{0, +1, -1}, p.c}, {{0, -1, +1}, p.c},  // +-(v - ih)
    };
    TransitionList out;
    detail::finalize_entries(raw, g.lattice.n_left, out);
    return out;
}

/// Apex rule: uniform over the N(1) vertices of row 1.
inline TransitionList apex_transitions(const WedgeGeometry& g) {
    const int n1 = static_cast<int>(row_size(1, g.lattice));
    const double p = 1.0 / n1;
    std::vector<std::pair<StepTriple, double>> raw;
    for (int j = 0; j < n1; ++j)
        raw.push_back({{j - 1 - g.lattice.n_left, j - g.lattice.n_left, -1}, p});
    TransitionList out;
    detail::finalize_entries(raw, g.lattice.n_left, out);
    return out;
}

/// Transitions from vertex j of a short top row k (1 <= k < k0):
/// (a+c)/N(k) to every vertex of rows k-1 and k+1, b to each existing
/// horizontal neighbour, self-loop b at the two edge vertices.
inline TransitionList top_block_transitions(int j, int k, const WedgeGeometry& g) {
    if (k < 1 || k >= g.first_full)
        throw std::out_of_range("top block rows are 1..k0-1");
    const int nl = g.lattice.n_left;
    const int nk = static_cast<int>(row_size(k, g.lattice));
    if (j < 0 || j >= nk) throw std::out_of_range("vertex index outside row");
    const double pv = (g.probs.a + g.probs.c) / nk;
    std::vector<std::pair<StepTriple, double>> raw;
    const int n_up = static_cast<int>(row_size(k - 1, g.lattice));
    for (int l = 0; l < n_up; ++l)
        raw.push_back({{1 + nl + l - j, nl + l - j, +1}, pv});
    const int n_dn = static_cast<int>(row_size(k + 1, g.lattice));
    for (int l = 0; l < n_dn; ++l)
        raw.push_back({{-1 - nl + l - j, -nl + l - j, -1}, pv});
    const double b = g.probs.b;
    if (j > 0) raw.push_back({{-1, -1, 0}, b});
    if (j < nk - 1) raw.push_back({{1, 1, 0}, b});
    if (j == 0 || j == nk - 1) raw.push_back({{0, 0, 0}, b});
    TransitionList out;
    detail::finalize_entries(raw, nl, out);
    return out;
}

/// Point reflection of a wedge's boundary rule (used for negative offsets).
inline TransitionList negative_side_transitions(Side side, int band, const WedgeGeometry& g);

/// Left boundary rule at band index j (counted from the left). For
/// n_left >= 0 this is the explicit table; n_left = 0 collapses to the
/// five-entry rule {stay b, right b, up a, down-left a+c, down-right c}.
/// Negative n_left delegates to the point-reflected right rule.
inline TransitionList left_boundary_transitions(int band, const WedgeGeometry& g) {
    const int nl = g.lattice.n_left;
    if (nl < 0) return negative_side_transitions(Side::Left, band, g);
    auto raw = detail::left_table_raw(nl, band, g.probs.a, g.probs.b, g.probs.c);
    TransitionList out;
    detail::finalize_entries(raw, nl, out);
    return out;
}

/// Right boundary rule at band index counted from the right. Mirror image
/// of the left rule with offset n_right: swap u and v, swap a and c,
/// negate real parts, count positions from the right.
inline TransitionList right_boundary_transitions(int band, const WedgeGeometry& g) {
    const int nr = g.lattice.n_right;
    if (nr < 0) return negative_side_transitions(Side::Right, band, g);
    auto raw = detail::left_table_raw(nr, band, g.probs.c, g.probs.b, g.probs.a);
    for (auto& [step, p] : raw) step = {-step.cv, -step.cu, step.ch};
    TransitionList out;
    detail::finalize_entries(raw, g.lattice.n_left, out);
    return out;
}

inline TransitionList negative_side_transitions(Side side, int band, const WedgeGeometry& g) {
    const int n = side == Side::Left ? g.lattice.n_left : g.lattice.n_right;
    if (n >= 0) throw std::invalid_argument("negative-side rule requires a negative offset");
    // A side with offset n < 0 coincides with the opposite side of a wedge
    // with offset -n-1; each step S here has the probability of -S there,
    // at the same band index counted from that side.
    const int m = -n - 1;
    std::vector<std::pair<StepTriple, double>> raw;
    if (side == Side::Left) {
        // Point-reflected right rule = swap u<->v, flip the vertical sign,
        // swap a<->c relative to the left table with offset m.
        raw = detail::left_table_raw(m, band, g.probs.c, g.probs.b, g.probs.a);
        for (auto& [step, p] : raw) step = {step.cv, step.cu, -step.ch};
    } else {
        raw = detail::left_table_raw(m, band, g.probs.a, g.probs.b, g.probs.c);
        for (auto& [step, p] : raw) step = {-step.cu, -step.cv, -step.ch};
    }
    TransitionList out;
    detail::finalize_entries(raw, g.lattice.n_left, out);
    return out;
}

/// Complete transition law of the uniform walk on the truncated wedge,
/// absorbing at row M. Band tables are shared across rows; the short top
/// rows (below k0) are materialized per vertex.
struct WalkKernel {
    WedgeGeometry geom;
    int absorbing_row = 0;  // M
    TransitionList apex;
    TransitionList interior;
    std::vector<TransitionList> left_band;              // index: band from left
    std::vector<TransitionList> right_band;             // index: band from right
    std::vector<std::vector<TransitionList>> top_rows;  // [k][j] for 1 <= k < k0

    long long row(long long k) const { return row_size(k, geom.lattice); }
};

inline ClassifiedVertex classify(const WalkKernel& kernel, long long j, long long k) {
    const auto& g = kernel.geom;
    if (k < 0 || j < 0 || j >= kernel.row(k)) throw std::out_of_range("vertex outside wedge");
    if (k >= kernel.absorbing_row) return {VertexClass::Absorbing, 0};
    if (k == 0) return {VertexClass::Apex, 0};
    if (k < g.first_full) return {VertexClass::TopBlock, 0};
    if (j < g.band_left) return {VertexClass::LeftBoundary, static_cast<int>(j)};
    const long long from_right = kernel.row(k) - 1 - j;
    if (from_right < g.band_right)
        return {VertexClass::RightBoundary, static_cast<int>(from_right)};
    return {VertexClass::Interior, 0};
}

inline const TransitionList& transition_list(const WalkKernel& kernel, long long j, long long k) {
    static const TransitionList empty;
    const ClassifiedVertex c = classify(kernel, j, k);
    switch (c.cls) {
        case VertexClass::Absorbing: return empty;
        case VertexClass::Apex: return kernel.apex;
        case VertexClass::TopBlock: return kernel.top_rows[k][j];
        case VertexClass::LeftBoundary: return kernel.left_band[c.band];
        case VertexClass::RightBoundary: return kernel.right_band[c.band];
        case VertexClass::Interior: return kernel.interior;
    }
    return empty;
}

inline WalkKernel build_kernel(const WedgeGeometry& g, int absorbing_row) {
    if (absorbing_row < 2 || absorbing_row <= g.first_full)
        throw std::invalid_argument("absorbing row must exceed max(k0, 1)");
    WalkKernel kernel;
    kernel.geom = g;
    kernel.absorbing_row = absorbing_row;
    kernel.apex = apex_transitions(g);
    kernel.interior = interior_transitions(g);
    for (int j = 0; j < g.band_left; ++j)
        kernel.left_band.push_back(left_boundary_transitions(j, g));
    for (int r = 0; r < g.band_right; ++r)
        kernel.right_band.push_back(right_boundary_transitions(r, g));
    kernel.top_rows.resize(std::max(1, g.first_full));
    for (int k = 1; k < g.first_full; ++k) {
        const int nk = static_cast<int>(row_size(k, g.lattice));
        for (int j = 0; j < nk; ++j)
            kernel.top_rows[k].push_back(top_block_transitions(j, k, g));
    }
    // Every target of every list must be a valid vertex.
    for (int k = 0; k < absorbing_row; ++k) {
        const long long nk = kernel.row(k);
        for (long long j = 0; j < nk; ++j) {
            for (const auto& e : transition_list(kernel, j, k)) {
                const long long tk = k + e.dk, tj = j + e.dj;
                if (tk < 0 || tj < 0 || tj >= kernel.row(tk))
                    throw std::logic_error("transition target outside wedge");
            }
        }
    }
    return kernel;
}

/// Common expected step of a boundary side (rows >= k0). Throws if the
/// band members disagree beyond 1e-13, which would break the walk's
/// convergence to a single reflection direction.
inline std::complex<double> expected_boundary_step(const WalkKernel& kernel, Side side) {
    const auto& g = kernel.geom;
    const auto& band = side == Side::Left ? kernel.left_band : kernel.right_band;
    std::complex<double> common;
    for (std::size_t j = 0; j < band.size(); ++j) {
        std::complex<double> mean;
        for (const auto& e : band[j]) mean += e.prob * step_vector(e.step, g.dims);
        if (j == 0) {
            common = mean;
        } else if (std::abs(mean - common) > 1e-13) {
            throw std::logic_error("boundary band has non-constant expected step");
        }
    }
    if (std::abs(common) < 1e-12)
        throw std::logic_error("degenerate boundary rule: zero expected step");
    return common;
}

/// Reflection angles of the scaling limit, measured from each side:
/// theta_L = arg(-E_left[S]) - alpha, theta_R = -arg(E_right[S]) - beta,
/// reduced to (0, pi).
inline std::pair<double, double> reflection_angles(const WalkKernel& kernel) {
    const auto reduce = [](double t) {
        while (t <= 0.0) t += M_PI;
        while (t > M_PI) t -= M_PI;
        return t;
    };
    const std::complex<double> el = expected_boundary_step(kernel, Side::Left);
    const std::complex<double> er = expected_boundary_step(kernel, Side::Right);
    const double theta_l = std::arg(-el) - kernel.geom.angles.alpha;
    const double theta_r = -std::arg(er) - kernel.geom.angles.beta;
    return {reduce(theta_l), reduce(theta_r)};
}

/// Numerical audit of the kernel invariants. All maxima should be at
/// float-roundoff level for a correctly assembled kernel.
struct KernelAudit {
    double max_row_sum_dev = 0.0;     // |sum of probabilities - 1|
    double max_step_mismatch = 0.0;   // |step vector - coordinate difference|
    double max_incoming_above = 0.0;  // |mass from row above - (a+c)|, rows >= 2
    double max_incoming_apex = 0.0;   // |mass from apex to row 1 - 1/N(1)|
    double max_incoming_below = 0.0;  // |mass from row below - (a+c)|
    double max_incoming_same = 0.0;   // |mass from own row - 2b|, rows >= 1
    double max_band_step_dev = 0.0;   // expected-step spread across each band

    double worst() const {
        return std::max({max_row_sum_dev, max_step_mismatch, max_incoming_above,
                         max_incoming_apex, max_incoming_below, max_incoming_same,
                         max_band_step_dev});
    }
};

inline KernelAudit audit_kernel(const WalkKernel& kernel) {
    const auto& g = kernel.geom;
    const int m_row = kernel.absorbing_row;
    const double ac = g.probs.a + g.probs.c;
    KernelAudit audit;

    // Incoming mass per vertex, split by source row offset (-1, 0, +1).
    std::vector<std::vector<double>> in_above(m_row + 1), in_same(m_row + 1),
        in_below(m_row + 1);
    for (int k = 0; k <= m_row; ++k) {
        in_above[k].assign(kernel.row(k), 0.0);
        in_same[k].assign(kernel.row(k), 0.0);
        in_below[k].assign(kernel.row(k), 0.0);
    }

    for (int k = 0; k < m_row; ++k) {
        const long long nk = kernel.row(k);
        for (long long j = 0; j < nk; ++j) {
            const auto& list = transition_list(kernel, j, k);
            double sum = 0.0;
            const auto z = vertex_coordinate(j, k, g);
            for (const auto& e : list) {
                sum += e.prob;
                const auto dz = vertex_coordinate(j + e.dj, k + e.dk, g) - z;
                audit.max_step_mismatch = std::max(
                    audit.max_step_mismatch, std::abs(dz - step_vector(e.step, g.dims)));
                if (e.dk == -1) in_below[k - 1][j + e.dj] += e.prob;
                else if (e.dk == 0) in_same[k][j + e.dj] += e.prob;
                else in_above[k + 1][j + e.dj] += e.prob;
            }
            audit.max_row_sum_dev = std::max(audit.max_row_sum_dev, std::abs(sum - 1.0));
        }
    }

    for (int k = 0; k <= m_row; ++k) {
        const long long nk = kernel.row(k);
        for (long long j = 0; j < nk; ++j) {
            if (k == 1) {
                audit.max_incoming_apex = std::max(
                    audit.max_incoming_apex,
                    std::abs(in_above[k][j] - 1.0 / static_cast<double>(kernel.row(1))));
            } else if (k >= 2 && k <= m_row - 1) {
                audit.max_incoming_above =
                    std::max(audit.max_incoming_above, std::abs(in_above[k][j] - ac));
            }
            if (k <= m_row - 2) {
                audit.max_incoming_below =
                    std::max(audit.max_incoming_below, std::abs(in_below[k][j] - ac));
            }
            if (k >= 1 && k <= m_row - 1) {
                audit.max_incoming_same = std::max(audit.max_incoming_same,
                                                   std::abs(in_same[k][j] - 2.0 * g.probs.b));
            }
        }
    }

    for (Side side : {Side::Left, Side::Right}) {
        const auto& band = side == Side::Left ? kernel.left_band : kernel.right_band;
        std::complex<double> first;
        for (std::size_t j = 0; j < band.size(); ++j) {
            std::complex<double> mean;
            for (const auto& e : band[j]) mean += e.prob * step_vector(e.step, g.dims);
            if (j == 0) first = mean;
            else audit.max_band_step_dev = std::max(audit.max_band_step_dev, std::abs(mean - first));
        }
    }
    return audit;
}

}  // namespace triwalk
