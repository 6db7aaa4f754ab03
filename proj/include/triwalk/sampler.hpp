#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <vector>

#include "triwalk/exact.hpp"
#include "triwalk/kernel.hpp"
#include "triwalk/rng.hpp"

namespace triwalk {

enum class ContactSide : std::int8_t { None = 0, Left = 1, Right = 2 };

inline const char* to_string(ContactSide s) {
    switch (s) {
        case ContactSide::Left: return "Left";
        case ContactSide::Right: return "Right";
        default: return "None";
    }
}

struct PathConfig {
    WedgeGeometry geometry;
    int base_row = 0;           // M
    long long max_steps = 0;    // defaults to 100 M^2
    std::uint64_t master_seed = 0;

    static PathConfig make(const WedgeGeometry& g, int m_row, std::uint64_t seed,
                           long long cap = 0) {
        if (m_row <= first_full_row(g.lattice) + 1)
            throw std::invalid_argument("base row must exceed k0 + 1");
        PathConfig c;
        c.geometry = g;
        c.base_row = m_row;
        c.max_steps = cap > 0 ? cap : 100LL * m_row * m_row;
        if (c.max_steps < static_cast<long long>(m_row) * m_row)
            throw std::invalid_argument("step cap below M^2");
        c.master_seed = seed;
        return c;
    }
};

/// Per-path record: exit position on the base row, deepest side contacts,
/// the last side touched, and the step count.
struct HullSample {
    long long exit_j = -1;
    int deepest_left = 0;
    int deepest_right = 0;
    ContactSide last_side = ContactSide::None;
    long long steps = 0;
    bool complete = false;
};

struct HullVariables {
    double x = 0.0, y = 0.0, z = 0.0;
};

/// Normalized hull variables: X = exit_j/(N(M)-1), Y and Z the deepest
/// side-contact rows over M. Rows are equally spaced along each side, so
/// row-depth ratios equal side-length ratios.
inline HullVariables hull_variables(const HullSample& sample, const WalkKernel& kernel) {
    if (!sample.complete) throw std::invalid_argument("incomplete path has no hull variables");
    const int m_row = kernel.absorbing_row;
    HullVariables v;
    v.x = static_cast<double>(sample.exit_j) /
          static_cast<double>(kernel.row(m_row) - 1);
    v.y = static_cast<double>(sample.deepest_left) / m_row;
    v.z = static_cast<double>(sample.deepest_right) / m_row;
    return v;
}

namespace detail {

// Cumulative sampling tables, one per vertex class.
struct ClassTable {
    std::vector<double> cum;
    std::vector<int> dk;
    std::vector<int> dj;

    void build(const TransitionList& list) {
        cum.clear();
        dk.clear();
        dj.clear();
        double acc = 0.0;
        for (const auto& e : list) {
            acc += e.prob;
            cum.push_back(acc);
            dk.push_back(e.dk);
            dj.push_back(e.dj);
        }
        if (!cum.empty()) cum.back() = 1.0;  // guard against roundoff shortfall
    }

    // Index of the drawn entry.
    std::size_t pick(double r) const {
        std::size_t i = 0;
        while (i + 1 < cum.size() && r >= cum[i]) ++i;
        return i;
    }
};

struct SamplerTables {
    ClassTable apex, interior;
    std::vector<ClassTable> left, right;
    std::vector<std::vector<ClassTable>> top;  // [k][j], k < k0

    explicit SamplerTables(const WalkKernel& kernel) {
        apex.build(kernel.apex);
        interior.build(kernel.interior);
        left.resize(kernel.left_band.size());
        for (std::size_t j = 0; j < left.size(); ++j) left[j].build(kernel.left_band[j]);
        right.resize(kernel.right_band.size());
        for (std::size_t r = 0; r < right.size(); ++r) right[r].build(kernel.right_band[r]);
        top.resize(kernel.top_rows.size());
        for (std::size_t k = 1; k < kernel.top_rows.size(); ++k) {
            top[k].resize(kernel.top_rows[k].size());
            for (std::size_t j = 0; j < kernel.top_rows[k].size(); ++j)
                top[k][j].build(kernel.top_rows[k][j]);
        }
    }
};

}  // namespace detail

/// Simulate one path from the apex until absorption at the base row or
/// the step cap. Side contact means the vertex lies on a wedge ray
/// (j = 0 or j = N(k)-1, apex excluded); the base row counts.
inline HullSample run_path(const WalkKernel& kernel, const detail::SamplerTables& tables,
                           long long max_steps, Xoshiro256pp& rng) {
    const auto& g = kernel.geom;
    const int m_row = kernel.absorbing_row;
    const int k0 = g.first_full;
    const long long growth = g.row_growth;
    HullSample s;
    long long j = 0;
    int k = 0;
    while (s.steps < max_steps) {
        const detail::ClassTable* table;
        if (k == 0) {
            table = &tables.apex;
        } else if (k < k0) {
            table = &tables.top[k][j];
        } else if (j < g.band_left) {
            table = &tables.left[j];
        } else if (j >= growth * k + 1 - g.band_right) {
            table = &tables.right[growth * k - j];
        } else {
            table = &tables.interior;
        }
        const std::size_t pick = table->pick(rng.uniform());
        k += table->dk[pick];
        j += table->dj[pick];
        ++s.steps;
        if (k > 0) {
            if (j == 0) {
                s.last_side = ContactSide::Left;
                s.deepest_left = std::max(s.deepest_left, k);
            } else if (j == growth * k) {  // N(k) - 1
                s.last_side = ContactSide::Right;
                s.deepest_right = std::max(s.deepest_right, k);
            }
        }
        if (k == m_row) {
            s.exit_j = j;
            s.complete = true;
            break;
        }
    }
    return s;
}

inline HullSample run_path(const WalkKernel& kernel, std::uint64_t seed) {
    detail::SamplerTables tables(kernel);
    Xoshiro256pp rng(seed);
    return run_path(kernel, tables, 100LL * kernel.absorbing_row * kernel.absorbing_row, rng);
}

struct EnsembleResult {
    std::vector<HullSample> samples;
    long long incomplete = 0;
    long long no_side_contact = 0;
    double mean_steps = 0.0;
};

/// Run n seeded paths. Path i draws from the stream seeded by
/// (master_seed, i) as documented in rng.hpp, so the result is identical
/// for any worker count. Throws if more than 0.1% of paths hit the cap.
inline EnsembleResult run_ensemble(const PathConfig& config, long long n_paths,
                                   int threads = 1) {
    if (n_paths < 1) throw std::invalid_argument("need at least one path");
    const WalkKernel kernel = build_kernel(config.geometry, config.base_row);
    const detail::SamplerTables tables(kernel);
    EnsembleResult result;
    result.samples.resize(n_paths);

    const int workers = std::max(1, threads);
    std::atomic<long long> next_chunk{0};
    constexpr long long chunk = 256;
    auto worker = [&] {
        for (;;) {
            const long long begin = next_chunk.fetch_add(chunk);
            if (begin >= n_paths) return;
            const long long end = std::min(n_paths, begin + chunk);
            for (long long i = begin; i < end; ++i) {
                Xoshiro256pp rng = Xoshiro256pp::for_path(config.master_seed,
                                                          static_cast<std::uint64_t>(i));
                result.samples[i] = run_path(kernel, tables, config.max_steps, rng);
            }
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    // Deterministic reduction in path order with compensated summation.
    double sum = 0.0, comp = 0.0;
    for (const auto& s : result.samples) {
        if (!s.complete) ++result.incomplete;
        if (s.last_side == ContactSide::None) ++result.no_side_contact;
        const double term = static_cast<double>(s.steps) - comp;
        const double t = sum + term;
        comp = (t - sum) - term;
        sum = t;
    }
    result.mean_steps = sum / static_cast<double>(n_paths);
    if (result.incomplete * 1000 > n_paths)
        throw std::runtime_error("more than 0.1% of paths hit the step cap");
    return result;
}

/// Sorted-sample empirical CDF.
struct EmpiricalCdf {
    std::vector<double> sorted;

    explicit EmpiricalCdf(std::vector<double> values) : sorted(std::move(values)) {
        if (sorted.empty()) throw std::invalid_argument("empty sample");
        std::sort(sorted.begin(), sorted.end());
    }

    double operator()(double x) const {
        return static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), x) -
                                   sorted.begin()) /
               static_cast<double>(sorted.size());
    }
};

/// Kolmogorov-Smirnov distance between an empirical CDF and a continuous
/// reference CDF.
inline double ks_distance(const EmpiricalCdf& emp, const std::function<double(double)>& cdf) {
    const double n = static_cast<double>(emp.sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < emp.sorted.size(); ++i) {
        const double f = cdf(emp.sorted[i]);
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
        d = std::max(d, std::abs(static_cast<double>(i) / n - f));
    }
    return d;
}

/// KS distance between empirical counts over atoms 0..m-1 and reference
/// atom probabilities (sup over the shared atoms of the CDF difference).
inline double ks_distance_atoms(const std::vector<long long>& counts,
                                const std::vector<double>& probs) {
    if (counts.size() != probs.size() || counts.empty())
        throw std::invalid_argument("atom count mismatch");
    long long total = 0;
    for (long long c : counts) total += c;
    double emp = 0.0, ref = 0.0, d = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        emp += static_cast<double>(counts[i]) / static_cast<double>(total);
        ref += probs[i];
        d = std::max(d, std::abs(emp - ref));
    }
    return d;
}

/// KS distance of the exit indices against the exact uniform exit law on
/// the base row (Lemma-1-level check, free of discretization bias).
inline double exit_law_ks(const EnsembleResult& ensemble, const WalkKernel& kernel) {
    const long long width = kernel.row(kernel.absorbing_row);
    std::vector<long long> counts(width, 0);
    for (const auto& s : ensemble.samples)
        if (s.complete) ++counts[s.exit_j];
    std::vector<double> probs(width, 1.0 / static_cast<double>(width));
    return ks_distance_atoms(counts, probs);
}

struct BinEstimate {
    double midpoint = 0.0;
    double estimate = 0.0;
    double wilson_low = 0.0;
    double wilson_high = 1.0;
    long long count = 0;
};

/// Binned conditional frequency of last_side = Right given X in each bin,
/// with Wilson 99% intervals. Paths with no side contact are excluded
/// (their count is reported by the caller via the ensemble).
inline std::vector<BinEstimate> last_visit_conditional(const std::vector<HullSample>& samples,
                                                       const WalkKernel& kernel, int n_bins) {
    if (n_bins < 1) throw std::invalid_argument("need at least one bin");
    std::vector<long long> right(n_bins, 0), total(n_bins, 0);
    const double denom = static_cast<double>(kernel.row(kernel.absorbing_row) - 1);
    for (const auto& s : samples) {
        if (!s.complete || s.last_side == ContactSide::None) continue;
        const double x = static_cast<double>(s.exit_j) / denom;
        int bin = static_cast<int>(x * n_bins);
        bin = std::min(bin, n_bins - 1);
        ++total[bin];
        if (s.last_side == ContactSide::Right) ++right[bin];
    }
    std::vector<BinEstimate> out(n_bins);
    constexpr double z99 = 2.5758293035489004;  // 99.5th percentile of N(0,1)
    for (int b = 0; b < n_bins; ++b) {
        out[b].midpoint = (b + 0.5) / n_bins;
        out[b].count = total[b];
        if (total[b] == 0) continue;  // interval stays [0,1]
        const double n = static_cast<double>(total[b]);
        const double p = static_cast<double>(right[b]) / n;
        out[b].estimate = p;
        const double z2 = z99 * z99;
        const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
        const double half =
            z99 * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
        out[b].wilson_low = std::max(0.0, centre - half);
        out[b].wilson_high = std::min(1.0, centre + half);
    }
    return out;
}

/// Per-path CSV: seed_index,exit_j,x,y,z,last_side,steps. Incomplete
/// paths carry exit_j = -1 and empty hull columns.
inline void write_paths_csv(std::ostream& os, const EnsembleResult& ensemble,
                            const WalkKernel& kernel) {
    os << "seed_index,exit_j,X,Y,Z,last_side,steps\n";
    char buf[192];
    for (std::size_t i = 0; i < ensemble.samples.size(); ++i) {
        const auto& s = ensemble.samples[i];
        if (s.complete) {
            const HullVariables v = hull_variables(s, kernel);
            std::snprintf(buf, sizeof buf, "%zu,%lld,%.17g,%.17g,%.17g,%s,%lld\n", i, s.exit_j,
                          v.x, v.y, v.z, to_string(s.last_side), s.steps);
        } else {
            std::snprintf(buf, sizeof buf, "%zu,-1,,,,%s,%lld\n", i, to_string(s.last_side),
                          s.steps);
        }
        os << buf;
    }
}

}  // namespace triwalk
