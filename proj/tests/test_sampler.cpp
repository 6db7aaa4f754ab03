#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "triwalk/exact.hpp"
#include "triwalk/sampler.hpp"

using namespace triwalk;

namespace {

const AnglePair kEquilateral{M_PI / 3, M_PI / 3};

// Exit-position masses on the base row, by exact propagation until the
// transient mass is exhausted.
std::vector<double> exact_exit_masses(const WalkKernel& kernel, double residual = 1e-9) {
    RowDistribution dist = initial_distribution(kernel);
    for (int n = 0; n < 100000; ++n) {
        if (1.0 - dist.row_total(kernel.absorbing_row) < residual) break;
        dist = propagate_step(kernel, dist);
    }
    return dist.mass[kernel.absorbing_row];
}

// Expected absorption time from the apex, solving (I - Q) t = 1 on the
// row chain.
double exact_mean_steps(const WedgeGeometry& g, int m_row) {
    const Chain1D ch = chain1d(g, m_row);
    std::vector<double> lower(m_row, 0.0), diag(m_row, 0.0), upper(m_row, 0.0),
        rhs(m_row, 1.0);
    for (int k = 0; k < m_row; ++k) {
        diag[k] = 1.0 - ch.stay[k];
        if (k > 0) lower[k] = -ch.down[k];
        if (k + 1 < m_row) upper[k] = -ch.up[k];
    }
    return detail::solve_tridiagonal(lower, diag, upper, rhs)[0];
}

}  // namespace

TEST_CASE("ensembles are reproducible for any worker count", "[sampler]") {
    const PathConfig config = PathConfig::make(make_geometry(kEquilateral), 20, 1234);
    const EnsembleResult serial = run_ensemble(config, 5000, 1);
    const EnsembleResult threaded = run_ensemble(config, 5000, 3);
    REQUIRE(serial.samples.size() == threaded.samples.size());
    for (std::size_t i = 0; i < serial.samples.size(); ++i) {
        CHECK(serial.samples[i].exit_j == threaded.samples[i].exit_j);
        CHECK(serial.samples[i].steps == threaded.samples[i].steps);
        CHECK(serial.samples[i].last_side == threaded.samples[i].last_side);
        CHECK(serial.samples[i].deepest_left == threaded.samples[i].deepest_left);
        CHECK(serial.samples[i].deepest_right == threaded.samples[i].deepest_right);
    }
    CHECK(serial.mean_steps == threaded.mean_steps);
    CHECK(serial.incomplete == 0);
}

TEST_CASE("exit frequencies match the exact propagation oracle", "[sampler]") {
    for (int m_row : {2, 3}) {
        CAPTURE(m_row);
        const WalkKernel kernel = build_kernel(make_geometry(kEquilateral), m_row);
        const std::vector<double> exact = exact_exit_masses(kernel);
        const long long n = 30000;
        const EnsembleResult ensemble =
            run_ensemble(PathConfig::make(kernel.geom, m_row, 97), n, 2);
        std::vector<long long> counts(kernel.row(m_row), 0);
        for (const auto& s : ensemble.samples) ++counts[s.exit_j];
        for (std::size_t j = 0; j < exact.size(); ++j) {
            const double freq = static_cast<double>(counts[j]) / n;
            const double se = std::sqrt(exact[j] * (1.0 - exact[j]) / n);
            CHECK(std::abs(freq - exact[j]) <= 4.0 * se);
        }
        // Lemma-level check: the exact masses themselves are uniform.
        for (double m : exact)
            CHECK(m == Catch::Approx(1.0 / static_cast<double>(exact.size())).margin(1e-9));
    }
}

TEST_CASE("per-path side bookkeeping", "[sampler]") {
    const WalkKernel kernel = build_kernel(make_geometry(kEquilateral), 10);
    const EnsembleResult ensemble = run_ensemble(PathConfig::make(kernel.geom, 10, 5), 2000, 1);
    for (const auto& s : ensemble.samples) {
        REQUIRE(s.complete);
        CHECK(s.deepest_left <= 10);
        CHECK(s.deepest_right <= 10);
        if (s.last_side == ContactSide::Left) CHECK(s.deepest_left >= 1);
        if (s.last_side == ContactSide::Right) CHECK(s.deepest_right >= 1);
        // N(1) = 2: the first step off the apex already touches a side.
        CHECK(s.last_side != ContactSide::None);
        if (s.exit_j == 0) CHECK(s.deepest_left == 10);
        if (s.exit_j == kernel.row(10) - 1) CHECK(s.deepest_right == 10);
    }
}

TEST_CASE("mean absorption time matches the chain solve", "[sampler]") {
    const WedgeGeometry g = make_geometry(kEquilateral);
    const int m_row = 60;
    const double exact = exact_mean_steps(g, m_row);
    // Diffusive scaling: the exact value sits near M^2 / (6(a+c)).
    const double scaling = m_row * static_cast<double>(m_row) / (6.0 * (g.probs.a + g.probs.c));
    CHECK(exact == Catch::Approx(scaling).epsilon(0.2));
    const EnsembleResult ensemble = run_ensemble(PathConfig::make(g, m_row, 2024), 20000, 2);
    CHECK(ensemble.mean_steps == Catch::Approx(exact).epsilon(0.05));
}

TEST_CASE("hull variables", "[sampler]") {
    const WalkKernel kernel = build_kernel(make_geometry(kEquilateral), 10);
    SECTION("no left contact gives y = 0") {
        HullSample s;
        s.complete = true;
        s.exit_j = 3;
        s.deepest_right = 10;
        const HullVariables v = hull_variables(s, kernel);
        CHECK(v.y == 0.0);
        CHECK(v.z == 1.0);
        CHECK(v.x == Catch::Approx(0.3).margin(1e-15));
    }
    SECTION("right-corner exit pins x and z to 1") {
        HullSample s;
        s.complete = true;
        s.exit_j = kernel.row(10) - 1;
        s.deepest_right = 10;
        const HullVariables v = hull_variables(s, kernel);
        CHECK(v.x == 1.0);
        CHECK(v.z == 1.0);
    }
    SECTION("incomplete samples are rejected") {
        CHECK_THROWS_AS(hull_variables(HullSample{}, kernel), std::invalid_argument);
    }
}

TEST_CASE("empirical distributions of the hull variables", "[sampler]") {
    const int m_row = 100;
    const WalkKernel kernel = build_kernel(make_geometry(kEquilateral), m_row);
    const EnsembleResult ensemble =
        run_ensemble(PathConfig::make(kernel.geom, m_row, 31), 50000, 2);
    // Exit indices against the exact uniform row law: statistics only.
    CHECK(exit_law_ks(ensemble, kernel) <= 1.95 / std::sqrt(50000.0));
    // X, Y, Z against the continuum uniform law: statistics plus an
    // O(1/M) discretization allowance.
    std::vector<double> xs, ys, zs;
    for (const auto& s : ensemble.samples) {
        const HullVariables v = hull_variables(s, kernel);
        xs.push_back(v.x);
        ys.push_back(v.y);
        zs.push_back(v.z);
    }
    const auto uniform = [](double t) { return t; };
    CHECK(ks_distance(EmpiricalCdf(xs), uniform) <= 0.02);
    CHECK(ks_distance(EmpiricalCdf(ys), uniform) <= 0.02);
    CHECK(ks_distance(EmpiricalCdf(zs), uniform) <= 0.02);
}

TEST_CASE("exit law stays uniform for wedges with short top rows", "[sampler]") {
    // Negative offsets on either side: the top-block and point-reflected
    // band rules drive the sampling here.
    for (const AnglePair angles :
         {AnglePair{2 * M_PI / 3, M_PI / 6}, AnglePair{M_PI / 6, 2 * M_PI / 3}}) {
        CAPTURE(angles.alpha, angles.beta);
        const WalkKernel kernel = build_kernel(make_geometry(angles), 60);
        const EnsembleResult ensemble =
            run_ensemble(PathConfig::make(kernel.geom, 60, 13), 20000, 2);
        CHECK(ensemble.incomplete == 0);
        CHECK(exit_law_ks(ensemble, kernel) <= 1.95 / std::sqrt(20000.0));
    }
}

TEST_CASE("ks distance helpers", "[sampler]") {
    SECTION("hand-computed sup distance") {
        const EmpiricalCdf emp({0.1, 0.2, 0.3, 0.4});
        CHECK(ks_distance(emp, [](double t) { return t; }) ==
              Catch::Approx(0.6).margin(1e-15));
    }
    SECTION("an empirical atom law matches itself exactly") {
        const std::vector<long long> counts{3, 1, 6};
        const std::vector<double> probs{0.3, 0.1, 0.6};
        CHECK(ks_distance_atoms(counts, probs) == 0.0);
    }
    SECTION("empty samples are rejected") {
        CHECK_THROWS_AS(EmpiricalCdf(std::vector<double>{}), std::invalid_argument);
        CHECK_THROWS_AS(ks_distance_atoms({}, {}), std::invalid_argument);
    }
}

TEST_CASE("last-visit bins", "[sampler]") {
    const int m_row = 40;
    const WalkKernel kernel = build_kernel(make_geometry(kEquilateral), m_row);
    const EnsembleResult ensemble =
        run_ensemble(PathConfig::make(kernel.geom, m_row, 77), 20000, 2);
    const auto bins = last_visit_conditional(ensemble.samples, kernel, 10);
    REQUIRE(bins.size() == 10);
    long long total = 0;
    for (const auto& b : bins) total += b.count;
    CHECK(total == 20000);  // N(1) = 2 leaves no contact-free paths
    // Left-right symmetry pins the middle of the curve at 1/2.
    const auto& mid = bins[5];
    CHECK(mid.wilson_low <= 0.55);
    CHECK(mid.wilson_high >= 0.45);
    CHECK(bins[0].estimate < bins[9].estimate);
    // Empty bins keep the vacuous interval.
    const auto sparse = last_visit_conditional({}, kernel, 3);
    CHECK(sparse[1].wilson_low == 0.0);
    CHECK(sparse[1].wilson_high == 1.0);
}

TEST_CASE("step caps flag incomplete paths", "[sampler]") {
    const WalkKernel kernel = build_kernel(make_geometry(kEquilateral), 30);
    detail::SamplerTables tables(kernel);
    Xoshiro256pp rng(9);
    const HullSample s = run_path(kernel, tables, 10, rng);
    CHECK_FALSE(s.complete);
    CHECK(s.steps == 10);
    CHECK(s.exit_j == -1);
    // A cap at exactly M^2 truncates a sizable fraction of paths.
    PathConfig config = PathConfig::make(kernel.geom, 30, 11, 900);
    CHECK_THROWS_AS(run_ensemble(config, 2000, 2), std::runtime_error);
    CHECK_THROWS_AS(PathConfig::make(kernel.geom, 30, 11, 100), std::invalid_argument);
    CHECK_THROWS_AS(PathConfig::make(make_geometry({2 * M_PI / 3, M_PI / 6}), 4, 1),
                    std::invalid_argument);
}

TEST_CASE("per-path csv output", "[sampler]") {
    const WalkKernel kernel = build_kernel(make_geometry(kEquilateral), 5);
    const EnsembleResult ensemble = run_ensemble(PathConfig::make(kernel.geom, 5, 3), 50, 1);
    std::ostringstream os;
    write_paths_csv(os, ensemble, kernel);
    const std::string text = os.str();
    CHECK(text.rfind("seed_index,exit_j,X,Y,Z,last_side,steps\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 51);
    std::ostringstream again;
    write_paths_csv(again, run_ensemble(PathConfig::make(kernel.geom, 5, 3), 50, 2), kernel);
    CHECK(text == again.str());
}
