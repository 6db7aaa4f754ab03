#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "triwalk/exact.hpp"

using namespace triwalk;

namespace {

const AnglePair kEquilateral{M_PI / 3, M_PI / 3};
const AnglePair kSkewed{M_PI / 3, 5 * M_PI / 12};
const AnglePair kObtuse{2 * M_PI / 3, M_PI / 6};
const AnglePair kObtuseMirror{M_PI / 6, 2 * M_PI / 3};

// Exact finite-horizon hitting probability of the row chain: the
// gambler's-ruin sums telescope to N(m)(N(M)-N(k)) / (N(k)(N(M)-N(m))).
double hitting_closed_form(const WedgeGeometry& g, int k, int m, int horizon) {
    const double nm = static_cast<double>(row_size(m, g.lattice));
    const double nk = static_cast<double>(row_size(k, g.lattice));
    const double nh = static_cast<double>(row_size(horizon, g.lattice));
    return nm * (nh - nk) / (nk * (nh - nm));
}

}  // namespace

TEST_CASE("propagation conserves mass and starts correctly", "[exact]") {
    const WalkKernel kernel = build_kernel(make_geometry(kEquilateral), 30);
    const auto seq = propagate(kernel, 50);
    REQUIRE(seq.size() == 51);
    CHECK(seq[0].mass[0][0] == 1.0);
    CHECK(seq[1].mass[1][0] == Catch::Approx(0.5).margin(1e-15));
    CHECK(seq[1].mass[1][1] == Catch::Approx(0.5).margin(1e-15));
    for (const auto& dist : seq) CHECK(dist.total() == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("row laws stay uniform for every wedge", "[exact]") {
    SECTION("a point mass has zero deviation") {
        const WalkKernel kernel = build_kernel(make_geometry(kEquilateral), 10);
        CHECK(uniformity_deviation(initial_distribution(kernel)) == 0.0);
    }
    SECTION("uniformity over 200 steps") {
        for (const AnglePair angles : {kEquilateral, kSkewed, kObtuse, kObtuseMirror}) {
            CAPTURE(angles.alpha, angles.beta);
            const WalkKernel kernel = build_kernel(make_geometry(angles), 60);
            RowDistribution dist = initial_distribution(kernel);
            double worst = 0.0;
            for (int n = 0; n < 200; ++n) {
                dist = propagate_step(kernel, dist);
                worst = std::max(worst, uniformity_deviation(dist));
            }
            CHECK(worst <= 1e-10);
            CHECK(dist.total() == Catch::Approx(1.0).margin(1e-12));
        }
    }
}

TEST_CASE("row-projection chain", "[exact]") {
    const WedgeGeometry g = make_geometry(kEquilateral);
    const Chain1D ch = chain1d(g, 30);
    CHECK(ch.up[0] == 1.0);
    CHECK(ch.up[1] == Catch::Approx(0.5).margin(1e-14));
    CHECK(ch.down[1] == Catch::Approx(1.0 / 6).margin(1e-14));
    CHECK(ch.stay[1] == Catch::Approx(1.0 / 3).margin(1e-14));
    for (int k = 1; k < 30; ++k)
        CHECK(ch.up[k] + ch.down[k] + ch.stay[k] == Catch::Approx(1.0).margin(1e-14));
}

TEST_CASE("intertwining of the walk and its row projection", "[exact]") {
    SECTION("zero steps is exact") {
        const WedgeGeometry g = make_geometry(kEquilateral);
        CHECK(intertwining_residual(build_kernel(g, 10), chain1d(g, 10), 0) == 0.0);
    }
    SECTION("short horizon, equilateral") {
        const WedgeGeometry g = make_geometry(kEquilateral);
        CHECK(intertwining_residual(build_kernel(g, 10), chain1d(g, 10), 3) <= 1e-14);
    }
    SECTION("long horizon across geometries") {
        for (const AnglePair angles : {kEquilateral, kSkewed, kObtuse}) {
            CAPTURE(angles.alpha, angles.beta);
            const WedgeGeometry g = make_geometry(angles);
            CHECK(intertwining_residual(build_kernel(g, 40), chain1d(g, 40), 100) <= 1e-12);
        }
    }
}

TEST_CASE("green function by solve and closed form", "[exact]") {
    SECTION("two-state system by hand") {
        const WedgeGeometry g = make_geometry(kEquilateral);
        const GreenTable table = green_solve(chain1d(g, 2));
        REQUIRE(table.visits.size() == 2);
        CHECK(table.visits[0] == Catch::Approx(4.0 / 3).margin(1e-12));
        CHECK(table.visits[1] == Catch::Approx(2.0).margin(1e-12));
        CHECK(table.solve_residual <= 1e-10);
        CHECK(green_closed(0, 2, g) == Catch::Approx(4.0 / 3).margin(1e-12));
        CHECK(green_closed(1, 2, g) == Catch::Approx(2.0).margin(1e-12));
    }
    SECTION("closed form matches the solve everywhere") {
        for (const AnglePair angles : {kEquilateral, kSkewed, kObtuse}) {
            CAPTURE(angles.alpha, angles.beta);
            const WedgeGeometry g = make_geometry(angles);
            for (int m : {2, 10, 50, 60}) {
                if (m <= first_full_row(g.lattice) + 1) continue;
                const GreenTable table = green_solve(chain1d(g, m));
                for (int k = 0; k < m; ++k) {
                    CHECK(table.visits[k] >= 0.0);
                    CHECK(std::abs(green_closed(k, m, g) - table.visits[k]) <= 1e-10);
                }
            }
        }
    }
    SECTION("per-vertex visits stay below 1/(a+c)") {
        for (const AnglePair angles : {kEquilateral, kSkewed, kObtuse}) {
            const WedgeGeometry g = make_geometry(angles);
            const double bound = 1.0 / (g.probs.a + g.probs.c);
            for (int m : {10, 50}) {
                for (int k = 0; k < m; ++k) {
                    const double per_vertex =
                        green_closed(k, m, g) / static_cast<double>(row_size(k, g.lattice));
                    CHECK(per_vertex < bound);
                }
            }
        }
    }
}

TEST_CASE("time reversal bias shrinks with the horizon", "[exact]") {
    const WedgeGeometry g = make_geometry(kEquilateral);
    const double r50 = reversal_residual(build_kernel(g, 50));
    const double r100 = reversal_residual(build_kernel(g, 100));
    CHECK(r100 < r50);
    CHECK(r100 < 0.05);
}

TEST_CASE("row chain generator approaches the Bessel generator", "[exact]") {
    const WedgeGeometry g = make_geometry(kEquilateral);
    const TestFunction square{[](double x) { return x * x; }, [](double x) { return 2 * x; },
                              [](double) { return 2.0; }};
    const TestFunction identity{[](double x) { return x; }, [](double) { return 1.0; },
                                [](double) { return 0.0; }};
    const TestFunction constant{[](double) { return 1.5; }, [](double) { return 0.0; },
                                [](double) { return 0.0; }};
    CHECK(bessel_generator_residual(g, 100, square, 1.0) <= 0.1);
    CHECK(bessel_generator_residual(g, 200, identity, 2.0) <= 0.05);
    CHECK(bessel_generator_residual(g, 50, constant, 1.0) ==
          Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("hitting probabilities of the row chain", "[exact]") {
    const WedgeGeometry g = make_geometry(kEquilateral);
    SECTION("immediate hit") {
        CHECK(hitting_probability_1d(g, 10, 10, 100) == 1.0);
    }
    SECTION("solve agrees with the telescoped closed form") {
        for (const int horizon : {100, 4000}) {
            const double solved = hitting_probability_1d(g, 20, 10, horizon);
            CHECK(solved ==
                  Catch::Approx(hitting_closed_form(g, 20, 10, horizon)).margin(1e-12));
        }
    }
    SECTION("horizon growth converges to N(m)/N(k)") {
        const double limit = 11.0 / 21.0;
        double prev_err = 1.0;
        for (const int horizon : {1000, 10000, 100000}) {
            const double err = std::abs(hitting_probability_1d(g, 20, 10, horizon) - limit);
            CHECK(err < prev_err);
            prev_err = err;
        }
        CHECK(prev_err <= 1e-4);
    }
    SECTION("argument validation") {
        CHECK_THROWS_AS(hitting_probability_1d(g, 10, 20, 100), std::invalid_argument);
    }
}

TEST_CASE("csv emitters", "[exact]") {
    const WedgeGeometry g = make_geometry(kEquilateral);
    SECTION("uniformity table") {
        std::ostringstream os;
        write_uniformity_csv(os, build_kernel(g, 5), 3);
        const std::string text = os.str();
        CHECK(text.rfind("n,k,deviation\n", 0) == 0);
        CHECK(std::count(text.begin(), text.end(), '\n') > 4);
    }
    SECTION("green table") {
        std::ostringstream os;
        write_green_csv(os, g, 4);
        const std::string text = os.str();
        CHECK(text.rfind("k,closed,solved,diff\n", 0) == 0);
        CHECK(std::count(text.begin(), text.end(), '\n') == 5);
    }
}
