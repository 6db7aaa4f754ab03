#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "triwalk/geometry.hpp"

using namespace triwalk;

namespace {

double cot_ref(double a) { return std::cos(a) / std::sin(a); }

// Residuals of the two lattice-fit equations.
std::pair<double, double> fit_residuals(const AnglePair& angles, const LatticeSolution& s) {
    const double cp = cot_ref(s.phi), cq = cot_ref(s.psi);
    const double ra = cot_ref(angles.alpha) - (s.n_left * (cp + cq) + cp);
    const double rb = cot_ref(angles.beta) - (s.n_right * (cp + cq) + cq);
    return {std::abs(ra), std::abs(rb)};
}

}  // namespace

TEST_CASE("lattice fit for the three reference wedges", "[geometry]") {
    SECTION("equilateral") {
        const LatticeSolution s = solve_lattice({M_PI / 3, M_PI / 3});
        CHECK(s.n_left == 0);
        CHECK(s.n_right == 0);
        CHECK(s.phi == Catch::Approx(M_PI / 3).margin(1e-12));
        CHECK(s.psi == Catch::Approx(M_PI / 3).margin(1e-12));
    }
    SECTION("obtuse left angle") {
        const LatticeSolution s = solve_lattice({2 * M_PI / 3, M_PI / 6});
        CHECK(s.n_left == -2);
        CHECK(s.n_right == 3);
        CHECK(s.phi == Catch::Approx(M_PI / 3).margin(1e-12));
        CHECK(s.psi == Catch::Approx(M_PI / 2).margin(1e-12));
    }
    SECTION("right angle on the left") {
        const LatticeSolution s = solve_lattice({M_PI / 2, M_PI / 4});
        CHECK(s.n_left == -1);
        CHECK(s.n_right == 1);
        CHECK(s.phi == Catch::Approx(M_PI / 4).margin(1e-12));
        CHECK(s.psi == Catch::Approx(M_PI / 2).margin(1e-12));
    }
    SECTION("right angle on the right") {
        const LatticeSolution s = solve_lattice({M_PI / 3, M_PI / 2});
        CHECK(s.n_right == 0);
        CHECK(s.psi == Catch::Approx(M_PI / 2).margin(1e-12));
        CHECK(s.n_left == 0);
        CHECK(cot_ref(s.phi) == Catch::Approx(cot_ref(M_PI / 3)).margin(1e-12));
    }
    SECTION("mirror of the obtuse case") {
        const LatticeSolution s = solve_lattice({M_PI / 6, 2 * M_PI / 3});
        CHECK(s.n_left == 3);
        CHECK(s.n_right == -2);
        CHECK(s.phi == Catch::Approx(M_PI / 2).margin(1e-12));
        CHECK(s.psi == Catch::Approx(M_PI / 3).margin(1e-12));
    }
}

TEST_CASE("solver rejects invalid angles", "[geometry]") {
    CHECK_THROWS_AS(solve_lattice({0.0, 1.0}), std::domain_error);
    CHECK_THROWS_AS(solve_lattice({1.0, -0.2}), std::domain_error);
    CHECK_THROWS_AS(solve_lattice({2.0, 1.5}), std::domain_error);  // sum >= pi
    CHECK_THROWS_AS(solve_lattice({M_PI, 0.1}), std::domain_error);
}

TEST_CASE("lattice fit equations hold over random wedges", "[geometry]") {
    std::mt19937_64 gen(271828);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double alpha = 0.02 + unif(gen) * (M_PI - 0.06);
        const double beta = 0.02 + unif(gen) * (M_PI - alpha - 0.06);
        CAPTURE(alpha, beta);
        const LatticeSolution s = solve_lattice({alpha, beta});
        const auto [ra, rb] = fit_residuals({alpha, beta}, s);
        CHECK(ra <= 1e-12);
        CHECK(rb <= 1e-12);
        CHECK(s.n_left + s.n_right >= 0);
        CHECK(s.phi > 0.0);
        CHECK(s.phi <= M_PI / 2 + 1e-15);
        CHECK(s.psi > 0.0);
        CHECK(s.psi <= M_PI / 2 + 1e-15);
        CHECK(s.phi + s.psi >= M_PI / 2 - 1e-12);
        CHECK(s.phi + s.psi < M_PI);
    }
}

TEST_CASE("step probabilities for reference lattices", "[geometry]") {
    SECTION("equilateral lattice") {
        const auto [d, p] = lattice_params({0, 0, M_PI / 3, M_PI / 3});
        CHECK(d.u == Catch::Approx(std::sqrt(3.0) / 4).margin(1e-15));
        CHECK(d.v == Catch::Approx(std::sqrt(3.0) / 4).margin(1e-15));
        CHECK(d.h == Catch::Approx(0.75).margin(1e-15));
        CHECK(p.a == Catch::Approx(1.0 / 6).margin(1e-14));
        CHECK(p.b == Catch::Approx(1.0 / 6).margin(1e-14));
        CHECK(p.c == Catch::Approx(1.0 / 6).margin(1e-14));
        CHECK(p.lambda == Catch::Approx(0.25).margin(1e-14));
        CHECK(p.sigma2 == Catch::Approx(3.0 / 8).margin(1e-14));
    }
    SECTION("square-diagonal lattice kills b") {
        const auto [d, p] = lattice_params({0, 0, M_PI / 4, M_PI / 4});
        CHECK(p.a == Catch::Approx(0.25).margin(1e-14));
        CHECK(p.c == Catch::Approx(0.25).margin(1e-14));
        CHECK(p.b == 0.0);
    }
    SECTION("b vanishes exactly whenever phi + psi = pi/2") {
        for (double phi : {0.3, 0.5, 0.7, M_PI / 4}) {
            const auto [d, p] = lattice_params({0, 0, phi, M_PI / 2 - phi});
            CHECK(p.b == 0.0);
        }
    }
}

TEST_CASE("interior step law is isotropic", "[geometry]") {
    std::mt19937_64 gen(31415);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double alpha = 0.05 + unif(gen) * (M_PI - 0.12);
        const double beta = 0.05 + unif(gen) * (M_PI - alpha - 0.12);
        CAPTURE(alpha, beta);
        const auto sol = solve_lattice({alpha, beta});
        const auto [d, p] = lattice_params(sol);
        CHECK(p.a >= 0.0);
        CHECK(p.b >= 0.0);
        CHECK(p.c >= 0.0);
        CHECK(2 * (p.a + p.b + p.c) == Catch::Approx(1.0).margin(1e-14));
        const double uv = d.u + d.v;
        const double var_re = 2 * p.a * d.u * d.u + 2 * p.b * uv * uv + 2 * p.c * d.v * d.v;
        const double var_im = 2 * (p.a + p.c) * d.h * d.h;
        const double cov = 2 * d.h * (p.a * d.u - p.c * d.v);
        CHECK(std::abs(var_re - var_im) <= 1e-14);
        CHECK(std::abs(cov) <= 1e-14);
        CHECK(p.sigma2 == Catch::Approx(var_im).margin(1e-15));
    }
}

TEST_CASE("row sizes and first full row", "[geometry]") {
    CHECK(row_size(5, {0, 0, 0, 0}) == 6);
    CHECK(row_size(1, {2, -1, 0, 0}) == 3);
    CHECK(row_size(4, {-2, 3, 0, 0}) == 9);
    CHECK(first_full_row({2, -1, 0, 0}) == 2);
    CHECK(first_full_row({0, 0, 0, 0}) == 0);
    CHECK(first_full_row({2, 0, 0, 0}) == 0);
    CHECK(first_full_row({-2, 3, 0, 0}) == 3);
}

TEST_CASE("vertex coordinates land on the wedge rays", "[geometry]") {
    SECTION("apex and reference vertices") {
        const WedgeGeometry g = make_geometry({M_PI / 3, M_PI / 3});
        CHECK(std::abs(vertex_coordinate(0, 0, g)) == 0.0);
        const auto z = vertex_coordinate(1, 1, g);
        CHECK(z.real() == Catch::Approx(std::sqrt(3.0) / 4).margin(1e-15));
        CHECK(z.imag() == Catch::Approx(-0.75).margin(1e-15));
        CHECK_THROWS_AS(vertex_coordinate(2, 1, g), std::out_of_range);
    }
    SECTION("short top rows still sit on the rays") {
        const WedgeGeometry g = make_geometry({2 * M_PI / 3, M_PI / 6});
        const auto z = vertex_coordinate(0, 1, g);
        CHECK(z.real() == Catch::Approx(0.5).margin(1e-12));
        CHECK(z.imag() == Catch::Approx(-std::sqrt(3.0) / 2).margin(1e-12));
        CHECK(std::arg(z) == Catch::Approx(2 * M_PI / 3 - M_PI).margin(1e-12));
    }
    SECTION("ray membership for the three reference wedges") {
        for (const AnglePair angles :
             {AnglePair{M_PI / 3, M_PI / 3}, AnglePair{M_PI / 3, 5 * M_PI / 12},
              AnglePair{2 * M_PI / 3, M_PI / 6}}) {
            const WedgeGeometry g = make_geometry(angles);
            for (int k = 1; k <= 10; ++k) {
                const auto left = vertex_coordinate(0, k, g);
                const auto right = vertex_coordinate(row_size(k, g.lattice) - 1, k, g);
                CHECK(std::arg(left) == Catch::Approx(angles.alpha - M_PI).margin(1e-12));
                CHECK(std::arg(right) == Catch::Approx(-angles.beta).margin(1e-12));
            }
        }
    }
}
