#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dense_oracle.hpp"
#include "savns/linsolve.hpp"
#include "savns/mac_ops.hpp"

using namespace savns;
namespace o = savns::oracle;
using std::numbers::pi;

namespace {

double max_diff(const VelocityField& a, const VelocityField& b) { return (a - b).max_abs(); }
double max_diff(const CellField& a, const CellField& b) { return (a - b).max_abs(); }

VelocityField sine_mode(const Grid& g, int k, int l) {
    VelocityField w(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) w.u(i, j) = std::sin(k * pi * g.xe(i)) * std::sin(l * pi * g.yc(j));
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) w.v(i, j) = std::sin(k * pi * g.xc(i)) * std::sin(l * pi * g.ye(j));
    return w;
}

double stencil_eigen(const Grid& g, int k, int l) {
    const double sx = std::sin(k * pi * g.hx / 2.0);
    const double sy = std::sin(l * pi * g.hy / 2.0);
    return 4.0 / (g.hx * g.hx) * sx * sx + 4.0 / (g.hy * g.hy) * sy * sy;
}

const Backend kBackends[] = {Backend::Direct, Backend::ConjugateGradient};

} // namespace

TEST_CASE("backend names") {
    CHECK(parse_backend("direct") == Backend::Direct);
    CHECK(parse_backend("cg") == Backend::ConjugateGradient);
    CHECK(to_string(Backend::ConjugateGradient) == "cg");
    CHECK_THROWS(parse_backend("multigrid"));
}

TEST_CASE("zero right-hand sides give zero solutions") {
    const Grid g(9, 7, 0.0, 0.0, 1.0, 1.0);
    for (Backend b : kBackends) {
        const EllipticSolver s(g, b);
        const auto [w, rep] = s.solve_helmholtz(VelocityField(g), 10.0, 0.1);
        CHECK(w.max_abs() == 0.0);
        CHECK(rep.iterations == 0);
        CHECK(rep.converged);
        const auto [phi, prep] = s.solve_poisson_neumann(CellField(g));
        CHECK(phi.max_abs() == 0.0);
        CHECK(prep.iterations == 0);
    }
}

TEST_CASE("Helmholtz recovers sine eigenfunctions") {
    const Grid g(16, 12, 0.0, 0.0, 1.0, 1.0);
    const double alpha = 20.0;
    const double nu = 0.1;
    for (Backend b : kBackends) {
        const EllipticSolver s(g, b);
        for (auto [k, l] : {std::pair{1, 1}, std::pair{3, 2}, std::pair{7, 5}}) {
            const VelocityField w = sine_mode(g, k, l);
            const VelocityField rhs = (alpha + nu * stencil_eigen(g, k, l)) * w;
            const auto [sol, rep] = s.solve_helmholtz(rhs, alpha, nu);
            CHECK(rep.converged);
            CHECK(max_diff(sol, w) < 1e-9);
        }
    }
}

TEST_CASE("Helmholtz matches the dense solve") {
    std::mt19937_64 rng(42);
    for (const Grid& g : {Grid::unit_square(8), Grid(8, 5, 0.0, 0.0, 2.0, 1.0)}) {
        const VelocityField rhs = o::random_velocity(g, rng, false);
        const VelocityField ref = o::helmholtz_dense(rhs, 7.5, 0.3);
        for (Backend b : kBackends) {
            const EllipticSolver s(g, b);
            const auto [w, rep] = s.solve_helmholtz(rhs, 7.5, 0.3);
            CHECK(max_diff(w, ref) < 1e-10);
            CHECK(w.boundary_normal_max() == 0.0);
        }
    }
}

TEST_CASE("Neumann Poisson recovers cosine eigenfunctions and matches the dense solve") {
    const Grid g(12, 10, 0.0, 0.0, 1.0, 1.0);
    for (Backend b : kBackends) {
        const EllipticSolver s(g, b);
        for (auto [k, l] : {std::pair{1, 0}, std::pair{2, 3}, std::pair{5, 1}}) {
            CellField phi(g);
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) phi(i, j) = std::cos(k * pi * g.xc(i)) * std::cos(l * pi * g.yc(j));
            const CellField rhs = stencil_eigen(g, k, l) * phi;
            const auto [sol, rep] = s.solve_poisson_neumann(rhs);
            CHECK(rep.converged);
            CHECK(max_diff(sol, phi) < 1e-9);
            CHECK(std::abs(sol.mean()) < 1e-13);
        }
    }
    std::mt19937_64 rng(9);
    const Grid d(8, 6, 0.0, 0.0, 1.0, 1.0);
    const CellField rhs = o::random_cell(d, rng, true);
    const CellField ref = o::poisson_dense(rhs);
    for (Backend b : kBackends) {
        const EllipticSolver s(d, b);
        CHECK(max_diff(s.solve_poisson_neumann(rhs).first, ref) < 1e-10);
    }
}

TEST_CASE("incompatible Neumann data is rejected") {
    const Grid g = Grid::unit_square(8);
    for (Backend b : kBackends) {
        const EllipticSolver s(g, b);
        CHECK_THROWS_AS(s.solve_poisson_neumann(CellField(g, 1.0)), IncompatibleRhs);
        try {
            s.solve_poisson_neumann(CellField(g, 1.0));
        } catch (const IncompatibleRhs& e) {
            CHECK(e.mean() == doctest::Approx(1.0));
        }
    }
}

TEST_CASE("Helmholtz is linear") {
    std::mt19937_64 rng(1);
    const Grid g(10, 9, 0.0, 0.0, 1.0, 1.0);
    for (Backend b : kBackends) {
        const EllipticSolver s(g, b);
        for (int trial = 0; trial < 3; ++trial) {
            const VelocityField r1 = o::random_velocity(g, rng);
            const VelocityField r2 = o::random_velocity(g, rng);
            const VelocityField lhs = s.solve_helmholtz(2.0 * r1 - r2, 5.0, 0.2).first;
            const VelocityField rhs =
                2.0 * s.solve_helmholtz(r1, 5.0, 0.2).first - s.solve_helmholtz(r2, 5.0, 0.2).first;
            CHECK(max_diff(lhs, rhs) < 1e-10);
        }
    }
}

TEST_CASE("backends agree on the gradient of the Neumann solution") {
    std::mt19937_64 rng(31);
    const Grid g(20, 16, 0.0, 0.0, 1.0, 1.0);
    const CellField rhs = o::random_cell(g, rng, true);
    const EllipticSolver direct(g, Backend::Direct);
    const EllipticSolver cg(g, Backend::ConjugateGradient);
    const VelocityField ga = mac::gradient(direct.solve_poisson_neumann(rhs).first);
    const VelocityField gb = mac::gradient(cg.solve_poisson_neumann(rhs).first);
    CHECK(max_diff(ga, gb) < 1e-9 * ga.max_abs());
}

TEST_CASE("solves are deterministic") {
    std::mt19937_64 rng(4);
    const Grid g(14, 14, 0.0, 0.0, 1.0, 1.0);
    const VelocityField rhs = o::random_velocity(g, rng);
    const CellField prhs = o::random_cell(g, rng, true);
    const EllipticSolver a(g, Backend::Direct);
    const EllipticSolver b(g, Backend::Direct);
    CHECK(a.solve_helmholtz(rhs, 3.0, 0.1).first.u_values() == b.solve_helmholtz(rhs, 3.0, 0.1).first.u_values());
    CHECK(a.solve_poisson_neumann(prhs).first.values() == b.solve_poisson_neumann(prhs).first.values());
    const EllipticSolver c(g, Backend::ConjugateGradient);
    CHECK(max_diff(c.solve_helmholtz(rhs, 3.0, 0.1).first, c.solve_helmholtz(rhs, 3.0, 0.1).first) <= 1e-12);
}

TEST_CASE("iteration cap produces an explicit failure") {
    std::mt19937_64 rng(6);
    const Grid g = Grid::unit_square(32);
    Tolerances tol;
    tol.max_iterations = 2;
    const EllipticSolver s(g, Backend::ConjugateGradient, tol);
    const CellField rhs = o::random_cell(g, rng, true);
    CHECK_THROWS_AS(s.solve_poisson_neumann(rhs), SolveFailure);
    try {
        s.solve_poisson_neumann(rhs);
    } catch (const SolveFailure& e) {
        CHECK_FALSE(e.report().converged);
        CHECK(e.report().iterations <= 2);
    }
}
