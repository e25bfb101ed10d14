#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sciagent/pde/ns.hpp"

using namespace sciagent;
using namespace sciagent::pde;

TEST_CASE("lid profile evaluates the quadratic") {
    CHECK(cavity_lid_velocity(1.0) == 0.0);
    CHECK(cavity_lid_velocity(0.5) == 0.5);
    CHECK(cavity_lid_velocity(2.0) == -4.0);
}

TEST_CASE("steady cavity honors gauge, lid and incompressibility") {
    CavityOptions opt;
    opt.n = 16;
    opt.continuation = false;
    NsSolution sol = solve_lid_cavity(opt);

    const Grid2D& g = sol.u.grid;
    CHECK(sol.p.values[g.idx(0, 0)] == 0.0);
    // lid row carries the exact profile at the nodes
    for (int i = 0; i <= g.nx; ++i) {
        double x = g.xs[i];
        CHECK(sol.u.values[g.idx(i, g.ny)] == cavity_lid_velocity(x));
    }
    // no-slip on the other walls
    for (int j = 0; j < g.ny; ++j) {
        CHECK(sol.u.values[g.idx(0, j)] == 0.0);
        CHECK(sol.v.values[g.idx(0, j)] == 0.0);
        CHECK(sol.v.values[g.idx(g.nx, j)] == 0.0);
    }
    CHECK(sol.max_divergence <= 1e-8);
    REQUIRE(!sol.residual_history.empty());
    CHECK(sol.residual_history.back() <= opt.steady_tol);
    for (double v : sol.u.values) CHECK(std::isfinite(v));
}

TEST_CASE("cavity reports NotConverged with the residual trace") {
    CavityOptions opt;
    opt.n = 16;
    opt.continuation = false;
    opt.max_steps = 5;
    try {
        solve_lid_cavity(opt);
        FAIL("expected NotConverged");
    } catch (const NotConverged& e) {
        CHECK(!e.residual_history.empty());
    }
}

TEST_CASE("unsteady inlet closure sums the three harmonics to one at t=0.5") {
    double s = unsteady_inlet_velocity(0.5, 0.5);
    CHECK(s == doctest::Approx(std::sin(std::numbers::pi * 0.5)).epsilon(1e-13));
}

TEST_CASE("unsteady channel: divergence, inlet identity, outlet pressure") {
    UnsteadyNsOptions opt;
    opt.n = 16;
    NsSolution sol = solve_unsteady_ns(opt);
    const Grid2D& g = sol.u.grid;

    CHECK(sol.max_divergence <= 1e-6);
    for (int j = 1; j < g.ny; ++j) {
        double y = g.ys[j];
        CHECK(std::abs(sol.u.values[g.idx(0, j)] - std::sin(std::numbers::pi * y)) <= 1e-12);
        CHECK(sol.v.values[g.idx(0, j)] == 0.0);
    }
    for (int j = 0; j <= g.ny; ++j) CHECK(sol.p.values[g.idx(g.nx, j)] == 0.0);
    // no-slip walls
    for (int i = 0; i <= g.nx; ++i) {
        CHECK(sol.u.values[g.idx(i, 0)] == 0.0);
        CHECK(sol.u.values[g.idx(i, g.ny)] == 0.0);
        CHECK(sol.v.values[g.idx(i, 0)] == 0.0);
        CHECK(sol.v.values[g.idx(i, g.ny)] == 0.0);
    }
    for (double v : sol.v.values) CHECK(std::isfinite(v));
    CHECK(sol.steps > 0);
}

TEST_CASE("an oversized user step is rejected up front") {
    UnsteadyNsOptions opt;
    opt.n = 16;
    opt.dt = 1.0;
    CHECK_THROWS_AS(solve_unsteady_ns(opt), CFLViolation);
}

TEST_CASE("a starved pressure solver raises GMRESStalled") {
    UnsteadyNsOptions opt;
    opt.n = 16;
    opt.gmres_max_iter = 1;
    opt.gmres_restart = 1;
    CHECK_THROWS_AS(solve_unsteady_ns(opt), GMRESStalled);
}
