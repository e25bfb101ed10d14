#pragma once

#include "sciagent/pde/burgers.hpp"
#include "sciagent/pde/grid.hpp"

namespace sciagent::pde {

struct NoConvergence : Error {
    using Error::Error;
};

enum class WaveKind { rarefaction, shock };

struct RiemannStarState {
    double p_star = 0;
    double u_star = 0;
    double rho_star_left = 0;
    double rho_star_right = 0;
    WaveKind left_wave = WaveKind::rarefaction;
    WaveKind right_wave = WaveKind::shock;
    int iterations = 0;
};

struct EulerState {
    double rho, u, p;
};

// Star region of the gamma-law Riemann problem via Newton iteration on the
// standard pressure function, bisection-safeguarded.
RiemannStarState solve_riemann_star(const EulerState& left, const EulerState& right,
                                    double gamma = 1.4, double tol = 1e-12);

struct SodSolution {
    Field1D rho, u, p;
    RiemannStarState star;
    double mass_drift = 0;  // max per-step |d(sum rho h)| for the HLLC path
};

// Exact similarity solution of the Sod tube (diaphragm at x=0.5, gamma=1.4,
// left (1,0,1), right (0.125,0,0.1)) sampled at the given nodes.
SodSolution solve_sod_exact(const std::vector<double>& x_nodes, double t);

// First-order HLLC finite-volume reference candidate on [0,1], RK2 in time.
SodSolution solve_sod_hllc(int nx, double t_end);

}  // namespace sciagent::pde
