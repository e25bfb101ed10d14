#pragma once

#include <vector>

#include "sciagent/pde/grid.hpp"

namespace sciagent::pde {

struct NotConverged : Error {
    NotConverged(const std::string& msg, std::vector<double> history)
        : Error(msg), residual_history(std::move(history)) {}
    std::vector<double> residual_history;
};

struct GMRESStalled : Error {
    using Error::Error;
};

struct NsSolution {
    Field2D u, v, p;             // node-sampled output; boundary rows carry exact BC values
    double max_divergence = 0;   // cell-centered max-norm after the final projection
    int steps = 0;
    std::vector<double> residual_history;  // steady problems: max|du|/dt trace
};

// Steady lid-driven cavity on [0,2]^2, Re=100, lid u = alpha*x*(1-x) (alpha=2),
// no-slip elsewhere. Pseudo-time MAC projection marched to steadiness;
// pressure gauge p(0,0)=0 on the output grid. Throws NotConverged (with the
// residual trace) if max_steps is hit first.
struct CavityOptions {
    int n = 64;  // cells per side
    double re = 100.0;
    double lid_alpha = 2.0;
    double steady_tol = 1e-8;     // max|du|/dt
    int max_steps = 400000;
    double cfl = 0.4;
    double pressure_tol = 1e-9;   // max-norm residual of the projection solve
    bool continuation = true;     // warm-start from a coarser solve
};
NsSolution solve_lid_cavity(const CavityOptions& opt);

// Unsteady channel flow on [0,2]x[0,1] up to t=0.5, Re=100, forcing
// (0, -sin(pi x) sin(pi y) sin(pi t)), pulsed inlet, zero-gradient outlet with
// p=0, no-slip walls, zero initial velocity. Chorin projection per step; the
// pressure Poisson system is solved by Jacobi-preconditioned restarted GMRES.
struct UnsteadyNsOptions {
    int n = 64;  // cells across the short axis; the long axis gets 2n
    double re = 100.0;
    double t_end = 0.5;
    double dt = 0.0;  // 0 = derive from CFL
    double cfl = 0.4;
    int gmres_restart = 50;
    int gmres_max_iter = 500;
    double gmres_tol = 1e-8;
};
NsSolution solve_unsteady_ns(const UnsteadyNsOptions& opt);

double cavity_lid_velocity(double x, double alpha = 2.0);
double unsteady_inlet_velocity(double y, double t);

}  // namespace sciagent::pde
