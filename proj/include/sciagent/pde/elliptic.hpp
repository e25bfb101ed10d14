#pragma once

#include <functional>

#include "sciagent/pde/grid.hpp"

namespace sciagent::pde {

struct SingularSystem : Error {
    using Error::Error;
};

// Laplace problem on [-0.5,0.5]^2 minus four radius-0.1 circles at
// (+-0.3,+-0.3): u = 0 on the circle boundaries, u = 1 on the rectangle.
// 5-point stencil, circle values imposed at the nodes adjacent to a hole,
// solved by conjugate gradients to relative residual 1e-12.
Field2D solve_poisson(int n);

// -Laplace(u) + k^2 u = f on [-1,1]^2 minus the four listed circles,
// k = 8, A = 10, mu = (1,4); u = 0.2 on the rectangle, u = 1 on the circles.
Field2D solve_helmholtz(int n);

double helmholtz_forcing(double x, double y);

// Shared kernel: (-Laplace + shift) u = f with Dirichlet data from the mask.
Field2D solve_masked_dirichlet(const Grid2D& grid, double shift,
                               const std::function<double(double, double)>& forcing,
                               double rect_value, double circle_value, double rel_tol = 1e-12);

}  // namespace sciagent::pde
