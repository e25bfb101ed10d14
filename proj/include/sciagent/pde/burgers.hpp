#pragma once

#include "sciagent/pde/grid.hpp"

namespace sciagent::pde {

// Viscous Burgers reference on [-1,1] x [0,1]: nu = 0.01/pi,
// u(x,0) = -sin(pi x), u(+-1,t) = 0. Conservative Rusanov flux for u^2/2,
// central diffusion, explicit RK2. Returns the space-time field u(x,t) with
// n_save uniformly spaced time levels (t=0 and t=1 included); nt must be a
// multiple of n_save-1 and satisfy the CFL bound, else CFLViolation.
Field2D solve_burgers(int nx, int nt, int n_save = 101);

// Smallest admissible step count for solve_burgers at this resolution.
int burgers_default_nt(int nx, int n_save = 101);

}  // namespace sciagent::pde
