#include "sciagent/pde/elliptic.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace sciagent::pde {

namespace {

// Interior unknowns of the masked grid in row-major order.
struct MaskedSystem {
    const Grid2D& grid;
    std::vector<int> node_of;    // unknown -> node index
    std::vector<int> unknown_of;  // node index -> unknown or -1

    explicit MaskedSystem(const Grid2D& g) : grid(g) {
        unknown_of.assign(g.nodes(), -1);
        for (int id = 0; id < g.nodes(); ++id) {
            if (g.mask[id] == NodeKind::interior) {
                unknown_of[id] = static_cast<int>(node_of.size());
                node_of.push_back(id);
            }
        }
    }
};

}  // namespace

Field2D solve_masked_dirichlet(const Grid2D& grid, double shift,
                               const std::function<double(double, double)>& forcing,
                               double rect_value, double circle_value, double rel_tol) {
    if (std::abs(grid.hx() - grid.hy()) > 1e-14 * std::abs(grid.hx()))
        throw Error("elliptic: grid spacing must be equal per axis");
    const double h2 = grid.hx() * grid.hx();
    MaskedSystem sys(grid);
    const int m = static_cast<int>(sys.node_of.size());
    if (m == 0) throw Error("elliptic: no interior nodes");
    const int row = grid.nx + 1;

    auto boundary_value = [&](int id) {
        return grid.mask[id] == NodeKind::circle_boundary ? circle_value : rect_value;
    };

    // rhs = f + neighbor Dirichlet contributions / h^2
    std::vector<double> b(m), x(m, 0.0);
    for (int k = 0; k < m; ++k) {
        int id = sys.node_of[k];
        int ix = id % row, iy = id / row;
        double rhs = forcing(grid.xs[ix], grid.ys[iy]);
        for (int nb : {id - 1, id + 1, id - row, id + row}) {
            if (sys.unknown_of[nb] < 0) rhs += boundary_value(nb) / h2;
        }
        b[k] = rhs;
    }

    // A x = (4/h^2 + shift) x_k - neighbors/h^2, SPD for shift >= 0.
    auto apply = [&](const std::vector<double>& in, std::vector<double>& out) {
        const double diag = 4.0 / h2 + shift;
        for (int k = 0; k < m; ++k) {
            int id = sys.node_of[k];
            double acc = diag * in[k];
            for (int nb : {id - 1, id + 1, id - row, id + row}) {
                int j = sys.unknown_of[nb];
                if (j >= 0) acc -= in[j] / h2;
            }
            out[k] = acc;
        }
    };

    std::vector<double> r = b, p = b, Ap(m);
    double bnorm = 0;
    for (double v : b) bnorm += v * v;
    bnorm = std::sqrt(bnorm);
    if (bnorm == 0) bnorm = 1;
    double rr = 0;
    for (double v : r) rr += v * v;

    const int max_iter = 20 * m;
    int it = 0;
    for (; it < max_iter && std::sqrt(rr) > rel_tol * bnorm; ++it) {
        apply(p, Ap);
        double pAp = 0;
        for (int k = 0; k < m; ++k) pAp += p[k] * Ap[k];
        if (!(pAp > 0)) throw SingularSystem("elliptic: CG breakdown (operator not SPD)");
        double alpha = rr / pAp;
        for (int k = 0; k < m; ++k) {
            x[k] += alpha * p[k];
            r[k] -= alpha * Ap[k];
        }
        double rr_new = 0;
        for (double v : r) rr_new += v * v;
        double beta = rr_new / rr;
        rr = rr_new;
        for (int k = 0; k < m; ++k) p[k] = r[k] + beta * p[k];
    }
    if (std::sqrt(rr) > rel_tol * bnorm)
        throw SingularSystem("elliptic: CG did not reach tolerance");

    Field2D f;
    f.grid = grid;
    f.name = "u";
    f.values.assign(grid.nodes(), std::numeric_limits<double>::quiet_NaN());
    for (int id = 0; id < grid.nodes(); ++id) {
        switch (grid.mask[id]) {
            case NodeKind::interior: f.values[id] = x[sys.unknown_of[id]]; break;
            case NodeKind::rect_boundary: f.values[id] = rect_value; break;
            case NodeKind::circle_boundary: f.values[id] = circle_value; break;
            case NodeKind::excluded: break;
        }
    }
    return f;
}

Field2D solve_poisson(int n) {
    std::vector<Circle> holes = {{3, 3, 1}, {-3, 3, 1}, {3, -3, 1}, {-3, -3, 1}};
    Grid2D grid = make_masked_grid(-0.5, 0.5, -0.5, 0.5, n, n, holes);
    return solve_masked_dirichlet(
        grid, 0.0, [](double, double) { return 0.0; }, 1.0, 0.0);
}

double helmholtz_forcing(double x, double y) {
    constexpr double mu1 = 1.0, mu2 = 4.0, A = 10.0;
    return A * (mu1 * mu1 + mu2 * mu2 + x * x + y * y) * std::sin(mu1 * std::numbers::pi * x) *
           std::sin(mu2 * std::numbers::pi * y);
}

Field2D solve_helmholtz(int n) {
    constexpr double k = 8.0;
    std::vector<Circle> holes = {{5, 5, 2}, {4, -4, 4}, {-2, -7, 1}, {-6, 5, 3}};
    Grid2D grid = make_masked_grid(-1.0, 1.0, -1.0, 1.0, n, n, holes);
    return solve_masked_dirichlet(grid, k * k, helmholtz_forcing, 0.2, 1.0);
}

}  // namespace sciagent::pde
