#include "sciagent/pde/ns.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace sciagent::pde {

namespace {

constexpr double kPi = std::numbers::pi;

// MAC layout: u on x-faces (nx+1 by ny), v on y-faces (nx by ny+1),
// p at cell centers (nx by ny).
struct Mac {
    int nx, ny;
    double h, x0, y0;
    std::vector<double> u, v;

    Mac(int nx_, int ny_, double h_, double x0_, double y0_)
        : nx(nx_), ny(ny_), h(h_), x0(x0_), y0(y0_),
          u(static_cast<std::size_t>(nx + 1) * ny, 0.0),
          v(static_cast<std::size_t>(nx) * (ny + 1), 0.0) {}

    int ui(int i, int j) const { return j * (nx + 1) + i; }
    int vi(int i, int j) const { return j * nx + i; }
    int pi(int i, int j) const { return j * nx + i; }

    double max_speed() const {
        double m = 0;
        for (double val : u) m = std::max(m, std::abs(val));
        for (double val : v) m = std::max(m, std::abs(val));
        return m;
    }
};

double upwind(double vel, double back, double fwd) { return vel > 0 ? back : fwd; }

// Divergence at cell centers.
void divergence(const Mac& g, std::vector<double>& div) {
    div.assign(static_cast<std::size_t>(g.nx) * g.ny, 0.0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            div[g.pi(i, j)] = (g.u[g.ui(i + 1, j)] - g.u[g.ui(i, j)] + g.v[g.vi(i, j + 1)] -
                               g.v[g.vi(i, j)]) /
                              g.h;
}

double max_abs(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// ---------------------------------------------------------------------------
// Pressure solvers. Operator A = -Laplace with per-side boundary handling:
// Neumann sides contribute nothing, Dirichlet(0) sides reflect the ghost.
// ---------------------------------------------------------------------------

struct PressureStencil {
    int nx, ny;
    double h;
    bool dirichlet_right = false;  // outlet p=0; all other sides Neumann

    void apply(const std::vector<double>& in, std::vector<double>& out) const {
        const double ih2 = 1.0 / (h * h);
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                int id = j * nx + i;
                double diag = 0, off = 0;
                if (i > 0) {
                    diag += 1;
                    off += in[id - 1];
                }
                if (i < nx - 1) {
                    diag += 1;
                    off += in[id + 1];
                } else if (dirichlet_right) {
                    diag += 2;  // ghost = -p
                }
                if (j > 0) {
                    diag += 1;
                    off += in[id - nx];
                }
                if (j < ny - 1) {
                    diag += 1;
                    off += in[id + nx];
                }
                out[id] = (diag * in[id] - off) * ih2;
            }
        }
    }

    double diag_at(int i, int j) const {
        double d = 0;
        if (i > 0) d += 1;
        if (i < nx - 1)
            d += 1;
        else if (dirichlet_right)
            d += 2;
        if (j > 0) d += 1;
        if (j < ny - 1) d += 1;
        return d / (h * h);
    }

    // SSOR application z = M^-1 r with M = (D/w + L) (w/(2-w)) D^-1 (D/w + U);
    // one forward and one backward sweep over the 5-point stencil.
    void ssor_apply(const std::vector<double>& r, std::vector<double>& z, double omega) const {
        const double off = -1.0 / (h * h);
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                int id = j * nx + i;
                double acc = r[id];
                if (i > 0) acc -= off * z[id - 1];
                if (j > 0) acc -= off * z[id - nx];
                z[id] = acc * omega / diag_at(i, j);
            }
        }
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                int id = j * nx + i;
                z[id] *= (2.0 - omega) / omega * diag_at(i, j);
            }
        for (int j = ny - 1; j >= 0; --j) {
            for (int i = nx - 1; i >= 0; --i) {
                int id = j * nx + i;
                double acc = z[id];
                if (i < nx - 1) acc -= off * z[id + 1];
                if (j < ny - 1) acc -= off * z[id + nx];
                z[id] = acc * omega / diag_at(i, j);
            }
        }
    }
};

// SSOR-preconditioned CG for the all-Neumann (cavity) system; rhs is deflated
// against the constant nullspace by the caller. Warm-started from phi; the
// stopping rule is the true residual in the max norm.
int pressure_cg(const PressureStencil& A, const std::vector<double>& b, std::vector<double>& phi,
                double tol_inf, int max_iter) {
    const std::size_t m = b.size();
    constexpr double kOmega = 1.5;
    std::vector<double> r(m), z(m), p(m), Ap(m);
    A.apply(phi, Ap);
    for (std::size_t k = 0; k < m; ++k) r[k] = b[k] - Ap[k];
    A.ssor_apply(r, z, kOmega);
    p = z;
    double rz = 0;
    for (std::size_t k = 0; k < m; ++k) rz += r[k] * z[k];
    int it = 0;
    while (it < max_iter && max_abs(r) > tol_inf) {
        A.apply(p, Ap);
        double pAp = 0;
        for (std::size_t k = 0; k < m; ++k) pAp += p[k] * Ap[k];
        if (!(pAp > 0)) break;  // nullspace direction; rhs deflation keeps this rare
        double alpha = rz / pAp;
        for (std::size_t k = 0; k < m; ++k) {
            phi[k] += alpha * p[k];
            r[k] -= alpha * Ap[k];
        }
        A.ssor_apply(r, z, kOmega);
        double rz_new = 0;
        for (std::size_t k = 0; k < m; ++k) rz_new += r[k] * z[k];
        double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t k = 0; k < m; ++k) p[k] = z[k] + beta * p[k];
        ++it;
    }
    return it;
}

// Restarted GMRES, right-preconditioned with one SSOR sweep (a plain Jacobi
// preconditioner stalls on this system above ~32 cells per side). Returns
// iterations; throws GMRESStalled when the budget is exhausted above
// tolerance.
int pressure_gmres(const PressureStencil& A, const std::vector<double>& b,
                   std::vector<double>& x, double tol, int restart, int max_iter) {
    const std::size_t m = b.size();
    constexpr double kOmega = 1.5;

    double bnorm = 0;
    for (double v : b) bnorm += v * v;
    bnorm = std::sqrt(bnorm);
    if (bnorm == 0) {
        std::fill(x.begin(), x.end(), 0.0);  // A nonsingular: the solution is 0
        return 0;
    }
    const double target = std::max(tol * bnorm, 1e-300);

    std::vector<std::vector<double>> V;
    std::vector<double> w(m), tmp(m);
    int total_iters = 0;

    while (total_iters < max_iter) {
        A.apply(x, w);
        std::vector<double> r(m);
        for (std::size_t k = 0; k < m; ++k) r[k] = b[k] - w[k];
        double beta = std::sqrt([&] {
            double s = 0;
            for (double v : r) s += v * v;
            return s;
        }());
        if (beta <= target) return total_iters;

        int kmax = std::min(restart, max_iter - total_iters);
        V.assign(1, r);
        for (double& v : V[0]) v /= beta;
        std::vector<std::vector<double>> H(kmax + 1, std::vector<double>(kmax, 0.0));
        std::vector<double> cs(kmax), sn(kmax), g(kmax + 1, 0.0);
        g[0] = beta;

        int k = 0;
        for (; k < kmax; ++k) {
            A.ssor_apply(V[k], tmp, kOmega);
            A.apply(tmp, w);
            // modified Gram-Schmidt
            for (int row = 0; row <= k; ++row) {
                double dot = 0;
                for (std::size_t q = 0; q < m; ++q) dot += w[q] * V[row][q];
                H[row][k] = dot;
                for (std::size_t q = 0; q < m; ++q) w[q] -= dot * V[row][q];
            }
            double wn = 0;
            for (double v : w) wn += v * v;
            wn = std::sqrt(wn);
            H[k + 1][k] = wn;
            // apply accumulated Givens rotations
            for (int row = 0; row < k; ++row) {
                double t = cs[row] * H[row][k] + sn[row] * H[row + 1][k];
                H[row + 1][k] = -sn[row] * H[row][k] + cs[row] * H[row + 1][k];
                H[row][k] = t;
            }
            double denom = std::hypot(H[k][k], H[k + 1][k]);
            if (denom == 0) {
                cs[k] = 1;
                sn[k] = 0;
            } else {
                cs[k] = H[k][k] / denom;
                sn[k] = H[k + 1][k] / denom;
            }
            H[k][k] = cs[k] * H[k][k] + sn[k] * H[k + 1][k];
            H[k + 1][k] = 0;
            g[k + 1] = -sn[k] * g[k];
            g[k] = cs[k] * g[k];
            ++total_iters;

            bool happy = wn == 0;
            if (std::abs(g[k + 1]) <= target || happy || k == kmax - 1 ||
                total_iters >= max_iter) {
                ++k;
                break;
            }
            V.push_back(w);
            for (double& v : V.back()) v /= wn;
        }

        // back substitution for the least-squares coefficients
        std::vector<double> ycoef(k, 0.0);
        for (int row = k - 1; row >= 0; --row) {
            double s = g[row];
            for (int col = row + 1; col < k; ++col) s -= H[row][col] * ycoef[col];
            ycoef[row] = std::abs(H[row][row]) > 1e-300 ? s / H[row][row] : 0.0;
        }
        std::vector<double> update(m, 0.0);
        for (int col = 0; col < k; ++col)
            for (std::size_t q = 0; q < m; ++q) update[q] += ycoef[col] * V[col][q];
        A.ssor_apply(update, tmp, kOmega);
        for (std::size_t q = 0; q < m; ++q) x[q] += tmp[q];
    }

    A.apply(x, w);
    double res = 0;
    for (std::size_t kq = 0; kq < m; ++kq) res += (b[kq] - w[kq]) * (b[kq] - w[kq]);
    if (std::sqrt(res) > target)
        throw GMRESStalled("pressure GMRES exhausted " + std::to_string(max_iter) +
                           " iterations at relative residual " +
                           std::to_string(std::sqrt(res) / bnorm));
    return max_iter;
}

// ---------------------------------------------------------------------------
// Shared momentum update: first-order upwind advection + central diffusion.
// Ghost values come from the boundary closures passed in.
// ---------------------------------------------------------------------------

struct Closures {
    // tangential ghosts: value of u just outside bottom/top, v outside left/right
    std::function<double(int i, const Mac&)> u_ghost_bottom, u_ghost_top;
    std::function<double(int j, const Mac&)> v_ghost_left, v_ghost_right;
};

void momentum_star(const Mac& g, double nu, double dt,
                   const std::function<double(double, double)>& force_v, const Closures& bc,
                   Mac& star) {
    const double h = g.h;
    // u faces, interior in x
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 1; i < g.nx; ++i) {
            double uc = g.u[g.ui(i, j)];
            double ul = g.u[g.ui(i - 1, j)];
            double ur = g.u[g.ui(i + 1, j)];
            double ub = j > 0 ? g.u[g.ui(i, j - 1)] : bc.u_ghost_bottom(i, g);
            double ut = j < g.ny - 1 ? g.u[g.ui(i, j + 1)] : bc.u_ghost_top(i, g);
            double vbar = 0.25 * (g.v[g.vi(i - 1, j)] + g.v[g.vi(i, j)] +
                                  g.v[g.vi(i - 1, j + 1)] + g.v[g.vi(i, j + 1)]);
            double dudx = upwind(uc, (uc - ul) / h, (ur - uc) / h);
            double dudy = upwind(vbar, (uc - ub) / h, (ut - uc) / h);
            double lap = (ul + ur + ub + ut - 4.0 * uc) / (h * h);
            star.u[g.ui(i, j)] = uc + dt * (-uc * dudx - vbar * dudy + nu * lap);
        }
    }
    // v faces, interior in y
    for (int j = 1; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            double vc = g.v[g.vi(i, j)];
            double vb = g.v[g.vi(i, j - 1)];
            double vt = g.v[g.vi(i, j + 1)];
            double vl = i > 0 ? g.v[g.vi(i - 1, j)] : bc.v_ghost_left(j, g);
            double vr = i < g.nx - 1 ? g.v[g.vi(i + 1, j)] : bc.v_ghost_right(j, g);
            double ubar = 0.25 * (g.u[g.ui(i, j - 1)] + g.u[g.ui(i + 1, j - 1)] +
                                  g.u[g.ui(i, j)] + g.u[g.ui(i + 1, j)]);
            double dvdy = upwind(vc, (vc - vb) / h, (vt - vc) / h);
            double dvdx = upwind(ubar, (vc - vl) / h, (vr - vc) / h);
            double lap = (vl + vr + vb + vt - 4.0 * vc) / (h * h);
            double f = force_v ? force_v(g.x0 + (i + 0.5) * h, g.y0 + j * h) : 0.0;
            star.v[g.vi(i, j)] = vc + dt * (-ubar * dvdx - vc * dvdy + nu * lap + f);
        }
    }
}

void project(Mac& g, const PressureStencil& A, std::vector<double>& phi,
             const std::vector<double>& div, bool deflate, double tol_inf, int cg_max,
             bool use_gmres, int restart, int gmres_max, double gmres_tol,
             bool correct_right_face) {
    std::vector<double> b(div.size());
    for (std::size_t k = 0; k < b.size(); ++k) b[k] = -div[k];
    if (deflate) {
        double mean = 0;
        for (double v : b) mean += v;
        mean /= static_cast<double>(b.size());
        for (double& v : b) v -= mean;
    }
    if (use_gmres)
        pressure_gmres(A, b, phi, gmres_tol, restart, gmres_max);
    else
        pressure_cg(A, b, phi, tol_inf, cg_max);

    const double h = g.h;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i)
            g.u[g.ui(i, j)] -= (phi[g.pi(i, j)] - phi[g.pi(i - 1, j)]) / h;
    if (correct_right_face) {
        for (int j = 0; j < g.ny; ++j)
            g.u[g.ui(g.nx, j)] -= (-phi[g.pi(g.nx - 1, j)] - phi[g.pi(g.nx - 1, j)]) / h;
    }
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            g.v[g.vi(i, j)] -= (phi[g.pi(i, j)] - phi[g.pi(i, j - 1)]) / h;
}

// Bilinear sample of a staggered component for coarse-to-fine continuation.
double sample_bilinear(const std::vector<double>& a, int cols, int rows, double fx, double fy) {
    fx = std::clamp(fx, 0.0, static_cast<double>(cols - 1));
    fy = std::clamp(fy, 0.0, static_cast<double>(rows - 1));
    int i0 = std::min(static_cast<int>(fx), cols - 2 >= 0 ? cols - 2 : 0);
    int j0 = std::min(static_cast<int>(fy), rows - 2 >= 0 ? rows - 2 : 0);
    double tx = fx - i0, ty = fy - j0;
    auto at = [&](int i, int j) { return a[j * cols + i]; };
    if (cols == 1) return a[j0 * cols];
    if (rows == 1) return at(i0, 0) * (1 - tx) + at(i0 + 1, 0) * tx;
    return at(i0, j0) * (1 - tx) * (1 - ty) + at(i0 + 1, j0) * tx * (1 - ty) +
           at(i0, j0 + 1) * (1 - tx) * ty + at(i0 + 1, j0 + 1) * tx * ty;
}

}  // namespace

double cavity_lid_velocity(double x, double alpha) { return alpha * x * (1.0 - x); }

double unsteady_inlet_velocity(double y, double t) {
    return std::sin(kPi * y) *
           (std::sin(kPi * t) + std::sin(3.0 * kPi * t) + std::sin(5.0 * kPi * t));
}

namespace {

NsSolution cavity_output(const Mac& g, const std::vector<double>& phi, double dt, int steps,
                         std::vector<double> history, double max_div, double lid_alpha) {
    NsSolution out;
    Grid2D node = Grid2D::uniform(0.0, 2.0, 0.0, 2.0, g.nx, g.ny);
    out.u = {node, std::vector<double>(node.nodes(), 0.0), "u"};
    out.v = {node, std::vector<double>(node.nodes(), 0.0), "v"};
    out.p = {node, std::vector<double>(node.nodes(), 0.0), "p"};

    for (int j = 0; j <= g.ny; ++j) {
        for (int i = 0; i <= g.nx; ++i) {
            int id = node.idx(i, j);
            if (j == 0) {
                out.u.values[id] = 0.0;
            } else if (j == g.ny) {
                out.u.values[id] = cavity_lid_velocity(node.xs[i], lid_alpha);
            } else {
                out.u.values[id] = 0.5 * (g.u[g.ui(i, j - 1)] + g.u[g.ui(i, j)]);
            }
            if (i == 0 || i == g.nx) {
                out.v.values[id] = 0.0;
            } else if (j == 0 || j == g.ny) {
                out.v.values[id] = 0.0;
            } else {
                out.v.values[id] = 0.5 * (g.v[g.vi(i - 1, j)] + g.v[g.vi(i, j)]);
            }
            // node pressure = mean of adjacent cells (Neumann ghosts mirror)
            double acc = 0;
            int cnt = 0;
            for (int cj : {j - 1, j}) {
                for (int ci : {i - 1, i}) {
                    if (ci >= 0 && ci < g.nx && cj >= 0 && cj < g.ny) {
                        acc += phi[g.pi(ci, cj)] / dt;
                        ++cnt;
                    }
                }
            }
            out.p.values[id] = acc / cnt;
        }
    }
    double gauge = out.p.values[node.idx(0, 0)];
    for (double& v : out.p.values) v -= gauge;
    out.p.values[node.idx(0, 0)] = 0.0;

    out.max_divergence = max_div;
    out.steps = steps;
    out.residual_history = std::move(history);
    return out;
}

Mac cavity_march(int n, const CavityOptions& opt, Mac init, std::vector<double>* phi_out,
                 double* dt_out, int* steps_out, std::vector<double>* history_out,
                 double* div_out, double tol) {
    const double h = 2.0 / n;
    const double nu = 1.0 / opt.re;
    Mac g = std::move(init);

    Closures bc;
    bc.u_ghost_bottom = [](int i, const Mac& m) { return -m.u[m.ui(i, 0)]; };
    bc.u_ghost_top = [&opt](int i, const Mac& m) {
        double x = i * m.h;
        return 2.0 * cavity_lid_velocity(x, opt.lid_alpha) - m.u[m.ui(i, m.ny - 1)];
    };
    bc.v_ghost_left = [](int j, const Mac& m) { return -m.v[m.vi(0, j)]; };
    bc.v_ghost_right = [](int j, const Mac& m) { return -m.v[m.vi(m.nx - 1, j)]; };

    PressureStencil A{n, n, h, false};
    std::vector<double> phi(static_cast<std::size_t>(n) * n, 0.0);
    std::vector<double> div;
    Mac star = g;
    std::vector<double> history;
    double res = std::numeric_limits<double>::infinity();
    double dt = 0;
    int step = 0;
    for (; step < opt.max_steps && res > tol; ++step) {
        double vmax = std::max(g.max_speed(), 2.0 * std::abs(opt.lid_alpha));
        dt = opt.cfl * std::min(h / vmax, h * h / (4.0 * nu));
        star = g;
        momentum_star(g, nu, dt, nullptr, bc, star);
        // walls: normal faces stay zero
        for (int j = 0; j < n; ++j) {
            star.u[star.ui(0, j)] = 0.0;
            star.u[star.ui(n, j)] = 0.0;
        }
        for (int i = 0; i < n; ++i) {
            star.v[star.vi(i, 0)] = 0.0;
            star.v[star.vi(i, n)] = 0.0;
        }
        divergence(star, div);
        Mac prev = g;
        g = star;
        project(g, A, phi, div, /*deflate=*/true, opt.pressure_tol, 50 * n, false, 0, 0, 0,
                /*correct_right_face=*/false);
        res = 0;
        for (std::size_t k = 0; k < g.u.size(); ++k)
            res = std::max(res, std::abs(g.u[k] - prev.u[k]));
        for (std::size_t k = 0; k < g.v.size(); ++k)
            res = std::max(res, std::abs(g.v[k] - prev.v[k]));
        res /= dt;
        if (step % 25 == 0 || res <= tol) history.push_back(res);
    }
    if (res > tol)
        throw NotConverged("cavity: steady residual " + std::to_string(res) + " after " +
                               std::to_string(step) + " steps",
                           history);
    divergence(g, div);
    if (max_abs(div) > opt.pressure_tol) {  // certify the final field at the floor
        project(g, A, phi, div, true, opt.pressure_tol, 50 * n, false, 0, 0, 0, false);
        divergence(g, div);
    }
    if (div_out) *div_out = max_abs(div);
    if (phi_out) *phi_out = phi;
    if (dt_out) *dt_out = dt;
    if (steps_out) *steps_out = step;
    if (history_out) *history_out = std::move(history);
    return g;
}

}  // namespace

NsSolution solve_lid_cavity(const CavityOptions& opt) {
    if (opt.n < 8 || opt.n % 2 != 0) throw Error("cavity: n must be even and >= 8");
    if (!(opt.re > 0)) throw Error("cavity: Re must be positive");

    Mac g(opt.n, opt.n, 2.0 / opt.n, 0.0, 0.0);
    if (opt.continuation && opt.n > 16) {
        CavityOptions coarse = opt;
        coarse.n = opt.n / 2;
        coarse.steady_tol = std::max(opt.steady_tol * 100, 1e-6);
        NsSolution cs = solve_lid_cavity(coarse);
        // initial guess: sample the coarse node fields at the fine face positions
        const double hc = 2.0 / coarse.n, hf = g.h;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i <= g.nx; ++i) {
                double x = i * hf, y = (j + 0.5) * hf;
                g.u[g.ui(i, j)] = sample_bilinear(cs.u.values, coarse.n + 1, coarse.n + 1,
                                                  x / hc, y / hc);
            }
        for (int j = 0; j <= g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                double x = (i + 0.5) * hf, y = j * hf;
                g.v[g.vi(i, j)] = sample_bilinear(cs.v.values, coarse.n + 1, coarse.n + 1,
                                                  x / hc, y / hc);
            }
        for (int j = 0; j < g.ny; ++j) {
            g.u[g.ui(0, j)] = 0.0;
            g.u[g.ui(g.nx, j)] = 0.0;
        }
        for (int i = 0; i < g.nx; ++i) {
            g.v[g.vi(i, 0)] = 0.0;
            g.v[g.vi(i, g.ny)] = 0.0;
        }
    }

    std::vector<double> phi, history;
    double dt = 0, max_div = 0;
    int steps = 0;
    Mac final =
        cavity_march(opt.n, opt, std::move(g), &phi, &dt, &steps, &history, &max_div,
                     opt.steady_tol);
    return cavity_output(final, phi, dt, steps, std::move(history), max_div, opt.lid_alpha);
}

NsSolution solve_unsteady_ns(const UnsteadyNsOptions& opt) {
    if (opt.n < 8) throw Error("unsteady ns: n too small");
    const int nx = 2 * opt.n, ny = opt.n;
    const double h = 1.0 / opt.n;
    const double nu = 1.0 / opt.re;

    const double speed_bound = 3.0;  // inlet sum peaks near 2.24; margin for interior
    double dt_cfl = opt.cfl * std::min(h / speed_bound, h * h / (4.0 * nu));
    double dt = opt.dt > 0 ? opt.dt : dt_cfl;
    if (dt > dt_cfl * (1.0 + 1e-12))
        throw CFLViolation("unsteady ns: dt=" + std::to_string(dt) + " exceeds stable bound " +
                           std::to_string(dt_cfl));
    int nt = static_cast<int>(std::ceil(opt.t_end / dt - 1e-12));
    dt = opt.t_end / nt;

    Mac g(nx, ny, h, 0.0, 0.0);
    Closures bc;
    bc.u_ghost_bottom = [](int i, const Mac& m) { return -m.u[m.ui(i, 0)]; };
    bc.u_ghost_top = [](int i, const Mac& m) { return -m.u[m.ui(i, m.ny - 1)]; };
    bc.v_ghost_left = [](int j, const Mac& m) { return -m.v[m.vi(0, j)]; };
    bc.v_ghost_right = [](int j, const Mac& m) { return m.v[m.vi(m.nx - 1, j)]; };  // dv/dx=0

    PressureStencil A{nx, ny, h, /*dirichlet_right=*/true};
    std::vector<double> phi(static_cast<std::size_t>(nx) * ny, 0.0);
    std::vector<double> div;
    Mac star = g;
    double max_div = 0;

    auto set_inlet = [&](Mac& m, double t) {
        for (int j = 0; j < ny; ++j)
            m.u[m.ui(0, j)] = unsteady_inlet_velocity((j + 0.5) * h, t);
    };
    set_inlet(g, 0.0);

    for (int step = 0; step < nt; ++step) {
        double t = step * dt;
        double t_new = (step + 1) * dt;
        if (g.max_speed() * dt / h > 1.0)
            throw CFLViolation("unsteady ns: velocity " + std::to_string(g.max_speed()) +
                               " violates CFL at t=" + std::to_string(t));
        star = g;
        auto force_v = [t](double x, double y) {
            return -std::sin(kPi * x) * std::sin(kPi * y) * std::sin(kPi * t);
        };
        momentum_star(g, nu, dt, force_v, bc, star);
        set_inlet(star, t_new);
        for (int j = 0; j < ny; ++j) star.u[star.ui(nx, j)] = star.u[star.ui(nx - 1, j)];
        for (int i = 0; i < nx; ++i) {
            star.v[star.vi(i, 0)] = 0.0;
            star.v[star.vi(i, ny)] = 0.0;
        }
        divergence(star, div);
        g = star;
        project(g, A, phi, div, /*deflate=*/false, 0.0, 0, /*use_gmres=*/true, opt.gmres_restart,
                opt.gmres_max_iter, opt.gmres_tol, /*correct_right_face=*/true);
    }

    divergence(g, div);
    max_div = max_abs(div);

    NsSolution out;
    Grid2D node = Grid2D::uniform(0.0, 2.0, 0.0, 1.0, nx, ny);
    out.u = {node, std::vector<double>(node.nodes(), 0.0), "u"};
    out.v = {node, std::vector<double>(node.nodes(), 0.0), "v"};
    out.p = {node, std::vector<double>(node.nodes(), 0.0), "p"};
    const double t_final = opt.t_end;
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            int id = node.idx(i, j);
            if (j == 0 || j == ny) {
                out.u.values[id] = 0.0;  // no-slip walls
            } else if (i == 0) {
                out.u.values[id] = unsteady_inlet_velocity(node.ys[j], t_final);
            } else {
                out.u.values[id] = 0.5 * (g.u[g.ui(i, j - 1)] + g.u[g.ui(i, j)]);
            }
            if (j == 0 || j == ny) {
                out.v.values[id] = 0.0;
            } else if (i == 0) {
                out.v.values[id] = 0.0;  // inlet v = 0
            } else if (i == nx) {
                out.v.values[id] = g.v[g.vi(nx - 1, j)];  // dv/dx = 0 at the outlet
            } else {
                out.v.values[id] = 0.5 * (g.v[g.vi(i - 1, j)] + g.v[g.vi(i, j)]);
            }
            if (i == nx) {
                out.p.values[id] = 0.0;  // outlet p = 0
            } else {
                double acc = 0;
                int cnt = 0;
                for (int cj : {j - 1, j}) {
                    for (int ci : {i - 1, i}) {
                        if (ci >= 0 && ci < nx && cj >= 0 && cj < ny) {
                            acc += phi[g.pi(ci, cj)] / dt;
                            ++cnt;
                        }
                    }
                }
                out.p.values[id] = acc / cnt;
            }
        }
    }
    out.max_divergence = max_div;
    out.steps = nt;
    return out;
}

}  // namespace sciagent::pde
