#include "sciagent/pde/burgers.hpp"

#include <cmath>
#include <numbers>

namespace sciagent::pde {

namespace {

constexpr double kNu = 0.01 / std::numbers::pi;
constexpr double kCflSafety = 0.4;

// dt bound: advective h/|u| with |u| <= 1 (max principle for this data),
// diffusive h^2/(2 nu).
double max_stable_dt(double h) { return kCflSafety * std::min(h / 1.0, h * h / (2.0 * kNu)); }

void rhs(const std::vector<double>& u, double h, std::vector<double>& out) {
    const int n = static_cast<int>(u.size()) - 1;
    auto flux = [](double ul, double ur) {
        double a = std::max(std::abs(ul), std::abs(ur));
        return 0.5 * (0.5 * ul * ul + 0.5 * ur * ur) - 0.5 * a * (ur - ul);
    };
    out[0] = 0.0;
    out[n] = 0.0;
    for (int i = 1; i < n; ++i) {
        double conv = (flux(u[i], u[i + 1]) - flux(u[i - 1], u[i])) / h;
        double diff = kNu * (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h);
        out[i] = -conv + diff;
    }
}

}  // namespace

int burgers_default_nt(int nx, int n_save) {
    Grid1D g = Grid1D::uniform(-1.0, 1.0, nx);
    int nt = static_cast<int>(std::ceil(1.0 / max_stable_dt(g.h())));
    int chunk = n_save - 1;
    return ((nt + chunk - 1) / chunk) * chunk;
}

Field2D solve_burgers(int nx, int nt, int n_save) {
    if (nx < 4) throw Error("burgers: nx too small");
    if (n_save < 2 || nt % (n_save - 1) != 0)
        throw Error("burgers: nt must be a positive multiple of n_save-1");
    Grid1D gx = Grid1D::uniform(-1.0, 1.0, nx);
    const double h = gx.h();
    const double dt = 1.0 / nt;
    if (dt > max_stable_dt(h))
        throw CFLViolation("burgers: nt=" + std::to_string(nt) + " too small for nx=" +
                           std::to_string(nx) + " (need nt >= " +
                           std::to_string(burgers_default_nt(nx, 2)) + ")");

    std::vector<double> u(gx.nodes()), k1(gx.nodes()), k2(gx.nodes()), mid(gx.nodes());
    for (int i = 0; i <= nx; ++i) u[i] = -std::sin(std::numbers::pi * gx.xs[i]);
    u[0] = 0.0;
    u[nx] = 0.0;

    Field2D field;
    field.name = "u";
    field.grid = Grid2D::uniform(-1.0, 1.0, 0.0, 1.0, nx, n_save - 1);  // y axis carries t
    field.values.assign(field.grid.nodes(), 0.0);

    const int stride = nt / (n_save - 1);
    auto save_level = [&](int level) {
        for (int i = 0; i <= nx; ++i) field.values[field.grid.idx(i, level)] = u[i];
    };
    save_level(0);

    for (int step = 0; step < nt; ++step) {
        rhs(u, h, k1);
        for (int i = 0; i <= nx; ++i) mid[i] = u[i] + dt * k1[i];
        rhs(mid, h, k2);
        for (int i = 0; i <= nx; ++i) u[i] += 0.5 * dt * (k1[i] + k2[i]);
        u[0] = 0.0;
        u[nx] = 0.0;
        if ((step + 1) % stride == 0) save_level((step + 1) / stride);
    }
    return field;
}

}  // namespace sciagent::pde
