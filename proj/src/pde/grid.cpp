#include "sciagent/pde/grid.hpp"

#include <cmath>

#include "sciagent/csv.hpp"

namespace sciagent::pde {

Grid1D Grid1D::uniform(double x0, double x1, int cells) {
    if (cells < 1 || !(x1 > x0)) throw Error("grid: bad 1D extents");
    Grid1D g{x0, x1, cells, {}};
    g.xs.resize(cells + 1);
    double h = (x1 - x0) / cells;
    for (int i = 0; i <= cells; ++i) g.xs[i] = x0 + i * h;
    g.xs.back() = x1;
    return g;
}

Grid2D Grid2D::uniform(double x0, double x1, double y0, double y1, int nx, int ny) {
    if (nx < 1 || ny < 1 || !(x1 > x0) || !(y1 > y0)) throw Error("grid: bad 2D extents");
    Grid2D g;
    g.x0 = x0;
    g.x1 = x1;
    g.y0 = y0;
    g.y1 = y1;
    g.nx = nx;
    g.ny = ny;
    g.xs.resize(nx + 1);
    g.ys.resize(ny + 1);
    for (int i = 0; i <= nx; ++i) g.xs[i] = x0 + i * (x1 - x0) / nx;
    for (int j = 0; j <= ny; ++j) g.ys[j] = y0 + j * (y1 - y0) / ny;
    g.xs.back() = x1;
    g.ys.back() = y1;
    g.mask.assign(g.nodes(), NodeKind::interior);
    return g;
}

namespace {

// Node (ix,iy) lies strictly inside the circle iff
//   (x - cx)^2 + (y - cy)^2 < r^2
// with x = x0 + ix*(x1-x0)/nx. Multiplying through by (10*n)^2 per axis keeps
// everything integral when extents and circle data are exact tenths.
bool strictly_inside(const Grid2D& g, int ix, int iy, const Circle& c) {
    // x scaled by 10*nx: 10*(x0*nx + ix*(x1-x0)) is integral and double-exact
    // for the tenth-valued extents used here, so llround is safe.
    long long sx = llround(10.0 * (g.x0 * g.nx + ix * (g.x1 - g.x0)));
    long long sy = llround(10.0 * (g.y0 * g.ny + iy * (g.y1 - g.y0)));
    long long dx = sx - static_cast<long long>(c.cx_tenths) * g.nx;
    long long dy = sy - static_cast<long long>(c.cy_tenths) * g.ny;
    long long nx2 = static_cast<long long>(g.nx) * g.nx;
    long long ny2 = static_cast<long long>(g.ny) * g.ny;
    long long r2 = static_cast<long long>(c.r_tenths) * c.r_tenths;
    return dx * dx * ny2 + dy * dy * nx2 < r2 * nx2 * ny2;
}

}  // namespace

Grid2D make_masked_grid(double x0, double x1, double y0, double y1, int nx, int ny,
                        const std::vector<Circle>& holes) {
    Grid2D g = Grid2D::uniform(x0, x1, y0, y1, nx, ny);
    for (int iy = 0; iy <= ny; ++iy) {
        for (int ix = 0; ix <= nx; ++ix) {
            bool inside = false;
            for (const auto& c : holes) {
                if (strictly_inside(g, ix, iy, c)) {
                    inside = true;
                    break;
                }
            }
            if (inside) g.mask[g.idx(ix, iy)] = NodeKind::excluded;
        }
    }
    for (int iy = 0; iy <= ny; ++iy) {
        for (int ix = 0; ix <= nx; ++ix) {
            int id = g.idx(ix, iy);
            if (g.mask[id] == NodeKind::excluded) continue;
            bool near_hole = false;
            if (ix > 0 && g.mask[g.idx(ix - 1, iy)] == NodeKind::excluded) near_hole = true;
            if (ix < nx && g.mask[g.idx(ix + 1, iy)] == NodeKind::excluded) near_hole = true;
            if (iy > 0 && g.mask[g.idx(ix, iy - 1)] == NodeKind::excluded) near_hole = true;
            if (iy < ny && g.mask[g.idx(ix, iy + 1)] == NodeKind::excluded) near_hole = true;
            if (near_hole) {
                g.mask[id] = NodeKind::circle_boundary;
            } else if (ix == 0 || ix == nx || iy == 0 || iy == ny) {
                g.mask[id] = NodeKind::rect_boundary;
            }
        }
    }
    return g;
}

void write_field_csv(const Field1D& f, const std::filesystem::path& file) {
    csv::write_artifact_1d(file, f.grid.xs, f.values);
}

void write_field_csv(const Field2D& f, const std::filesystem::path& file) {
    std::vector<double> x, y, v;
    for (int iy = 0; iy <= f.grid.ny; ++iy) {
        for (int ix = 0; ix <= f.grid.nx; ++ix) {
            int id = f.grid.idx(ix, iy);
            if (f.grid.mask[id] == NodeKind::excluded) continue;
            x.push_back(f.grid.xs[ix]);
            y.push_back(f.grid.ys[iy]);
            v.push_back(f.values[id]);
        }
    }
    csv::write_artifact_2d(file, x, y, v);
}

}  // namespace sciagent::pde
