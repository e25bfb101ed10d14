#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sciagent/error.hpp"

namespace sciagent::pde {

struct CFLViolation : Error {
    using Error::Error;
};

struct Grid1D {
    double x0 = 0, x1 = 1;
    int cells = 0;  // nodes = cells + 1
    std::vector<double> xs;

    static Grid1D uniform(double x0, double x1, int cells);
    double h() const { return (x1 - x0) / cells; }
    int nodes() const { return cells + 1; }
};

enum class NodeKind : std::uint8_t { interior, rect_boundary, circle_boundary, excluded };

// Circle with center/radius given in exact tenths so that node containment
// can be decided in integer arithmetic (no ties from rounding).
struct Circle {
    int cx_tenths;
    int cy_tenths;
    int r_tenths;

    double cx() const { return cx_tenths / 10.0; }
    double cy() const { return cy_tenths / 10.0; }
    double r() const { return r_tenths / 10.0; }
};

struct Grid2D {
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    int nx = 0, ny = 0;  // cells per axis; nodes are (nx+1) x (ny+1)
    std::vector<double> xs, ys;
    std::vector<NodeKind> mask;  // row-major, x fastest: idx = iy*(nx+1) + ix

    static Grid2D uniform(double x0, double x1, double y0, double y1, int nx, int ny);
    int idx(int ix, int iy) const { return iy * (nx + 1) + ix; }
    int nodes() const { return (nx + 1) * (ny + 1); }
    double hx() const { return (x1 - x0) / nx; }
    double hy() const { return (y1 - y0) / ny; }
};

// Node classification for a rectangle-minus-circles domain:
//   excluded        strictly inside some circle,
//   circle_boundary not excluded but 4-adjacent to an excluded node,
//   rect_boundary   on the outer rectangle edge,
//   interior        everything else.
// Containment tests are exact: coordinates and circle data are compared as
// integers scaled by 10*cells.
Grid2D make_masked_grid(double x0, double x1, double y0, double y1, int nx, int ny,
                        const std::vector<Circle>& holes);

struct Field1D {
    Grid1D grid;
    std::vector<double> values;
    std::string name;
};

struct Field2D {
    Grid2D grid;
    std::vector<double> values;  // per node; NaN at excluded nodes
    std::string name;
};

void write_field_csv(const Field1D& f, const std::filesystem::path& file);
void write_field_csv(const Field2D& f, const std::filesystem::path& file);  // skips excluded nodes

}  // namespace sciagent::pde
