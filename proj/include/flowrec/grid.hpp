#pragma once

#include <cmath>
#include <stdexcept>

namespace flowrec {

// Uniform pixel grid on the rectangle [x0,x1] x [y0,y1].
// Pixel (i,j) has its center at (x0 + (i+0.5)*dx, y0 + (j+0.5)*dy);
// fields are stored row-major with index j*nx + i.
struct Grid {
  int nx = 0, ny = 0;
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
  double dx = 0.0, dy = 0.0;

  int size() const { return nx * ny; }
  double cell_area() const { return dx * dy; }
  int idx(int i, int j) const { return j * nx + i; }

  double cx(int i) const { return x0 + (i + 0.5) * dx; }
  double cy(int j) const { return y0 + (j + 0.5) * dy; }
  int ix(double x) const { return static_cast<int>(std::floor((x - x0) / dx)); }
  int iy(double y) const { return static_cast<int>(std::floor((y - y0) / dy)); }

  // Hull of pixel centers; queries outside it evaluate to zero under interp.
  double hx0() const { return x0 + 0.5 * dx; }
  double hx1() const { return x1 - 0.5 * dx; }
  double hy0() const { return y0 + 0.5 * dy; }
  double hy1() const { return y1 - 0.5 * dy; }

  bool same_shape(const Grid& o) const {
    return nx == o.nx && ny == o.ny && x0 == o.x0 && x1 == o.x1 &&
           y0 == o.y0 && y1 == o.y1;
  }
};

inline Grid make_grid(int nx, int ny, double x0, double x1, double y0,
                      double y1) {
  if (nx < 2 || ny < 2 || !(x1 > x0) || !(y1 > y0))
    throw std::invalid_argument("make_grid: bad parameters");
  Grid g;
  g.nx = nx;
  g.ny = ny;
  g.x0 = x0;
  g.x1 = x1;
  g.y0 = y0;
  g.y1 = y1;
  g.dx = (x1 - x0) / nx;
  g.dy = (y1 - y0) / ny;
  return g;
}

}  // namespace flowrec
