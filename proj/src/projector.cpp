#include "flowrec/projector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace flowrec {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct RayRange {
  double t0 = 0.0;
  int steps = 0;
};

// Clip the ray base + t*dir against the pixel-center hull. The sample layout
// (midpoints of `steps` intervals of width h starting at t0) is shared by
// forward and adjoint so the pair stays an exact transpose.
RayRange clip_ray(const Grid& g, double bx, double by, double dx, double dy,
                  double h) {
  double tmin = -std::numeric_limits<double>::infinity();
  double tmax = std::numeric_limits<double>::infinity();
  const double lox = g.hx0(), hix = g.hx1();
  const double loy = g.hy0(), hiy = g.hy1();
  if (std::abs(dx) < 1e-14) {
    if (bx < lox || bx > hix) return {};
  } else {
    double ta = (lox - bx) / dx, tb = (hix - bx) / dx;
    if (ta > tb) std::swap(ta, tb);
    tmin = std::max(tmin, ta);
    tmax = std::min(tmax, tb);
  }
  if (std::abs(dy) < 1e-14) {
    if (by < loy || by > hiy) return {};
  } else {
    double ta = (loy - by) / dy, tb = (hiy - by) / dy;
    if (ta > tb) std::swap(ta, tb);
    tmin = std::max(tmin, ta);
    tmax = std::min(tmax, tb);
  }
  if (!(tmax > tmin)) return {};
  RayRange r;
  r.t0 = tmin;
  r.steps = static_cast<int>(std::ceil((tmax - tmin) / h));
  return r;
}

}  // namespace

Geometry gate_geometry(int gate, int num_views, int num_bins, double s0,
                       double s1, double offset_step) {
  if (gate < 1 || num_views < 1 || num_bins < 1 || !(s1 > s0))
    throw std::invalid_argument("gate_geometry: bad parameters");
  Geometry g;
  g.num_views = num_views;
  g.num_bins = num_bins;
  g.s0 = s0;
  g.s1 = s1;
  g.angles.resize(num_views);
  for (int k = 0; k < num_views; ++k)
    g.angles[k] = (gate - 1) * offset_step + k * kPi / num_views;
  return g;
}

Sinogram forward(const ScalarField& f, const Geometry& geom) {
  const Grid& g = f.grid;
  Sinogram out(geom);
  const double h = 0.5 * std::min(g.dx, g.dy);
  const double* v = f.v.data();
  for (int view = 0; view < geom.num_views; ++view) {
    const double a = geom.angles[view];
    const double dx = std::cos(a), dy = std::sin(a);
    const double px = -std::sin(a), py = std::cos(a);
    for (int bin = 0; bin < geom.num_bins; ++bin) {
      const double s = geom.bin_center(bin);
      const double bx = s * px, by = s * py;
      RayRange r = clip_ray(g, bx, by, dx, dy, h);
      double acc = 0.0;
      for (int k = 0; k < r.steps; ++k) {
        const double t = r.t0 + (k + 0.5) * h;
        BilinStencil st = bilin_stencil(g, bx + t * dx, by + t * dy);
        if (!st.inside) continue;
        acc += st.w00 * v[st.i00] + st.w10 * v[st.i10] + st.w01 * v[st.i01] +
               st.w11 * v[st.i11];
      }
      out.at(view, bin) = acc * h;
    }
  }
  return out;
}

ScalarField adjoint(const Sinogram& s, const Grid& grid) {
  ScalarField out(grid);
  const double h = 0.5 * std::min(grid.dx, grid.dy);
  const double scale = s.geom.ds() / grid.cell_area();
  double* v = out.v.data();
  for (int view = 0; view < s.geom.num_views; ++view) {
    const double a = s.geom.angles[view];
    const double dx = std::cos(a), dy = std::sin(a);
    const double px = -std::sin(a), py = std::cos(a);
    for (int bin = 0; bin < s.geom.num_bins; ++bin) {
      const double sc = s.geom.bin_center(bin);
      const double bx = sc * px, by = sc * py;
      RayRange r = clip_ray(grid, bx, by, dx, dy, h);
      if (r.steps == 0) continue;
      const double c = s.at(view, bin) * h * scale;
      for (int k = 0; k < r.steps; ++k) {
        const double t = r.t0 + (k + 0.5) * h;
        BilinStencil st = bilin_stencil(grid, bx + t * dx, by + t * dy);
        if (!st.inside) continue;
        v[st.i00] += c * st.w00;
        v[st.i10] += c * st.w10;
        v[st.i01] += c * st.w01;
        v[st.i11] += c * st.w11;
      }
    }
  }
  return out;
}

double sino_inner(const Sinogram& a, const Sinogram& b) {
  double s = 0.0;
  for (size_t k = 0; k < a.v.size(); ++k) s += a.v[k] * b.v[k];
  return s * a.geom.ds();
}

Sinogram add_noise(const Sinogram& g, double snr_db, uint64_t seed) {
  Sinogram out = g;
  if (std::isinf(snr_db)) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> noise(g.v.size());
  double signal2 = 0.0, noise2 = 0.0;
  for (size_t k = 0; k < g.v.size(); ++k) {
    noise[k] = normal(rng);
    signal2 += g.v[k] * g.v[k];
    noise2 += noise[k] * noise[k];
  }
  if (signal2 == 0.0 || noise2 == 0.0) return out;
  // |n'|^2 = |g|^2 * 10^(-snr/10) holds exactly for the drawn sample.
  const double scale = std::sqrt(signal2 * std::pow(10.0, -snr_db / 10.0) /
                                 noise2);
  for (size_t k = 0; k < g.v.size(); ++k) out.v[k] += scale * noise[k];
  return out;
}

}  // namespace flowrec
