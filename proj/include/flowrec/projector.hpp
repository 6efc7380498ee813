#pragma once

#include <cstdint>
#include <vector>

#include "flowrec/calculus.hpp"
#include "flowrec/field.hpp"

namespace flowrec {

// Parallel-beam acquisition: num_views directions, num_bins detector bins
// with centers spanning [s0,s1]. A view at angle a integrates along the
// direction (cos a, sin a); the detector coordinate runs along (-sin a, cos a).
struct Geometry {
  int num_views = 0;
  int num_bins = 0;
  double s0 = 0.0, s1 = 0.0;
  std::vector<double> angles;

  double ds() const { return (s1 - s0) / num_bins; }
  double bin_center(int b) const { return s0 + (b + 0.5) * ds(); }
  int size() const { return num_views * num_bins; }
};

struct Sinogram {
  Geometry geom;
  std::vector<double> v;

  Sinogram() = default;
  explicit Sinogram(const Geometry& g) : geom(g), v(g.size(), 0.0) {}
  double& at(int view, int bin) { return v[view * geom.num_bins + bin]; }
  double at(int view, int bin) const { return v[view * geom.num_bins + bin]; }
};

// Gate i (1-based) rotates the evenly spaced half-open view fan
// {k*pi/num_views : k = 0..num_views-1} by (i-1)*offset_step.
Geometry gate_geometry(int gate, int num_views, int num_bins, double s0,
                       double s1, double offset_step);

// Line integrals sampled at step min(dx,dy)/2 along each ray, scaled by the
// step length. Rays that miss the pixel-center hull contribute zero.
Sinogram forward(const ScalarField& f, const Geometry& geom);

// Exact transpose of forward under the weighted pairings
// <forward(f), s>_ds = <f, adjoint(s)>_dxdy.
ScalarField adjoint(const Sinogram& s, const Grid& grid);

// Inner product with the detector bin-width weight (no view-count factor).
double sino_inner(const Sinogram& a, const Sinogram& b);

// Additive Gaussian noise scaled so 10*log10(|g|^2/|n|^2) equals snr_db
// exactly for the drawn sample. Infinite snr_db returns the input unchanged.
Sinogram add_noise(const Sinogram& g, double snr_db, uint64_t seed);

}  // namespace flowrec
