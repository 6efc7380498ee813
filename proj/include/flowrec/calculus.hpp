#pragma once

#include <algorithm>
#include <limits>

#include "flowrec/field.hpp"

namespace flowrec {

// Bilinear interpolation stencil at a query point. Queries outside the hull
// of pixel centers are flagged and treated as zero; gather and scatter share
// this weight computation so the two stay exact transposes of each other.
struct BilinStencil {
  int i00 = 0, i10 = 0, i01 = 0, i11 = 0;  // flat indices
  double w00 = 0, w10 = 0, w01 = 0, w11 = 0;
  bool inside = false;
};

inline BilinStencil bilin_stencil(const Grid& g, double px, double py) {
  BilinStencil s;
  double u = (px - g.x0) / g.dx - 0.5;
  double w = (py - g.y0) / g.dy - 0.5;
  // Inside test in index coordinates, with slack for the round-off that maps
  // boundary pixel centers a few ulps past the hull on some grids. The slack
  // is ~1e-12 index units even at large sizes, far below bilinear resolution.
  const double tol = 32.0 * std::numeric_limits<double>::epsilon() *
                     (std::max(g.nx, g.ny) + 1.0);
  if (u < -tol || u > g.nx - 1.0 + tol || w < -tol || w > g.ny - 1.0 + tol)
    return s;
  if (u < 0.0) u = 0.0;
  if (u > g.nx - 1.0) u = g.nx - 1.0;
  if (w < 0.0) w = 0.0;
  if (w > g.ny - 1.0) w = g.ny - 1.0;
  int i0 = static_cast<int>(std::floor(u));
  int j0 = static_cast<int>(std::floor(w));
  double fu = u - i0;
  double fv = w - j0;
  if (i0 < 0) {
    i0 = 0;
    fu = 0.0;
  }
  if (j0 < 0) {
    j0 = 0;
    fv = 0.0;
  }
  if (i0 > g.nx - 2) {
    i0 = g.nx - 2 >= 0 ? g.nx - 2 : 0;
    fu = 1.0;
  }
  if (j0 > g.ny - 2) {
    j0 = g.ny - 2 >= 0 ? g.ny - 2 : 0;
    fv = 1.0;
  }
  int i1 = i0 + 1 < g.nx ? i0 + 1 : i0;
  int j1 = j0 + 1 < g.ny ? j0 + 1 : j0;
  s.i00 = g.idx(i0, j0);
  s.i10 = g.idx(i1, j0);
  s.i01 = g.idx(i0, j1);
  s.i11 = g.idx(i1, j1);
  s.w00 = (1.0 - fu) * (1.0 - fv);
  s.w10 = fu * (1.0 - fv);
  s.w01 = (1.0 - fu) * fv;
  s.w11 = fu * fv;
  s.inside = true;
  return s;
}

// Field value at (px,py); zero outside the pixel-center hull.
inline double interp(const ScalarField& f, double px, double py) {
  BilinStencil s = bilin_stencil(f.grid, px, py);
  if (!s.inside) return 0.0;
  const double* v = f.v.data();
  return s.w00 * v[s.i00] + s.w10 * v[s.i10] + s.w01 * v[s.i01] +
         s.w11 * v[s.i11];
}

// Forward differences; the last row/column of each component is zero.
VectorField grad(const ScalarField& f);

// Exact negative adjoint of grad: <grad f, p> = -<f, div_adjoint p>.
ScalarField div_adjoint(const VectorField& p);

// Central differences with replicated boundary values; used inside the
// transport recursions, where one-sided stencils bias the drift.
ScalarField div_central(const VectorField& p);

// Exact negative transpose of div_central:
// <q, div_central p> = -<grad_central_transpose q, p>.
// Interior rows coincide with plain central differences of q.
VectorField grad_central_transpose(const ScalarField& q);

// Central differences with replicated boundary values.
VectorField grad_central(const ScalarField& q);

// Cell-area weighted inner products and derived norms.
double inner(const ScalarField& a, const ScalarField& b);
double inner(const VectorField& a, const VectorField& b);
double norm_l2(const ScalarField& a);
double norm_l2(const VectorField& a);

// Integral of the field over the domain (inner product with ones).
double mass(const ScalarField& f);

double min_value(const ScalarField& f);
double max_value(const ScalarField& f);

}  // namespace flowrec
