#include "flowrec/tv.hpp"

#include <algorithm>
#include <cmath>

#include "flowrec/calculus.hpp"

namespace flowrec {

double tv_value(const ScalarField& theta, double eps) {
  VectorField g = grad(theta);
  double s = 0.0;
  for (size_t p = 0; p < g.x.size(); ++p)
    s += std::sqrt(g.x[p] * g.x[p] + g.y[p] * g.y[p] + eps);
  return s * theta.grid.cell_area();
}

ScalarField tv_gradient(const ScalarField& theta, double eps) {
  VectorField g = grad(theta);
  for (size_t p = 0; p < g.x.size(); ++p) {
    double m = std::sqrt(g.x[p] * g.x[p] + g.y[p] * g.y[p] + eps);
    g.x[p] /= m;
    g.y[p] /= m;
  }
  ScalarField out = div_adjoint(g);
  for (double& v : out.v) v = -v;
  return out;
}

ScalarField tv_reconstruct(const Geometry& geom, const Sinogram& data,
                           const Grid& grid, const TvParams& params,
                           std::vector<double>* history) {
  ScalarField theta(grid);
  theta.fill(0.0);
  auto objective = [&](const ScalarField& x) {
    Sinogram r = forward(x, geom);
    for (size_t k = 0; k < r.v.size(); ++k) r.v[k] -= data.v[k];
    return sino_inner(r, r) + params.mu1 * tv_value(x, params.eps);
  };
  if (history) history->push_back(objective(theta));
  for (int it = 0; it < params.iters; ++it) {
    Sinogram r = forward(theta, geom);
    for (size_t k = 0; k < r.v.size(); ++k) r.v[k] -= data.v[k];
    ScalarField adj = adjoint(r, grid);
    ScalarField tvg = tv_gradient(theta, params.eps);
    for (size_t p = 0; p < theta.v.size(); ++p) {
      double h = 2.0 * adj.v[p];
      double step = h + params.mu1 * tvg.v[p];
      theta.v[p] = std::max(theta.v[p] - params.alpha * step, 0.0);
    }
    if (history) history->push_back(objective(theta));
  }
  return theta;
}

}  // namespace flowrec
