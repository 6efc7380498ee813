#pragma once

#include <vector>

#include "flowrec/field.hpp"
#include "flowrec/projector.hpp"

namespace flowrec {

// Smoothed total-variation seminorm: sum over pixels of
// sqrt(|forward-difference gradient|^2 + eps) times the cell area.
double tv_value(const ScalarField& theta, double eps);

// Gradient of tv_value with respect to the pixel values, i.e. the exact
// adjoint-of-gradient applied to the normalized gradient field.
ScalarField tv_gradient(const ScalarField& theta, double eps);

struct TvParams {
  double mu1 = 0.01;    // weight of the smoothed TV penalty
  double eps = 1e-12;   // smoothing constant inside the square root
  double alpha = 0.01;  // gradient step size
  int iters = 500;      // number of projected gradient steps
};

// Stand-alone reconstruction of a single image from one sinogram by
// projected gradient descent on  |T x - g|^2_ds + mu1 * TV_eps(x)  with a
// nonnegativity clip after every step.  Starts from zero.  When `history`
// is non-null it receives the objective value before the first step and
// after every step.
ScalarField tv_reconstruct(const Geometry& geom, const Sinogram& data,
                           const Grid& grid, const TvParams& params,
                           std::vector<double>* history = nullptr);

}  // namespace flowrec
