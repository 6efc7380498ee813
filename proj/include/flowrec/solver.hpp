#pragma once

#include <utility>
#include <vector>

#include "flowrec/field.hpp"
#include "flowrec/flow.hpp"
#include "flowrec/projector.hpp"
#include "flowrec/rkhs.hpp"
#include "flowrec/time_grid.hpp"

namespace flowrec {

// Which measurement operator maps a gate image to its data record.
enum class ForwardModel { radon, identity };

// Which unknown is updated first inside one outer iteration.
enum class UpdateOrder { template_first, velocity_first };

enum class WarmStartKind { none, static_tv, first_gate };

// A joint reconstruction problem: gated data, the measurement model, and
// the weights of the variational objective.  In `radon` mode `geoms` and
// `data` hold one entry per gate (gate 1 first); in `identity` mode
// `image_data` holds one reference image per gate instead.
struct Problem {
  Grid grid;
  TimeGrid time;
  ForwardModel forward = ForwardModel::radon;
  std::vector<Geometry> geoms;
  std::vector<Sinogram> data;
  std::vector<ScalarField> image_data;
  double mu1 = 0.0;     // weight of the smoothed TV penalty on the template
  double mu2 = 0.0;     // weight of the kinetic transport penalty
  double tv_eps = 1e-12;
  double sigma = 1.0;   // width of the Gaussian reproducing kernel
  KernelKind kernel = KernelKind::gaussian;

  int n_gates() const { return time.gates; }
};

struct ObjectiveTerms {
  double data = 0.0;       // gate-averaged squared data misfit
  double transport = 0.0;  // mu2-weighted gate-averaged kinetic energy
  double tv = 0.0;         // mu1-weighted smoothed TV of the template
  double total = 0.0;
};

struct SolverConfig {
  double alpha = 0.01;  // template step size
  double beta = 0.05;   // velocity step size
  int max_outer = 100;
  int inner_template = 1;  // template steps per outer iteration (0 = frozen)
  int inner_velocity = 1;  // velocity steps per outer iteration (0 = frozen)
  double tol_template = 0.0;  // relative-change stopping tolerance
  double tol_velocity = 0.0;
  UpdateOrder order = UpdateOrder::template_first;
};

struct WarmStart {
  WarmStartKind kind = WarmStartKind::none;
  int template_iters = 0;
  int velocity_iters = 0;
};

struct SolverDiag {
  long clamp_count = 0;     // clamped continuity weights in the final flow
  double kkt_residual = 0;  // |min(theta, grad_theta J)|_2 at the solution
  std::vector<double> gate_mass;  // integral of each reconstructed gate
};

struct Solution {
  ScalarField template_image;
  VelocityField velocity;
  std::vector<ScalarField> gate_images;  // gate 1 .. N
  std::vector<ObjectiveTerms> history;   // entry 0 is the starting value
  SolverDiag diag;
  int outer_iterations = 0;
};

// Value of the joint objective at (theta, v).
ObjectiveTerms objective(const Problem& P, const ScalarField& theta,
                         const VelocityField& v);

// Gradient of the objective with respect to the template pixels: the
// gate-averaged back-transported residuals (plus the mu2-weighted
// back-averaged kinetic densities) plus the TV term.
ScalarField grad_template(const Problem& P, const ScalarField& theta,
                          const VelocityField& v);

// One projected gradient step on the template (nonnegativity clip).
ScalarField step_template(const Problem& P, const ScalarField& theta,
                          const VelocityField& v, double alpha);

// Momentum-space gradient of the objective with respect to the velocity
// frames, before smoothing by the reproducing kernel.
VelocityField grad_velocity_pre_kernel(const Problem& P,
                                       const ScalarField& theta,
                                       const VelocityField& v);

// Smoothed velocity gradient: the kernel applied frame-by-frame to the
// momentum-space gradient.
VelocityField grad_velocity(const Problem& P, const ScalarField& theta,
                            const VelocityField& v, const KernelOp& K);

// One plain gradient step on the velocity.
VelocityField step_velocity(const Problem& P, const ScalarField& theta,
                            const VelocityField& v, double beta,
                            const KernelOp& K);

// Initial iterates for the alternating scheme.  `none` returns zeros;
// `static_tv` runs template-only steps against all gates with v = 0;
// `first_gate` fits the template to gate 1 only, then runs velocity-only
// steps on the full problem with the template frozen.
std::pair<ScalarField, VelocityField> warm_start(const Problem& P,
                                                 const WarmStart& ws,
                                                 const SolverConfig& cfg);

// Alternating projected gradient descent from the given starting point.
// Stops after `max_outer` iterations or as soon as the relative changes of
// both unknowns drop to their tolerances.  Throws std::runtime_error if the
// objective becomes non-finite.
Solution alternate(const Problem& P, const SolverConfig& cfg,
                   ScalarField theta0, VelocityField v0);

}  // namespace flowrec
