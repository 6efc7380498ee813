#pragma once

#include <vector>

#include "flowrec/calculus.hpp"
#include "flowrec/field.hpp"
#include "flowrec/time_grid.hpp"

namespace flowrec {

// Velocity frames on the fine time nodes tau_j, j = 0..fine_count().
// The first transport step uses frame 1; frame 0 never enters the
// recursions, so objective gradients with respect to it vanish.
struct VelocityField {
  Grid grid;
  TimeGrid time;
  std::vector<VectorField> frames;

  VelocityField() = default;
  VelocityField(const Grid& g, const TimeGrid& t) : grid(g), time(t) {
    frames.assign(static_cast<size_t>(t.fine_count()) + 1, VectorField(g));
  }
  VectorField& frame(int j) { return frames[static_cast<size_t>(j)]; }
  const VectorField& frame(int j) const {
    return frames[static_cast<size_t>(j)];
  }
};

using FrameSequence = std::vector<ScalarField>;

struct FlowDiag {
  long clamp_count = 0;  // pixels where 1 - div(v)/MN went negative
};

// Mass-preserving transport of theta through all fine steps:
// rho_0 = theta, rho_j = (1 - div(v_j)/MN) * rho_{j-1}(x - v_j(x)/MN).
// Negative update factors are clamped at zero and counted. Frames that are
// identically zero reproduce the previous frame bitwise.
FrameSequence push_forward(const ScalarField& theta, const VelocityField& v,
                           FlowDiag* diag = nullptr);

// Jacobian determinant frames of the inverse flow, same recursion with
// rho_0 = 1.
FrameSequence jac_det_sequence(const VelocityField& v, FlowDiag* diag = nullptr);

// Transport of an endpoint field h at gate i back to time zero:
// h_j = h_{j+1}(x + v_j(x)/MN) for j = i*M-1..0. Returns frames j = 0..i*M.
FrameSequence back_transport(const ScalarField& h_end, const VelocityField& v,
                             int gate);

// Time average of |v|^2 carried along the flow from tau_j to gate i:
// eta_j = (1/(iM-j)) * sum_{l=j+1..iM} |v_l|^2 o phi_{tau_j,tau_l},
// with the compositions expanded one step at a time. Zero when j = iM.
ScalarField eta(const VelocityField& v, int j, int gate);

// All eta_j for j = 0..i*M in one backward sweep; matches eta() up to
// floating-point regrouping of the same compositions.
FrameSequence eta_sequence(const VelocityField& v, int gate);

// value[p] = f(x_p + s*w(x_p)); zero-displacement inputs copy f bitwise.
ScalarField compose_displaced(const ScalarField& f, const VectorField& w,
                              double s);

// Pointwise |w|^2.
ScalarField squared_magnitude(const VectorField& w);

}  // namespace flowrec
