#include "flowrec/flow.hpp"

#include <cassert>

namespace flowrec {

namespace {

bool frame_is_zero(const VectorField& w) { return w.is_zero(); }

}  // namespace

ScalarField compose_displaced(const ScalarField& f, const VectorField& w,
                              double s) {
  if (s == 0.0 || frame_is_zero(w)) return f;
  const Grid& g = f.grid;
  ScalarField out(g);
  const double* wx = w.x.data();
  const double* wy = w.y.data();
  double* o = out.v.data();
  for (int j = 0; j < g.ny; ++j) {
    const double py = g.cy(j);
    for (int i = 0; i < g.nx; ++i) {
      const int p = g.idx(i, j);
      o[p] = interp(f, g.cx(i) + s * wx[p], py + s * wy[p]);
    }
  }
  return out;
}

ScalarField squared_magnitude(const VectorField& w) {
  ScalarField out(w.grid);
  for (size_t k = 0; k < w.x.size(); ++k)
    out.v[k] = w.x[k] * w.x[k] + w.y[k] * w.y[k];
  return out;
}

namespace {

// One step of the mass-preserving recursion shared by push_forward and
// jac_det_sequence.
ScalarField transport_step(const ScalarField& prev, const VectorField& vj,
                           double dt, FlowDiag* diag) {
  if (frame_is_zero(vj)) return prev;
  const Grid& g = prev.grid;
  ScalarField div_v = div_central(vj);
  ScalarField out(g);
  const double* wx = vj.x.data();
  const double* wy = vj.y.data();
  const double* dv = div_v.v.data();
  double* o = out.v.data();
  long clamped = 0;
  for (int j = 0; j < g.ny; ++j) {
    const double py = g.cy(j);
    for (int i = 0; i < g.nx; ++i) {
      const int p = g.idx(i, j);
      const double w = 1.0 - dv[p] * dt;
      if (w < 0.0) {
        o[p] = 0.0;
        ++clamped;
        continue;
      }
      o[p] = w * interp(prev, g.cx(i) - dt * wx[p], py - dt * wy[p]);
    }
  }
  if (diag) diag->clamp_count += clamped;
  return out;
}

}  // namespace

FrameSequence push_forward(const ScalarField& theta, const VelocityField& v,
                           FlowDiag* diag) {
  assert(theta.grid.same_shape(v.grid));
  const int mn = v.time.fine_count();
  const double dt = v.time.dt();
  FrameSequence rho;
  rho.reserve(static_cast<size_t>(mn) + 1);
  rho.push_back(theta);
  for (int j = 1; j <= mn; ++j)
    rho.push_back(transport_step(rho.back(), v.frame(j), dt, diag));
  return rho;
}

FrameSequence jac_det_sequence(const VelocityField& v, FlowDiag* diag) {
  ScalarField ones(v.grid);
  ones.fill(1.0);
  return push_forward(ones, v, diag);
}

FrameSequence back_transport(const ScalarField& h_end, const VelocityField& v,
                             int gate) {
  assert(gate >= 1 && gate <= v.time.gates);
  const int im = v.time.gate_fine_index(gate);
  const double dt = v.time.dt();
  FrameSequence h(static_cast<size_t>(im) + 1, ScalarField());
  h[static_cast<size_t>(im)] = h_end;
  for (int j = im - 1; j >= 0; --j)
    h[static_cast<size_t>(j)] =
        compose_displaced(h[static_cast<size_t>(j) + 1], v.frame(j), dt);
  return h;
}

ScalarField eta(const VelocityField& v, int j, int gate) {
  assert(gate >= 1 && gate <= v.time.gates);
  const int im = v.time.gate_fine_index(gate);
  assert(j >= 0 && j <= im);
  const double dt = v.time.dt();
  ScalarField acc(v.grid);
  if (j == im) return acc;
  for (int l = j + 1; l <= im; ++l) {
    ScalarField w = squared_magnitude(v.frame(l));
    for (int s = l - 1; s >= j; --s) w = compose_displaced(w, v.frame(s), dt);
    for (size_t k = 0; k < acc.v.size(); ++k) acc.v[k] += w.v[k];
  }
  const double inv = 1.0 / (im - j);
  for (double& x : acc.v) x *= inv;
  return acc;
}

FrameSequence eta_sequence(const VelocityField& v, int gate) {
  assert(gate >= 1 && gate <= v.time.gates);
  const int im = v.time.gate_fine_index(gate);
  const double dt = v.time.dt();
  // Running sums S_j = sum_{l=j+1..iM} |v_l|^2 o phi_{tau_j,tau_l} satisfy
  // S_j = (S_{j+1} + |v_{j+1}|^2) o (Id + v_j/MN); composition is linear in
  // the field, so this regroups the per-term chains without changing them.
  FrameSequence out(static_cast<size_t>(im) + 1, ScalarField());
  ScalarField s(v.grid);
  out[static_cast<size_t>(im)] = s;  // eta at the gate itself is zero
  for (int j = im - 1; j >= 0; --j) {
    if (!frame_is_zero(v.frame(j + 1))) {
      ScalarField sq = squared_magnitude(v.frame(j + 1));
      for (size_t k = 0; k < s.v.size(); ++k) s.v[k] += sq.v[k];
    }
    s = compose_displaced(s, v.frame(j), dt);
    ScalarField e = s;
    const double inv = 1.0 / (im - j);
    for (double& x : e.v) x *= inv;
    out[static_cast<size_t>(j)] = e;
  }
  return out;
}

}  // namespace flowrec
