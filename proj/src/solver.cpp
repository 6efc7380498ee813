#include "flowrec/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "flowrec/calculus.hpp"
#include "flowrec/tv.hpp"

namespace flowrec {

namespace {

void validate(const Problem& P) {
  int n = P.n_gates();
  if (n < 1) throw std::invalid_argument("problem needs at least one gate");
  if (P.forward == ForwardModel::radon) {
    if (static_cast<int>(P.geoms.size()) != n ||
        static_cast<int>(P.data.size()) != n)
      throw std::invalid_argument("need one geometry and sinogram per gate");
  } else {
    if (static_cast<int>(P.image_data.size()) != n)
      throw std::invalid_argument("need one reference image per gate");
    for (const ScalarField& f : P.image_data)
      if (!f.grid.same_shape(P.grid))
        throw std::invalid_argument("reference image grid mismatch");
  }
}

// Residual back-projection for one gate: the outer derivative of the data
// misfit at the transported image, i.e. twice the adjoint applied to the
// residual.  Optionally reports the misfit value itself.
ScalarField gate_residual_adjoint(const Problem& P, int gate,
                                  const ScalarField& gate_image,
                                  double* misfit) {
  if (P.forward == ForwardModel::radon) {
    const Geometry& geom = P.geoms[gate - 1];
    Sinogram r = forward(gate_image, geom);
    for (size_t k = 0; k < r.v.size(); ++k) r.v[k] -= P.data[gate - 1].v[k];
    if (misfit) *misfit = sino_inner(r, r);
    ScalarField a = adjoint(r, P.grid);
    for (double& x : a.v) x = 2.0 * x;
    return a;
  }
  ScalarField r = gate_image;
  const ScalarField& ref = P.image_data[gate - 1];
  for (size_t k = 0; k < r.v.size(); ++k) r.v[k] -= ref.v[k];
  if (misfit) *misfit = inner(r, r);
  for (double& x : r.v) x = 2.0 * x;
  return r;
}

double velocity_norm(const VelocityField& v) {
  double s = 0.0;
  for (int j = 0; j <= v.time.fine_count(); ++j) {
    const VectorField& f = v.frame(j);
    s += inner(f, f);
  }
  return std::sqrt(s);
}

double velocity_diff_norm(const VelocityField& a, const VelocityField& b) {
  double s = 0.0;
  for (int j = 0; j <= a.time.fine_count(); ++j) {
    VectorField d = a.frame(j);
    const VectorField& f = b.frame(j);
    for (size_t p = 0; p < d.x.size(); ++p) {
      d.x[p] -= f.x[p];
      d.y[p] -= f.y[p];
    }
    s += inner(d, d);
  }
  return std::sqrt(s);
}

}  // namespace

ObjectiveTerms objective(const Problem& P, const ScalarField& theta,
                         const VelocityField& v) {
  validate(P);
  int n = P.n_gates();
  FrameSequence frames = push_forward(theta, v);
  ObjectiveTerms J;
  double data_sum = 0.0;
  for (int i = 1; i <= n; ++i) {
    double misfit = 0.0;
    gate_residual_adjoint(P, i, frames[v.time.gate_fine_index(i)], &misfit);
    data_sum += misfit;
  }
  J.data = data_sum / n;
  if (P.mu2 != 0.0) {
    // Kinetic cost of each gate's flow, sharing the per-frame inner
    // products across gates via a running sum.
    int mn = v.time.fine_count();
    double dt = v.time.dt();
    std::vector<double> frame_energy(mn + 1, 0.0);
    for (int j = 1; j <= mn; ++j) {
      ScalarField sq = squared_magnitude(v.frame(j));
      frame_energy[j] = inner(frames[j], sq);
    }
    double w_sum = 0.0;
    double running = 0.0;
    int m = v.time.steps_per_gate;
    for (int i = 1; i <= n; ++i) {
      for (int j = (i - 1) * m + 1; j <= i * m; ++j) running += frame_energy[j];
      w_sum += dt * running;
    }
    J.transport = P.mu2 * w_sum / n;
  }
  J.tv = P.mu1 * tv_value(theta, P.tv_eps);
  J.total = J.data + J.transport + J.tv;
  return J;
}

ScalarField grad_template(const Problem& P, const ScalarField& theta,
                          const VelocityField& v) {
  validate(P);
  int n = P.n_gates();
  FrameSequence frames = push_forward(theta, v);
  ScalarField hsum(P.grid);
  hsum.fill(0.0);
  for (int i = 1; i <= n; ++i) {
    int im = v.time.gate_fine_index(i);
    ScalarField h_end = gate_residual_adjoint(P, i, frames[im], nullptr);
    FrameSequence hseq = back_transport(h_end, v, i);
    if (P.mu2 != 0.0) {
      FrameSequence etas = eta_sequence(v, i);
      for (size_t p = 0; p < hsum.v.size(); ++p)
        hsum.v[p] += hseq[0].v[p] + P.mu2 * etas[0].v[p];
    } else {
      for (size_t p = 0; p < hsum.v.size(); ++p) hsum.v[p] += hseq[0].v[p];
    }
  }
  ScalarField tvg = tv_gradient(theta, P.tv_eps);
  ScalarField g(P.grid);
  double inv_n = 1.0 / n;
  for (size_t p = 0; p < g.v.size(); ++p)
    g.v[p] = inv_n * hsum.v[p] + P.mu1 * tvg.v[p];
  return g;
}

ScalarField step_template(const Problem& P, const ScalarField& theta,
                          const VelocityField& v, double alpha) {
  ScalarField g = grad_template(P, theta, v);
  ScalarField out(P.grid);
  for (size_t p = 0; p < out.v.size(); ++p)
    out.v[p] = std::max(theta.v[p] - alpha * g.v[p], 0.0);
  return out;
}

VelocityField grad_velocity_pre_kernel(const Problem& P,
                                       const ScalarField& theta,
                                       const VelocityField& v) {
  validate(P);
  int n = P.n_gates();
  int mn = v.time.fine_count();
  FrameSequence frames = push_forward(theta, v);
  std::vector<VectorField> slope;
  slope.reserve(mn + 1);
  for (int j = 0; j <= mn; ++j) slope.push_back(grad_central(frames[j]));
  VelocityField G(P.grid, v.time);
  for (int i = 1; i <= n; ++i) {
    int im = v.time.gate_fine_index(i);
    ScalarField h_end = gate_residual_adjoint(P, i, frames[im], nullptr);
    FrameSequence hseq = back_transport(h_end, v, i);
    FrameSequence etas;
    if (P.mu2 != 0.0) etas = eta_sequence(v, i);
    ScalarField prod(P.grid);
    for (int j = 1; j <= im; ++j) {
      const ScalarField& h = hseq[j];
      const ScalarField& rho = frames[j];
      // F is the full transported sensitivity at this frame; the momentum
      // density combines the conservative and advective parts so that the
      // pair is the exact derivative of the discrete transport recursion.
      if (P.mu2 != 0.0) {
        const ScalarField& e = etas[j];
        for (size_t p = 0; p < prod.v.size(); ++p)
          prod.v[p] = (h.v[p] + P.mu2 * e.v[p]) * rho.v[p];
        VectorField a = grad_central_transpose(prod);
        VectorField& gj = G.frame(j);
        const VectorField& c = slope[j];
        const VectorField& vj = v.frame(j);
        for (size_t p = 0; p < gj.x.size(); ++p) {
          double F = h.v[p] + P.mu2 * e.v[p];
          gj.x[p] += a.x[p] - F * c.x[p] + 2.0 * P.mu2 * rho.v[p] * vj.x[p];
          gj.y[p] += a.y[p] - F * c.y[p] + 2.0 * P.mu2 * rho.v[p] * vj.y[p];
        }
      } else {
        for (size_t p = 0; p < prod.v.size(); ++p)
          prod.v[p] = h.v[p] * rho.v[p];
        VectorField a = grad_central_transpose(prod);
        VectorField& gj = G.frame(j);
        const VectorField& c = slope[j];
        for (size_t p = 0; p < gj.x.size(); ++p) {
          gj.x[p] += a.x[p] - h.v[p] * c.x[p];
          gj.y[p] += a.y[p] - h.v[p] * c.y[p];
        }
      }
    }
  }
  double inv_n = 1.0 / n;
  for (int j = 0; j <= mn; ++j) {
    VectorField& gj = G.frame(j);
    for (size_t p = 0; p < gj.x.size(); ++p) {
      gj.x[p] *= inv_n;
      gj.y[p] *= inv_n;
    }
  }
  return G;
}

VelocityField grad_velocity(const Problem& P, const ScalarField& theta,
                            const VelocityField& v, const KernelOp& K) {
  VelocityField G = grad_velocity_pre_kernel(P, theta, v);
  for (int j = 0; j <= v.time.fine_count(); ++j)
    G.frame(j) = K.apply(G.frame(j));
  return G;
}

VelocityField step_velocity(const Problem& P, const ScalarField& theta,
                            const VelocityField& v, double beta,
                            const KernelOp& K) {
  VelocityField g = grad_velocity(P, theta, v, K);
  VelocityField out = v;
  for (int j = 0; j <= v.time.fine_count(); ++j) {
    VectorField& oj = out.frame(j);
    const VectorField& gj = g.frame(j);
    for (size_t p = 0; p < oj.x.size(); ++p) {
      oj.x[p] -= beta * gj.x[p];
      oj.y[p] -= beta * gj.y[p];
    }
  }
  return out;
}

std::pair<ScalarField, VelocityField> warm_start(const Problem& P,
                                                 const WarmStart& ws,
                                                 const SolverConfig& cfg) {
  validate(P);
  ScalarField theta(P.grid);
  theta.fill(0.0);
  VelocityField v(P.grid, P.time);
  if (ws.kind == WarmStartKind::none) return {std::move(theta), std::move(v)};
  if (ws.kind == WarmStartKind::static_tv) {
    for (int k = 0; k < ws.template_iters; ++k)
      theta = step_template(P, theta, v, cfg.alpha);
    return {std::move(theta), std::move(v)};
  }
  // first_gate: fit the template against gate 1 alone, then relax the
  // velocity on the full problem with the template held fixed.
  Problem P1 = P;
  P1.time = make_time_grid(1, P.time.steps_per_gate);
  if (P.forward == ForwardModel::radon) {
    P1.geoms = {P.geoms.front()};
    P1.data = {P.data.front()};
  } else {
    P1.image_data = {P.image_data.front()};
  }
  VelocityField v1(P1.grid, P1.time);
  for (int k = 0; k < ws.template_iters; ++k)
    theta = step_template(P1, theta, v1, cfg.alpha);
  if (ws.velocity_iters > 0) {
    KernelOp K = make_kernel_op(P.grid, P.sigma, P.kernel);
    for (int k = 0; k < ws.velocity_iters; ++k)
      v = step_velocity(P, theta, v, cfg.beta, K);
  }
  return {std::move(theta), std::move(v)};
}

Solution alternate(const Problem& P, const SolverConfig& cfg,
                   ScalarField theta0, VelocityField v0) {
  validate(P);
  KernelOp K = make_kernel_op(P.grid, P.sigma, P.kernel);
  ScalarField theta = std::move(theta0);
  VelocityField v = std::move(v0);
  Solution sol{ScalarField(P.grid), VelocityField(P.grid, P.time),
               {},          {},
               SolverDiag{}, 0};
  ObjectiveTerms J = objective(P, theta, v);
  if (!std::isfinite(J.total))
    throw std::runtime_error("objective is not finite at the starting point");
  sol.history.push_back(J);
  const double tiny = 1e-30;
  for (int k = 1; k <= cfg.max_outer; ++k) {
    ScalarField theta_prev = theta;
    VelocityField v_prev = v;
    if (cfg.order == UpdateOrder::template_first) {
      for (int s = 0; s < cfg.inner_template; ++s)
        theta = step_template(P, theta, v, cfg.alpha);
      for (int s = 0; s < cfg.inner_velocity; ++s)
        v = step_velocity(P, theta, v, cfg.beta, K);
    } else {
      for (int s = 0; s < cfg.inner_velocity; ++s)
        v = step_velocity(P, theta, v, cfg.beta, K);
      for (int s = 0; s < cfg.inner_template; ++s)
        theta = step_template(P, theta, v, cfg.alpha);
    }
    J = objective(P, theta, v);
    if (!std::isfinite(J.total))
      throw std::runtime_error("objective diverged to a non-finite value");
    sol.history.push_back(J);
    sol.outer_iterations = k;
    ScalarField dtheta = theta;
    for (size_t p = 0; p < dtheta.v.size(); ++p) dtheta.v[p] -= theta_prev.v[p];
    double rel_t = norm_l2(dtheta) / std::max(norm_l2(theta_prev), tiny);
    double rel_v =
        velocity_diff_norm(v, v_prev) / std::max(velocity_norm(v_prev), tiny);
    if (rel_t <= cfg.tol_template && rel_v <= cfg.tol_velocity) break;
  }
  FlowDiag fd;
  FrameSequence frames = push_forward(theta, v, &fd);
  sol.diag.clamp_count = fd.clamp_count;
  for (int i = 1; i <= P.n_gates(); ++i) {
    const ScalarField& gi = frames[P.time.gate_fine_index(i)];
    sol.gate_images.push_back(gi);
    sol.diag.gate_mass.push_back(mass(gi));
  }
  ScalarField g = grad_template(P, theta, v);
  ScalarField kkt(P.grid);
  for (size_t p = 0; p < kkt.v.size(); ++p)
    kkt.v[p] = std::min(theta.v[p], g.v[p]);
  sol.diag.kkt_residual = norm_l2(kkt);
  sol.template_image = std::move(theta);
  sol.velocity = std::move(v);
  return sol;
}

}  // namespace flowrec
