#include "flowrec/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace flowrec {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct StarParams {
  double cx, cy;   // center
  double r0;       // outer radius
  double amp;      // peak value
  int lobes;       // angular lobe count
  double depth;    // modulation depth in (0, 1)
  double phase;    // angular phase
};

// Smooth compactly supported radial profile, peak value 1 at rho = 0.
double bump(double rho) {
  if (rho >= 1.0) return 0.0;
  double t = 1.0 - rho * rho;
  return t * t;
}

std::vector<StarParams> build_stars(std::uint64_t seed, const Grid& g) {
  double half = 0.5 * std::min(g.x1 - g.x0, g.y1 - g.y0);
  double cx = 0.5 * (g.x0 + g.x1);
  double cy = 0.5 * (g.y0 + g.y1);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.15, 0.15);
  std::uniform_real_distribution<double> radius(0.13, 0.19);
  std::uniform_real_distribution<double> amplitude(0.55, 1.0);
  std::uniform_int_distribution<int> lobes(5, 7);
  std::uniform_real_distribution<double> depth(0.25, 0.45);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  const int count = 6;
  double ring = 0.52 * half;
  std::vector<StarParams> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    double ang = kTwoPi * k / count + jitter(rng);
    StarParams s;
    s.cx = cx + ring * std::cos(ang);
    s.cy = cy + ring * std::sin(ang);
    s.r0 = radius(rng) * half;
    s.amp = amplitude(rng);
    s.lobes = lobes(rng);
    s.depth = depth(rng);
    s.phase = phase(rng);
    out.push_back(s);
  }
  return out;
}

double stars_density(const std::vector<StarParams>& stars, double x,
                     double y) {
  double val = 0.0;
  for (const StarParams& s : stars) {
    double dx = x - s.cx;
    double dy = y - s.cy;
    double r = std::sqrt(dx * dx + dy * dy);
    if (r >= s.r0) continue;
    double phi = std::atan2(dy, dx);
    double radius = s.r0 * (1.0 + s.depth * std::cos(s.lobes * phi + s.phase)) /
                    (1.0 + s.depth);
    val += s.amp * bump(r / radius);
  }
  return val;
}

double heart_density(const Grid& g, double x, double y) {
  double half = 0.5 * std::min(g.x1 - g.x0, g.y1 - g.y0);
  double cx = 0.5 * (g.x0 + g.x1);
  double cy = 0.5 * (g.y0 + g.y1);
  double px = (x - cx) / half;
  double py = (y - cy) / half;
  // Crescent: an outer disc with an off-center cavity cut out, plus a small
  // bright lobe sitting inside the cavity.
  double r1 = std::sqrt(px * px + py * py) / 0.75;
  double qx = px - 0.18;
  double qy = py - 0.10;
  double r2 = std::sqrt(qx * qx + qy * qy) / 0.52;
  double body = 0.9 * bump(r1) - 0.9 * bump(r2);
  if (body < 0.0) body = 0.0;
  double r3 = std::sqrt(qx * qx + qy * qy) / 0.14;
  return body + 0.7 * bump(r3);
}

}  // namespace

double phantom_base_density(const PhantomSpec& spec, const Grid& domain,
                            double x, double y) {
  if (spec.kind == PhantomKind::heart) return heart_density(domain, x, y);
  std::vector<StarParams> stars = build_stars(spec.seed, domain);
  return stars_density(stars, x, y);
}

ScalarField render_phantom_gate(const Grid& grid, const PhantomSpec& spec,
                                int gate) {
  if (gate < 1) throw std::invalid_argument("gate numbering starts at 1");
  std::vector<StarParams> stars;
  if (spec.kind == PhantomKind::stars) stars = build_stars(spec.seed, grid);
  auto base = [&](double x, double y) {
    return spec.kind == PhantomKind::heart ? heart_density(grid, x, y)
                                           : stars_density(stars, x, y);
  };
  ScalarField out(grid);
  const MotionSpec& mo = spec.motion;
  int k = gate - 1;
  bool still = mo.rotation == 0.0 && mo.tx == 0.0 && mo.ty == 0.0 &&
               mo.scale == 1.0;
  if (k == 0 || still) {
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i)
        out.at(i, j) = base(grid.cx(i), grid.cy(j));
    return out;
  }
  double cx = 0.5 * (grid.x0 + grid.x1);
  double cy = 0.5 * (grid.y0 + grid.y1);
  double c = std::cos(k * mo.rotation);
  double s = std::sin(k * mo.rotation);
  double sk = std::pow(mo.scale, k);
  double comp = 1.0 / (sk * sk);  // keeps the continuum mass constant
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      double px = grid.cx(i) - cx - k * mo.tx;
      double py = grid.cy(j) - cy - k * mo.ty;
      double rx = (c * px + s * py) / sk;
      double ry = (-s * px + c * py) / sk;
      out.at(i, j) = base(cx + rx, cy + ry) * comp;
    }
  }
  return out;
}

std::vector<ScalarField> make_phantom_sequence(const Grid& grid, int gates,
                                               const PhantomSpec& spec) {
  if (gates < 1) throw std::invalid_argument("need at least one gate");
  std::vector<ScalarField> out;
  out.reserve(gates);
  for (int i = 1; i <= gates; ++i)
    out.push_back(render_phantom_gate(grid, spec, i));
  return out;
}

}  // namespace flowrec
