#pragma once

#include <cstdint>
#include <vector>

#include "flowrec/field.hpp"

namespace flowrec {

enum class PhantomKind { stars, heart };

// Rigid-plus-scaling motion applied cumulatively from gate to gate: gate i
// is the base scene rotated by (i-1)*rotation about the domain center,
// scaled by scale^(i-1), and translated by (i-1)*(tx, ty).
struct MotionSpec {
  double rotation = 0.0;  // radians per gate
  double tx = 0.0;        // world units per gate
  double ty = 0.0;
  double scale = 1.0;     // area change per gate (1 = rigid)
};

struct PhantomSpec {
  PhantomKind kind = PhantomKind::stars;
  std::uint64_t seed = 1;
  MotionSpec motion;
};

// Analytic scene density at a point, before any motion. `stars` is a ring
// of smooth star-shaped bumps whose radii, amplitudes and lobe counts are
// drawn from the seed; `heart` is a fixed crescent with an inner lobe.
// Values lie in [0, 1]. The grid supplies the domain center and scale.
double phantom_base_density(const PhantomSpec& spec, const Grid& domain,
                            double x, double y);

// One gate of the moving scene sampled at pixel centers. Densities are
// divided by the squared cumulative scale so the total mass of the
// continuum scene is the same at every gate. Gate numbering starts at 1;
// gate 1 is the unmoved base scene.
ScalarField render_phantom_gate(const Grid& grid, const PhantomSpec& spec,
                                int gate);

// Gates 1..n in order. With identity motion all entries are bitwise equal.
std::vector<ScalarField> make_phantom_sequence(const Grid& grid, int gates,
                                               const PhantomSpec& spec);

}  // namespace flowrec
