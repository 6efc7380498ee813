#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flowrec/phantom.hpp"
#include "flowrec/projector.hpp"
#include "flowrec/solver.hpp"
#include "flowrec/time_grid.hpp"

namespace flowrec {

// Everything needed to generate a gated acquisition of a moving phantom.
// Angles are in radians here; degree conversion is the front end's job.
struct SimulationSpec {
  Grid grid;
  TimeGrid time;
  PhantomSpec phantom;
  ForwardModel forward = ForwardModel::radon;
  int views_per_gate = 6;
  int num_bins = 620;
  double det_lo = -24.0, det_hi = 24.0;
  double offset_step = 0.0;        // per-gate view-angle shift
  double snr_db = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 1;
};

// A simulated acquisition: the true gate images plus the measured records.
// In `radon` mode the records are sinograms with per-gate geometries; in
// `identity` mode they are images. `clean` always holds the noise-free
// records, `noisy` the served ones (equal to clean at infinite SNR).
struct Dataset {
  SimulationSpec spec;
  std::vector<ScalarField> truth;
  std::vector<Geometry> geoms;
  std::vector<Sinogram> clean;
  std::vector<Sinogram> noisy;
  std::vector<ScalarField> image_clean;
  std::vector<ScalarField> image_noisy;
};

// Renders the phantom at every gate and measures it. Gate i's noise stream
// is seeded with seed + i so gates are independent but reproducible.
Dataset simulate(const SimulationSpec& spec);

// Writes a dataset directory: manifest.txt describing the simulation plus
// one truth image and one data record per gate. Directories are created as
// needed. load_dataset(save_dataset(d)) reproduces d bit for bit.
void save_dataset(const Dataset& ds, const std::string& dir);
Dataset load_dataset(const std::string& dir);

// Builds the reconstruction problem a dataset poses: its geometries and
// noisy records with the model weights supplied by the caller.
Problem problem_from_dataset(const Dataset& ds, double mu1, double mu2,
                             double tv_eps, double sigma, KernelKind kernel);

}  // namespace flowrec
