#include "flowrec/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "flowrec/config.hpp"
#include "flowrec/io.hpp"

namespace flowrec {

namespace {

std::string gate_tag(int gate) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "gate_%02d", gate);
  return buf;
}

// Image-space counterpart of the sinogram noise model: the drawn Gaussian
// sample is rescaled so the realized signal-to-noise ratio matches exactly.
ScalarField add_noise_field(const ScalarField& g, double snr_db,
                            std::uint64_t seed) {
  if (std::isinf(snr_db)) return g;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> n(g.v.size());
  double signal2 = 0.0, noise2 = 0.0;
  for (size_t k = 0; k < g.v.size(); ++k) {
    n[k] = normal(rng);
    signal2 += g.v[k] * g.v[k];
    noise2 += n[k] * n[k];
  }
  if (signal2 == 0.0 || noise2 == 0.0) return g;
  double scale = std::sqrt(signal2 * std::pow(10.0, -snr_db / 10.0) / noise2);
  ScalarField out = g;
  for (size_t k = 0; k < out.v.size(); ++k) out.v[k] += scale * n[k];
  return out;
}

double achieved_snr_db(const std::vector<double>& clean,
                       const std::vector<double>& noisy) {
  double s2 = 0.0, n2 = 0.0;
  for (size_t k = 0; k < clean.size(); ++k) {
    double d = noisy[k] - clean[k];
    s2 += clean[k] * clean[k];
    n2 += d * d;
  }
  if (n2 == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(s2 / n2);
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string sino_descriptor(const Geometry& g) {
  std::ostringstream d;
  d << "kind = sinogram\n"
    << "num_views = " << g.num_views << "\n"
    << "num_bins = " << g.num_bins << "\n"
    << "s0 = " << fmt(g.s0) << "\n"
    << "s1 = " << fmt(g.s1) << "\n"
    << "layout = view_major_float64_le\n";
  return d.str();
}

}  // namespace

Dataset simulate(const SimulationSpec& spec) {
  Dataset ds;
  ds.spec = spec;
  ds.truth = make_phantom_sequence(spec.grid, spec.time.gates, spec.phantom);
  for (int i = 1; i <= spec.time.gates; ++i) {
    if (spec.forward == ForwardModel::radon) {
      Geometry geom =
          gate_geometry(i, spec.views_per_gate, spec.num_bins, spec.det_lo,
                        spec.det_hi, spec.offset_step);
      Sinogram clean = forward(ds.truth[i - 1], geom);
      ds.noisy.push_back(add_noise(clean, spec.snr_db, spec.seed + i));
      ds.clean.push_back(std::move(clean));
      ds.geoms.push_back(std::move(geom));
    } else {
      ds.image_clean.push_back(ds.truth[i - 1]);
      ds.image_noisy.push_back(
          add_noise_field(ds.truth[i - 1], spec.snr_db, spec.seed + i));
    }
  }
  return ds;
}

void save_dataset(const Dataset& ds, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const SimulationSpec& s = ds.spec;
  std::ostringstream m;
  m << "forward = "
    << (s.forward == ForwardModel::radon ? "radon" : "identity") << "\n";
  m << "seed = " << s.seed << "\n";
  m << "grid.nx = " << s.grid.nx << "\n";
  m << "grid.ny = " << s.grid.ny << "\n";
  m << "grid.x0 = " << fmt(s.grid.x0) << "\n";
  m << "grid.x1 = " << fmt(s.grid.x1) << "\n";
  m << "grid.y0 = " << fmt(s.grid.y0) << "\n";
  m << "grid.y1 = " << fmt(s.grid.y1) << "\n";
  m << "time.gates = " << s.time.gates << "\n";
  m << "time.steps_per_gate = " << s.time.steps_per_gate << "\n";
  m << "phantom.kind = "
    << (s.phantom.kind == PhantomKind::stars ? "stars" : "heart") << "\n";
  m << "phantom.seed = " << s.phantom.seed << "\n";
  m << "phantom.rotation = " << fmt(s.phantom.motion.rotation) << "\n";
  m << "phantom.translate_x = " << fmt(s.phantom.motion.tx) << "\n";
  m << "phantom.translate_y = " << fmt(s.phantom.motion.ty) << "\n";
  m << "phantom.scale = " << fmt(s.phantom.motion.scale) << "\n";
  m << "geometry.views_per_gate = " << s.views_per_gate << "\n";
  m << "geometry.num_bins = " << s.num_bins << "\n";
  m << "geometry.det_lo = " << fmt(s.det_lo) << "\n";
  m << "geometry.det_hi = " << fmt(s.det_hi) << "\n";
  m << "geometry.offset_step = " << fmt(s.offset_step) << "\n";
  m << "noise.snr_db = " << fmt(s.snr_db) << "\n";
  write_text_file(dir + "/manifest.txt", m.str());

  std::ostringstream info;
  for (int i = 1; i <= s.time.gates; ++i) {
    std::string tag = dir + "/" + gate_tag(i);
    dump_field(ds.truth[i - 1], tag + "_truth");
    if (s.forward == ForwardModel::radon) {
      const Geometry& g = ds.geoms[i - 1];
      dump_raw(ds.clean[i - 1].v.data(), ds.clean[i - 1].v.size(),
               tag + "_sino_clean", sino_descriptor(g));
      dump_raw(ds.noisy[i - 1].v.data(), ds.noisy[i - 1].v.size(),
               tag + "_sino", sino_descriptor(g));
      info << gate_tag(i) << " achieved_snr_db = "
           << fmt(achieved_snr_db(ds.clean[i - 1].v, ds.noisy[i - 1].v))
           << "\n";
    } else {
      dump_field(ds.image_clean[i - 1], tag + "_img_clean");
      dump_field(ds.image_noisy[i - 1], tag + "_img");
      info << gate_tag(i) << " achieved_snr_db = "
           << fmt(achieved_snr_db(ds.image_clean[i - 1].v,
                                  ds.image_noisy[i - 1].v))
           << "\n";
    }
  }
  write_text_file(dir + "/info.txt", info.str());
}

Dataset load_dataset(const std::string& dir) {
  std::string text = read_text_file(dir + "/manifest.txt");
  SimulationSpec s;
  int nx = 0, ny = 0, gates = 0, steps = 0;
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  using Handler = std::function<void(const KvPair&)>;
  auto num = [](const KvPair& kv) { return std::stod(kv.value); };
  std::map<std::string, Handler> h;
  h["forward"] = [&](const KvPair& kv) {
    s.forward =
        kv.value == "identity" ? ForwardModel::identity : ForwardModel::radon;
  };
  h["seed"] = [&](const KvPair& kv) { s.seed = std::stoull(kv.value); };
  h["grid.nx"] = [&](const KvPair& kv) { nx = std::stoi(kv.value); };
  h["grid.ny"] = [&](const KvPair& kv) { ny = std::stoi(kv.value); };
  h["grid.x0"] = [&](const KvPair& kv) { x0 = num(kv); };
  h["grid.x1"] = [&](const KvPair& kv) { x1 = num(kv); };
  h["grid.y0"] = [&](const KvPair& kv) { y0 = num(kv); };
  h["grid.y1"] = [&](const KvPair& kv) { y1 = num(kv); };
  h["time.gates"] = [&](const KvPair& kv) { gates = std::stoi(kv.value); };
  h["time.steps_per_gate"] = [&](const KvPair& kv) {
    steps = std::stoi(kv.value);
  };
  h["phantom.kind"] = [&](const KvPair& kv) {
    s.phantom.kind =
        kv.value == "heart" ? PhantomKind::heart : PhantomKind::stars;
  };
  h["phantom.seed"] = [&](const KvPair& kv) {
    s.phantom.seed = std::stoull(kv.value);
  };
  h["phantom.rotation"] = [&](const KvPair& kv) {
    s.phantom.motion.rotation = num(kv);
  };
  h["phantom.translate_x"] = [&](const KvPair& kv) {
    s.phantom.motion.tx = num(kv);
  };
  h["phantom.translate_y"] = [&](const KvPair& kv) {
    s.phantom.motion.ty = num(kv);
  };
  h["phantom.scale"] = [&](const KvPair& kv) {
    s.phantom.motion.scale = num(kv);
  };
  h["geometry.views_per_gate"] = [&](const KvPair& kv) {
    s.views_per_gate = std::stoi(kv.value);
  };
  h["geometry.num_bins"] = [&](const KvPair& kv) {
    s.num_bins = std::stoi(kv.value);
  };
  h["geometry.det_lo"] = [&](const KvPair& kv) { s.det_lo = num(kv); };
  h["geometry.det_hi"] = [&](const KvPair& kv) { s.det_hi = num(kv); };
  h["geometry.offset_step"] = [&](const KvPair& kv) {
    s.offset_step = num(kv);
  };
  h["noise.snr_db"] = [&](const KvPair& kv) { s.snr_db = num(kv); };
  for (const KvPair& kv : parse_kv_text(text)) {
    auto it = h.find(kv.key);
    if (it == h.end())
      throw ConfigError("manifest line " + std::to_string(kv.line) +
                        ": unknown key '" + kv.key + "'");
    it->second(kv);
  }
  s.grid = make_grid(nx, ny, x0, x1, y0, y1);
  s.time = make_time_grid(gates, steps);

  Dataset ds;
  ds.spec = s;
  for (int i = 1; i <= gates; ++i) {
    std::string tag = dir + "/" + gate_tag(i);
    ds.truth.push_back(load_field(tag + "_truth"));
    if (s.forward == ForwardModel::radon) {
      Geometry geom = gate_geometry(i, s.views_per_gate, s.num_bins, s.det_lo,
                                    s.det_hi, s.offset_step);
      Sinogram clean(geom), noisy(geom);
      clean.v = load_raw(tag + "_sino_clean", clean.v.size());
      noisy.v = load_raw(tag + "_sino", noisy.v.size());
      ds.geoms.push_back(std::move(geom));
      ds.clean.push_back(std::move(clean));
      ds.noisy.push_back(std::move(noisy));
    } else {
      ds.image_clean.push_back(load_field(tag + "_img_clean"));
      ds.image_noisy.push_back(load_field(tag + "_img"));
    }
  }
  return ds;
}

Problem problem_from_dataset(const Dataset& ds, double mu1, double mu2,
                             double tv_eps, double sigma, KernelKind kernel) {
  Problem P;
  P.grid = ds.spec.grid;
  P.time = ds.spec.time;
  P.forward = ds.spec.forward;
  P.geoms = ds.geoms;
  P.data = ds.noisy;
  P.image_data = ds.image_noisy;
  P.mu1 = mu1;
  P.mu2 = mu2;
  P.tv_eps = tv_eps;
  P.sigma = sigma;
  P.kernel = kernel;
  return P;
}

}  // namespace flowrec
