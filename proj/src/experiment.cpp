#include "flowrec/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include "flowrec/io.hpp"
#include "flowrec/metrics.hpp"
#include "flowrec/tv.hpp"

namespace flowrec {

namespace {

constexpr double kDegree = 0.017453292519943295;  // radians per degree

std::string gate_tag(int gate) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "gate_%02d", gate);
  return buf;
}

struct MetricsRow {
  std::string method;
  int gate = 0;
  GateMetrics m;
};

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::ostringstream o;
  o << "method,gate,ssim,psnr,nrmse,mass_rec,mass_ref\n";
  char buf[256];
  for (const MetricsRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%d,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                  r.method.c_str(), r.gate, r.m.ssim, r.m.psnr, r.m.nrmse,
                  r.m.mass_rec, r.m.mass_ref);
    o << buf;
  }
  return o.str();
}

double truth_window_hi(const Dataset& ds) {
  double hi = 0.0;
  for (const ScalarField& t : ds.truth) hi = std::max(hi, max_value(t));
  return hi > 0.0 ? hi : 1.0;
}

// Mean spectral high-frequency fraction of the velocity frames that carry
// any energy; a crude smoothness summary used by the diagnostics file.
double velocity_highfreq(const VelocityField& v) {
  double sum = 0.0;
  int count = 0;
  for (int j = 1; j <= v.time.fine_count(); ++j) {
    const VectorField& f = v.frame(j);
    if (inner(f, f) <= 0.0) continue;
    sum += highfreq_fraction(f);
    ++count;
  }
  return count > 0 ? sum / count : 0.0;
}

void echo(bool quiet, const std::string& line) {
  if (!quiet) std::printf("%s\n", line.c_str());
}

}  // namespace

SimulationSpec spec_from_config(const ExperimentConfig& cfg) {
  SimulationSpec s;
  try {
    s.grid = make_grid(cfg.grid.nx, cfg.grid.ny, cfg.grid.x0, cfg.grid.x1,
                       cfg.grid.y0, cfg.grid.y1);
    s.time = make_time_grid(cfg.time.gates, cfg.time.steps_per_gate);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  s.phantom.kind =
      cfg.phantom.kind == "heart" ? PhantomKind::heart : PhantomKind::stars;
  s.phantom.seed = cfg.phantom.seed;
  s.phantom.motion.rotation = cfg.phantom.rotation_deg * kDegree;
  s.phantom.motion.tx = cfg.phantom.translate_x;
  s.phantom.motion.ty = cfg.phantom.translate_y;
  s.phantom.motion.scale = cfg.phantom.scale;
  s.forward = cfg.model.forward == "identity" ? ForwardModel::identity
                                              : ForwardModel::radon;
  s.views_per_gate = cfg.geometry.views_per_gate;
  s.num_bins = cfg.geometry.num_bins;
  s.det_lo = cfg.geometry.det_lo;
  s.det_hi = cfg.geometry.det_hi;
  s.offset_step = cfg.geometry.offset_step_deg * kDegree;
  s.snr_db = cfg.noise.snr_db;
  s.seed = cfg.seed;
  if (s.forward == ForwardModel::radon) {
    if (s.views_per_gate < 1 || s.num_bins < 1 || !(s.det_lo < s.det_hi))
      throw ConfigError("invalid acquisition geometry");
  }
  return s;
}

Problem problem_from_config(const ExperimentConfig& cfg, const Dataset& ds) {
  ForwardModel want = cfg.model.forward == "identity" ? ForwardModel::identity
                                                      : ForwardModel::radon;
  if (want != ds.spec.forward)
    throw ConfigError("config forward model does not match the dataset");
  KernelKind kk = cfg.model.kernel == "identity" ? KernelKind::identity
                                                 : KernelKind::gaussian;
  return problem_from_dataset(ds, cfg.model.mu1, cfg.model.mu2,
                              cfg.model.tv_eps, cfg.model.sigma, kk);
}

void cmd_simulate(const ExperimentConfig& cfg, const std::string& out_dir,
                  bool quiet) {
  namespace fs = std::filesystem;
  SimulationSpec spec = spec_from_config(cfg);
  Dataset ds = simulate(spec);
  std::string ds_dir = out_dir + "/" + cfg.paths.dataset;
  save_dataset(ds, ds_dir);
  write_text_file(ds_dir + "/config.txt", serialize_config(cfg));
  double hi = truth_window_hi(ds);
  for (int i = 1; i <= spec.time.gates; ++i)
    write_png16(ds.truth[i - 1], ds_dir + "/" + gate_tag(i) + "_truth", 0.0,
                hi);
  std::ostringstream msg;
  msg << "simulate: wrote " << spec.time.gates << " gates to " << ds_dir;
  echo(quiet, msg.str());
}

namespace {

SolverConfig solver_config(const ExperimentConfig& cfg) {
  SolverConfig sc;
  sc.alpha = cfg.solver.alpha;
  sc.beta = cfg.solver.beta;
  sc.max_outer = cfg.solver.max_outer;
  sc.inner_template = cfg.solver.inner_template;
  sc.inner_velocity = cfg.solver.inner_velocity;
  sc.tol_template = cfg.solver.tol_template;
  sc.tol_velocity = cfg.solver.tol_velocity;
  sc.order = cfg.solver.order == "velocity_first"
                 ? UpdateOrder::velocity_first
                 : UpdateOrder::template_first;
  return sc;
}

WarmStart warm_config(const ExperimentConfig& cfg) {
  WarmStart ws;
  if (cfg.warmstart.kind == "static_tv")
    ws.kind = WarmStartKind::static_tv;
  else if (cfg.warmstart.kind == "first_gate")
    ws.kind = WarmStartKind::first_gate;
  else
    ws.kind = WarmStartKind::none;
  ws.template_iters = cfg.warmstart.template_iters;
  ws.velocity_iters = cfg.warmstart.velocity_iters;
  return ws;
}

}  // namespace

void cmd_reconstruct(const ExperimentConfig& cfg, const std::string& out_dir,
                     const std::string& run_override, bool quiet) {
  namespace fs = std::filesystem;
  Dataset ds = load_dataset(out_dir + "/" + cfg.paths.dataset);
  Problem P = problem_from_config(cfg, ds);
  SolverConfig sc = solver_config(cfg);
  WarmStart ws = warm_config(cfg);
  auto [theta0, v0] = warm_start(P, ws, sc);
  Solution sol = alternate(P, sc, std::move(theta0), std::move(v0));

  std::string run = run_override.empty() ? cfg.paths.run : run_override;
  std::string run_dir = out_dir + "/" + run;
  fs::create_directories(run_dir);
  write_text_file(run_dir + "/config.txt", serialize_config(cfg));
  double hi = truth_window_hi(ds);
  dump_field(sol.template_image, run_dir + "/template");
  write_png16(sol.template_image, run_dir + "/template", 0.0,
              std::max(hi, max_value(sol.template_image)));
  std::vector<MetricsRow> rows;
  for (int i = 1; i <= P.n_gates(); ++i) {
    const ScalarField& rec = sol.gate_images[i - 1];
    std::string tag = run_dir + "/" + gate_tag(i) + "_rec";
    dump_field(rec, tag);
    write_png16(rec, tag, 0.0, std::max(hi, max_value(rec)));
    rows.push_back({"proposed", i, evaluate(rec, ds.truth[i - 1])});
  }
  int mn = P.time.fine_count();
  auto component = [&](const std::vector<double>& plane) {
    ScalarField f(P.grid);
    f.v = plane;
    return f;
  };
  dump_field(component(sol.velocity.frame(1).x), run_dir + "/velocity_first_x");
  dump_field(component(sol.velocity.frame(1).y), run_dir + "/velocity_first_y");
  dump_field(component(sol.velocity.frame(mn).x), run_dir + "/velocity_last_x");
  dump_field(component(sol.velocity.frame(mn).y), run_dir + "/velocity_last_y");

  std::ostringstream obj;
  obj << "iter,total,data,transport,tv\n";
  char buf[256];
  for (size_t k = 0; k < sol.history.size(); ++k) {
    const ObjectiveTerms& t = sol.history[k];
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%.17g\n", k,
                  t.total, t.data, t.transport, t.tv);
    obj << buf;
  }
  write_text_file(run_dir + "/objective.csv", obj.str());
  write_text_file(run_dir + "/metrics.csv", metrics_csv(rows));

  std::ostringstream diag;
  diag.precision(17);
  diag << "outer_iterations = " << sol.outer_iterations << "\n"
       << "objective_final = " << sol.history.back().total << "\n"
       << "clamp_count = " << sol.diag.clamp_count << "\n"
       << "kkt_residual = " << sol.diag.kkt_residual << "\n"
       << "velocity_highfreq = " << velocity_highfreq(sol.velocity) << "\n";
  for (int i = 1; i <= P.n_gates(); ++i)
    diag << "mass_gate_" << i << " = " << sol.diag.gate_mass[i - 1] << "\n";
  write_text_file(run_dir + "/diag.txt", diag.str());

  std::ostringstream msg;
  msg << "reconstruct: " << sol.outer_iterations << " outer iterations, J = "
      << sol.history.back().total << ", run dir " << run_dir;
  echo(quiet, msg.str());
}

void cmd_baseline_tv(const ExperimentConfig& cfg, const std::string& out_dir,
                     const std::string& run_override, bool quiet) {
  namespace fs = std::filesystem;
  Dataset ds = load_dataset(out_dir + "/" + cfg.paths.dataset);
  if (ds.spec.forward != ForwardModel::radon)
    throw ConfigError("the TV baseline needs tomographic data");
  TvParams tp;
  tp.mu1 = cfg.baseline.mu1;
  tp.eps = cfg.baseline.tv_eps;
  tp.alpha = cfg.baseline.alpha;
  tp.iters = cfg.baseline.iters;

  std::string run = run_override.empty() ? cfg.paths.run + "_tv" : run_override;
  std::string run_dir = out_dir + "/" + run;
  fs::create_directories(run_dir);
  write_text_file(run_dir + "/config.txt", serialize_config(cfg));
  double hi = truth_window_hi(ds);
  int n = ds.spec.time.gates;
  std::vector<MetricsRow> rows;
  for (int i = 1; i <= n; ++i) {
    ScalarField rec =
        tv_reconstruct(ds.geoms[i - 1], ds.noisy[i - 1], ds.spec.grid, tp);
    std::string tag = run_dir + "/tv_" + gate_tag(i);
    dump_field(rec, tag);
    write_png16(rec, tag, 0.0, std::max(hi, max_value(rec)));
    rows.push_back({"tv_gate", i, evaluate(rec, ds.truth[i - 1])});
  }
  // All views of all gates treated as one static acquisition.
  Geometry pooled;
  pooled.num_bins = ds.geoms.front().num_bins;
  pooled.s0 = ds.geoms.front().s0;
  pooled.s1 = ds.geoms.front().s1;
  for (const Geometry& g : ds.geoms) {
    pooled.num_views += g.num_views;
    pooled.angles.insert(pooled.angles.end(), g.angles.begin(),
                         g.angles.end());
  }
  Sinogram pooled_data(pooled);
  size_t off = 0;
  for (const Sinogram& s : ds.noisy) {
    std::copy(s.v.begin(), s.v.end(), pooled_data.v.begin() + off);
    off += s.v.size();
  }
  // The data-term gradient scales with the view count, so the per-gate step
  // size must shrink by the pooling ratio to keep the same stability margin.
  TvParams pooled_tp = tp;
  pooled_tp.alpha = tp.alpha * static_cast<double>(ds.geoms.front().num_views) /
                    static_cast<double>(pooled.num_views);
  ScalarField pooled_rec =
      tv_reconstruct(pooled, pooled_data, ds.spec.grid, pooled_tp);
  dump_field(pooled_rec, run_dir + "/tv_pooled");
  write_png16(pooled_rec, run_dir + "/tv_pooled", 0.0,
              std::max(hi, max_value(pooled_rec)));
  for (int i = 1; i <= n; ++i)
    rows.push_back({"tv_pooled", i, evaluate(pooled_rec, ds.truth[i - 1])});
  write_text_file(run_dir + "/metrics.csv", metrics_csv(rows));
  std::ostringstream msg;
  msg << "baseline-tv: wrote " << n << " per-gate images and one pooled image"
      << " to " << run_dir;
  echo(quiet, msg.str());
}

void cmd_metrics(const ExperimentConfig& cfg, const std::string& out_dir,
                 const std::string& run_override, bool quiet) {
  namespace fs = std::filesystem;
  Dataset ds = load_dataset(out_dir + "/" + cfg.paths.dataset);
  std::string run = run_override.empty() ? cfg.paths.run : run_override;
  std::string run_dir = out_dir + "/" + run;
  int n = ds.spec.time.gates;
  std::vector<MetricsRow> rows;
  for (int i = 1; i <= n; ++i) {
    std::string rec_tag = run_dir + "/" + gate_tag(i) + "_rec";
    std::string tv_tag = run_dir + "/tv_" + gate_tag(i);
    if (fs::exists(rec_tag + ".f64"))
      rows.push_back(
          {"proposed", i, evaluate(load_field(rec_tag), ds.truth[i - 1])});
    else if (fs::exists(tv_tag + ".f64"))
      rows.push_back(
          {"tv_gate", i, evaluate(load_field(tv_tag), ds.truth[i - 1])});
  }
  if (fs::exists(run_dir + "/tv_pooled.f64")) {
    ScalarField pooled = load_field(run_dir + "/tv_pooled");
    for (int i = 1; i <= n; ++i)
      rows.push_back({"tv_pooled", i, evaluate(pooled, ds.truth[i - 1])});
  }
  if (rows.empty())
    throw std::runtime_error("no reconstructed images found in " + run_dir);
  write_text_file(run_dir + "/metrics.csv", metrics_csv(rows));
  if (!quiet) std::printf("%s", metrics_csv(rows).c_str());
}

void cmd_compare(const std::vector<std::string>& run_dirs,
                 const std::string& csv_out, bool quiet) {
  std::ostringstream merged;
  merged << "run,method,gate,ssim,psnr,nrmse,mass_rec,mass_ref\n";
  if (!quiet)
    std::printf("%-18s %-10s %4s %9s %9s %9s %11s %11s\n", "run", "method",
                "gate", "ssim", "psnr", "nrmse", "mass_rec", "mass_ref");
  for (const std::string& dir : run_dirs) {
    std::string text = read_text_file(dir + "/metrics.csv");
    std::istringstream in(text);
    std::string line;
    bool header = true;
    std::string label = std::filesystem::path(dir).filename().string();
    if (label.empty()) label = dir;
    while (std::getline(in, line)) {
      if (header) {
        header = false;
        continue;
      }
      if (line.empty()) continue;
      merged << label << "," << line << "\n";
      if (!quiet) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() == 7)
          std::printf("%-18s %-10s %4s %9.6s %9.6s %9.6s %11.8s %11.8s\n",
                      label.c_str(), cells[0].c_str(), cells[1].c_str(),
                      cells[2].c_str(), cells[3].c_str(), cells[4].c_str(),
                      cells[5].c_str(), cells[6].c_str());
      }
    }
  }
  if (!csv_out.empty()) write_text_file(csv_out, merged.str());
}

}  // namespace flowrec
