#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace flowrec {

// Raised for malformed or unknown configuration input; the message carries
// the offending line number when one is known.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One `key = value` assignment with its 1-based source line.
struct KvPair {
  int line = 0;
  std::string key;
  std::string value;
};

// Splits dotted-key assignment text into pairs. Blank lines and lines
// starting with '#' are skipped; anything else without '=' is an error.
std::vector<KvPair> parse_kv_text(const std::string& text);

// Full experiment description; the defaults double as the documentation of
// a working mid-size run. All sections round-trip exactly through
// serialize_config / parse_config.
struct ExperimentConfig {
  struct GridSection {
    int nx = 128, ny = 128;
    double x0 = -16.0, x1 = 16.0, y0 = -16.0, y1 = 16.0;
    friend bool operator==(const GridSection&, const GridSection&) = default;
  };
  struct TimeSection {
    int gates = 5;
    int steps_per_gate = 2;
    friend bool operator==(const TimeSection&, const TimeSection&) = default;
  };
  struct PhantomSection {
    std::string kind = "stars";  // stars | heart
    std::uint64_t seed = 1;
    double rotation_deg = 6.0;  // per gate
    double translate_x = 0.0, translate_y = 0.0;
    double scale = 1.0;
    friend bool operator==(const PhantomSection&,
                           const PhantomSection&) = default;
  };
  struct GeometrySection {
    int views_per_gate = 6;
    int num_bins = 620;
    double det_lo = -24.0, det_hi = 24.0;
    double offset_step_deg = 5.0;  // view-angle shift from gate to gate
    friend bool operator==(const GeometrySection&,
                           const GeometrySection&) = default;
  };
  struct NoiseSection {
    double snr_db = std::numeric_limits<double>::infinity();
    friend bool operator==(const NoiseSection&, const NoiseSection&) = default;
  };
  struct ModelSection {
    std::string forward = "radon";   // radon | identity
    std::string kernel = "gaussian";  // gaussian | identity
    double sigma = 2.0;
    double mu1 = 0.01;
    double mu2 = 1e-7;
    double tv_eps = 1e-12;
    friend bool operator==(const ModelSection&, const ModelSection&) = default;
  };
  struct SolverSection {
    double alpha = 0.01;
    double beta = 0.05;
    int max_outer = 2000;
    int inner_template = 1;
    int inner_velocity = 1;
    double tol_template = 0.0;
    double tol_velocity = 0.0;
    std::string order = "template_first";  // template_first | velocity_first
    friend bool operator==(const SolverSection&,
                           const SolverSection&) = default;
  };
  struct WarmstartSection {
    std::string kind = "static_tv";  // none | static_tv | first_gate
    int template_iters = 50;
    int velocity_iters = 0;
    friend bool operator==(const WarmstartSection&,
                           const WarmstartSection&) = default;
  };
  struct BaselineSection {
    double mu1 = 0.01;
    double alpha = 0.01;
    int iters = 2000;
    double tv_eps = 1e-12;
    friend bool operator==(const BaselineSection&,
                           const BaselineSection&) = default;
  };
  struct PathsSection {
    std::string dataset = "dataset";  // subdirectory of the output directory
    std::string run = "run";
    friend bool operator==(const PathsSection&, const PathsSection&) = default;
  };

  std::string name = "experiment";
  std::uint64_t seed = 1;
  GridSection grid;
  TimeSection time;
  PhantomSection phantom;
  GeometrySection geometry;
  NoiseSection noise;
  ModelSection model;
  SolverSection solver;
  WarmstartSection warmstart;
  BaselineSection baseline;
  PathsSection paths;

  friend bool operator==(const ExperimentConfig&,
                         const ExperimentConfig&) = default;
};

// Parses configuration text. Unknown keys, bad values, and malformed lines
// raise ConfigError naming the line.
ExperimentConfig parse_config(const std::string& text);

// Reads and parses a configuration file.
ExperimentConfig load_config(const std::string& path);

// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& c);

}  // namespace flowrec
