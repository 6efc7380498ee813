#pragma once

#include <string>
#include <vector>

#include "flowrec/config.hpp"
#include "flowrec/dataset.hpp"

namespace flowrec {

// Typed view of the string-valued config choices plus unit conversions
// (degrees to radians). Throws ConfigError on values the parser let through
// but a command cannot honor.
SimulationSpec spec_from_config(const ExperimentConfig& cfg);
Problem problem_from_config(const ExperimentConfig& cfg, const Dataset& ds);

// Pipeline commands. Each resolves paths relative to `out_dir`, creates
// directories as needed, and throws on failure: ConfigError for usage-level
// problems, std::runtime_error for runtime ones. `run_override` replaces
// the configured run subdirectory name when nonempty.

// Renders the moving phantom, measures it, and writes the dataset
// subdirectory (plus preview images of the truth).
void cmd_simulate(const ExperimentConfig& cfg, const std::string& out_dir,
                  bool quiet);

// Runs the joint template+velocity reconstruction on the stored dataset and
// writes the run subdirectory: template, per-gate images, velocity
// snapshots, objective trace, metrics, and diagnostics.
void cmd_reconstruct(const ExperimentConfig& cfg, const std::string& out_dir,
                     const std::string& run_override, bool quiet);

// Frame-independent TV baseline: one reconstruction per gate from that
// gate's views alone, plus one from all views pooled.
void cmd_baseline_tv(const ExperimentConfig& cfg, const std::string& out_dir,
                     const std::string& run_override, bool quiet);

// Recomputes quality metrics for an existing run directory against the
// stored truth and rewrites its metrics.csv.
void cmd_metrics(const ExperimentConfig& cfg, const std::string& out_dir,
                 const std::string& run_override, bool quiet);

// Merges the metrics tables of several run directories into one listing;
// optionally writes the merged table as CSV.
void cmd_compare(const std::vector<std::string>& run_dirs,
                 const std::string& csv_out, bool quiet);

}  // namespace flowrec
