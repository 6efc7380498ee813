#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flowrec/config.hpp"
#include "flowrec/experiment.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::string run;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool with_run) {
  cmd->add_option("--config", a.config_path, "configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", a.out_dir, "output directory (default: .)");
  if (with_run)
    cmd->add_option("--run", a.run,
                    "run subdirectory name (default: from the config)");
  cmd->add_option("--seed", a.seed, "override the configured seed")
      ->each([&a](const std::string&) { a.seed_set = true; });
  cmd->add_flag("--quiet", a.quiet, "suppress progress output");
}

flowrec::ExperimentConfig load(const CommonArgs& a) {
  flowrec::ExperimentConfig cfg = flowrec::load_config(a.config_path);
  if (a.seed_set) cfg.seed = a.seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"joint template + motion tomographic reconstruction"};
  app.require_subcommand(1);

  CommonArgs sim_args, rec_args, tv_args, met_args;
  std::vector<std::string> compare_dirs;
  std::string compare_csv;
  bool compare_quiet = false;

  CLI::App* sim = app.add_subcommand("simulate", "generate a gated dataset");
  add_common(sim, sim_args, false);
  CLI::App* rec =
      app.add_subcommand("reconstruct", "run the joint reconstruction");
  add_common(rec, rec_args, true);
  CLI::App* tv = app.add_subcommand(
      "baseline-tv", "per-gate and pooled static TV reconstructions");
  add_common(tv, tv_args, true);
  CLI::App* met = app.add_subcommand(
      "metrics", "recompute metrics for an existing run directory");
  add_common(met, met_args, true);
  CLI::App* cmp = app.add_subcommand(
      "compare", "merge metrics tables from several run directories");
  cmp->add_option("dirs", compare_dirs, "run directories")->required();
  cmp->add_option("--csv", compare_csv, "write the merged table here");
  cmp->add_flag("--quiet", compare_quiet, "suppress the printed table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed())
      flowrec::cmd_simulate(load(sim_args), sim_args.out_dir, sim_args.quiet);
    else if (rec->parsed())
      flowrec::cmd_reconstruct(load(rec_args), rec_args.out_dir, rec_args.run,
                               rec_args.quiet);
    else if (tv->parsed())
      flowrec::cmd_baseline_tv(load(tv_args), tv_args.out_dir, tv_args.run,
                               tv_args.quiet);
    else if (met->parsed())
      flowrec::cmd_metrics(load(met_args), met_args.out_dir, met_args.run,
                           met_args.quiet);
    else if (cmp->parsed())
      flowrec::cmd_compare(compare_dirs, compare_csv, compare_quiet);
  } catch (const flowrec::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
