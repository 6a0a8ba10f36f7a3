// Command-line driver: forward simulation, sparse optimal control runs,
// kappa sweeps and verification suites over a flat key/value configuration.

#include "chcontrol/runner.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::optional<long long> seed;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "path to the problem configuration")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", opts.out_dir, "output directory (overrides output.directory)");
  cmd->add_option("--seed", opts.seed, "random seed (overrides run.seed)");
}

chc::ProblemConfig load(const CommonOpts& opts) {
  chc::ProblemConfig cfg = chc::ProblemConfig::load(opts.config_path);
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  if (opts.seed) cfg.seed = static_cast<uint64_t>(*opts.seed);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse optimal control of the conserved phase-field system"};
  app.require_subcommand(1);

  CommonOpts sim_opts, opt_opts, sweep_opts, verify_opts;
  std::vector<double> kappas;
  std::string suite = "all";

  CLI::App* sim = app.add_subcommand("simulate", "run the forward solver and write diagnostics");
  add_common(sim, sim_opts);

  CLI::App* opt = app.add_subcommand("optimize", "run the proximal projected-gradient optimizer");
  add_common(opt, opt_opts);

  CLI::App* sweep = app.add_subcommand("sweep-kappa", "optimize over a ladder of sparsity weights");
  add_common(sweep, sweep_opts);
  sweep->add_option("--kappas", kappas, "comma-separated kappa values (overrides sweep.kappas)")
      ->delimiter(',');

  CLI::App* verify = app.add_subcommand("verify", "run a named invariant suite");
  add_common(verify, verify_opts);
  verify->add_option("suite", suite,
                     "suite name: mass, energy, taylor1, taylor2, gradient, kkt, sparsity, "
                     "coercivity, or all");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return chc::cmd_simulate(load(sim_opts));
    if (opt->parsed()) return chc::cmd_optimize(load(opt_opts));
    if (sweep->parsed()) return chc::cmd_sweep_kappa(load(sweep_opts), kappas);
    if (verify->parsed()) return chc::cmd_verify(load(verify_opts), suite);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
