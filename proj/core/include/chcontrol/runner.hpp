#pragma once

#include "chcontrol/config.hpp"

#include <string>
#include <vector>

namespace chc {

/// Command entry points shared by the CLI.  Each writes its artifacts under
/// the configured output directory and maintains a STATUS sentinel file
/// (running / ok / failed: <reason>) so partial outputs are recognizable.
/// All return a process exit code.
int cmd_simulate(const ProblemConfig& cfg);
int cmd_optimize(const ProblemConfig& cfg);
int cmd_sweep_kappa(const ProblemConfig& cfg, const std::vector<double>& kappas);
int cmd_verify(const ProblemConfig& cfg, const std::string& suite);

}  // namespace chc
