#include "chcontrol/runner.hpp"

#include "chcontrol/checkpoint.hpp"
#include "chcontrol/verify.hpp"

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <stdexcept>
#include <thread>

namespace chc {

namespace {

namespace fs = std::filesystem;

struct RunDir {
  fs::path dir;

  explicit RunDir(const std::string& path) : dir(path) {
    fs::create_directories(dir);
    write_status("running");
  }
  void write_status(const std::string& status) const {
    std::ofstream out(dir / "STATUS");
    out << status << '\n';
  }
  fs::path file(const std::string& name) const { return dir / name; }
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void record_config(const RunDir& run, const ProblemConfig& cfg) {
  write_text(run.file("config.resolved"), cfg.serialize());
}

void emit_plot_script(const RunDir& run) {
  write_text(run.file("plot.py"), R"(#!/usr/bin/env python3
"""Convenience plots for run artifacts in this directory (data contract is CSV)."""
import os
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import csv

def read_csv(name):
    path = os.path.join(os.path.dirname(__file__) or ".", name)
    if not os.path.exists(path):
        return None
    with open(path) as f:
        rows = list(csv.DictReader(f))
    return rows

diag = read_csv("diagnostics.csv")
if diag:
    t = [float(r["t"]) for r in diag]
    for col in ("mass", "energy", "linf_phi"):
        plt.figure()
        plt.plot(t, [float(r[col]) for r in diag])
        plt.xlabel("t"); plt.ylabel(col)
        plt.savefig(f"{col}.png", dpi=120)

hist = read_csv("history.csv")
if hist:
    it = [int(r["iter"]) for r in hist]
    for col in ("total", "kkt", "sparsity_fraction"):
        plt.figure()
        plt.semilogy(it, [max(float(r[col]), 1e-300) for r in hist]) if col == "kkt" \
            else plt.plot(it, [float(r[col]) for r in hist])
        plt.xlabel("iteration"); plt.ylabel(col)
        plt.savefig(f"{col}.png", dpi=120)
print("plots written")
)");
}

void write_history_csv(const fs::path& path, const std::vector<IterateRecord>& history) {
  std::ofstream out(path);
  out << "iter,J,G,total,kkt,sparsity_fraction,step\n";
  for (const auto& rec : history) {
    out << rec.iter << ',' << format_double(rec.j_smooth) << ',' << format_double(rec.g_value)
        << ',' << format_double(rec.total) << ',' << format_double(rec.kkt) << ','
        << format_double(rec.sparsity_fraction) << ',' << format_double(rec.step) << '\n';
  }
}

struct SweepRow {
  double kappa = 0.0;
  double final_total = 0.0;
  double sparsity_fraction = 0.0;
  double min_rayleigh = 0.0;
  bool converged = false;
};

SweepRow run_sweep_entry(const ProblemConfig& cfg, double kappa, const fs::path& subdir) {
  ProblemConfig entry = cfg;
  entry.kappa = kappa;
  const BasisPtr basis = entry.make_basis();
  const auto times = entry.make_times();
  const PhysicsParams physics = entry.make_physics();
  const Field phi0 = entry.resolve_field(entry.phi0, basis);
  const Field w0 = entry.resolve_field(entry.w0, basis);
  const SpaceTimeField u0 = entry.resolve_control(entry.u0, basis, times);
  const CostConfig cost = entry.make_cost(basis, times);
  const OptimizerReport report = optimize(u0, phi0, w0, physics, cost, entry.optimizer);

  fs::create_directories(subdir);
  write_history_csv(subdir / "history.csv", report.history);
  write_spacetime_csv((subdir / "control_u.csv").string(), report.u, "u");

  SweepRow row;
  row.kappa = kappa;
  row.converged = report.converged;
  row.final_total = report.history.back().total;
  row.sparsity_fraction = report.history.back().sparsity_fraction;
  row.min_rayleigh = coercivity_probe(report.u, report.traj, report.adj, cost,
                                      cfg.coercivity_samples, cfg.seed + 909);
  return row;
}

}  // namespace

int cmd_simulate(const ProblemConfig& cfg) {
  RunDir run(cfg.out_dir);
  try {
    record_config(run, cfg);
    const BasisPtr basis = cfg.make_basis();
    const auto times = cfg.make_times();
    const PhysicsParams physics = cfg.make_physics();
    const Field phi0 = cfg.resolve_field(cfg.phi0, basis);
    const Field w0 = cfg.resolve_field(cfg.w0, basis);
    const SpaceTimeField u = cfg.resolve_control(cfg.u0, basis, times);
    const StateTrajectory traj = solve_state(u, phi0, w0, physics);

    write_state_checkpoint(run.file("trajectory.csv").string(), traj);
    std::ofstream diag(run.file("diagnostics.csv"));
    diag << "t,mass,energy,linf_phi\n";
    for (int m = 0; m <= traj.num_steps(); ++m) {
      const Field phi = traj.phi_field(m);
      diag << format_double(traj.times[static_cast<size_t>(m)]) << ','
           << format_double(mean(phi)) << ','
           << format_double(free_energy(phi, physics.potential)) << ','
           << format_double(linf_norm(phi)) << '\n';
    }
    if (cfg.emit_plot_script) emit_plot_script(run);
    run.write_status("ok");
    std::cout << "simulate: wrote trajectory and diagnostics to " << cfg.out_dir << '\n';
    return 0;
  } catch (const std::exception& e) {
    run.write_status(std::string("failed: ") + e.what());
    throw;
  }
}

int cmd_optimize(const ProblemConfig& cfg) {
  RunDir run(cfg.out_dir);
  try {
    record_config(run, cfg);
    const BasisPtr basis = cfg.make_basis();
    const auto times = cfg.make_times();
    const PhysicsParams physics = cfg.make_physics();
    const Field phi0 = cfg.resolve_field(cfg.phi0, basis);
    const Field w0 = cfg.resolve_field(cfg.w0, basis);
    const SpaceTimeField u0 = cfg.resolve_control(cfg.u0, basis, times);
    const CostConfig cost = cfg.make_cost(basis, times);

    const OptimizerReport report = optimize(u0, phi0, w0, physics, cost, cfg.optimizer);

    write_history_csv(run.file("history.csv"), report.history);
    write_spacetime_csv(run.file("control_u.csv").string(), report.u, "u");
    write_spacetime_csv(run.file("multiplier.csv").string(), report.multiplier, "lambda");
    write_spacetime_csv(run.file("adjoint_r.csv").string(), report.adj.r_spacetime(), "r");
    write_state_checkpoint(run.file("trajectory.csv").string(), report.traj);
    if (cfg.emit_plot_script) emit_plot_script(run);
    run.write_status("ok");
    std::cout << "optimize: " << report.status << " after " << report.iterations
              << " iterations, final kkt "
              << format_double(report.history.back().kkt) << ", outputs in " << cfg.out_dir
              << '\n';
    return 0;
  } catch (const std::exception& e) {
    run.write_status(std::string("failed: ") + e.what());
    throw;
  }
}

int cmd_sweep_kappa(const ProblemConfig& cfg, const std::vector<double>& kappas) {
  RunDir run(cfg.out_dir);
  try {
    record_config(run, cfg);
    const std::vector<double>& list = kappas.empty() ? cfg.sweep_kappas : kappas;
    if (list.empty()) throw std::invalid_argument("sweep-kappa: empty kappa list");

    // independent jobs, bounded parallelism
    const unsigned workers =
        std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                        static_cast<unsigned>(list.size())));
    std::vector<SweepRow> rows(list.size());
    std::vector<std::future<void>> inflight;
    size_t next = 0;
    while (next < list.size() || !inflight.empty()) {
      while (next < list.size() && inflight.size() < workers) {
        const size_t idx = next++;
        inflight.push_back(std::async(std::launch::async, [&, idx]() {
          rows[idx] = run_sweep_entry(cfg, list[idx],
                                      run.file("kappa_" + std::to_string(idx)));
        }));
      }
      inflight.front().get();
      inflight.erase(inflight.begin());
    }

    std::ofstream out(run.file("sweep.csv"));
    out << "kappa,final_total,sparsity_fraction,min_rayleigh\n";
    for (const auto& row : rows) {
      out << format_double(row.kappa) << ',' << format_double(row.final_total) << ','
          << format_double(row.sparsity_fraction) << ',' << format_double(row.min_rayleigh)
          << '\n';
    }
    if (cfg.emit_plot_script) emit_plot_script(run);
    run.write_status("ok");
    std::cout << "sweep-kappa: " << rows.size() << " entries written to " << cfg.out_dir << '\n';
    return 0;
  } catch (const std::exception& e) {
    run.write_status(std::string("failed: ") + e.what());
    throw;
  }
}

int cmd_verify(const ProblemConfig& cfg, const std::string& suite) {
  std::vector<std::string> suites;
  if (suite == "all") {
    suites = verify_suite_names();
  } else {
    suites.push_back(suite);
  }
  bool all_passed = true;
  for (const auto& name : suites) {
    const auto results = verify_suite(cfg, name);
    for (const auto& res : results) {
      std::cout << (res.passed ? "[PASS] " : "[FAIL] ") << name << '/' << res.name << "  value="
                << format_double(res.value) << "  (" << res.detail << ")\n";
      all_passed = all_passed && res.passed;
    }
  }
  return all_passed ? 0 : 1;
}

}  // namespace chc
