#include "test_support.hpp"

#include "chcontrol/config.hpp"
#include "chcontrol/runner.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace chc;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ProblemConfig tiny_config(const fs::path& out) {
  ProblemConfig cfg;
  cfg.modes[0] = 8;
  cfg.steps = 12;
  cfg.t_final = 0.1;
  cfg.phi0 = FieldSpec::parse("constant 0.3", 1, "test");
  cfg.out_dir = out.string();
  return cfg;
}

}  // namespace

TEST_CASE("minimal configuration text fills documented defaults") {
  const ProblemConfig cfg = ProblemConfig::parse("", "inline");
  CHECK(cfg.dim == 1);
  CHECK(cfg.modes[0] == 64);
  CHECK(cfg.steps == 400);
  CHECK(cfg.b3 == doctest::Approx(1e-2));
  CHECK(cfg.kappa == doctest::Approx(1e-3));
  CHECK(cfg.u_lower == doctest::Approx(-5.0));
  CHECK(cfg.u_upper == doctest::Approx(5.0));

  const ProblemConfig cfg2 =
      ProblemConfig::parse("[cost]\nb1 = 2.5\n\n[time]\nsteps = 20\n", "inline");
  CHECK(cfg2.b1 == doctest::Approx(2.5));
  CHECK(cfg2.steps == 20);
}

TEST_CASE("validation names the violated constraint") {
  CHECK_THROWS_WITH_AS(ProblemConfig::parse("[cost]\nkappa = -1\n", "inline"),
                       doctest::Contains("kappa"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(ProblemConfig::parse("[cost]\nu_lower = 1\nu_upper = 0\n", "inline"),
                       doctest::Contains("u_lower <= u_upper"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(ProblemConfig::parse("[physics]\ngamma = 0\n", "inline"),
                       doctest::Contains("gamma"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(ProblemConfig::parse("[cost]\nb3 = 0\n", "inline"),
                       doctest::Contains("b3"), std::invalid_argument);
}

TEST_CASE("unknown keys and malformed lines are rejected with their line number") {
  CHECK_THROWS_WITH_AS(ProblemConfig::parse("[cost]\nnot_a_key = 1\n", "inline"),
                       doctest::Contains("inline:2"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(ProblemConfig::parse("[mystery]\n", "inline"),
                       doctest::Contains("unknown section"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(ProblemConfig::parse("[cost]\nb1 2\n", "inline"),
                       doctest::Contains("key = value"), std::invalid_argument);
}

TEST_CASE("field presets parse and resolve") {
  const ProblemConfig cfg = ProblemConfig::parse(
      "[initial]\nphi0 = mode 2 0.25 0.1\nw0 = coeffs 0.5,0.25\n", "inline");
  const auto basis = cfg.make_basis();
  const Field phi0 = cfg.resolve_field(cfg.phi0, basis);
  CHECK(mean(phi0) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(phi0.coeffs()[2] == doctest::Approx(0.25));
  const Field w0 = cfg.resolve_field(cfg.w0, basis);
  CHECK(w0.coeffs()[0] == doctest::Approx(0.5));
  CHECK(w0.coeffs()[1] == doctest::Approx(0.25));

  CHECK_THROWS_AS(FieldSpec::parse("mode", 1, "test"), std::invalid_argument);
  CHECK_THROWS_AS(FieldSpec::parse("nonsense 1", 1, "test"), std::invalid_argument);
}

TEST_CASE("configuration round trip") {
  ProblemConfig cfg = ProblemConfig::parse(
      "[domain]\nmodes_x = 32\n[cost]\nkappa = 0.125\nphi_q = mode 1 0.5 0.25\n", "inline");
  const std::string text = cfg.serialize();
  const ProblemConfig back = ProblemConfig::parse(text, "serialized");
  CHECK(back == cfg);
}

TEST_CASE("environment overrides any key") {
  setenv("CHC_COST__KAPPA", "0.75", 1);
  const ProblemConfig cfg = ProblemConfig::parse("[cost]\nkappa = 0.1\n", "inline");
  unsetenv("CHC_COST__KAPPA");
  CHECK(cfg.kappa == doctest::Approx(0.75));

  setenv("CHC_COST__BOGUS", "1", 1);
  CHECK_THROWS_WITH_AS(ProblemConfig::parse("", "inline"), doctest::Contains("unknown key"),
                       std::invalid_argument);
  unsetenv("CHC_COST__BOGUS");
}

TEST_CASE("simulate writes conserved diagnostics and deterministic output") {
  const fs::path dir_a = fresh_dir("chc_sim_a");
  const fs::path dir_b = fresh_dir("chc_sim_b");
  ProblemConfig cfg = tiny_config(dir_a);
  cfg.u0 = FieldSpec::parse("constant 0", 1, "test");
  CHECK(cmd_simulate(cfg) == 0);
  cfg.out_dir = dir_b.string();
  CHECK(cmd_simulate(cfg) == 0);

  const std::string diag_a = read_file(dir_a / "diagnostics.csv");
  const std::string diag_b = read_file(dir_b / "diagnostics.csv");
  CHECK(diag_a == diag_b);  // bit-identical reruns
  CHECK(read_file(dir_a / "STATUS").rfind("ok", 0) == 0);

  // the mass column is constant
  std::istringstream in(diag_a);
  std::string line;
  std::getline(in, line);
  double first = 0.0;
  bool have_first = false;
  while (std::getline(in, line)) {
    const size_t c1 = line.find(',');
    const size_t c2 = line.find(',', c1 + 1);
    const double massv = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
    if (!have_first) {
      first = massv;
      have_first = true;
    }
    CHECK(std::abs(massv - first) <= 1e-12);
  }
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST_CASE("optimize command consumes a stored reference trajectory") {
  const fs::path ref_dir = fresh_dir("chc_ref");
  ProblemConfig sim = tiny_config(ref_dir);
  sim.u0 = FieldSpec::parse("mode 1 0.4", 1, "test");
  CHECK(cmd_simulate(sim) == 0);

  const fs::path opt_dir = fresh_dir("chc_opt");
  ProblemConfig opt = tiny_config(opt_dir);
  opt.phi_q = FieldSpec::parse("file " + (ref_dir / "trajectory.csv").string(), 1, "test");
  opt.optimizer.max_iters = 10;
  opt.optimizer.kkt_tol = 1e-3;
  CHECK(cmd_optimize(opt) == 0);
  CHECK(fs::exists(opt_dir / "history.csv"));
  CHECK(fs::exists(opt_dir / "control_u.csv"));
  CHECK(fs::exists(opt_dir / "multiplier.csv"));
  CHECK(read_file(opt_dir / "STATUS").rfind("ok", 0) == 0);
  fs::remove_all(ref_dir);
  fs::remove_all(opt_dir);
}

TEST_CASE("sweep command writes a monotone sparsity ladder") {
  const fs::path ref_dir = fresh_dir("chc_sweep_ref");
  ProblemConfig sim = tiny_config(ref_dir);
  sim.modes[0] = 16;
  sim.steps = 60;
  sim.t_final = 0.5;
  sim.u0 = FieldSpec::parse("mode 1 0.4", 1, "test");
  CHECK(cmd_simulate(sim) == 0);

  const fs::path dir = fresh_dir("chc_sweep");
  ProblemConfig cfg = sim;
  cfg.out_dir = dir.string();
  cfg.u0 = FieldSpec::parse("constant 0", 1, "test");
  cfg.phi_q = FieldSpec::parse("file " + (ref_dir / "trajectory.csv").string(), 1, "test");
  cfg.optimizer.max_iters = 200;
  cfg.coercivity_samples = 5;
  CHECK(cmd_sweep_kappa(cfg, {1e-4, 1e-3, 1e-2, 1e-1}) == 0);

  std::ifstream in(dir / "sweep.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "kappa,final_total,sparsity_fraction,min_rayleigh");
  double prev_fraction = -1.0;
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::istringstream ss(line);
    std::string tok;
    std::getline(ss, tok, ',');  // kappa
    std::getline(ss, tok, ',');  // final_total
    std::getline(ss, tok, ',');  // sparsity_fraction
    const double fraction = std::stod(tok);
    CHECK(fraction + 1e-12 >= prev_fraction);
    prev_fraction = fraction;
  }
  CHECK(rows == 4);
  CHECK(fs::exists(dir / "kappa_0" / "history.csv"));
  fs::remove_all(ref_dir);
  fs::remove_all(dir);
}

TEST_CASE("verify rejects unknown suites") {
  ProblemConfig cfg = tiny_config(fs::temp_directory_path() / "chc_none");
  CHECK_THROWS_WITH_AS(cmd_verify(cfg, "prosperity"), doctest::Contains("unknown suite"),
                       std::invalid_argument);
}

TEST_CASE("verify suites exit cleanly on a small problem") {
  ProblemConfig cfg = tiny_config(fs::temp_directory_path() / "chc_none");
  cfg.modes[0] = 16;
  cfg.steps = 40;
  cfg.t_final = 0.25;
  CHECK(cmd_verify(cfg, "mass") == 0);
  CHECK(cmd_verify(cfg, "taylor1") == 0);
}
