#include "chcontrol/config.hpp"

#include "chcontrol/checkpoint.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

extern char** environ;

namespace chc {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream ss(s);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

std::vector<double> parse_double_list(const std::string& s, const std::string& context) {
  std::vector<double> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument("");
    } catch (...) {
      throw std::invalid_argument(context + ": cannot parse number '" + item + "'");
    }
  }
  return out;
}

double parse_double(const std::string& s, const std::string& context) {
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw std::invalid_argument(context + ": cannot parse number '" + s + "'");
  }
}

long parse_int(const std::string& s, const std::string& context) {
  try {
    size_t used = 0;
    const long v = std::stol(s, &used);
    if (used != s.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw std::invalid_argument(context + ": cannot parse integer '" + s + "'");
  }
}

bool parse_bool(const std::string& s, const std::string& context) {
  const std::string v = lower(trim(s));
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw std::invalid_argument(context + ": cannot parse boolean '" + s + "'");
}

// known sections and keys
const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"domain", {"dim", "length_x", "length_y", "modes_x", "modes_y", "dealias_factor"}},
      {"time", {"t_final", "steps"}},
      {"physics", {"gamma", "potential", "well", "scale", "stabilization"}},
      {"cost", {"b1", "b2", "b3", "kappa", "phi_q", "phi_omega", "u_lower", "u_upper"}},
      {"initial", {"phi0", "w0"}},
      {"control", {"u0"}},
      {"optimizer",
       {"max_iters", "kkt_tol", "tau0", "backtrack_factor", "sufficient_decrease",
        "max_backtracks", "accelerate"}},
      {"sweep", {"kappas", "coercivity_samples"}},
      {"output", {"directory", "emit_plot_script"}},
      {"run", {"seed"}},
  };
  return s;
}

struct RawConfig {
  // (section, key) -> value
  std::map<std::pair<std::string, std::string>, std::string> values;

  void set(const std::string& section, const std::string& key, const std::string& value,
           const std::string& where) {
    const auto sec_it = schema().find(section);
    if (sec_it == schema().end()) {
      throw std::invalid_argument(where + ": unknown section [" + section + "]");
    }
    if (!sec_it->second.count(key)) {
      throw std::invalid_argument(where + ": unknown key '" + key + "' in section [" + section +
                                  "]");
    }
    values[{section, key}] = value;
  }
  const std::string* get(const std::string& section, const std::string& key) const {
    const auto it = values.find({section, key});
    return it == values.end() ? nullptr : &it->second;
  }
};

void apply_env_overrides(RawConfig& raw) {
  const std::string prefix = "CHC_";
  for (char** env = environ; *env != nullptr; ++env) {
    const std::string entry(*env);
    if (entry.rfind(prefix, 0) != 0) continue;
    const size_t eq = entry.find('=');
    if (eq == std::string::npos) continue;
    const std::string name = entry.substr(prefix.size(), eq - prefix.size());
    const size_t sep = name.find("__");
    if (sep == std::string::npos) {
      throw std::invalid_argument("environment override " + prefix + name +
                                  ": expected CHC_<SECTION>__<KEY>");
    }
    raw.set(lower(name.substr(0, sep)), lower(name.substr(sep + 2)),
            entry.substr(eq + 1), "environment override " + entry.substr(0, eq));
  }
}

}  // namespace

FieldSpec FieldSpec::parse(const std::string& text, int dim, const std::string& context) {
  const auto toks = split_ws(trim(text));
  if (toks.empty()) throw std::invalid_argument(context + ": empty field description");
  FieldSpec spec;
  const std::string kind = lower(toks[0]);
  if (kind == "constant") {
    if (toks.size() != 2) throw std::invalid_argument(context + ": constant takes one value");
    spec.kind = Kind::constant;
    spec.value = parse_double(toks[1], context);
  } else if (kind == "mode") {
    spec.kind = Kind::mode;
    const size_t nk = (dim == 2) ? 2 : 1;
    if (toks.size() < 2 + nk || toks.size() > 3 + nk) {
      throw std::invalid_argument(context + ": mode takes k-index, amplitude and optional offset");
    }
    for (size_t i = 0; i < nk; ++i) {
      spec.mode[i] = static_cast<int>(parse_int(toks[1 + i], context));
      if (spec.mode[i] < 0) throw std::invalid_argument(context + ": mode index must be >= 0");
    }
    spec.amplitude = parse_double(toks[1 + nk], context);
    spec.offset = (toks.size() == 3 + nk) ? parse_double(toks[2 + nk], context) : 0.0;
  } else if (kind == "coeffs") {
    if (toks.size() != 2) {
      throw std::invalid_argument(context + ": coeffs takes one comma-separated list");
    }
    spec.kind = Kind::coeffs;
    spec.coeffs = parse_double_list(toks[1], context);
  } else if (kind == "file") {
    if (toks.size() != 2) throw std::invalid_argument(context + ": file takes one path");
    spec.kind = Kind::file;
    spec.path = toks[1];
  } else {
    throw std::invalid_argument(context + ": unknown field preset '" + toks[0] + "'");
  }
  return spec;
}

std::string FieldSpec::serialize(int dim) const {
  std::ostringstream out;
  switch (kind) {
    case Kind::constant:
      out << "constant " << format_double(value);
      break;
    case Kind::mode:
      out << "mode " << mode[0];
      if (dim == 2) out << ' ' << mode[1];
      out << ' ' << format_double(amplitude) << ' ' << format_double(offset);
      break;
    case Kind::coeffs: {
      out << "coeffs ";
      for (size_t i = 0; i < coeffs.size(); ++i) {
        if (i) out << ',';
        out << format_double(coeffs[i]);
      }
      break;
    }
    case Kind::file:
      out << "file " << path;
      break;
  }
  return out.str();
}

ProblemConfig ProblemConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

ProblemConfig ProblemConfig::parse(const std::string& text, const std::string& origin) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  std::string section;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno);
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw std::invalid_argument(where + ": malformed section header");
      section = lower(trim(line.substr(1, line.size() - 2)));
      if (!schema().count(section)) {
        throw std::invalid_argument(where + ": unknown section [" + section + "]");
      }
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(where + ": expected 'key = value'");
    }
    if (section.empty()) {
      throw std::invalid_argument(where + ": key outside of any section");
    }
    raw.set(section, lower(trim(line.substr(0, eq))), trim(line.substr(eq + 1)), where);
  }
  apply_env_overrides(raw);

  ProblemConfig cfg;
  auto num = [&](const char* sec, const char* key, double& dst) {
    if (const std::string* v = raw.get(sec, key)) {
      dst = parse_double(*v, std::string(sec) + "." + key);
    }
  };
  auto integer = [&](const char* sec, const char* key, int& dst) {
    if (const std::string* v = raw.get(sec, key)) {
      dst = static_cast<int>(parse_int(*v, std::string(sec) + "." + key));
    }
  };

  integer("domain", "dim", cfg.dim);
  num("domain", "length_x", cfg.lengths[0]);
  num("domain", "length_y", cfg.lengths[1]);
  integer("domain", "modes_x", cfg.modes[0]);
  integer("domain", "modes_y", cfg.modes[1]);
  num("domain", "dealias_factor", cfg.dealias_factor);
  num("time", "t_final", cfg.t_final);
  integer("time", "steps", cfg.steps);
  num("physics", "gamma", cfg.gamma);
  if (const std::string* v = raw.get("physics", "potential")) cfg.potential = lower(trim(*v));
  num("physics", "well", cfg.well);
  num("physics", "scale", cfg.scale);
  num("physics", "stabilization", cfg.stabilization);
  num("cost", "b1", cfg.b1);
  num("cost", "b2", cfg.b2);
  num("cost", "b3", cfg.b3);
  num("cost", "kappa", cfg.kappa);
  if (const std::string* v = raw.get("cost", "phi_q")) {
    cfg.phi_q = FieldSpec::parse(*v, cfg.dim, "cost.phi_q");
  }
  if (const std::string* v = raw.get("cost", "phi_omega")) {
    cfg.phi_omega = FieldSpec::parse(*v, cfg.dim, "cost.phi_omega");
  }
  num("cost", "u_lower", cfg.u_lower);
  num("cost", "u_upper", cfg.u_upper);
  if (const std::string* v = raw.get("initial", "phi0")) {
    cfg.phi0 = FieldSpec::parse(*v, cfg.dim, "initial.phi0");
  }
  if (const std::string* v = raw.get("initial", "w0")) {
    cfg.w0 = FieldSpec::parse(*v, cfg.dim, "initial.w0");
  }
  if (const std::string* v = raw.get("control", "u0")) {
    cfg.u0 = FieldSpec::parse(*v, cfg.dim, "control.u0");
  }
  integer("optimizer", "max_iters", cfg.optimizer.max_iters);
  num("optimizer", "kkt_tol", cfg.optimizer.kkt_tol);
  num("optimizer", "tau0", cfg.optimizer.tau0);
  num("optimizer", "backtrack_factor", cfg.optimizer.backtrack_factor);
  num("optimizer", "sufficient_decrease", cfg.optimizer.sufficient_decrease);
  integer("optimizer", "max_backtracks", cfg.optimizer.max_backtracks);
  if (const std::string* v = raw.get("optimizer", "accelerate")) {
    cfg.optimizer.accelerate = parse_bool(*v, "optimizer.accelerate");
  }
  if (const std::string* v = raw.get("sweep", "kappas")) {
    cfg.sweep_kappas = parse_double_list(*v, "sweep.kappas");
  }
  integer("sweep", "coercivity_samples", cfg.coercivity_samples);
  if (const std::string* v = raw.get("output", "directory")) cfg.out_dir = *v;
  if (const std::string* v = raw.get("output", "emit_plot_script")) {
    cfg.emit_plot_script = parse_bool(*v, "output.emit_plot_script");
  }
  if (const std::string* v = raw.get("run", "seed")) {
    cfg.seed = static_cast<uint64_t>(parse_int(*v, "run.seed"));
  }

  cfg.validate();
  return cfg;
}

void ProblemConfig::validate() const {
  if (dim != 1 && dim != 2) {
    throw std::invalid_argument("config validation: domain.dim must be 1 or 2");
  }
  for (int a = 0; a < dim; ++a) {
    if (!(lengths[static_cast<size_t>(a)] > 0.0)) {
      throw std::invalid_argument("config validation: domain lengths must be positive");
    }
    if (modes[static_cast<size_t>(a)] < 4) {
      throw std::invalid_argument("config validation: at least 4 modes per axis are required");
    }
  }
  if (dealias_factor < 1.0) {
    throw std::invalid_argument("config validation: domain.dealias_factor must be >= 1");
  }
  if (!(t_final > 0.0)) throw std::invalid_argument("config validation: time.t_final must be > 0");
  if (steps < 1) throw std::invalid_argument("config validation: time.steps must be >= 1");
  if (!(gamma > 0.0)) {
    throw std::invalid_argument(
        "config validation: physics.gamma must be > 0 (positive relaxation time)");
  }
  if (potential != "quartic") {
    throw std::invalid_argument("config validation: physics.potential must be 'quartic'");
  }
  if (!(well > 0.0) || !(scale > 0.0)) {
    throw std::invalid_argument("config validation: potential well and scale must be positive");
  }
  if (b1 < 0.0 || b2 < 0.0) {
    throw std::invalid_argument(
        "config validation: cost.b1 and cost.b2 must be >= 0 (tracking weights)");
  }
  if (!(b3 > 0.0)) {
    throw std::invalid_argument(
        "config validation: cost.b3 must be > 0 (control energy weight)");
  }
  if (!(kappa > 0.0)) {
    throw std::invalid_argument("config validation: cost.kappa must be > 0 (sparsity weight)");
  }
  if (!(u_lower <= u_upper)) {
    throw std::invalid_argument(
        "config validation: control bounds must satisfy u_lower <= u_upper");
  }
  optimizer.validate();
  for (const double k : sweep_kappas) {
    if (!(k > 0.0)) {
      throw std::invalid_argument("config validation: sweep.kappas must all be > 0");
    }
  }
  if (coercivity_samples < 1) {
    throw std::invalid_argument("config validation: sweep.coercivity_samples must be >= 1");
  }
}

std::string ProblemConfig::serialize() const {
  std::ostringstream o;
  o << "[domain]\n";
  o << "dim = " << dim << '\n';
  o << "length_x = " << format_double(lengths[0]) << '\n';
  if (dim == 2) o << "length_y = " << format_double(lengths[1]) << '\n';
  o << "modes_x = " << modes[0] << '\n';
  if (dim == 2) o << "modes_y = " << modes[1] << '\n';
  o << "dealias_factor = " << format_double(dealias_factor) << '\n';
  o << "\n[time]\n";
  o << "t_final = " << format_double(t_final) << '\n';
  o << "steps = " << steps << '\n';
  o << "\n[physics]\n";
  o << "gamma = " << format_double(gamma) << '\n';
  o << "potential = " << potential << '\n';
  o << "well = " << format_double(well) << '\n';
  o << "scale = " << format_double(scale) << '\n';
  o << "stabilization = " << format_double(stabilization) << '\n';
  o << "\n[cost]\n";
  o << "b1 = " << format_double(b1) << '\n';
  o << "b2 = " << format_double(b2) << '\n';
  o << "b3 = " << format_double(b3) << '\n';
  o << "kappa = " << format_double(kappa) << '\n';
  o << "phi_q = " << phi_q.serialize(dim) << '\n';
  o << "phi_omega = " << phi_omega.serialize(dim) << '\n';
  o << "u_lower = " << format_double(u_lower) << '\n';
  o << "u_upper = " << format_double(u_upper) << '\n';
  o << "\n[initial]\n";
  o << "phi0 = " << phi0.serialize(dim) << '\n';
  o << "w0 = " << w0.serialize(dim) << '\n';
  o << "\n[control]\n";
  o << "u0 = " << u0.serialize(dim) << '\n';
  o << "\n[optimizer]\n";
  o << "max_iters = " << optimizer.max_iters << '\n';
  o << "kkt_tol = " << format_double(optimizer.kkt_tol) << '\n';
  o << "tau0 = " << format_double(optimizer.tau0) << '\n';
  o << "backtrack_factor = " << format_double(optimizer.backtrack_factor) << '\n';
  o << "sufficient_decrease = " << format_double(optimizer.sufficient_decrease) << '\n';
  o << "max_backtracks = " << optimizer.max_backtracks << '\n';
  o << "accelerate = " << (optimizer.accelerate ? "true" : "false") << '\n';
  o << "\n[sweep]\n";
  o << "kappas = ";
  for (size_t i = 0; i < sweep_kappas.size(); ++i) {
    if (i) o << ',';
    o << format_double(sweep_kappas[i]);
  }
  o << '\n';
  o << "coercivity_samples = " << coercivity_samples << '\n';
  o << "\n[output]\n";
  o << "directory = " << out_dir << '\n';
  o << "emit_plot_script = " << (emit_plot_script ? "true" : "false") << '\n';
  o << "\n[run]\n";
  o << "seed = " << seed << '\n';
  return o.str();
}

bool operator==(const ProblemConfig& a, const ProblemConfig& b) {
  return a.serialize() == b.serialize();
}

BasisPtr ProblemConfig::make_basis() const {
  return SpectralBasis::build(dim, lengths, modes, dealias_factor);
}

std::vector<double> ProblemConfig::make_times() const {
  std::vector<double> t(static_cast<size_t>(steps) + 1);
  for (int m = 0; m <= steps; ++m) t[static_cast<size_t>(m)] = t_final * m / steps;
  return t;
}

PhysicsParams ProblemConfig::make_physics() const {
  PhysicsParams p;
  p.gamma = gamma;
  p.potential.kind = PotentialSpec::Kind::quartic;
  p.potential.well = well;
  p.potential.scale = scale;
  p.stabilization =
      (stabilization >= 0.0) ? stabilization : default_stabilization(p.potential);
  return p;
}

Field ProblemConfig::resolve_field(const FieldSpec& spec, const BasisPtr& basis) const {
  switch (spec.kind) {
    case FieldSpec::Kind::constant:
      return Field::constant(basis, spec.value);
    case FieldSpec::Kind::mode: {
      Field f = Field::constant(basis, spec.offset);
      const int flat = spec.mode[0] * (dim == 2 ? modes[1] : 1) + (dim == 2 ? spec.mode[1] : 0);
      if (flat < 0 || flat >= basis->num_modes()) {
        throw std::invalid_argument("field preset: mode index out of range");
      }
      f.coeffs()[flat] += spec.amplitude;
      return f;
    }
    case FieldSpec::Kind::coeffs: {
      Eigen::VectorXd c = Eigen::VectorXd::Zero(basis->num_modes());
      if (static_cast<int>(spec.coeffs.size()) > basis->num_modes()) {
        throw std::invalid_argument("field preset: more coefficients than retained modes");
      }
      for (size_t i = 0; i < spec.coeffs.size(); ++i) {
        c[static_cast<Eigen::Index>(i)] = spec.coeffs[i];
      }
      return Field::from_coeffs(basis, std::move(c));
    }
    case FieldSpec::Kind::file: {
      const StateTrajectory ref = read_state_checkpoint(spec.path);
      if (!ref.basis->compatible_with(*basis)) {
        throw std::invalid_argument("field preset: checkpoint basis does not match the domain");
      }
      return Field::from_coeffs(basis, ref.phi.back());
    }
  }
  throw std::logic_error("unreachable");
}

SpaceTimeField ProblemConfig::resolve_control(const FieldSpec& spec, const BasisPtr& basis,
                                              const std::vector<double>& times) const {
  if (spec.kind == FieldSpec::Kind::file) {
    SpaceTimeField u = read_spacetime_csv(spec.path, basis);
    if (u.times() != times) {
      throw std::invalid_argument("control preset: file time grid does not match configuration");
    }
    return u;
  }
  const Field f = resolve_field(spec, basis);
  SpaceTimeField u(basis, times);
  for (int m = 0; m < u.num_frames(); ++m) u.frame(m) = f.coeffs();
  return u;
}

CostConfig ProblemConfig::make_cost(const BasisPtr& basis,
                                    const std::vector<double>& times) const {
  CostConfig cost;
  cost.b1 = b1;
  cost.b2 = b2;
  cost.b3 = b3;
  cost.kappa = kappa;
  cost.bounds.lower_value = u_lower;
  cost.bounds.upper_value = u_upper;
  if (phi_q.kind == FieldSpec::Kind::file) {
    const StateTrajectory ref = read_state_checkpoint(phi_q.path);
    if (!ref.basis->compatible_with(*basis) || ref.times != times) {
      throw std::invalid_argument("cost.phi_q: reference trajectory grid does not match");
    }
    cost.phi_q = SpaceTimeField::from_frames(basis, times, ref.phi);
  } else {
    const Field f = resolve_field(phi_q, basis);
    SpaceTimeField q(basis, times);
    for (int m = 0; m < q.num_frames(); ++m) q.frame(m) = f.coeffs();
    cost.phi_q = std::move(q);
  }
  cost.phi_omega = resolve_field(phi_omega, basis);
  return cost;
}

}  // namespace chc
