#include "chcontrol/checkpoint.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace chc {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

using nlohmann::json;

json basis_meta(const SpectralBasis& basis) {
  json j;
  j["dim"] = basis.dim();
  j["lengths"] = {basis.length(0), basis.dim() == 2 ? basis.length(1) : 0.0};
  j["modes"] = {basis.modes(0), basis.dim() == 2 ? basis.modes(1) : 0};
  j["dealias_factor"] = basis.dealias_factor();
  return j;
}

BasisPtr basis_from_meta(const json& j) {
  const int dim = j.at("dim").get<int>();
  std::array<double, 2> lengths{j.at("lengths")[0].get<double>(),
                                j.at("lengths")[1].get<double>()};
  std::array<int, 2> modes{j.at("modes")[0].get<int>(), j.at("modes")[1].get<int>()};
  if (dim == 1) {
    lengths[1] = 1.0;
    modes[1] = 1;
  }
  return SpectralBasis::build(dim, lengths, modes, j.at("dealias_factor").get<double>());
}

std::ifstream open_for_read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  return in;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("checkpoint: cannot write " + path);
  return out;
}

}  // namespace

void write_state_checkpoint(const std::string& csv_path, const StateTrajectory& traj) {
  auto out = open_for_write(csv_path);
  out << "t,component,mode,value\n";
  const char* names[3] = {"phi", "mu", "w"};
  const std::vector<Eigen::VectorXd>* comps[3] = {&traj.phi, &traj.mu, &traj.w};
  for (size_t m = 0; m < traj.times.size(); ++m) {
    for (int c = 0; c < 3; ++c) {
      const Eigen::VectorXd& frame = (*comps[c])[m];
      for (Eigen::Index k = 0; k < frame.size(); ++k) {
        out << format_double(traj.times[m]) << ',' << names[c] << ',' << k << ','
            << format_double(frame[k]) << '\n';
      }
    }
  }

  json meta;
  meta["basis"] = basis_meta(*traj.basis);
  meta["gamma"] = traj.params.gamma;
  meta["stabilization"] = traj.params.stabilization;
  meta["potential"] = {{"kind", "quartic"},
                       {"well", traj.params.potential.well},
                       {"scale", traj.params.potential.scale}};
  meta["times"] = traj.times;
  auto side = open_for_write(csv_path + ".meta.json");
  side << meta.dump(2) << '\n';
}

StateTrajectory read_state_checkpoint(const std::string& csv_path) {
  json meta;
  {
    auto side = open_for_read(csv_path + ".meta.json");
    side >> meta;
  }
  StateTrajectory traj;
  traj.basis = basis_from_meta(meta.at("basis"));
  traj.params.gamma = meta.at("gamma").get<double>();
  traj.params.stabilization = meta.at("stabilization").get<double>();
  traj.params.potential.well = meta.at("potential").at("well").get<double>();
  traj.params.potential.scale = meta.at("potential").at("scale").get<double>();
  traj.times = meta.at("times").get<std::vector<double>>();

  const int n = traj.basis->num_modes();
  const auto frames = traj.times.size();
  traj.phi.assign(frames, Eigen::VectorXd::Zero(n));
  traj.mu.assign(frames, Eigen::VectorXd::Zero(n));
  traj.w.assign(frames, Eigen::VectorXd::Zero(n));

  std::map<double, size_t> time_index;
  for (size_t m = 0; m < traj.times.size(); ++m) time_index[traj.times[m]] = m;

  auto in = open_for_read(csv_path);
  std::string line;
  std::getline(in, line);  // header
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string t_str, comp, mode_str, val_str;
    if (!std::getline(ss, t_str, ',') || !std::getline(ss, comp, ',') ||
        !std::getline(ss, mode_str, ',') || !std::getline(ss, val_str)) {
      throw std::runtime_error("checkpoint: malformed row at line " + std::to_string(lineno));
    }
    const double t = std::stod(t_str);
    const auto it = time_index.find(t);
    if (it == time_index.end()) {
      throw std::runtime_error("checkpoint: unknown time node at line " + std::to_string(lineno));
    }
    const int k = std::stoi(mode_str);
    if (k < 0 || k >= n) {
      throw std::runtime_error("checkpoint: mode out of range at line " + std::to_string(lineno));
    }
    const double v = std::stod(val_str);
    if (comp == "phi") {
      traj.phi[it->second][k] = v;
    } else if (comp == "mu") {
      traj.mu[it->second][k] = v;
    } else if (comp == "w") {
      traj.w[it->second][k] = v;
    } else {
      throw std::runtime_error("checkpoint: unknown component at line " + std::to_string(lineno));
    }
  }
  traj.phi0 = traj.phi.front();
  traj.w0 = traj.w.front();
  return traj;
}

void write_spacetime_csv(const std::string& path, const SpaceTimeField& f,
                         const std::string& component) {
  auto out = open_for_write(path);
  out << "t,component,mode,value\n";
  for (int m = 0; m < f.num_frames(); ++m) {
    for (Eigen::Index k = 0; k < f.frame(m).size(); ++k) {
      out << format_double(f.times()[static_cast<size_t>(m)]) << ',' << component << ',' << k
          << ',' << format_double(f.frame(m)[k]) << '\n';
    }
  }
}

SpaceTimeField read_spacetime_csv(const std::string& path, const BasisPtr& basis) {
  auto in = open_for_read(path);
  std::string line;
  std::getline(in, line);
  std::vector<double> times;
  std::vector<Eigen::VectorXd> frames;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string t_str, comp, mode_str, val_str;
    if (!std::getline(ss, t_str, ',') || !std::getline(ss, comp, ',') ||
        !std::getline(ss, mode_str, ',') || !std::getline(ss, val_str)) {
      throw std::runtime_error("spacetime csv: malformed row at line " + std::to_string(lineno));
    }
    const double t = std::stod(t_str);
    if (times.empty() || t > times.back()) {
      times.push_back(t);
      frames.emplace_back(Eigen::VectorXd::Zero(basis->num_modes()));
    } else if (t != times.back()) {
      throw std::runtime_error("spacetime csv: unsorted time column at line " +
                               std::to_string(lineno));
    }
    const int k = std::stoi(mode_str);
    if (k < 0 || k >= basis->num_modes()) {
      throw std::runtime_error("spacetime csv: mode out of range at line " +
                               std::to_string(lineno));
    }
    frames.back()[k] = std::stod(val_str);
  }
  return SpaceTimeField::from_frames(basis, std::move(times), std::move(frames));
}

}  // namespace chc
