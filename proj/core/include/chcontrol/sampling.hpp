#pragma once

#include "chcontrol/field.hpp"

#include <cstdint>
#include <random>

namespace chc {

/// Deterministic random stream.  Gaussian draws use an explicit Box-Muller
/// transform so that sequences do not depend on the standard library's
/// distribution internals.
class Rng {
public:
  explicit Rng(uint64_t seed) : eng_(seed) {}
  double uniform() {  // in [0, 1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  uint64_t integer() { return eng_(); }

private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Random smooth field: Gaussian coefficients on modes below `band` with a
/// soft spectral decay, scaled to the requested amplitude in the L2 norm.
Field random_field(const BasisPtr& basis, Rng& rng, double amplitude, int band = -1,
                   bool zero_mean = false);

/// Random control: independent random smooth frames, piecewise constant.
SpaceTimeField random_control(const BasisPtr& basis, const std::vector<double>& times, Rng& rng,
                              double amplitude, int band = -1);

std::vector<double> uniform_time_grid(double t_final, int steps);

}  // namespace chc
