#pragma once

#include "chcontrol/state.hpp"

#include <string>

namespace chc {

/// Trajectory checkpoint: a long-format CSV with columns
///   t,component,mode,value
/// (component in {phi,mu,w}) plus a JSON sidecar <path>.meta.json recording
/// basis and physics parameters.  Values are printed with 17 significant
/// digits, so a round trip is exact at double precision.
void write_state_checkpoint(const std::string& csv_path, const StateTrajectory& traj);
StateTrajectory read_state_checkpoint(const std::string& csv_path);

/// Space-time coefficient CSV with columns t,mode,value (single component).
void write_spacetime_csv(const std::string& path, const SpaceTimeField& f,
                         const std::string& component);
SpaceTimeField read_spacetime_csv(const std::string& path, const BasisPtr& basis);

std::string format_double(double v);  // %.17g

}  // namespace chc
