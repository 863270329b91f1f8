#pragma once

#include "nsp/profile.hpp"

namespace nsp::profile {

struct RelaxParams {
  double half_width_factor = 30.0;  // domain half width = factor / delta_S
  double spacing_factor = 0.05;     // dx = factor / delta_S
  double safety = 0.4;
  double steady_tol = 1e-9;         // max |dv/dt| accepted as steady
  double time_factor = 2000.0;      // time budget = factor / delta_S
};

/// Profile obtained by running the time-dependent system in the frame moving
/// with the shock until it stops changing. Used when shooting fails.
ShockProfile relax_profile(const EndStates& es, const RelaxParams& params = {});

}  // namespace nsp::profile
