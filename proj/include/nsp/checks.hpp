#pragma once

#include <cstdint>
#include <vector>

#include "nsp/grid.hpp"
#include "nsp/profile.hpp"

namespace nsp::checks {

/// max ||phi_tilde||_{H^1} / ||v_tilde||_{L^2} over seeded compact bumps added to the profile volume.
struct EllipticEnsemble {
  std::vector<double> ratios;
  double max_ratio = 0.0;
};

EllipticEnsemble elliptic_ensemble(const profile::ShockProfile& p, const Grid& grid, int members,
                                   std::uint64_t seed, double amplitude = 0.01);

struct WeightCheck {
  double min_a = 0.0;
  double max_a = 0.0;
  double upper_bound = 0.0;  // 1 + sqrt(delta_S)
  bool bounds_ok = false;
  bool monotone = false;
};

WeightCheck weight_bounds(const profile::ShockProfile& p, const Grid& grid, double t, double X);

/// Residual of the divergence identity for the sampled profile pair at two resolutions.
struct TrfStudy {
  double coarse = 0.0;
  double fine = 0.0;
  double ratio = 0.0;
};

TrfStudy trf_study(const profile::ShockProfile& p, double half_width, int n_cells);

}  // namespace nsp::checks
