#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace nsp::profile {

/// Far-field data of a 2-shock together with the derived speed and strength.
struct EndStates {
  double v_minus = 1.0;
  double v_plus = 1.0;
  double u_minus = 0.0;
  double u_plus = 0.0;
  double sigma = 0.0;
  double delta_S = 0.0;
  double phi_minus = 0.0;
  double phi_plus = 0.0;
};

/// Builds the 2-shock end states from (v-, u-, v+). Throws DegenerateShock
/// for v+ == v-, LaxViolation for v+ < v-, NonPositiveVolume for v <= 0.
EndStates shock_speed(double v_minus, double u_minus, double v_plus);

/// Residuals of the two jump conditions (mass, momentum).
std::array<double, 2> rh_residuals(const EndStates& es);

bool check_lax(const EndStates& es);

/// (v, phi, E) with E = phi' / v.
using OdeState = std::array<double, 3>;

/// Right-hand side of the once-integrated traveling-wave system.
OdeState profile_rhs(const OdeState& y, const EndStates& es);

/// Jacobian of profile_rhs, row-major.
std::array<std::array<double, 3>, 3> profile_jacobian(const OdeState& y, const EndStates& es);

/// Linearised decay rates of |v - v_-| as xi -> -inf and |v - v_+| as xi -> +inf.
struct TailRates {
  double left = 0.0;
  double right = 0.0;
};
TailRates linear_tail_rates(const EndStates& es);

struct SolverParams {
  double launch_factor = 1e-7;      // launch distance = launch_factor * delta_S
  double step = 0.0;                // 0 selects min(0.01, 0.01 / delta_S)
  double xi_budget_factor = 200.0;  // integration budget = factor / delta_S
  double strength_ceiling = 0.3;
  int angle_samples = 72;
  double farfield_tol = 1e-6;
  double tail_tol = 1e-14;          // linearised tails are appended down to this distance
  bool polish = true;
};

struct SolverInfo {
  std::string method;  // "shooting", "shooting+collocation" or "relaxation"
  int unstable_dim = 0;
  bool complex_pair = false;
  double launch_angle = 0.0;
  double launch_distance = 0.0;
  double step = 0.0;
  double closest_approach = 0.0;  // shooting distance to the right rest point
  int newton_iters = 0;
  double collocation_residual = 0.0;
  std::vector<std::complex<double>> left_eigenvalues;
  std::vector<std::complex<double>> right_eigenvalues;
};

/// Tabulated traveling wave. Node spacing is uniform; anchor_index marks xi = 0
/// where vbar equals (v- + v+) / 2.
struct ShockProfile {
  std::vector<double> xi;
  std::vector<double> vbar, ubar, phibar, Ebar;
  std::vector<double> dvbar, dubar, dphibar, dEbar;
  EndStates endstates;
  std::size_t anchor_index = 0;
  SolverInfo solver;

  std::size_t size() const noexcept { return xi.size(); }
  double xi_min() const { return xi.front(); }
  double xi_max() const { return xi.back(); }
};

ShockProfile solve_profile(const EndStates& es, const SolverParams& params = {});

/// Recomputes ubar, derivatives and the anchor from (xi, vbar, phibar, Ebar).
/// ubar is rebuilt from vbar through the mass jump relation.
void finalize_profile(ShockProfile& p);

struct ProfileSample {
  double v = 0.0;
  double u = 0.0;
  double phi = 0.0;
};

/// order 0: (vbar, ubar, phibar); order 1: their xi-derivatives.
ProfileSample eval_profile(const ShockProfile& p, double xi, int order);

/// Values and first derivatives from one lookup.
struct ProfilePoint {
  double v, u, phi;
  double dv, du, dphi;
};
ProfilePoint eval_point(const ShockProfile& p, double xi);

struct TailFit {
  double rate = 0.0;         // fitted exponential rate, > 0 for decay
  double theta = 0.0;        // rate / delta_S
  double correlation = 0.0;  // |r| of log|vbar - v_pm| against xi
  std::size_t points = 0;
};

struct ProfileReport {
  double farfield_left = 0.0;
  double farfield_right = 0.0;
  bool monotonicity_ok = false;
  bool ratio_sign_ok = false;
  double ratio_low = 0.0;   // min of phibar' / ubar'
  double ratio_high = 0.0;  // max of phibar' / ubar'
  TailFit left_tail;
  TailFit right_tail;
  double theta_fit = 0.0;
  double residual_spacing = 0.0;
  double pde_residual_coarse = 0.0;
  double pde_residual_fine = 0.0;
  double pde_residual_ratio = 0.0;
  double max_speed_identity = 0.0;  // max |sigma vbar' + ubar'|
  bool relaxation_fallback = false;
};

ProfileReport verify_profile(const ShockProfile& p, int refine = 2);

/// L2 norm of the traveling-wave residual of the unintegrated profile
/// equations, with second-order differences on a uniform sampling of spacing h.
double traveling_wave_residual(const ShockProfile& p, double spacing);

nlohmann::json to_json(const ShockProfile& p);
ShockProfile profile_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ProfileReport& r);
nlohmann::json to_json(const EndStates& es);

void save_profile(const ShockProfile& p, const std::filesystem::path& path);
ShockProfile load_profile(const std::filesystem::path& path);

}  // namespace nsp::profile
