#pragma once

#include <array>
#include <vector>

#include "nsp/evolve.hpp"
#include "nsp/grid.hpp"
#include "nsp/profile.hpp"

namespace nsp::shift {

/// a(xi) = 1 + (u_- - ubar(xi)) / sqrt(delta_S).
double weight_a(const profile::ShockProfile& p, double xi);

/// Gain of the shift equation, 5 sqrt(2) / (2 v_-^3).
double shift_gain(double v_minus);

/// Profile fields sampled at xi_i = x_i - sigma t - X.
struct ShiftedFrame {
  Field vbarX, ubarX, phibarX;
  Field dvbarX, dubarX;
  Field aX;
  double t = 0.0;
  double X = 0.0;
};

ShiftedFrame shifted_frame(const profile::ShockProfile& p, double t, double X, const Grid& grid);

/// Shift velocity for the velocity field u against a prepared frame.
double shift_rate(std::span<const double> u, const ShiftedFrame& frame, const profile::EndStates& es,
                  const Grid& grid);

double shift_rhs(const evolve::State& s, const profile::ShockProfile& p, double X, double t, const Grid& grid);

struct ShiftSample {
  double t = 0.0;
  double X = 0.0;
  double Xdot = 0.0;
};

struct ShiftState {
  double X = 0.0;
  double Xdot = 0.0;
  std::vector<ShiftSample> history;
};

/// Heun update X += dt (r0 + r1) / 2 from the two stage rates. Xdot is left
/// for the caller to refresh at the accepted state.
ShiftState advance_shift(const ShiftState& s, double dt, std::array<double, 2> stage_rates);

/// Couples the shift to an evolve run through the stage and step hooks.
class ShiftTracker {
 public:
  ShiftTracker(const profile::ShockProfile& p, const Grid& grid, const evolve::State& initial);

  void on_stage(const evolve::StageView& view);
  void on_step(const evolve::State& s);

  const ShiftState& state() const noexcept { return state_; }
  const ShiftedFrame& frame() const noexcept { return frame_; }
  double X() const noexcept { return state_.X; }
  double Xdot() const noexcept { return state_.Xdot; }

 private:
  const profile::ShockProfile& profile_;
  Grid grid_;
  ShiftState state_;
  ShiftedFrame frame_;  // at the accepted (t, X)
  std::array<double, 2> rates_{};
  double dt_ = 0.0;
};

}  // namespace nsp::shift
