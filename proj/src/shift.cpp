#include "nsp/shift.hpp"

#include <cmath>

#include "nsp/eos.hpp"

namespace nsp::shift {

double weight_a(const profile::ShockProfile& p, double xi) {
  const auto& es = p.endstates;
  return 1.0 + (es.u_minus - profile::eval_profile(p, xi, 0).u) / std::sqrt(es.delta_S);
}

double shift_gain(double v_minus) { return 5.0 * std::sqrt(2.0) / (2.0 * v_minus * v_minus * v_minus); }

ShiftedFrame shifted_frame(const profile::ShockProfile& p, double t, double X, const Grid& grid) {
  const auto& es = p.endstates;
  const std::size_t n = grid.size();
  const double root = std::sqrt(es.delta_S);
  ShiftedFrame f;
  f.t = t;
  f.X = X;
  f.vbarX.resize(n);
  f.ubarX.resize(n);
  f.phibarX.resize(n);
  f.dvbarX.resize(n);
  f.dubarX.resize(n);
  f.aX.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const profile::ProfilePoint q = profile::eval_point(p, grid.x(i) - es.sigma * t - X);
    f.vbarX[i] = q.v;
    f.ubarX[i] = q.u;
    f.phibarX[i] = q.phi;
    f.dvbarX[i] = q.dv;
    f.dubarX[i] = q.du;
    f.aX[i] = 1.0 + (es.u_minus - q.u) / root;
  }
  return f;
}

double shift_rate(std::span<const double> u, const ShiftedFrame& frame, const profile::EndStates& es,
                  const Grid& grid) {
  const std::size_t n = u.size();
  Field integrand(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double ut = u[i] - frame.ubarX[i];
    const double dp = eos::modified_pressure_prime(frame.vbarX[i]) * frame.dvbarX[i];
    integrand[i] = frame.aX[i] * (frame.dubarX[i] + dp / es.sigma) * ut;
  }
  return -(shift_gain(es.v_minus) / es.delta_S) * trapezoid(integrand, grid.dx());
}

double shift_rhs(const evolve::State& s, const profile::ShockProfile& p, double X, double t, const Grid& grid) {
  return shift_rate(s.u, shifted_frame(p, t, X, grid), p.endstates, grid);
}

ShiftState advance_shift(const ShiftState& s, double dt, std::array<double, 2> stage_rates) {
  ShiftState out = s;
  out.X = s.X + 0.5 * dt * (stage_rates[0] + stage_rates[1]);
  return out;
}

ShiftTracker::ShiftTracker(const profile::ShockProfile& p, const Grid& grid, const evolve::State& initial)
    : profile_(p), grid_(grid) {
  frame_ = shifted_frame(p, initial.t, 0.0, grid_);
  state_.Xdot = shift_rate(initial.u, frame_, p.endstates, grid_);
  state_.history.push_back({initial.t, 0.0, state_.Xdot});
}

void ShiftTracker::on_stage(const evolve::StageView& view) {
  dt_ = view.dt;
  if (view.stage == 0) {
    // The rate at the accepted state was computed when the step was accepted.
    rates_[0] = state_.Xdot;
    return;
  }
  const double X1 = state_.X + view.dt * rates_[0];
  const ShiftedFrame f = shifted_frame(profile_, view.state.t, X1, grid_);
  rates_[1] = shift_rate(view.state.u, f, profile_.endstates, grid_);
}

void ShiftTracker::on_step(const evolve::State& s) {
  state_ = advance_shift(state_, dt_, rates_);
  frame_ = shifted_frame(profile_, s.t, state_.X, grid_);
  state_.Xdot = shift_rate(s.u, frame_, profile_.endstates, grid_);
  state_.history.push_back({s.t, state_.X, state_.Xdot});
}

}  // namespace nsp::shift
