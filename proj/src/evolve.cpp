#include "nsp/evolve.hpp"

#include <algorithm>
#include <cmath>

#include "nsp/eos.hpp"
#include "nsp/errors.hpp"

namespace nsp::evolve {

Form parse_form(const std::string& name) {
  if (name == "primitive") return Form::primitive;
  if (name == "divergence") return Form::divergence;
  throw ValidationError({"form must be 'primitive' or 'divergence', got '" + name + "'"});
}

std::string to_string(Form form) { return form == Form::primitive ? "primitive" : "divergence"; }

double cfl_dt(const State& s, const Grid& grid, double safety) {
  const double vmin = *std::min_element(s.v.begin(), s.v.end());
  if (!(vmin > 0.0)) throw NonPositiveVolume("cfl_dt: min(v) <= 0");
  const double dx = grid.dx();
  return safety * std::min(dx * dx * vmin / 2.0, dx * vmin / std::sqrt(2.0));
}

ConservationReport conservation_report(const State& initial, const State& final_state, const Grid& grid,
                                       const FluxTotals& fluxes) {
  const double dx = grid.dx();
  ConservationReport r;
  r.delta_mass = trapezoid(final_state.v, dx) - trapezoid(initial.v, dx) - fluxes.mass;
  r.delta_momentum = trapezoid(final_state.u, dx) - trapezoid(initial.u, dx) - fluxes.momentum;
  return r;
}

Stepper::Stepper(const Grid& grid, Form form, double frame_speed)
    : grid_(grid), form_(form), frame_speed_(frame_speed) {}

const poisson::PhiField& Stepper::solve_phi(const State& s) { return solve_for(s); }

const poisson::PhiField& Stepper::solve_for(const State& s) {
  if (phi_valid_ && s.v == phi_for_v_) return phi_;
  const poisson::Dirichlet bc{-std::log(s.v.front()), -std::log(s.v.back())};
  std::optional<std::span<const double>> guess;
  if (phi_.phi.size() == s.v.size()) guess = std::span<const double>(phi_.phi);
  phi_ = poisson::solve_phi(s.v, grid_, bc, guess);
  phi_for_v_ = s.v;
  phi_valid_ = true;
  last_newton_iters_ = phi_.newton_iters;
  max_newton_iters_ = std::max(max_newton_iters_, phi_.newton_iters);
  return phi_;
}

Stepper::Rates Stepper::rates(const State& s, const poisson::PhiField& pf) const {
  const std::size_t n = s.v.size();
  const double dx = grid_.dx();
  const double inv2 = 0.5 / dx;
  const double invsq = 1.0 / (dx * dx);
  const Field& v = s.v;
  const Field& u = s.u;
  const Field& phi = pf.phi;

  Rates r;
  r.dv.assign(n, 0.0);
  r.du.assign(n, 0.0);
  Field force;
  if (form_ == Form::divergence) force = poisson::electric_force(v, phi, grid_);

  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double vr = 0.5 * (v[i] + v[i + 1]);
    const double vl = 0.5 * (v[i] + v[i - 1]);
    const double visc = ((u[i + 1] - u[i]) / vr - (u[i] - u[i - 1]) / vl) * invsq;
    double pressure_grad, field_term;
    if (form_ == Form::divergence) {
      pressure_grad = (eos::modified_pressure(v[i + 1]) - eos::modified_pressure(v[i - 1])) * inv2;
      field_term = (force[i + 1] - force[i - 1]) * inv2;
    } else {
      pressure_grad = (eos::pressure(v[i + 1]) - eos::pressure(v[i - 1])) * inv2;
      field_term = -(phi[i + 1] - phi[i - 1]) * inv2 / v[i];
    }
    r.dv[i] = (u[i + 1] - u[i - 1]) * inv2;
    r.du[i] = -pressure_grad + visc + field_term;
    if (frame_speed_ != 0.0) {
      r.dv[i] += frame_speed_ * (v[i + 1] - v[i - 1]) * inv2;
      r.du[i] += frame_speed_ * (u[i + 1] - u[i - 1]) * inv2;
    }
  }

  // Physical boundary fluxes with one-sided derivatives.
  const Field phi_force = form_ == Form::divergence ? force : poisson::electric_force(v, phi, grid_);
  const double ux_left = (-3.0 * u[0] + 4.0 * u[1] - u[2]) * inv2;
  const double ux_right = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) * inv2;
  const double g_left = -eos::modified_pressure(v[0]) + ux_left / v[0] + phi_force[0];
  const double g_right = -eos::modified_pressure(v[n - 1]) + ux_right / v[n - 1] + phi_force[n - 1];
  r.mass_flux = u[n - 1] - u[0];
  r.momentum_flux = g_right - g_left;
  return r;
}

State Stepper::step(const State& s, double dt, const StageHook& hook) {
  const std::size_t n = s.v.size();
  const poisson::PhiField& phi0 = solve_for(s);
  if (hook) hook(StageView{s, phi0, 0, dt});
  const Rates k0 = rates(s, phi0);

  State mid;
  mid.t = s.t + dt;
  mid.v.resize(n);
  mid.u.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    mid.v[i] = s.v[i] + dt * k0.dv[i];
    mid.u[i] = s.u[i] + dt * k0.du[i];
    if (!(mid.v[i] > 0.0)) throw NonPositiveVolume("step: stage produced v <= 0 at t = " + std::to_string(mid.t));
  }

  const poisson::PhiField& phi1 = solve_for(mid);
  if (hook) hook(StageView{mid, phi1, 1, dt});
  const Rates k1 = rates(mid, phi1);

  State out;
  out.t = s.t + dt;
  out.v.resize(n);
  out.u.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.v[i] = 0.5 * (s.v[i] + mid.v[i] + dt * k1.dv[i]);
    out.u[i] = 0.5 * (s.u[i] + mid.u[i] + dt * k1.du[i]);
    if (!(out.v[i] > 0.0)) throw NonPositiveVolume("step: produced v <= 0 at t = " + std::to_string(out.t));
  }
  // Boundary nodes stay at their far-field values.
  out.v.front() = s.v.front();
  out.v.back() = s.v.back();
  out.u.front() = s.u.front();
  out.u.back() = s.u.back();

  fluxes_.mass += 0.5 * dt * (k0.mass_flux + k1.mass_flux);
  fluxes_.momentum += 0.5 * dt * (k0.momentum_flux + k1.momentum_flux);
  return out;
}

RunResult run(const State& initial, const Grid& grid, Form form, const RunParams& params, const RunHooks& hooks) {
  Stepper stepper(grid, form);
  State s = initial;
  RunResult result;
  auto observe = [&]() {
    if (hooks.observer) hooks.observer(s, stepper.solve_phi(s), stepper.fluxes());
  };
  observe();
  const double t_end = initial.t + std::max(params.t_final, 0.0);
  const double interval = params.observer_interval > 0.0 ? params.observer_interval : params.t_final;
  std::size_t tick = 1;
  double next_obs = initial.t + interval * static_cast<double>(tick);
  while (s.t < t_end) {
    const double target = std::min(next_obs, t_end);
    double dt = cfl_dt(s, grid, params.safety);
    bool hits = false;
    if (s.t + dt >= target * (1.0 - 1e-14) || target - (s.t + dt) < 1e-12 * std::max(1.0, target)) {
      dt = target - s.t;
      hits = true;
    }
    s = stepper.step(s, dt, hooks.on_stage);
    if (hits) s.t = target;
    ++result.steps;
    if (hooks.on_step) hooks.on_step(s);
    if (hits) {
      if (target >= next_obs) next_obs = initial.t + interval * static_cast<double>(++tick);
      observe();
    }
  }
  result.final_state = s;
  result.fluxes = stepper.fluxes();
  result.max_newton_iters = stepper.max_newton_iters();
  return result;
}

}  // namespace nsp::evolve
