#include "nsp/relax.hpp"

#include <algorithm>
#include <cmath>

#include "nsp/errors.hpp"
#include "nsp/evolve.hpp"

namespace nsp::profile {

ShockProfile relax_profile(const EndStates& es, const RelaxParams& params) {
  const double half = params.half_width_factor / es.delta_S;
  const int cells = 2 * static_cast<int>(std::ceil(half / (params.spacing_factor / es.delta_S)));
  const Grid grid(half, cells);
  const std::size_t n = grid.size();

  evolve::State s;
  s.v.resize(n);
  s.u.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 0.5 * (1.0 + std::tanh(0.5 * es.delta_S * grid.x(i)));
    s.v[i] = es.v_minus + (es.v_plus - es.v_minus) * w;
    s.u[i] = es.u_minus - es.sigma * (s.v[i] - es.v_minus);
  }
  s.v.front() = es.v_minus;
  s.v.back() = es.v_plus;
  s.u.front() = es.u_minus;
  s.u.back() = es.u_plus;

  evolve::Stepper stepper(grid, evolve::Form::divergence, es.sigma);
  const double t_max = params.time_factor / es.delta_S;
  bool steady = false;
  while (s.t < t_max) {
    const double dt = evolve::cfl_dt(s, grid, params.safety);
    const evolve::State next = stepper.step(s, dt);
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) change = std::max(change, std::abs(next.v[i] - s.v[i]) / dt);
    s = next;
    if (change < params.steady_tol) {
      steady = true;
      break;
    }
  }
  if (!steady) throw NoConnection("relaxation did not reach a steady profile within the time budget");

  const poisson::PhiField& phi = stepper.solve_phi(s);
  const Field e = poisson::electric_field(s.v, phi.phi, grid);

  // Locate the mid-value crossing by linear interpolation and centre there.
  const double vmid = 0.5 * (es.v_minus + es.v_plus);
  double centre = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (s.v[i] <= vmid && s.v[i + 1] > vmid) {
      centre = grid.x(i) + grid.dx() * (vmid - s.v[i]) / (s.v[i + 1] - s.v[i]);
      break;
    }
  }

  ShockProfile p;
  p.endstates = es;
  p.xi.resize(n);
  for (std::size_t i = 0; i < n; ++i) p.xi[i] = grid.x(i) - centre;
  p.vbar = s.v;
  p.phibar = phi.phi;
  p.Ebar = e;
  finalize_profile(p);
  std::size_t anchor = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(p.xi[i]) < std::abs(p.xi[anchor])) anchor = i;
  }
  p.anchor_index = anchor;
  p.solver.method = "relaxation";
  p.solver.step = grid.dx();
  return p;
}

}  // namespace nsp::profile
