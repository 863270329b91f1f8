#pragma once

#include <functional>
#include <optional>
#include <string>

#include "nsp/grid.hpp"
#include "nsp/poisson.hpp"

namespace nsp::evolve {

enum class Form { primitive, divergence };

Form parse_form(const std::string& name);
std::string to_string(Form form);

struct State {
  Field v;
  Field u;
  double t = 0.0;
};

/// dt = safety * min(dx^2 min(v) / 2, dx min(v) / sqrt(2)).
double cfl_dt(const State& s, const Grid& grid, double safety);

/// Time integrals of the right-minus-left boundary fluxes of mass (u) and
/// momentum (-p~ + u_x/v + Phi).
struct FluxTotals {
  double mass = 0.0;
  double momentum = 0.0;
};

struct ConservationReport {
  double delta_mass = 0.0;
  double delta_momentum = 0.0;
};

ConservationReport conservation_report(const State& initial, const State& final_state, const Grid& grid,
                                       const FluxTotals& fluxes);

/// Stage data handed to hooks after the potential has been solved.
struct StageView {
  const State& state;
  const poisson::PhiField& phi;
  int stage;  // 0 or 1 within the SSP-RK2 step
  double dt;
};
using StageHook = std::function<void(const StageView&)>;

/// SSP-RK2 (Heun) integrator with a warm-started Poisson solve per stage.
/// frame_speed s adds s * d/dx to both equations, i.e. the system seen from
/// a frame moving with speed s.
class Stepper {
 public:
  Stepper(const Grid& grid, Form form, double frame_speed = 0.0);

  /// Solves the potential for s, reusing the cached solution when it is already current.
  const poisson::PhiField& solve_phi(const State& s);

  State step(const State& s, double dt, const StageHook& hook = {});

  const FluxTotals& fluxes() const noexcept { return fluxes_; }
  int last_newton_iters() const noexcept { return last_newton_iters_; }
  int max_newton_iters() const noexcept { return max_newton_iters_; }
  Form form() const noexcept { return form_; }
  const Grid& grid() const noexcept { return grid_; }

 private:
  struct Rates {
    Field dv, du;
    double mass_flux = 0.0;
    double momentum_flux = 0.0;
  };
  Rates rates(const State& s, const poisson::PhiField& phi) const;
  const poisson::PhiField& solve_for(const State& s);

  Grid grid_;
  Form form_;
  double frame_speed_;
  poisson::PhiField phi_;
  Field phi_for_v_;  // v the cached phi_ belongs to
  bool phi_valid_ = false;
  FluxTotals fluxes_;
  int last_newton_iters_ = 0;
  int max_newton_iters_ = 0;
};

struct RunParams {
  double t_final = 0.0;
  double safety = 0.4;
  double observer_interval = 0.0;  // <= 0: observe at t = 0 and t_final only
};

struct RunHooks {
  StageHook on_stage;
  std::function<void(const State&)> on_step;
  std::function<void(const State&, const poisson::PhiField&, const FluxTotals&)> observer;
};

struct RunResult {
  State final_state;
  FluxTotals fluxes;
  std::size_t steps = 0;
  int max_newton_iters = 0;
};

RunResult run(const State& initial, const Grid& grid, Form form, const RunParams& params,
              const RunHooks& hooks = {});

}  // namespace nsp::evolve
