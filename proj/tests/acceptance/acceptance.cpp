// Acceptance suite: one line per criterion, exit status 0 only if all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "nsp/checks.hpp"
#include "nsp/config.hpp"
#include "nsp/evolve.hpp"
#include "nsp/lab.hpp"
#include "nsp/profile.hpp"
#include "nsp/relent.hpp"

using namespace nsp;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool within(double x, double target, double tol) { return std::abs(x - target) <= tol; }

const profile::ShockProfile& reference() {
  static const profile::ShockProfile p = profile::solve_profile(profile::shock_speed(1.0, 0.0, 1.2));
  return p;
}

double sup_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

evolve::State sampled(const Grid& grid, double offset) {
  evolve::State s;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto q = profile::eval_profile(reference(), grid.x(i) - offset, 0);
    s.v.push_back(q.v);
    s.u.push_back(q.u);
  }
  return s;
}

// Traveling-wave runs on L = 60/delta_S up to T = 5/sigma, shared by criteria 3, 4 and 11.
struct WaveRun {
  evolve::State initial;
  evolve::RunResult primitive, divergence;
  double error_primitive = 0.0, error_divergence = 0.0;
  evolve::ConservationReport conservation;
};

WaveRun wave_run(int n_cells) {
  const auto& es = reference().endstates;
  const Grid grid(60.0 / es.delta_S, n_cells);
  const double T = 5.0 / es.sigma;
  WaveRun w;
  w.initial = sampled(grid, 0.0);
  w.primitive = evolve::run(w.initial, grid, evolve::Form::primitive, {T, 0.4, 0.0});
  w.divergence = evolve::run(w.initial, grid, evolve::Form::divergence, {T, 0.4, 0.0});
  const evolve::State exact = sampled(grid, es.sigma * T);
  w.error_primitive = sup_diff(w.primitive.final_state.v, exact.v);
  w.error_divergence = sup_diff(w.divergence.final_state.v, exact.v);
  w.conservation = evolve::conservation_report(w.initial, w.divergence.final_state, grid, w.divergence.fluxes);
  return w;
}

const std::vector<WaveRun>& wave_runs() {
  static const std::vector<WaveRun> runs = {wave_run(4096), wave_run(8192)};
  return runs;
}

lab::Config perturbed_config(double amplitude, int n_cells) {
  json doc = {{"schema_version", 1},
              {"grid", {{"half_width", 400.0}, {"n_cells", n_cells}}},
              {"time", {{"t_final", 200.0}, {"observer_interval", 1.0}}},
              {"perturbation", {{"family", "gaussian"}, {"target", "u"}, {"amplitude", amplitude}, {"width", 5.0}}}};
  return lab::config_from_json(doc);
}

// Criterion-6 family at A, A/2, A/4 plus A on the refined grid.
const std::vector<lab::ExperimentResult>& family_runs() {
  static const std::vector<lab::ExperimentResult> runs = [] {
    const double A = 0.01;
    return lab::run_sweep({perturbed_config(A, 4096), perturbed_config(A / 2, 4096), perturbed_config(A / 4, 4096),
                           perturbed_config(A, 8192)},
                          1);
  }();
  return runs;
}

Outcome rh_closed_form() {
  const auto es = profile::shock_speed(1.0, 0.0, 1.2);
  const auto rh = profile::rh_residuals(es);
  const bool ok = within(es.sigma, 1.290994, 1e-6) && within(es.u_plus, -0.258199, 1e-6) &&
                  std::abs(rh[0]) < 1e-12 && std::abs(rh[1]) < 1e-12;
  return {ok, fmt("sigma=%.9f u+=%.9f rh=(%.1e, %.1e)", es.sigma, es.u_plus, rh[0], rh[1])};
}

Outcome profile_fidelity() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto p = profile::solve_profile(profile::shock_speed(1.0, 0.0, 1.2));
  const auto r = profile::verify_profile(p, 2);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = r.farfield_left < 1e-6 && r.farfield_right < 1e-6 && r.monotonicity_ok && r.ratio_sign_ok &&
                  r.ratio_low > 0.0 && std::isfinite(r.ratio_high) && r.pde_residual_ratio >= 3.0 &&
                  r.pde_residual_ratio <= 5.0 && secs < 10.0;
  return {ok, fmt("farfield=(%.1e, %.1e) monotone=%d ratio in [%.4f, %.4f] residual ratio=%.3f time=%.2fs",
                  r.farfield_left, r.farfield_right, r.monotonicity_ok, r.ratio_low, r.ratio_high,
                  r.pde_residual_ratio, secs)};
}

Outcome traveling_wave() {
  const auto& w = wave_runs();
  const double e0 = std::max(w[0].error_primitive, w[0].error_divergence);
  const double q_prim = w[0].error_primitive / w[1].error_primitive;
  const double q_div = w[0].error_divergence / w[1].error_divergence;
  const bool ok = e0 < 5e-3 && within(q_prim, 4.0, 1.2) && within(q_div, 4.0, 1.2);
  return {ok, fmt("sup error N=4096 %.3e (prim) %.3e (div); refinement ratio %.3f (prim) %.3f (div)",
                  w[0].error_primitive, w[0].error_divergence, q_prim, q_div)};
}

Outcome form_equivalence() {
  const auto& w = wave_runs();
  const double d0 = sup_diff(w[0].primitive.final_state.v, w[0].divergence.final_state.v);
  const double d1 = sup_diff(w[1].primitive.final_state.v, w[1].divergence.final_state.v);
  const double q = d0 / d1;
  const bool ok = d0 < 1e-3 && within(q, 4.0, 1.2);
  return {ok, fmt("sup |prim - div| N=4096 %.3e N=8192 %.3e ratio %.3f", d0, d1, q)};
}

Outcome relative_bounds() {
  const auto r = relent::lemma21_check(1.0, 0.05, 0.1, 200);
  const double q = relent::rel_q(1.2, 1.0);
  const double b2 = relent::relbd2_rhs(1.2, 1.0);
  const double b3 = relent::relbd3_rhs(1.2, 1.0);
  const bool ok = r.relbd2_ok() && r.relbd3_ok() && r.samples == 40000 && within(q, 0.0353569, 1e-6) &&
                  within(b2, 0.0339506, 1e-6) && within(b3, 0.0346667, 1e-6);
  return {ok, fmt("%zu samples, violations %zu/%zu, Q=%.7f bounds %.7f %.7f", r.samples, r.relbd2_violations,
                  r.relbd3_violations, q, b2, b3)};
}

Outcome decay() {
  const auto& r = family_runs()[0];
  if (r.failed) return {false, "run aborted: " + r.failure};
  const json rep = lab::acceptance_report(r);
  std::string detail = fmt("mass %.7f;", r.initial_u_mass);
  bool ok = true;
  for (const char* name : {"decay_linf", "shift_rate_decay", "sublinear_shift"}) {
    for (const auto& c : rep["criteria"]) {
      if (c["name"] != name) continue;
      ok = ok && c["status"] == "pass";
      const double m = c["measured"].is_number() ? c["measured"].get<double>() : std::nan("");
      const std::string status = c["status"].get<std::string>();
      if (c["threshold"].is_number()) {
        detail += fmt(" %s %s (%.3e vs %.3e);", name, status.c_str(), m, c["threshold"].get<double>());
      } else {
        detail += fmt(" %s %s (%.3e);", name, status.c_str(), m);
      }
    }
  }
  return {ok, detail};
}

Outcome apriori_ratio() {
  const auto& runs = family_runs();
  double lo = INFINITY, hi = 0.0;
  std::string detail = "C_emp";
  for (int k = 0; k < 3; ++k) {
    const double c = runs[k].constants.C_emp;
    if (runs[k].failed || !std::isfinite(c)) return {false, "non-finite C_emp or aborted run"};
    lo = std::min(lo, c);
    hi = std::max(hi, c);
    detail += fmt(" %.4f", c);
  }
  const double spread = (hi - lo) / lo;
  return {spread < 0.5, detail + fmt("; spread %.3f", spread)};
}

Outcome shift_bound() {
  const auto& runs = family_runs();
  bool finite = true;
  std::string detail = "C_shift";
  for (const auto& r : runs) {
    finite = finite && !r.failed && std::isfinite(r.constants.C_shift) && r.constants.C_shift > 0.0;
    detail += fmt(" %.4f", r.constants.C_shift);
  }
  const double change = std::abs(runs[3].constants.C_shift - runs[0].constants.C_shift) / runs[0].constants.C_shift;
  return {finite && change < 0.2, detail + fmt("; refinement change %.4f", change)};
}

Outcome eta_envelope() {
  const auto& runs = family_runs();
  double c_low = INFINITY, c_high = 0.0;
  for (int k = 0; k < 3; ++k) {
    for (const auto& rec : runs[k].records) {
      if (rec.eta_ratio_max <= 0.0) continue;
      c_low = std::min(c_low, rec.eta_ratio_min);
      c_high = std::max(c_high, rec.eta_ratio_max);
    }
  }
  // Quadratic scaling: halving the amplitude divides the weighted functional by 4 at every record time.
  double worst = 0.0;
  for (int k = 0; k < 2; ++k) {
    const auto& a = runs[k].records;
    const auto& b = runs[k + 1].records;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
      worst = std::max(worst, std::abs(a[i].eta_weighted / b[i].eta_weighted / 4.0 - 1.0));
    }
  }
  const bool ok = c_low > 0.0 && c_high >= c_low && std::isfinite(c_high) && worst <= 0.05;
  return {ok, fmt("pointwise ratio in [%.4f, %.4f]; worst deviation from 4x scaling %.4f", c_low, c_high, worst)};
}

Outcome elliptic() {
  const Grid coarse(400.0, 4096), fine(400.0, 8192);
  const auto a = checks::elliptic_ensemble(reference(), coarse, 20, 0);
  const auto b = checks::elliptic_ensemble(reference(), fine, 20, 0);
  const double change = std::abs(b.max_ratio - a.max_ratio) / a.max_ratio;
  const bool ok = std::isfinite(a.max_ratio) && a.max_ratio > 0.0 && change <= 0.2;
  return {ok, fmt("max ratio %.5f (N=4096) %.5f (N=8192), change %.2e", a.max_ratio, b.max_ratio, change)};
}

Outcome conservation() {
  const auto& c = wave_runs()[0].conservation;
  const bool ok = std::abs(c.delta_mass) < 1e-6 && std::abs(c.delta_momentum) < 1e-6;
  return {ok, fmt("mass %.3e momentum %.3e", c.delta_mass, c.delta_momentum)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"rankine-hugoniot closed form", rh_closed_form},
      {"profile fidelity", profile_fidelity},
      {"traveling-wave exactness", traveling_wave},
      {"form equivalence", form_equivalence},
      {"relative-quantity bounds", relative_bounds},
      {"decay without zero mass", decay},
      {"a priori ratio", apriori_ratio},
      {"shift bound", shift_bound},
      {"functional equivalence envelope", eta_envelope},
      {"elliptic ratio", elliptic},
      {"conservation", conservation},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("[%s] %2zu %-32s %s  (%.1fs)\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail.c_str(),
                secs);
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failures);
  return failures == 0 ? 0 : 1;
}
