#include "nsp/lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "nsp/errors.hpp"
#include "nsp/relax.hpp"
#include "nsp/relent.hpp"
#include "nsp/shift.hpp"

namespace nsp::lab {

namespace {

double bump(const PerturbationSpec& p, double x) {
  const double z = (x - p.center) / p.width;
  switch (p.family) {
    case Family::gaussian: {
      double g = p.amplitude * std::exp(-0.5 * z * z);
      // Subtracting a twice-wider Gaussian of half the amplitude cancels the mass.
      if (p.mass_mode == MassMode::zero) g -= 0.5 * p.amplitude * std::exp(-0.125 * z * z);
      return g;
    }
    case Family::dipole:
      return -p.amplitude * z * std::exp(-0.5 * z * z);
    default:
      return 0.0;
  }
}

struct PerturbationFields {
  Field v, u, phi;
};

PerturbationFields perturbations(const evolve::State& s, std::span<const double> phi, const shift::ShiftedFrame& f) {
  const std::size_t n = s.v.size();
  PerturbationFields p{Field(n), Field(n), Field(n)};
  for (std::size_t i = 0; i < n; ++i) {
    p.v[i] = s.v[i] - f.vbarX[i];
    p.u[i] = s.u[i] - f.ubarX[i];
    p.phi[i] = phi[i] - f.phibarX[i];
  }
  return p;
}

double dissipation_rate(double delta_S, double xdot, const relent::GoodTerms& g) {
  return delta_S * xdot * xdot + g.G1 + g.GS + g.D;
}

double mean_abs_xdot(const std::vector<DiagnosticsRecord>& rs, double lo, double hi) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : rs) {
    if (r.t >= lo && r.t <= hi) {
      sum += std::abs(r.Xdot);
      ++n;
    }
  }
  return n ? sum / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
}

nlohmann::json criterion(const std::string& name, const std::string& status, double measured, double threshold,
                         const std::string& detail) {
  nlohmann::json j = {{"name", name}, {"status", status}, {"detail", detail}};
  j["measured"] = std::isfinite(measured) ? nlohmann::json(measured) : nlohmann::json(nullptr);
  j["threshold"] = std::isfinite(threshold) ? nlohmann::json(threshold) : nlohmann::json(nullptr);
  return j;
}

}  // namespace

profile::ShockProfile build_profile(const Config& c) {
  const profile::EndStates es = profile::shock_speed(c.v_minus, c.u_minus, c.v_plus);
  if (!c.force_relaxation) {
    try {
      return profile::solve_profile(es, c.solver);
    } catch (const NoConnection&) {
      // fall through to relaxation
    }
  }
  return profile::relax_profile(es);
}

evolve::State make_initial(const profile::ShockProfile& p, const Grid& grid, const PerturbationSpec& pert) {
  const bool local = pert.family == Family::gaussian || pert.family == Family::dipole;
  if (local && std::abs(pert.center) + 8.0 * pert.width > grid.half_width()) {
    throw ValidationError({"perturbation support |center| + 8 width exceeds the domain half width"});
  }
  const auto& es = p.endstates;
  const std::size_t n = grid.size();
  const double offset = pert.family == Family::shifted_profile ? pert.shift : 0.0;
  evolve::State s;
  s.v.resize(n);
  s.u.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid.x(i);
    const profile::ProfileSample q = profile::eval_profile(p, x - offset, 0);
    const double b = local ? bump(pert, x) : 0.0;
    s.v[i] = q.v + (pert.target != Target::u ? b : 0.0);
    s.u[i] = q.u + (pert.target != Target::v ? b : 0.0);
  }
  s.v.front() = es.v_minus;
  s.u.front() = es.u_minus;
  s.v.back() = es.v_plus;
  s.u.back() = es.u_plus;
  for (double v : s.v) {
    if (!(v > 0.0)) throw ValidationError({"perturbation makes the initial volume non-positive"});
  }
  return s;
}

EmpiricalConstants empirical_constants(const std::vector<DiagnosticsRecord>& records) {
  EmpiricalConstants c;
  if (records.empty()) return c;
  const double base = records.front().pert_h2 * records.front().pert_h2;
  c.C_emp = base > 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
  c.entsim_low = std::numeric_limits<double>::infinity();
  c.entsim_high = 0.0;
  bool any_ratio = false;
  for (const auto& r : records) {
    if (base > 0.0) {
      const double lhs = r.pert_h2 * r.pert_h2 + r.phi_h2 * r.phi_h2 + r.cumulative;
      c.C_emp = std::max(c.C_emp, lhs / base);
    }
    if (r.u_linf > 0.0) c.C_shift = std::max(c.C_shift, std::abs(r.Xdot) / r.u_linf);
    if (r.eta_ratio_max > 0.0) {
      c.entsim_low = std::min(c.entsim_low, r.eta_ratio_min);
      c.entsim_high = std::max(c.entsim_high, r.eta_ratio_max);
      any_ratio = true;
    }
  }
  if (!any_ratio) c.entsim_low = 0.0;
  for (std::size_t k = 1; k < records.size(); ++k) {
    c.g_integral += 0.5 * (records[k].t - records[k - 1].t) * (records[k].g + records[k - 1].g);
  }
  return c;
}

ExperimentResult run_experiment(const Config& config) {
  ExperimentResult result;
  result.config = config;
  result.profile = build_profile(config);
  result.profile_report = profile::verify_profile(result.profile);
  const profile::ShockProfile& prof = result.profile;
  const auto& es = prof.endstates;
  const relent::RelConstants rc = relent::rel_constants(es);

  const Grid grid(config.half_width, config.n_cells);
  const evolve::State initial = make_initial(prof, grid, config.perturbation);
  {
    Field ut(grid.size());
    for (std::size_t i = 0; i < ut.size(); ++i) ut[i] = initial.u[i] - profile::eval_profile(prof, grid.x(i), 0).u;
    result.initial_u_mass = trapezoid(ut, grid.dx());
  }

  shift::ShiftTracker tracker(prof, grid, initial);
  double cumulative = 0.0;
  double last_t = initial.t;
  double last_rate = dissipation_rate(es.delta_S, tracker.Xdot(), relent::good_terms(initial, tracker.frame(), grid, rc));
  double elliptic_max = 0.0;

  evolve::RunHooks hooks;
  hooks.on_stage = [&](const evolve::StageView& view) { tracker.on_stage(view); };
  hooks.on_step = [&](const evolve::State& s) {
    tracker.on_step(s);
    const double rate = dissipation_rate(es.delta_S, tracker.Xdot(), relent::good_terms(s, tracker.frame(), grid, rc));
    cumulative += 0.5 * (s.t - last_t) * (rate + last_rate);
    last_rate = rate;
    last_t = s.t;
  };
  hooks.observer = [&](const evolve::State& s, const poisson::PhiField& phi, const evolve::FluxTotals& fluxes) {
    const shift::ShiftedFrame& frame = tracker.frame();
    const PerturbationFields pf = perturbations(s, phi.phi, frame);
    DiagnosticsRecord r;
    r.t = s.t;
    r.X = tracker.X();
    r.Xdot = tracker.Xdot();
    r.v_linf = max_abs(pf.v);
    r.u_linf = max_abs(pf.u);
    r.pert_linf = std::max(r.v_linf, r.u_linf);
    const std::vector<std::span<const double>> vu{pf.v, pf.u};
    r.pert_l2 = relent::sobolev_norm(vu, 0, grid);
    r.pert_h1 = relent::sobolev_norm(vu, 1, grid);
    r.pert_h2 = relent::sobolev_norm(vu, 2, grid);
    r.phi_h1 = relent::sobolev_norm(pf.phi, 1, grid);
    r.phi_h2 = relent::sobolev_norm(pf.phi, 2, grid);
    r.phi_h3 = relent::sobolev_norm(pf.phi, 3, grid);
    const relent::EtaSnapshot eta = relent::eta_integral(s, phi.phi, frame, grid);
    r.eta_weighted = eta.eta_weighted;
    r.eta_plain = eta.eta_plain;
    r.quad_norm = eta.quad_norm;
    r.eta_ratio_min = eta.ratio_min;
    r.eta_ratio_max = eta.ratio_max;
    const relent::GoodTerms gt = relent::good_terms(s, frame, grid, rc);
    r.G1 = gt.G1;
    r.GS = gt.GS;
    r.D = gt.D;
    r.cumulative = cumulative;
    const std::vector<std::span<const double>> all{pf.v, pf.u, pf.phi};
    const double h1 = relent::sobolev_norm(all, 1, grid);
    const double l2 = relent::sobolev_norm(all, 0, grid);
    r.g = std::max(0.0, h1 * h1 - l2 * l2);
    const evolve::ConservationReport cons = evolve::conservation_report(initial, s, grid, fluxes);
    r.mass_delta = cons.delta_mass;
    r.momentum_delta = cons.delta_momentum;
    r.newton_iters = phi.newton_iters;
    result.records.push_back(r);

    const double vnorm = relent::sobolev_norm(pf.v, 0, grid);
    if (vnorm > 1e-12) elliptic_max = std::max(elliptic_max, relent::elliptic_ratio(pf.phi, pf.v, grid, 1));

    if (config.output.field_dumps) {
      result.snapshots.push_back({s.t, s.v, s.u, phi.phi, frame.vbarX, frame.ubarX, frame.phibarX});
    }
  };

  evolve::RunParams params;
  params.t_final = config.t_final;
  params.safety = config.safety;
  params.observer_interval = config.observer_interval;
  try {
    const evolve::RunResult run = evolve::run(initial, grid, config.form, params, hooks);
    result.steps = run.steps;
    result.max_newton_iters = run.max_newton_iters;
  } catch (const NonPositiveVolume& ex) {
    result.failed = true;
    result.failure = std::string("NonPositiveVolume: ") + ex.what();
  } catch (const NewtonDiverged& ex) {
    result.failed = true;
    result.failure = std::string("NewtonDiverged: ") + ex.what();
  }

  result.constants = empirical_constants(result.records);
  result.constants.elliptic_ratio_max = elliptic_max;
  return result;
}

nlohmann::json acceptance_report(const ExperimentResult& r) {
  nlohmann::json doc;
  auto criteria = nlohmann::json::array();
  auto violations = nlohmann::json::array();
  if (r.failed || r.records.empty()) {
    doc["verdict"] = "failed";
    doc["failure"] = r.failed ? r.failure : "no diagnostics recorded";
    doc["criteria"] = criteria;
    doc["violations"] = violations;
    return doc;
  }
  const auto& c = r.config;
  const auto& tol = c.tolerances;
  const auto& rs = r.records;
  const double T = rs.back().t;
  const bool perturbed = c.perturbation.family != Family::none;
  auto add = [&](nlohmann::json j) {
    if (j["status"] == "fail") violations.push_back(j["name"]);
    criteria.push_back(std::move(j));
  };

  if (!perturbed) {
    double worst = 0.0, shift = 0.0;
    for (const auto& rec : rs) {
      worst = std::max(worst, rec.pert_linf);
      shift = std::max(shift, std::abs(rec.X));
    }
    add(criterion("traveling_wave", worst <= tol.scheme_error && shift <= tol.scheme_error ? "pass" : "fail",
                  std::max(worst, shift), tol.scheme_error, "max over records of sup perturbation and |X|"));
  }

  if (perturbed) {
    double peak = 0.0;
    for (const auto& rec : rs) peak = std::max(peak, rec.u_linf);
    const double final_sup = rs.back().u_linf;
    add(criterion("decay_linf", final_sup <= tol.decay_fraction * peak ? "pass" : "fail", final_sup,
                  tol.decay_fraction * peak, "final sup of the velocity perturbation against its running max"));

    const double first = mean_abs_xdot(rs, 0.0, 0.25 * T);
    const double last = mean_abs_xdot(rs, 0.75 * T, T);
    add(criterion("shift_rate_decay", last <= tol.shift_decay_fraction * first ? "pass" : "fail", last,
                  tol.shift_decay_fraction * first, "mean |Xdot| over the last quarter against the first quarter"));

    bool decreasing = true;
    double prev = std::numeric_limits<double>::infinity();
    std::size_t checked = 0;
    for (const auto& rec : rs) {
      if (rec.t < 0.5 * T || rec.t <= 0.0) continue;
      const double ratio = std::abs(rec.X / rec.t);
      if (ratio > prev) decreasing = false;
      prev = ratio;
      ++checked;
    }
    add(criterion("sublinear_shift", decreasing && checked >= 2 ? "pass" : "fail", prev, std::nan(""),
                  "|X(t)/t| nonincreasing over the last half"));
  } else {
    for (const char* name : {"decay_linf", "shift_rate_decay", "sublinear_shift"})
      add(criterion(name, "skipped", std::nan(""), std::nan(""), "no perturbation"));
  }

  double mass = 0.0, momentum = 0.0;
  for (const auto& rec : rs) {
    mass = std::max(mass, std::abs(rec.mass_delta));
    momentum = std::max(momentum, std::abs(rec.momentum_delta));
  }
  add(criterion("conservation_mass", mass < tol.conservation ? "pass" : "fail", mass, tol.conservation,
                "integral of v against the accumulated boundary flux of u"));
  if (c.form == evolve::Form::divergence) {
    add(criterion("conservation_momentum", momentum < tol.conservation ? "pass" : "fail", momentum,
                  tol.conservation, "integral of u against the accumulated boundary momentum flux"));
  } else {
    add(criterion("conservation_momentum", "skipped", momentum, tol.conservation,
                  "momentum flux balance is exact only in divergence form"));
  }

  const auto& k = r.constants;
  const bool finite = std::isfinite(k.C_shift) && (!perturbed || std::isfinite(k.C_emp));
  add(criterion("constants_finite", finite ? "pass" : "fail", perturbed ? k.C_emp : k.C_shift, std::nan(""),
                "C_emp and C_shift finite"));

  doc["verdict"] = violations.empty() ? "pass" : "fail";
  doc["criteria"] = criteria;
  doc["violations"] = violations;
  return doc;
}

std::vector<Config> sweep_configs(const Config& c) {
  std::vector<Config> out;
  if (c.sweep.parameter.empty()) {
    out.push_back(c);
    return out;
  }
  for (std::size_t k = 0; k < c.sweep.values.size(); ++k) {
    Config m = c;
    m.sweep = {};
    if (c.sweep.parameter == "amplitude") m.perturbation.amplitude = c.sweep.values[k];
    if (c.sweep.parameter == "v_plus") m.v_plus = c.sweep.values[k];
    m.output.dir = (std::filesystem::path(c.output.dir) / ("member_" + std::to_string(k))).string();
    validate_or_throw(m);
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<ExperimentResult> run_sweep(const std::vector<Config>& configs, int jobs) {
  std::vector<ExperimentResult> results(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t k = next++; k < configs.size(); k = next++) {
      try {
        results[k] = run_experiment(configs[k]);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const auto threads = static_cast<std::size_t>(std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(configs.size(), 1))));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

nlohmann::json sweep_summary(const std::vector<ExperimentResult>& results) {
  auto members = nlohmann::json::array();
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& r : results) {
    const auto& k = r.constants;
    members.push_back({{"amplitude", r.config.perturbation.amplitude},
                       {"v_plus", r.config.v_plus},
                       {"C_emp", std::isfinite(k.C_emp) ? nlohmann::json(k.C_emp) : nlohmann::json(nullptr)},
                       {"C_shift", k.C_shift},
                       {"verdict", acceptance_report(r)["verdict"]}});
    if (std::isfinite(k.C_emp)) {
      lo = std::min(lo, k.C_emp);
      hi = std::max(hi, k.C_emp);
    }
  }
  nlohmann::json doc = {{"members", members}};
  doc["C_emp_spread"] = hi > 0.0 && std::isfinite(lo) ? nlohmann::json((hi - lo) / lo) : nlohmann::json(nullptr);
  return doc;
}

}  // namespace nsp::lab
