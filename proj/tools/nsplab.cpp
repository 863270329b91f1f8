// nsplab: command-line front end for profiles, runs, sweeps and property checks.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "nsp/checks.hpp"
#include "nsp/config.hpp"
#include "nsp/errors.hpp"
#include "nsp/lab.hpp"
#include "nsp/profile.hpp"
#include "nsp/relent.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::string form;
  std::optional<std::uint64_t> seed;
};

nsp::lab::Config load(const Common& o) {
  nsp::lab::Config c = o.config.empty() ? nsp::lab::config_from_json(json{{"schema_version", 1}})
                                        : nsp::lab::load_config(o.config);
  if (!o.out.empty()) c.output.dir = o.out;
  if (!o.form.empty()) c.form = nsp::evolve::parse_form(o.form);
  if (o.seed) c.seed = *o.seed;
  nsp::lab::validate_or_throw(c);
  return c;
}

void write_json(const fs::path& path, const json& doc) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw nsp::IOError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

int cmd_profile(const Common& o) {
  const auto c = load(o);
  const auto p = nsp::lab::build_profile(c);
  const auto report = nsp::profile::verify_profile(p);
  const fs::path dir = c.output.dir;
  fs::create_directories(dir);
  nsp::profile::save_profile(p, dir / "profile.json");
  write_json(dir / "profile_report.json", nsp::profile::to_json(report));
  std::cout << "sigma " << p.endstates.sigma << "  delta_S " << p.endstates.delta_S << "  method "
            << p.solver.method << "  nodes " << p.size() << '\n'
            << "farfield " << report.farfield_left << ' ' << report.farfield_right << "  theta_fit "
            << report.theta_fit << "  residual ratio " << report.pde_residual_ratio << '\n';
  return report.monotonicity_ok && report.ratio_sign_ok ? 0 : 2;
}

int cmd_run(const Common& o) {
  const auto c = load(o);
  const auto r = nsp::lab::run_experiment(c);
  nsp::lab::emit(r, c.output.dir);
  const json verdict = nsp::lab::acceptance_report(r);
  std::cout << verdict.dump(2) << '\n';
  return verdict["verdict"] == "pass" ? 0 : 2;
}

int cmd_sweep(const Common& o, int jobs) {
  const auto c = load(o);
  const auto configs = nsp::lab::sweep_configs(c);
  const auto results = nsp::lab::run_sweep(configs, jobs);
  for (const auto& r : results) nsp::lab::emit(r, r.config.output.dir);
  const json summary = nsp::lab::sweep_summary(results);
  write_json(fs::path(c.output.dir) / "sweep_summary.json", summary);
  std::cout << summary.dump(2) << '\n';
  return 0;
}

int cmd_check(const Common& o, const std::string& which) {
  const auto c = load(o);
  json doc;
  bool ok = true;
  if (which == "lemma21") {
    const auto r = nsp::relent::lemma21_check(c.v_minus, 0.05 * c.v_minus, 0.1, 200);
    ok = r.relbd2_ok() && r.relbd3_ok();
    doc = {{"samples", r.samples},
           {"relbd2_violations", r.relbd2_violations},
           {"relbd3_violations", r.relbd3_violations},
           {"relbd2_min_margin", r.relbd2_min_margin},
           {"relbd3_min_margin", r.relbd3_min_margin},
           {"relbd1_constant", r.relbd1_constant},
           {"relbd4_constant", r.relbd4_constant}};
  } else if (which == "trf") {
    const auto p = nsp::lab::build_profile(c);
    const double L = 60.0 / p.endstates.delta_S;
    const auto s = nsp::checks::trf_study(p, L, 2048);
    ok = s.ratio > 3.0 && s.ratio < 5.0;
    doc = {{"coarse", s.coarse}, {"fine", s.fine}, {"ratio", s.ratio}};
  } else if (which == "elliptic-ratio") {
    const auto p = nsp::lab::build_profile(c);
    const nsp::Grid coarse(c.half_width, c.n_cells), fine(c.half_width, 2 * c.n_cells);
    const auto a = nsp::checks::elliptic_ensemble(p, coarse, 20, c.seed);
    const auto b = nsp::checks::elliptic_ensemble(p, fine, 20, c.seed);
    const double change = std::abs(b.max_ratio - a.max_ratio) / a.max_ratio;
    ok = std::isfinite(a.max_ratio) && change <= 0.2;
    doc = {{"max_ratio_coarse", a.max_ratio}, {"max_ratio_fine", b.max_ratio}, {"relative_change", change}};
  } else if (which == "weight-bounds") {
    const auto p = nsp::lab::build_profile(c);
    const nsp::Grid grid(c.half_width, c.n_cells);
    const auto w = nsp::checks::weight_bounds(p, grid, 0.0, 0.0);
    ok = w.bounds_ok && w.monotone;
    doc = {{"min_a", w.min_a}, {"max_a", w.max_a}, {"upper_bound", w.upper_bound}, {"monotone", w.monotone}};
  } else {
    throw nsp::ValidationError({"unknown check '" + which + "'"});
  }
  doc["check"] = which;
  doc["pass"] = ok;
  std::cout << doc.dump(2) << '\n';
  return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Viscous shock experiments for the isothermal Navier-Stokes-Poisson system"};
  app.require_subcommand(1);

  Common opts;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out, "output directory (overrides output.dir)");
    sub->add_option("--form", opts.form, "primitive or divergence")
        ->check(CLI::IsMember({"primitive", "divergence"}));
    sub->add_option("--seed", opts.seed, "random seed");
  };

  auto* profile = app.add_subcommand("profile", "build and verify a shock profile");
  add_common(profile);
  auto* run = app.add_subcommand("run", "run one experiment");
  add_common(run);
  auto* sweep = app.add_subcommand("sweep", "run the sweep block of a configuration");
  add_common(sweep);
  int jobs = 1;
  sweep->add_option("--jobs", jobs, "parallel runs")->check(CLI::PositiveNumber);
  auto* check = app.add_subcommand("check", "property suites");
  add_common(check);
  std::string which;
  check->add_option("suite", which, "lemma21, trf, elliptic-ratio or weight-bounds")
      ->required()
      ->check(CLI::IsMember({"lemma21", "trf", "elliptic-ratio", "weight-bounds"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*profile) return cmd_profile(opts);
    if (*run) return cmd_run(opts);
    if (*sweep) return cmd_sweep(opts, jobs);
    if (*check) return cmd_check(opts, which);
  } catch (const nsp::ValidationError& ex) {
    std::cerr << "invalid configuration:\n";
    for (const auto& v : ex.violations()) std::cerr << "  - " << v << '\n';
    return 1;
  } catch (const nsp::Error& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}
