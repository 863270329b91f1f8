#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nsp/checks.hpp"
#include "nsp/config.hpp"
#include "nsp/errors.hpp"
#include "nsp/lab.hpp"

using namespace nsp;
using namespace nsp::lab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const profile::ShockProfile& reference() {
  static const profile::ShockProfile p = profile::solve_profile(profile::shock_speed(1.0, 0.0, 1.2));
  return p;
}

// Small domain and short horizon so a run takes well under a second.
json small_doc() {
  return {{"schema_version", 1},
          {"grid", {{"half_width", 150.0}, {"n_cells", 768}}},
          {"time", {{"t_final", 20.0}, {"observer_interval", 2.0}}},
          {"perturbation", {{"family", "gaussian"}, {"amplitude", 0.01}, {"width", 5.0}}}};
}

std::string violations_of(const json& doc) {
  try {
    config_from_json(doc);
  } catch (const ValidationError& ex) {
    std::string all;
    for (const auto& v : ex.violations()) all += v + "\n";
    return all;
  }
  return "";
}

double u_mass(const evolve::State& s, const Grid& grid) {
  Field ut(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) ut[i] = s.u[i] - profile::eval_profile(reference(), grid.x(i), 0).u;
  return trapezoid(ut, grid.dx());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const json* find_criterion(const json& report, const std::string& name) {
  for (const auto& c : report["criteria"])
    if (c["name"] == name) return &c;
  return nullptr;
}

}  // namespace

TEST_CASE("minimal configuration fills defaults and derives the speed") {
  const Config c = config_from_json({{"schema_version", 1}});
  CHECK(c.v_minus == 1.0);
  CHECK(c.v_plus == 1.2);
  CHECK(c.half_width == 400.0);
  CHECK(c.n_cells == 4096);
  CHECK(c.t_final == 200.0);
  CHECK(c.form == evolve::Form::divergence);
  CHECK(c.perturbation.family == Family::none);
  CHECK(c.endstates.sigma == doctest::Approx(1.290994).epsilon(1e-6));
  CHECK(c.constants.M == doctest::Approx(3.5355339).epsilon(1e-7));
  const Config back = config_from_json(to_json(c));
  CHECK(back.half_width == c.half_width);
  CHECK(back.perturbation.width == c.perturbation.width);
}

TEST_CASE("configuration errors are collected and named") {
  CHECK(violations_of(json::object()).find("schema_version") != std::string::npos);
  json lax = {{"schema_version", 1}, {"endstates", {{"v_minus", 1.2}, {"v_plus", 1.0}}}};
  CHECK(violations_of(lax).find("Lax") != std::string::npos);
  json small = {{"schema_version", 1}, {"grid", {{"half_width", 50.0}}}};
  CHECK(violations_of(small).find("margin") != std::string::npos);
  json unknown = {{"schema_version", 1}, {"grid", {{"cells", 10}}}};
  CHECK(violations_of(unknown).find("unknown key config.grid.cells") == std::string::npos);
  CHECK(violations_of(unknown).find("unknown key grid.cells") != std::string::npos);
  json typed = {{"schema_version", 1}, {"time", {{"t_final", "long"}}}};
  CHECK(violations_of(typed).find("time.t_final has the wrong type") != std::string::npos);
  json family = {{"schema_version", 1}, {"perturbation", {{"family", "square"}}}};
  CHECK(violations_of(family).find("perturbation.family") != std::string::npos);
  json strong = {{"schema_version", 1}, {"endstates", {{"v_plus", 2.0}}}};
  CHECK(violations_of(strong).find("strength_ceiling") != std::string::npos);
  // Several problems are reported together.
  json many = {{"schema_version", 1}, {"grid", {{"n_cells", 4}}}, {"time", {{"safety", 3.0}}}};
  const std::string all = violations_of(many);
  CHECK(all.find("n_cells") != std::string::npos);
  CHECK(all.find("safety") != std::string::npos);
}

TEST_CASE("configuration files") {
  const fs::path dir = fs::temp_directory_path() / "nsp_lab_config";
  fs::create_directories(dir);
  {
    std::ofstream(dir / "ok.json") << "{\n  // comments are allowed\n  \"schema_version\": 1,\n"
                                      "  \"perturbation\": {\"family\": \"dipole\", \"amplitude\": 0.01}\n}\n";
    std::ofstream(dir / "broken.json") << "{ \"schema_version\": 1, ";
  }
  CHECK(load_config(dir / "ok.json").perturbation.family == Family::dipole);
  CHECK_THROWS_AS(load_config(dir / "broken.json"), ParseError);
  CHECK_THROWS_AS(load_config(dir / "missing.json"), IOError);
  fs::remove_all(dir);
}

TEST_CASE("initial data") {
  const Grid grid(150.0, 3000);
  PerturbationSpec none;
  const auto exact = make_initial(reference(), grid, none);
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    const auto q = profile::eval_profile(reference(), grid.x(i), 0);
    REQUIRE(exact.v[i] == q.v);
    REQUIRE(exact.u[i] == q.u);
  }
  CHECK(exact.v.front() == 1.0);
  CHECK(exact.v.back() == 1.2);

  PerturbationSpec gauss;
  gauss.family = Family::gaussian;
  gauss.amplitude = 0.01;
  gauss.width = 5.0;
  CHECK(u_mass(make_initial(reference(), grid, gauss), grid) == doctest::Approx(0.1253314).epsilon(1e-6));

  PerturbationSpec zero = gauss;
  zero.mass_mode = MassMode::zero;
  CHECK(std::abs(u_mass(make_initial(reference(), grid, zero), grid)) < 1e-12);

  PerturbationSpec dipole = gauss;
  dipole.family = Family::dipole;
  CHECK(std::abs(u_mass(make_initial(reference(), grid, dipole), grid)) < 1e-12);

  PerturbationSpec on_v = gauss;
  on_v.target = Target::v;
  const auto sv = make_initial(reference(), grid, on_v);
  CHECK(std::abs(u_mass(sv, grid)) < 1e-15);
  CHECK(sv.v[grid.size() / 2] - exact.v[grid.size() / 2] == doctest::Approx(0.01));

  PerturbationSpec shifted;
  shifted.family = Family::shifted_profile;
  shifted.shift = 2.0;
  const auto ss = make_initial(reference(), grid, shifted);
  CHECK(ss.v[1500] == profile::eval_profile(reference(), grid.x(1500) - 2.0, 0).v);

  PerturbationSpec wide = gauss;
  wide.width = 30.0;
  CHECK_THROWS_AS(make_initial(reference(), grid, wide), ValidationError);
  PerturbationSpec negative = on_v;
  negative.amplitude = -2.0;
  CHECK_THROWS_AS(make_initial(reference(), grid, negative), ValidationError);
}

TEST_CASE("unperturbed experiment stays on the traveling wave") {
  json doc = small_doc();
  doc["perturbation"] = {{"family", "none"}};
  // X drifts at a rate set by the O(dx^2) speed error of the discrete wave.
  doc["grid"]["n_cells"] = 1536;
  doc["time"]["t_final"] = 10.0;
  const Config c = config_from_json(doc);
  const auto r = run_experiment(c);
  REQUIRE_FALSE(r.failed);
  CHECK(r.records.size() == 6);
  const json report = acceptance_report(r);
  CHECK(report["verdict"] == "pass");
  CHECK(report["violations"].empty());
  const json* tw = find_criterion(report, "traveling_wave");
  REQUIRE(tw != nullptr);
  CHECK((*tw)["status"] == "pass");
  CHECK((*find_criterion(report, "decay_linf"))["status"] == "skipped");
}

TEST_CASE("perturbed experiment, outputs and determinism") {
  Config c = config_from_json(small_doc());
  const auto r = run_experiment(c);
  REQUIRE_FALSE(r.failed);
  CHECK(r.initial_u_mass == doctest::Approx(0.1253314).epsilon(1e-5));
  CHECK(r.records.front().t == 0.0);
  CHECK(r.records.back().t == doctest::Approx(20.0).epsilon(1e-14));
  CHECK(r.records.back().X > 0.0);
  CHECK(r.records.back().cumulative > 0.0);
  for (std::size_t k = 1; k < r.records.size(); ++k) REQUIRE(r.records[k].cumulative >= r.records[k - 1].cumulative);
  CHECK(std::isfinite(r.constants.C_emp));
  CHECK(r.constants.C_emp >= 1.0);
  CHECK(std::isfinite(r.constants.C_shift));
  CHECK(r.constants.elliptic_ratio_max > 0.0);
  CHECK(r.constants.entsim_low > 0.0);
  CHECK(r.constants.entsim_high >= r.constants.entsim_low);
  const auto again = empirical_constants(r.records);
  CHECK(again.C_emp == r.constants.C_emp);

  const json report = acceptance_report(r);
  CHECK((*find_criterion(report, "conservation_mass"))["status"] == "pass");
  CHECK((*find_criterion(report, "conservation_momentum"))["status"] == "pass");
  CHECK((*find_criterion(report, "constants_finite"))["status"] == "pass");

  const fs::path a = fs::temp_directory_path() / "nsp_lab_emit_a";
  const fs::path b = fs::temp_directory_path() / "nsp_lab_emit_b";
  fs::remove_all(a);
  fs::remove_all(b);
  emit(r, a);
  emit(run_experiment(c), b);
  for (const char* name : {"diagnostics.csv", "summary.json", "series_u_linf.dat", "series_X.dat", "series_Xdot.dat",
                           "series_eta_weighted.dat", "series_cumulative.dat"}) {
    CAPTURE(name);
    REQUIRE(fs::exists(a / name));
    CHECK(slurp(a / name) == slurp(b / name));
  }
  const std::string csv = slurp(a / "diagnostics.csv");
  CHECK(csv.rfind("t,X,Xdot,", 0) == 0);
  CHECK(csv.find("\r\n") != std::string::npos);
  std::size_t lines = 0;
  for (std::size_t pos = 0; (pos = csv.find("\r\n", pos)) != std::string::npos; pos += 2) ++lines;
  CHECK(lines == r.records.size() + 1);

  const json summary = json::parse(slurp(a / "summary.json"));
  CHECK(summary["format"] == "nsp-experiment-summary");
  CHECK(summary["version"] == 1);
  for (const char* key : {"config", "profile", "constants", "run", "acceptance"}) CHECK(summary.contains(key));
  CHECK(summary["config"]["perturbation"]["family"] == "gaussian");
  CHECK(summary["profile"]["shift_pressure"] == "modified");
  CHECK(summary["run"]["records"] == r.records.size());
  CHECK(config_from_json(summary["config"]).n_cells == c.n_cells);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("field dumps") {
  json doc = small_doc();
  doc["time"]["t_final"] = 2.0;
  doc["time"]["observer_interval"] = 1.0;
  doc["output"] = {{"field_dumps", true}};
  const auto r = run_experiment(config_from_json(doc));
  REQUIRE(r.snapshots.size() == 3);
  const fs::path dir = fs::temp_directory_path() / "nsp_lab_fields";
  fs::remove_all(dir);
  emit(r, dir);
  CHECK(fs::exists(dir / "fields_00000.dat"));
  CHECK(fs::exists(dir / "fields_00002.dat"));
  CHECK_FALSE(fs::exists(dir / "fields_00003.dat"));
  fs::remove_all(dir);
}

TEST_CASE("boundary contamination fails conservation") {
  json doc = small_doc();
  doc["grid"] = {{"half_width", 60.0}, {"n_cells", 400}};
  doc["perturbation"] = {{"family", "gaussian"}, {"amplitude", 0.05}, {"width", 3.0}, {"center", 30.0}};
  doc["time"] = {{"t_final", 40.0}, {"observer_interval", 5.0}};
  doc["allow_margin_violation"] = true;
  CHECK(violations_of([&] {
          json d = doc;
          d.erase("allow_margin_violation");
          return d;
        }())
            .find("margin") != std::string::npos);
  const auto r = run_experiment(config_from_json(doc));
  REQUIRE_FALSE(r.failed);
  const json report = acceptance_report(r);
  CHECK(report["verdict"] == "fail");
  bool named = false;
  for (const auto& v : report["violations"]) named = named || v.get<std::string>().rfind("conservation", 0) == 0;
  CHECK(named);
}

TEST_CASE("aborted runs are reported as failed") {
  ExperimentResult r;
  r.config = config_from_json(small_doc());
  r.failed = true;
  r.failure = "NonPositiveVolume: v must be positive";
  const json report = acceptance_report(r);
  CHECK(report["verdict"] == "failed");
  CHECK(report["failure"] == r.failure);
}

TEST_CASE("sweeps") {
  json doc = small_doc();
  doc["time"]["t_final"] = 4.0;
  doc["sweep"] = {{"parameter", "amplitude"}, {"values", {0.01, 0.005}}};
  doc["output"] = {{"dir", "sweep_out"}};
  const Config c = config_from_json(doc);
  const auto members = sweep_configs(c);
  REQUIRE(members.size() == 2);
  CHECK(members[1].perturbation.amplitude == 0.005);
  CHECK(members[1].output.dir == (fs::path("sweep_out") / "member_1").string());
  const auto serial = run_sweep(members, 1);
  const auto parallel = run_sweep(members, 2);
  REQUIRE(parallel.size() == 2);
  for (std::size_t k = 0; k < 2; ++k) CHECK(serial[k].records.back().X == parallel[k].records.back().X);
  const json s = sweep_summary(serial);
  CHECK(s["members"].size() == 2);
  CHECK(s["C_emp_spread"].is_number());

  json bad = doc;
  bad["sweep"]["parameter"] = "width";
  CHECK(violations_of(bad).find("sweep.parameter") != std::string::npos);
}

TEST_CASE("property checks") {
  const Grid grid(100.0, 1000);
  const auto w = checks::weight_bounds(reference(), grid, 0.0, 0.0);
  CHECK(w.bounds_ok);
  CHECK(w.monotone);
  CHECK(w.min_a >= 1.0);
  CHECK(w.max_a <= w.upper_bound);

  const auto e1 = checks::elliptic_ensemble(reference(), grid, 5, 7);
  const auto e2 = checks::elliptic_ensemble(reference(), grid, 5, 7);
  CHECK(e1.ratios.size() == 5);
  CHECK(e1.ratios == e2.ratios);
  CHECK(std::isfinite(e1.max_ratio));
  CHECK(e1.max_ratio > 0.0);

  const auto t = checks::trf_study(reference(), 60.0 / reference().endstates.delta_S, 1024);
  CHECK(t.ratio > 3.0);
  CHECK(t.ratio < 5.0);
}
