#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "nsp/config.hpp"
#include "nsp/evolve.hpp"
#include "nsp/profile.hpp"

namespace nsp::lab {

/// One observer tick. Perturbations are taken against the shifted profile.
struct DiagnosticsRecord {
  double t = 0.0;
  double X = 0.0;
  double Xdot = 0.0;
  double v_linf = 0.0;
  double u_linf = 0.0;
  double pert_linf = 0.0;
  double pert_l2 = 0.0;  // (v, u) perturbation norms
  double pert_h1 = 0.0;
  double pert_h2 = 0.0;
  double phi_h1 = 0.0;   // potential perturbation norms
  double phi_h2 = 0.0;
  double phi_h3 = 0.0;
  double eta_weighted = 0.0;
  double eta_plain = 0.0;
  double quad_norm = 0.0;
  double G1 = 0.0;
  double GS = 0.0;
  double D = 0.0;
  double cumulative = 0.0;  // time integral of delta_S Xdot^2 + G1 + GS + D
  double g = 0.0;           // squared L2 norm of the first derivatives of all three perturbations
  double mass_delta = 0.0;
  double momentum_delta = 0.0;
  int newton_iters = 0;
  double eta_ratio_min = 0.0;
  double eta_ratio_max = 0.0;
};

/// Column names of diagnostics.csv, in order.
const std::vector<std::string>& record_columns();
std::vector<double> record_values(const DiagnosticsRecord& r);

struct EmpiricalConstants {
  double C_emp = 0.0;     // max_t [||pert||_{H2}^2 + cumulative] / ||pert(0)||_{H2}^2
  double C_shift = 0.0;   // max_t |Xdot| / ||u perturbation||_inf
  double entsim_low = 0.0;
  double entsim_high = 0.0;
  double elliptic_ratio_max = 0.0;
  double g_integral = 0.0;
};

struct FieldSnapshot {
  double t = 0.0;
  Field v, u, phi;
  Field vbarX, ubarX, phibarX;
};

struct ExperimentResult {
  Config config;
  profile::ShockProfile profile;
  profile::ProfileReport profile_report;
  std::vector<DiagnosticsRecord> records;
  EmpiricalConstants constants;
  std::vector<FieldSnapshot> snapshots;
  bool failed = false;
  std::string failure;
  std::size_t steps = 0;
  int max_newton_iters = 0;
  double initial_u_mass = 0.0;  // integral of the initial velocity perturbation
};

/// Shooting with the relaxation fallback; force_relaxation skips shooting.
profile::ShockProfile build_profile(const Config& c);

/// Profile sampled on the grid plus the configured perturbation, ends pinned.
evolve::State make_initial(const profile::ShockProfile& p, const Grid& grid, const PerturbationSpec& pert);

ExperimentResult run_experiment(const Config& c);

/// Computes the empirical constants from the record series alone.
EmpiricalConstants empirical_constants(const std::vector<DiagnosticsRecord>& records);

/// Pass/fail per criterion with measured values; re-derivable from the series.
nlohmann::json acceptance_report(const ExperimentResult& r);

/// Writes diagnostics.csv, summary.json, series_*.dat and optional field dumps.
void emit(const ExperimentResult& r, const std::filesystem::path& dir);

nlohmann::json summary_json(const ExperimentResult& r);

/// Expands the sweep block of c into one config per value.
std::vector<Config> sweep_configs(const Config& c);

/// Runs every sweep member on up to jobs threads, in input order.
std::vector<ExperimentResult> run_sweep(const std::vector<Config>& configs, int jobs);

nlohmann::json sweep_summary(const std::vector<ExperimentResult>& results);

}  // namespace nsp::lab
