#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "nsp/evolve.hpp"
#include "nsp/profile.hpp"
#include "nsp/relent.hpp"

namespace nsp::lab {

inline constexpr int kSchemaVersion = 1;

enum class Family { none, gaussian, dipole, shifted_profile };
enum class Target { u, v, uv };
enum class MassMode { natural, zero };

struct PerturbationSpec {
  Family family = Family::none;
  Target target = Target::u;
  double amplitude = 0.0;
  double width = 5.0;
  double center = 0.0;
  MassMode mass_mode = MassMode::natural;
  double shift = 0.0;  // translation for the shifted_profile family
};

struct Tolerances {
  double conservation = 1e-6;
  double decay_fraction = 0.5;         // final sup of u-perturbation vs its running max
  double shift_decay_fraction = 0.25;  // last-quarter vs first-quarter mean |Xdot|
  double scheme_error = 1e-3;          // sup perturbation allowed for the unperturbed wave
};

struct OutputSpec {
  std::string dir = "out";
  bool field_dumps = false;
};

struct SweepSpec {
  std::string parameter;  // "amplitude" or "v_plus"; empty when absent
  std::vector<double> values;
};

struct Config {
  int schema_version = kSchemaVersion;
  double v_minus = 1.0;
  double u_minus = 0.0;
  double v_plus = 1.2;
  double half_width = 400.0;
  int n_cells = 4096;
  double t_final = 200.0;
  double safety = 0.4;
  double observer_interval = 1.0;
  evolve::Form form = evolve::Form::divergence;
  PerturbationSpec perturbation;
  profile::SolverParams solver;
  bool force_relaxation = false;
  Tolerances tolerances;
  OutputSpec output;
  SweepSpec sweep;
  std::uint64_t seed = 0;
  bool allow_margin_violation = false;

  // Derived at validation.
  profile::EndStates endstates;
  relent::RelConstants constants;
};

std::string to_string(Family f);
std::string to_string(Target t);
std::string to_string(MassMode m);

/// Parses and validates; ValidationError carries every violated rule.
Config config_from_json(const nlohmann::json& doc);
Config load_config(const std::filesystem::path& path);

/// Re-derives end states and constants, returning every violated rule.
std::vector<std::string> validate(Config& c);

/// Throws ValidationError when validate reports anything.
void validate_or_throw(Config& c);

nlohmann::json to_json(const Config& c);

}  // namespace nsp::lab
