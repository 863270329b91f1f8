#include "nsp/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "nsp/errors.hpp"

namespace nsp::lab {

using nlohmann::json;

namespace {

// Reads optional members of one JSON object, collecting problems instead of throwing.
class Reader {
 public:
  Reader(const json& obj, std::string where, std::vector<std::string>& errors)
      : obj_(obj), where_(std::move(where)), errors_(errors) {
    if (!obj_.is_object()) errors_.push_back(where_ + " must be an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!obj_.is_object() || !obj_.contains(key)) return;
    try {
      out = obj_.at(key).get<T>();
    } catch (const json::exception&) {
      errors_.push_back(where_ + "." + key + " has the wrong type");
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    if (!obj_.is_object() || !obj_.contains(key)) return nullptr;
    return &obj_.at(key);
  }

  void finish() {
    if (!obj_.is_object()) return;
    for (const auto& item : obj_.items()) {
      if (!seen_.count(item.key())) errors_.push_back("unknown key " + where_ + "." + item.key());
    }
  }

 private:
  const json& obj_;
  std::string where_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

template <class E>
E parse_enum(const std::string& text, const std::vector<std::pair<const char*, E>>& names, const std::string& what,
             std::vector<std::string>& errors, E fallback) {
  for (const auto& [name, value] : names)
    if (text == name) return value;
  std::string allowed;
  for (const auto& [name, value] : names) allowed += (allowed.empty() ? "" : ", ") + std::string(name);
  errors.push_back(what + " must be one of {" + allowed + "}, got '" + text + "'");
  return fallback;
}

const std::vector<std::pair<const char*, Family>> kFamilies = {
    {"none", Family::none}, {"gaussian", Family::gaussian}, {"dipole", Family::dipole},
    {"shifted_profile", Family::shifted_profile}};
const std::vector<std::pair<const char*, Target>> kTargets = {{"u", Target::u}, {"v", Target::v}, {"uv", Target::uv}};
const std::vector<std::pair<const char*, MassMode>> kMassModes = {{"natural", MassMode::natural},
                                                                  {"zero", MassMode::zero}};

template <class E>
std::string enum_name(E value, const std::vector<std::pair<const char*, E>>& names) {
  for (const auto& [name, v] : names)
    if (v == value) return name;
  return "?";
}

}  // namespace

std::string to_string(Family f) { return enum_name(f, kFamilies); }
std::string to_string(Target t) { return enum_name(t, kTargets); }
std::string to_string(MassMode m) { return enum_name(m, kMassModes); }

Config config_from_json(const json& doc) {
  std::vector<std::string> errors;
  Config c;
  Reader top(doc, "config", errors);
  if (!doc.is_object() || !doc.contains("schema_version")) {
    errors.push_back("schema_version is required");
  }
  top.get("schema_version", c.schema_version);
  if (c.schema_version != kSchemaVersion) {
    errors.push_back("unsupported schema_version " + std::to_string(c.schema_version));
  }

  if (const json* e = top.child("endstates")) {
    Reader r(*e, "endstates", errors);
    r.get("v_minus", c.v_minus);
    r.get("u_minus", c.u_minus);
    r.get("v_plus", c.v_plus);
    r.finish();
  }
  if (const json* g = top.child("grid")) {
    Reader r(*g, "grid", errors);
    r.get("half_width", c.half_width);
    r.get("n_cells", c.n_cells);
    r.finish();
  }
  if (const json* t = top.child("time")) {
    Reader r(*t, "time", errors);
    r.get("t_final", c.t_final);
    r.get("safety", c.safety);
    r.get("observer_interval", c.observer_interval);
    r.finish();
  }
  std::string form = evolve::to_string(c.form);
  top.get("form", form);
  if (form == "primitive" || form == "divergence") {
    c.form = evolve::parse_form(form);
  } else {
    errors.push_back("form must be 'primitive' or 'divergence', got '" + form + "'");
  }
  if (const json* p = top.child("perturbation")) {
    Reader r(*p, "perturbation", errors);
    std::string family = "none", target = "u", mass = "natural";
    r.get("family", family);
    r.get("target", target);
    r.get("mass_mode", mass);
    r.get("amplitude", c.perturbation.amplitude);
    r.get("width", c.perturbation.width);
    r.get("center", c.perturbation.center);
    r.get("shift", c.perturbation.shift);
    r.finish();
    c.perturbation.family = parse_enum(family, kFamilies, "perturbation.family", errors, Family::none);
    c.perturbation.target = parse_enum(target, kTargets, "perturbation.target", errors, Target::u);
    c.perturbation.mass_mode = parse_enum(mass, kMassModes, "perturbation.mass_mode", errors, MassMode::natural);
  }
  if (const json* p = top.child("profile")) {
    Reader r(*p, "profile", errors);
    r.get("strength_ceiling", c.solver.strength_ceiling);
    r.get("force_relaxation", c.force_relaxation);
    r.get("angle_samples", c.solver.angle_samples);
    r.get("farfield_tol", c.solver.farfield_tol);
    r.finish();
  }
  if (const json* t = top.child("tolerances")) {
    Reader r(*t, "tolerances", errors);
    r.get("conservation", c.tolerances.conservation);
    r.get("decay_fraction", c.tolerances.decay_fraction);
    r.get("shift_decay_fraction", c.tolerances.shift_decay_fraction);
    r.get("scheme_error", c.tolerances.scheme_error);
    r.finish();
  }
  if (const json* o = top.child("output")) {
    Reader r(*o, "output", errors);
    r.get("dir", c.output.dir);
    r.get("field_dumps", c.output.field_dumps);
    r.finish();
  }
  if (const json* s = top.child("sweep")) {
    Reader r(*s, "sweep", errors);
    r.get("parameter", c.sweep.parameter);
    r.get("values", c.sweep.values);
    r.finish();
  }
  top.get("seed", c.seed);
  top.get("allow_margin_violation", c.allow_margin_violation);
  top.finish();

  if (errors.empty()) {
    auto more = validate(c);
    errors.insert(errors.end(), more.begin(), more.end());
  }
  if (!errors.empty()) throw ValidationError(std::move(errors));
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IOError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& ex) {
    throw ParseError(path.string() + ": " + ex.what());
  }
  return config_from_json(doc);
}

std::vector<std::string> validate(Config& c) {
  std::vector<std::string> bad;
  bool states_ok = true;
  if (!(c.v_minus > 0.0) || !(c.v_plus > 0.0)) {
    bad.push_back("positivity: v_minus and v_plus must be > 0");
    states_ok = false;
  } else if (c.v_plus == c.v_minus) {
    bad.push_back("degenerate shock: v_plus == v_minus");
    states_ok = false;
  } else if (c.v_plus < c.v_minus) {
    bad.push_back("Lax condition violated: the 2-shock needs v_minus < v_plus");
    states_ok = false;
  }
  if (!(c.half_width > 0.0)) bad.push_back("grid.half_width must be > 0");
  if (c.n_cells < 16) bad.push_back("grid.n_cells must be >= 16");
  if (!(c.t_final >= 0.0)) bad.push_back("time.t_final must be >= 0");
  if (!(c.safety > 0.0 && c.safety <= 1.0)) bad.push_back("time.safety must lie in (0, 1]");
  if (!(c.observer_interval >= 0.0)) bad.push_back("time.observer_interval must be >= 0");
  const auto& p = c.perturbation;
  const bool bump = p.family == Family::gaussian || p.family == Family::dipole;
  if (bump && !(p.width > 0.0)) bad.push_back("perturbation.width must be > 0");
  if (!std::isfinite(p.amplitude)) bad.push_back("perturbation.amplitude must be finite");
  if (!(c.tolerances.conservation > 0.0)) bad.push_back("tolerances.conservation must be > 0");
  if (!c.sweep.parameter.empty() && c.sweep.parameter != "amplitude" && c.sweep.parameter != "v_plus")
    bad.push_back("sweep.parameter must be 'amplitude' or 'v_plus'");

  if (states_ok) {
    c.endstates = profile::shock_speed(c.v_minus, c.u_minus, c.v_plus);
    c.constants = relent::rel_constants(c.endstates);
    if (c.endstates.delta_S > c.solver.strength_ceiling) {
      bad.push_back("shock strength " + std::to_string(c.endstates.delta_S) + " exceeds profile.strength_ceiling " +
                    std::to_string(c.solver.strength_ceiling));
    }
    if (!c.allow_margin_violation && c.half_width > 0.0) {
      const auto rates = profile::linear_tail_rates(c.endstates);
      const double rate = std::min(rates.left, rates.right);
      double support = 0.0;
      if (bump) support = std::abs(p.center) + 4.0 * p.width;
      if (p.family == Family::shifted_profile) support = std::abs(p.shift);
      const double need = std::abs(c.endstates.sigma) * c.t_final + support + 10.0 / rate;
      if (!(need < c.half_width)) {
        bad.push_back("domain margin rule violated: |sigma| T + support + 10 / decay rate = " + std::to_string(need) +
                      " must be < half_width = " + std::to_string(c.half_width));
      }
    }
  }
  return bad;
}

void validate_or_throw(Config& c) {
  auto bad = validate(c);
  if (!bad.empty()) throw ValidationError(std::move(bad));
}

json to_json(const Config& c) {
  json doc = {
      {"schema_version", c.schema_version},
      {"endstates", {{"v_minus", c.v_minus}, {"u_minus", c.u_minus}, {"v_plus", c.v_plus}}},
      {"grid", {{"half_width", c.half_width}, {"n_cells", c.n_cells}}},
      {"time", {{"t_final", c.t_final}, {"safety", c.safety}, {"observer_interval", c.observer_interval}}},
      {"form", evolve::to_string(c.form)},
      {"perturbation",
       {{"family", to_string(c.perturbation.family)},
        {"target", to_string(c.perturbation.target)},
        {"amplitude", c.perturbation.amplitude},
        {"width", c.perturbation.width},
        {"center", c.perturbation.center},
        {"mass_mode", to_string(c.perturbation.mass_mode)},
        {"shift", c.perturbation.shift}}},
      {"profile",
       {{"strength_ceiling", c.solver.strength_ceiling},
        {"force_relaxation", c.force_relaxation},
        {"angle_samples", c.solver.angle_samples},
        {"farfield_tol", c.solver.farfield_tol}}},
      {"tolerances",
       {{"conservation", c.tolerances.conservation},
        {"decay_fraction", c.tolerances.decay_fraction},
        {"shift_decay_fraction", c.tolerances.shift_decay_fraction},
        {"scheme_error", c.tolerances.scheme_error}}},
      {"output", {{"dir", c.output.dir}, {"field_dumps", c.output.field_dumps}}},
      {"seed", c.seed},
      {"allow_margin_violation", c.allow_margin_violation}};
  if (!c.sweep.parameter.empty()) doc["sweep"] = {{"parameter", c.sweep.parameter}, {"values", c.sweep.values}};
  return doc;
}

}  // namespace nsp::lab
