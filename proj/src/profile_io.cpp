#include <fstream>

#include "nsp/errors.hpp"
#include "nsp/profile.hpp"

namespace nsp::profile {

namespace {

constexpr const char* kFormat = "nsp-shock-profile";
constexpr int kVersion = 1;

nlohmann::json complex_list(const std::vector<std::complex<double>>& values) {
  auto out = nlohmann::json::array();
  for (const auto& z : values) out.push_back({z.real(), z.imag()});
  return out;
}

std::vector<std::complex<double>> complex_from(const nlohmann::json& j) {
  std::vector<std::complex<double>> out;
  for (const auto& z : j) out.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
  return out;
}

nlohmann::json fit_json(const TailFit& f) {
  return {{"rate", f.rate}, {"theta", f.theta}, {"correlation", f.correlation}, {"points", f.points}};
}

}  // namespace

nlohmann::json to_json(const EndStates& es) {
  return {{"v_minus", es.v_minus}, {"v_plus", es.v_plus},     {"u_minus", es.u_minus},
          {"u_plus", es.u_plus},   {"sigma", es.sigma},       {"delta_S", es.delta_S},
          {"phi_minus", es.phi_minus}, {"phi_plus", es.phi_plus}};
}

nlohmann::json to_json(const ShockProfile& p) {
  const auto& s = p.solver;
  return {{"format", kFormat},
          {"version", kVersion},
          {"endstates", to_json(p.endstates)},
          {"anchor_index", p.anchor_index},
          {"solver",
           {{"method", s.method},
            {"unstable_dim", s.unstable_dim},
            {"complex_pair", s.complex_pair},
            {"launch_angle", s.launch_angle},
            {"launch_distance", s.launch_distance},
            {"step", s.step},
            {"closest_approach", s.closest_approach},
            {"newton_iters", s.newton_iters},
            {"collocation_residual", s.collocation_residual},
            {"left_eigenvalues", complex_list(s.left_eigenvalues)},
            {"right_eigenvalues", complex_list(s.right_eigenvalues)}}},
          {"xi", p.xi},
          {"vbar", p.vbar},
          {"phibar", p.phibar},
          {"Ebar", p.Ebar}};
}

ShockProfile profile_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format").get<std::string>() != kFormat) throw ParseError("not a shock profile document");
    if (doc.at("version").get<int>() != kVersion) {
      throw ParseError("unsupported profile document version " + doc.at("version").dump());
    }
    ShockProfile p;
    const auto& e = doc.at("endstates");
    p.endstates = shock_speed(e.at("v_minus").get<double>(), e.at("u_minus").get<double>(),
                              e.at("v_plus").get<double>());
    const auto& s = doc.at("solver");
    p.solver.method = s.at("method").get<std::string>();
    p.solver.unstable_dim = s.at("unstable_dim").get<int>();
    p.solver.complex_pair = s.at("complex_pair").get<bool>();
    p.solver.launch_angle = s.at("launch_angle").get<double>();
    p.solver.launch_distance = s.at("launch_distance").get<double>();
    p.solver.step = s.at("step").get<double>();
    p.solver.closest_approach = s.at("closest_approach").get<double>();
    p.solver.newton_iters = s.at("newton_iters").get<int>();
    p.solver.collocation_residual = s.at("collocation_residual").get<double>();
    p.solver.left_eigenvalues = complex_from(s.at("left_eigenvalues"));
    p.solver.right_eigenvalues = complex_from(s.at("right_eigenvalues"));
    p.xi = doc.at("xi").get<std::vector<double>>();
    p.vbar = doc.at("vbar").get<std::vector<double>>();
    p.phibar = doc.at("phibar").get<std::vector<double>>();
    p.Ebar = doc.at("Ebar").get<std::vector<double>>();
    const std::size_t n = p.xi.size();
    if (n < 2 || p.vbar.size() != n || p.phibar.size() != n || p.Ebar.size() != n) {
      throw ParseError("profile arrays are missing or of unequal length");
    }
    finalize_profile(p);
    p.anchor_index = doc.at("anchor_index").get<std::size_t>();
    if (p.anchor_index >= n) throw ParseError("anchor_index out of range");
    return p;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("malformed profile document: ") + ex.what());
  }
}

nlohmann::json to_json(const ProfileReport& r) {
  return {{"farfield_left", r.farfield_left},
          {"farfield_right", r.farfield_right},
          {"monotonicity_ok", r.monotonicity_ok},
          {"ratio_sign_ok", r.ratio_sign_ok},
          {"ratio_low", r.ratio_low},
          {"ratio_high", r.ratio_high},
          {"left_tail", fit_json(r.left_tail)},
          {"right_tail", fit_json(r.right_tail)},
          {"theta_fit", r.theta_fit},
          {"residual_spacing", r.residual_spacing},
          {"pde_residual_coarse", r.pde_residual_coarse},
          {"pde_residual_fine", r.pde_residual_fine},
          {"pde_residual_ratio", r.pde_residual_ratio},
          {"max_speed_identity", r.max_speed_identity},
          {"relaxation_fallback", r.relaxation_fallback}};
}

void save_profile(const ShockProfile& p, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IOError("cannot open " + path.string() + " for writing");
  out << to_json(p).dump(1) << '\n';
  if (!out) throw IOError("failed writing " + path.string());
}

ShockProfile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IOError("cannot open " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& ex) {
    throw ParseError(path.string() + ": " + ex.what());
  }
  return profile_from_json(doc);
}

}  // namespace nsp::profile
