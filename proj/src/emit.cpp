#include <cmath>
#include <cstdio>
#include <fstream>

#include "nsp/errors.hpp"
#include "nsp/lab.hpp"

namespace nsp::lab {

namespace {

std::string number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

nlohmann::json finite_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

std::ofstream open(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IOError("cannot open " + path.string() + " for writing");
  return out;
}

void close(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) throw IOError("failed writing " + path.string());
}

void write_series(const std::filesystem::path& path, const std::vector<DiagnosticsRecord>& rs,
                  double DiagnosticsRecord::*field) {
  auto out = open(path);
  out << "# t " << path.stem().string().substr(7) << '\n';
  for (const auto& r : rs) out << number(r.t) << ' ' << number(r.*field) << '\n';
  close(out, path);
}

}  // namespace

const std::vector<std::string>& record_columns() {
  static const std::vector<std::string> cols = {
      "t",        "X",         "Xdot",        "v_linf",         "u_linf",        "pert_linf",    "pert_l2",
      "pert_h1",  "pert_h2",   "phi_h1",      "phi_h2",         "phi_h3",        "eta_weighted", "eta_plain",
      "quad_norm", "G1",       "GS",          "D",              "cumulative",    "g",            "mass_delta",
      "momentum_delta", "newton_iters", "eta_ratio_min", "eta_ratio_max"};
  return cols;
}

std::vector<double> record_values(const DiagnosticsRecord& r) {
  return {r.t,       r.X,         r.Xdot,         r.v_linf,          r.u_linf,     r.pert_linf,
          r.pert_l2, r.pert_h1,   r.pert_h2,      r.phi_h1,          r.phi_h2,     r.phi_h3,
          r.eta_weighted, r.eta_plain, r.quad_norm, r.G1,            r.GS,         r.D,
          r.cumulative, r.g,      r.mass_delta,   r.momentum_delta,  static_cast<double>(r.newton_iters),
          r.eta_ratio_min, r.eta_ratio_max};
}

nlohmann::json summary_json(const ExperimentResult& r) {
  const auto& k = r.constants;
  const auto& s = r.profile.solver;
  nlohmann::json profile_meta = {{"endstates", profile::to_json(r.profile.endstates)},
                                 {"method", s.method},
                                 {"nodes", r.profile.size()},
                                 {"xi_min", r.profile.xi_min()},
                                 {"xi_max", r.profile.xi_max()},
                                 {"step", s.step},
                                 {"unstable_dim", s.unstable_dim},
                                 {"closest_approach", s.closest_approach},
                                 {"newton_iters", s.newton_iters},
                                 {"shift_pressure", "modified"},
                                 {"report", profile::to_json(r.profile_report)}};
  return {{"format", "nsp-experiment-summary"},
          {"version", 1},
          {"config", to_json(r.config)},
          {"profile", profile_meta},
          {"constants",
           {{"C_emp", finite_or_null(k.C_emp)},
            {"C_shift", finite_or_null(k.C_shift)},
            {"entsim_low", finite_or_null(k.entsim_low)},
            {"entsim_high", finite_or_null(k.entsim_high)},
            {"elliptic_ratio_max", finite_or_null(k.elliptic_ratio_max)},
            {"g_integral", finite_or_null(k.g_integral)}}},
          {"run",
           {{"steps", r.steps},
            {"records", r.records.size()},
            {"max_newton_iters", r.max_newton_iters},
            {"initial_u_mass", r.initial_u_mass},
            {"failed", r.failed},
            {"failure", r.failure}}},
          {"acceptance", acceptance_report(r)}};
}

void emit(const ExperimentResult& r, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IOError("cannot create " + dir.string() + ": " + ec.message());

  {
    const auto path = dir / "diagnostics.csv";
    auto out = open(path);
    const auto& cols = record_columns();
    for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
    out << "\r\n";
    for (const auto& rec : r.records) {
      const auto vals = record_values(rec);
      for (std::size_t c = 0; c < vals.size(); ++c) out << (c ? "," : "") << number(vals[c]);
      out << "\r\n";
    }
    close(out, path);
  }
  {
    const auto path = dir / "summary.json";
    auto out = open(path);
    out << summary_json(r).dump(2) << '\n';
    close(out, path);
  }
  write_series(dir / "series_u_linf.dat", r.records, &DiagnosticsRecord::u_linf);
  write_series(dir / "series_X.dat", r.records, &DiagnosticsRecord::X);
  write_series(dir / "series_Xdot.dat", r.records, &DiagnosticsRecord::Xdot);
  write_series(dir / "series_eta_weighted.dat", r.records, &DiagnosticsRecord::eta_weighted);
  write_series(dir / "series_cumulative.dat", r.records, &DiagnosticsRecord::cumulative);

  if (!r.snapshots.empty()) {
    const Grid grid(r.config.half_width, r.config.n_cells);
    for (std::size_t k = 0; k < r.snapshots.size(); ++k) {
      const auto& snap = r.snapshots[k];
      char name[32];
      std::snprintf(name, sizeof name, "fields_%05zu.dat", k);
      const auto path = dir / name;
      auto out = open(path);
      out << "# t = " << number(snap.t) << "\n# x v u phi vbarX ubarX phibarX\n";
      for (std::size_t i = 0; i < snap.v.size(); ++i) {
        out << number(grid.x(i)) << ' ' << number(snap.v[i]) << ' ' << number(snap.u[i]) << ' '
            << number(snap.phi[i]) << ' ' << number(snap.vbarX[i]) << ' ' << number(snap.ubarX[i]) << ' '
            << number(snap.phibarX[i]) << '\n';
      }
      close(out, path);
    }
  }
}

}  // namespace nsp::lab
