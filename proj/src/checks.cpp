#include "nsp/checks.hpp"

#include <cmath>
#include <random>

#include "nsp/poisson.hpp"
#include "nsp/relent.hpp"
#include "nsp/shift.hpp"

namespace nsp::checks {

namespace {

Field sample(const profile::ShockProfile& p, const Grid& grid, bool phi) {
  Field out(grid.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto q = profile::eval_profile(p, grid.x(i), 0);
    out[i] = phi ? q.phi : q.v;
  }
  return out;
}

}  // namespace

EllipticEnsemble elliptic_ensemble(const profile::ShockProfile& p, const Grid& grid, int members,
                                   std::uint64_t seed, double amplitude) {
  const auto& es = p.endstates;
  const Field vbar = sample(p, grid, false);
  const poisson::Dirichlet bc{es.phi_minus, es.phi_plus};
  const poisson::PhiField base = poisson::solve_phi(vbar, grid, bc);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double reach = 0.25 * grid.half_width();

  EllipticEnsemble out;
  for (int m = 0; m < members; ++m) {
    const double centre = reach * (2.0 * unit(rng) - 1.0);
    const double width = 2.0 + 6.0 * unit(rng);
    const double amp = amplitude * (0.5 + 0.5 * unit(rng)) * (unit(rng) < 0.5 ? -1.0 : 1.0);
    Field vt(grid.size(), 0.0), v = vbar;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double z = (grid.x(i) - centre) / width;
      if (std::abs(z) < 1.0) {
        const double s = 1.0 - z * z;
        vt[i] = amp * s * s * s;
        v[i] += vt[i];
      }
    }
    const poisson::PhiField pert = poisson::solve_phi(v, grid, bc, std::span<const double>(base.phi));
    Field phit(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) phit[i] = pert.phi[i] - base.phi[i];
    out.ratios.push_back(relent::elliptic_ratio(phit, vt, grid, 1));
    out.max_ratio = std::max(out.max_ratio, out.ratios.back());
  }
  return out;
}

WeightCheck weight_bounds(const profile::ShockProfile& p, const Grid& grid, double t, double X) {
  const shift::ShiftedFrame f = shift::shifted_frame(p, t, X, grid);
  WeightCheck w;
  w.upper_bound = 1.0 + std::sqrt(p.endstates.delta_S);
  w.min_a = f.aX.front();
  w.max_a = f.aX.front();
  w.monotone = true;
  for (std::size_t i = 0; i < f.aX.size(); ++i) {
    w.min_a = std::min(w.min_a, f.aX[i]);
    w.max_a = std::max(w.max_a, f.aX[i]);
    if (i > 0 && f.aX[i] < f.aX[i - 1]) w.monotone = false;
  }
  const double slack = 1e-12;
  w.bounds_ok = w.min_a >= 1.0 - slack && w.max_a <= w.upper_bound + slack;
  return w;
}

TrfStudy trf_study(const profile::ShockProfile& p, double half_width, int n_cells) {
  TrfStudy s;
  const Grid coarse(half_width, n_cells);
  const Grid fine(half_width, 2 * n_cells);
  s.coarse = poisson::trf_residual(sample(p, coarse, false), sample(p, coarse, true), coarse);
  s.fine = poisson::trf_residual(sample(p, fine, false), sample(p, fine, true), fine);
  s.ratio = s.coarse / s.fine;
  return s;
}

}  // namespace nsp::checks
