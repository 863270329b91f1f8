#include "nsp/relent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nsp/eos.hpp"
#include "nsp/errors.hpp"

namespace nsp::relent {

namespace {

void require_positive(double v, double vbar) {
  if (!(v > 0.0) || !(vbar > 0.0)) throw NonPositiveVolume("relative quantity needs v > 0 and vbar > 0");
}

}  // namespace

double rel_q(double v, double vbar) {
  require_positive(v, vbar);
  return -2.0 * std::log(v / vbar) + (2.0 / vbar) * (v - vbar);
}

double rel_p(double v, double vbar) {
  require_positive(v, vbar);
  return 2.0 / v - 2.0 / vbar + (2.0 / (vbar * vbar)) * (v - vbar);
}

RelConstants rel_constants(const profile::EndStates& es) {
  RelConstants c;
  c.delta_S = es.delta_S;
  c.sigma = es.sigma;
  c.C_star = (1.0 - std::sqrt(es.delta_S) / 2.0) * es.v_minus;
  c.M = shift::shift_gain(es.v_minus);
  return c;
}

double relbd2_rhs(double v, double vbar) {
  const double pb = eos::modified_pressure(vbar);
  const double dp = eos::modified_pressure(v) - pb;
  return dp * dp / (pb * pb) - 4.0 * dp * dp * dp / (3.0 * pb * pb * pb);
}

double relbd3_rhs(double v, double vbar) {
  const double d = v - vbar;
  return d * d / (vbar * vbar) - 2.0 * d * d * d / (3.0 * vbar * vbar * vbar);
}

Lemma21Report lemma21_check(double vbar_center, double vbar_radius, double v_radius, int samples) {
  std::vector<std::string> bad;
  if (!(vbar_center > 0.0)) bad.push_back("lemma21_check: centre must be positive");
  if (!(vbar_radius >= 0.0) || vbar_radius > 0.25 * vbar_center)
    bad.push_back("lemma21_check: vbar radius must lie in [0, 0.25 * centre]");
  if (!(v_radius >= 0.0) || v_radius > 0.25 * vbar_center)
    bad.push_back("lemma21_check: v radius must lie in [0, 0.25 * centre]");
  if (samples < 2) bad.push_back("lemma21_check: need at least 2 samples per axis");
  if (!bad.empty()) throw ValidationError(std::move(bad));

  Lemma21Report r;
  r.relbd2_min_margin = std::numeric_limits<double>::infinity();
  r.relbd3_min_margin = std::numeric_limits<double>::infinity();
  // Rounding in Q near coincidence is of order eps * vbar-scale terms.
  const double slack = 1e-14;
  for (int i = 0; i < samples; ++i) {
    const double vbar = vbar_center - vbar_radius + 2.0 * vbar_radius * i / (samples - 1);
    for (int j = 0; j < samples; ++j) {
      const double d = -v_radius + 2.0 * v_radius * j / (samples - 1);
      const double v = vbar + d;
      const double q = rel_q(v, vbar);
      const double m2 = q - relbd2_rhs(v, vbar);
      const double m3 = q - relbd3_rhs(v, vbar);
      r.relbd2_min_margin = std::min(r.relbd2_min_margin, m2);
      r.relbd3_min_margin = std::min(r.relbd3_min_margin, m3);
      if (m2 < -slack) ++r.relbd2_violations;
      if (m3 < -slack) ++r.relbd3_violations;

      const double pb = eos::modified_pressure(vbar);
      const double dp = eos::modified_pressure(v) - pb;
      if (std::abs(dp) > 1e-6) {
        const double c1 = (rel_p(v, vbar) - dp * dp / pb) / std::abs(dp * dp * dp);
        r.relbd1_constant = std::max(r.relbd1_constant, c1);
      }
      if (std::abs(d) > 1e-6) {
        const double c4 = (q - d * d / (vbar * vbar)) / std::abs(d * d * d);
        r.relbd4_constant = std::max(r.relbd4_constant, c4);
      }
      ++r.samples;
    }
  }
  return r;
}

double eta_density(double v, double u, double vbar, double ubar, double phibar, double dphi_tilde,
                   double ddphi_tilde) {
  const double ut = u - ubar;
  const double vt = v - vbar;
  const double w = std::exp(-phibar);
  return 0.5 * ut * ut + rel_q(v, vbar) - vt * ddphi_tilde / (vbar * vbar) +
         w * ddphi_tilde * ddphi_tilde / (2.0 * vbar * vbar * vbar) + w * dphi_tilde * dphi_tilde / (2.0 * vbar * vbar);
}

EtaSnapshot eta_integral(const evolve::State& s, std::span<const double> phi, const shift::ShiftedFrame& frame,
                         const Grid& grid, double floor) {
  const std::size_t n = s.v.size();
  const double dx = grid.dx();
  Field phit(n);
  for (std::size_t i = 0; i < n; ++i) phit[i] = phi[i] - frame.phibarX[i];
  const Field d1 = central_derivative(phit, dx);
  const Field d2 = second_derivative(phit, dx);

  Field eta(n), weighted(n), quad(n);
  for (std::size_t i = 0; i < n; ++i) {
    eta[i] = eta_density(s.v[i], s.u[i], frame.vbarX[i], frame.ubarX[i], frame.phibarX[i], d1[i], d2[i]);
    weighted[i] = frame.aX[i] * eta[i];
    const double ut = s.u[i] - frame.ubarX[i];
    const double vt = s.v[i] - frame.vbarX[i];
    quad[i] = ut * ut + vt * vt + d2[i] * d2[i] + d1[i] * d1[i];
  }
  EtaSnapshot out;
  out.eta_weighted = trapezoid(weighted, dx);
  out.eta_plain = trapezoid(eta, dx);
  out.quad_norm = trapezoid(quad, dx);
  const double qmax = *std::max_element(quad.begin(), quad.end());
  out.ratio_min = std::numeric_limits<double>::infinity();
  out.ratio_max = 0.0;
  if (qmax > 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      if (quad[i] <= floor * qmax) continue;
      const double r = eta[i] / quad[i];
      out.ratio_min = std::min(out.ratio_min, r);
      out.ratio_max = std::max(out.ratio_max, r);
      ++out.ratio_nodes;
    }
  }
  if (out.ratio_nodes == 0) out.ratio_min = 0.0;
  return out;
}

GoodTerms good_terms(const evolve::State& s, const shift::ShiftedFrame& frame, const Grid& grid,
                     const RelConstants& c) {
  const std::size_t n = s.v.size();
  const double dx = grid.dx();
  Field g1(n), gs(n), ut(n);
  for (std::size_t i = 0; i < n; ++i) {
    ut[i] = s.u[i] - frame.ubarX[i];
    const double dev = eos::modified_pressure(s.v[i]) - eos::modified_pressure(frame.vbarX[i]) - ut[i] / (2.0 * c.C_star);
    g1[i] = frame.dvbarX[i] * dev * dev;
    gs[i] = frame.dvbarX[i] * ut[i] * ut[i];
  }
  GoodTerms g;
  g.G1 = c.sigma / std::sqrt(c.delta_S) * trapezoid(g1, dx);
  g.GS = trapezoid(gs, dx);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double d = (ut[i + 1] - ut[i]) / dx;
    g.D += dx * d * d;
  }
  return g;
}

double sobolev_norm(const std::vector<std::span<const double>>& fields, int k, const Grid& grid) {
  if (k < 0 || k > 3) throw ValidationError({"sobolev_norm: k must be in 0..3"});
  const double dx = grid.dx();
  double sum = 0.0;
  for (const auto& f : fields) {
    Field d(f.begin(), f.end());
    for (int order = 0; order <= k; ++order) {
      if (order > 0) d = forward_difference(d, dx);
      Field sq(d.size());
      for (std::size_t i = 0; i < d.size(); ++i) sq[i] = d[i] * d[i];
      sum += trapezoid(sq, dx);
    }
  }
  return std::sqrt(sum);
}

double sobolev_norm(std::span<const double> field, int k, const Grid& grid) {
  return sobolev_norm(std::vector<std::span<const double>>{field}, k, grid);
}

double elliptic_ratio(std::span<const double> phi_tilde, std::span<const double> v_tilde, const Grid& grid, int k) {
  if (k < 1 || k > 3) throw ValidationError({"elliptic_ratio: k must be in 1..3"});
  const double den = sobolev_norm(v_tilde, k - 1, grid);
  if (!(den > 0.0)) throw ZeroDenominator("elliptic_ratio: v_tilde vanishes");
  return sobolev_norm(phi_tilde, k, grid) / den;
}

}  // namespace nsp::relent
