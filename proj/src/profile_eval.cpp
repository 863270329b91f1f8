#include <algorithm>
#include <cmath>
#include <limits>

#include "nsp/eos.hpp"
#include "nsp/profile.hpp"

namespace nsp::profile {

namespace {

struct Cell {
  std::size_t k = 0;
  double t = 0.0;  // local coordinate in [0, 1]
  double h = 0.0;
};

Cell locate(const ShockProfile& p, double xi) {
  const std::size_t n = p.size();
  const double h = (p.xi.back() - p.xi.front()) / static_cast<double>(n - 1);
  double s = (xi - p.xi.front()) / h;
  auto k = static_cast<std::size_t>(std::clamp(std::floor(s), 0.0, static_cast<double>(n - 2)));
  // Guard against round-off in the uniform-spacing assumption.
  while (k > 0 && xi < p.xi[k]) --k;
  while (k + 2 < n && xi > p.xi[k + 1]) ++k;
  const double hk = p.xi[k + 1] - p.xi[k];
  return {k, std::clamp((xi - p.xi[k]) / hk, 0.0, 1.0), hk};
}

// Cubic Hermite on one cell with Fritsch-Carlson limiting of the end slopes.
struct Hermite {
  double value;
  double slope;
};

Hermite hermite(double y0, double y1, double d0, double d1, double h, double t) {
  const double secant = (y1 - y0) / h;
  if (secant == 0.0) {
    d0 = 0.0;
    d1 = 0.0;
  } else {
    if (d0 / secant < 0.0) d0 = 0.0;
    if (d1 / secant < 0.0) d1 = 0.0;
    const double a = d0 / secant;
    const double b = d1 / secant;
    const double r = a * a + b * b;
    if (r > 9.0) {
      const double tau = 3.0 / std::sqrt(r);
      d0 = tau * a * secant;
      d1 = tau * b * secant;
    }
  }
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  const double value = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
  const double g00 = (6 * t2 - 6 * t) / h;
  const double g10 = 3 * t2 - 4 * t + 1;
  const double g01 = (-6 * t2 + 6 * t) / h;
  const double g11 = 3 * t2 - 2 * t;
  const double slope = g00 * y0 + g10 * d0 + g01 * y1 + g11 * d1;
  return {value, slope};
}

TailFit fit_tail(const ShockProfile& p, bool right) {
  const auto& es = p.endstates;
  const double jump = es.v_plus - es.v_minus;
  const double end = right ? es.v_plus : es.v_minus;
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  std::size_t m = 0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (right != (p.xi[k] > 0.0)) continue;
    const double gap = std::abs(p.vbar[k] - end) / jump;
    if (gap < 1e-6 || gap > 1e-2) continue;
    const double x = p.xi[k];
    const double y = std::log(gap);
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
    ++m;
  }
  TailFit fit;
  fit.points = m;
  if (m < 3) return fit;
  const double dm = static_cast<double>(m);
  const double cxx = sxx - sx * sx / dm;
  const double cyy = syy - sy * sy / dm;
  const double cxy = sxy - sx * sy / dm;
  const double slope = cxy / cxx;
  fit.rate = right ? -slope : slope;
  fit.theta = fit.rate / es.delta_S;
  fit.correlation = std::abs(cxy) / std::sqrt(cxx * cyy);
  return fit;
}

}  // namespace

ProfileSample eval_profile(const ShockProfile& p, double xi, int order) {
  const auto& es = p.endstates;
  if (xi < p.xi_min() || xi > p.xi_max()) {
    if (order != 0) return {0.0, 0.0, 0.0};
    return xi < p.xi_min() ? ProfileSample{es.v_minus, es.u_minus, es.phi_minus}
                           : ProfileSample{es.v_plus, es.u_plus, es.phi_plus};
  }
  const ProfilePoint q = eval_point(p, xi);
  if (order == 0) return {q.v, q.u, q.phi};
  return {q.dv, q.du, q.dphi};
}

ProfilePoint eval_point(const ShockProfile& p, double xi) {
  const auto& es = p.endstates;
  if (xi < p.xi_min()) return {es.v_minus, es.u_minus, es.phi_minus, 0.0, 0.0, 0.0};
  if (xi > p.xi_max()) return {es.v_plus, es.u_plus, es.phi_plus, 0.0, 0.0, 0.0};
  const Cell c = locate(p, xi);
  const std::size_t k = c.k;
  const Hermite v = hermite(p.vbar[k], p.vbar[k + 1], p.dvbar[k], p.dvbar[k + 1], c.h, c.t);
  const Hermite phi = hermite(p.phibar[k], p.phibar[k + 1], p.dphibar[k], p.dphibar[k + 1], c.h, c.t);
  return {v.value,
          es.u_minus - es.sigma * (v.value - es.v_minus),
          phi.value,
          v.slope,
          -es.sigma * v.slope,
          phi.slope};
}

double traveling_wave_residual(const ShockProfile& p, double spacing) {
  const auto& es = p.endstates;
  const double s = es.sigma;
  const double reach = std::min(-p.xi_min(), p.xi_max()) - 4.0 * spacing;
  const auto half = static_cast<long>(std::floor(reach / spacing));
  const std::size_t n = static_cast<std::size_t>(2 * half + 1);
  std::vector<double> v(n), u(n), phi(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = (static_cast<double>(i) - static_cast<double>(half)) * spacing;
    const ProfileSample q = eval_profile(p, xi, 0);
    v[i] = q.v;
    u[i] = q.u;
    phi[i] = q.phi;
  }
  const double h = spacing;
  double sum = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double vp = 0.5 * (v[i] + v[i + 1]);
    const double vm = 0.5 * (v[i] + v[i - 1]);
    const double dv = (v[i + 1] - v[i - 1]) / (2 * h);
    const double du = (u[i + 1] - u[i - 1]) / (2 * h);
    const double dphi = (phi[i + 1] - phi[i - 1]) / (2 * h);
    const double dp = (eos::pressure(v[i + 1]) - eos::pressure(v[i - 1])) / (2 * h);
    const double visc = ((u[i + 1] - u[i]) / vp - (u[i] - u[i - 1]) / vm) / (h * h);
    const double field = ((phi[i + 1] - phi[i]) / vp - (phi[i] - phi[i - 1]) / vm) / (h * h);
    const double r1 = -s * dv - du;
    const double r2 = -s * du + dp - visc + dphi / v[i];
    const double r3 = -field - 1.0 + v[i] * std::exp(phi[i]);
    sum += h * (r1 * r1 + r2 * r2 + r3 * r3);
  }
  return std::sqrt(sum);
}

ProfileReport verify_profile(const ShockProfile& p, int refine) {
  const auto& es = p.endstates;
  ProfileReport r;
  r.farfield_left = std::max({std::abs(p.vbar.front() - es.v_minus), std::abs(p.ubar.front() - es.u_minus),
                              std::abs(p.phibar.front() - es.phi_minus)});
  r.farfield_right = std::max({std::abs(p.vbar.back() - es.v_plus), std::abs(p.ubar.back() - es.u_plus),
                               std::abs(p.phibar.back() - es.phi_plus)});

  r.monotonicity_ok = true;
  for (std::size_t k = 0; k + 1 < p.size(); ++k) {
    if (!(p.vbar[k + 1] > p.vbar[k] && p.ubar[k + 1] < p.ubar[k] && p.phibar[k + 1] < p.phibar[k])) {
      r.monotonicity_ok = false;
    }
  }

  r.ratio_sign_ok = true;
  r.ratio_low = std::numeric_limits<double>::infinity();
  r.ratio_high = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k + 1 < p.size(); ++k) {
    const double ratio = p.dphibar[k] / p.dubar[k];
    if (!(ratio > 0.0) || !std::isfinite(ratio)) {
      r.ratio_sign_ok = false;
      continue;
    }
    r.ratio_low = std::min(r.ratio_low, ratio);
    r.ratio_high = std::max(r.ratio_high, ratio);
  }

  r.left_tail = fit_tail(p, false);
  r.right_tail = fit_tail(p, true);
  r.theta_fit = std::min(r.left_tail.theta, r.right_tail.theta);

  r.residual_spacing = 0.05 / es.delta_S;
  r.pde_residual_coarse = traveling_wave_residual(p, r.residual_spacing);
  r.pde_residual_fine = traveling_wave_residual(p, r.residual_spacing / std::max(refine, 1));
  r.pde_residual_ratio = r.pde_residual_coarse / r.pde_residual_fine;

  for (std::size_t k = 0; k < p.size(); ++k) {
    r.max_speed_identity = std::max(r.max_speed_identity, std::abs(es.sigma * p.dvbar[k] + p.dubar[k]));
  }
  r.relaxation_fallback = p.solver.method == "relaxation";
  return r;
}

}  // namespace nsp::profile
