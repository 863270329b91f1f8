#include "nsp/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "nsp/eos.hpp"
#include "nsp/errors.hpp"

namespace nsp::profile {

namespace {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

Vec3 rest_point(double v) { return Vec3(v, -std::log(v), 0.0); }

Vec3 to_vec(const OdeState& y) { return Vec3(y[0], y[1], y[2]); }
OdeState to_state(const Vec3& y) { return {y[0], y[1], y[2]}; }

Mat3 jacobian_matrix(const Vec3& y, const EndStates& es) {
  const auto j = profile_jacobian(to_state(y), es);
  Mat3 m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = j[r][c];
  return m;
}

Vec3 rhs(const Vec3& y, const EndStates& es) { return to_vec(profile_rhs(to_state(y), es)); }

struct Spectrum {
  Eigen::Vector3cd values;
  Eigen::Matrix3cd vectors;  // columns are right eigenvectors
  Eigen::Matrix3cd left;     // rows are the dual (left) eigenvectors
};

Spectrum spectrum_at(double v, const EndStates& es) {
  Eigen::EigenSolver<Mat3> solver(jacobian_matrix(rest_point(v), es));
  Spectrum s;
  s.values = solver.eigenvalues();
  s.vectors = solver.eigenvectors();
  s.left = s.vectors.inverse();
  return s;
}

/// Real row that annihilates every eigendirection except the j-th one.
Eigen::RowVector3d real_dual_row(const Spectrum& s, int j) {
  const Eigen::RowVector3cd row = s.left.row(j);
  return row.real().norm() >= row.imag().norm() ? Eigen::RowVector3d(row.real())
                                                : Eigen::RowVector3d(row.imag());
}

// Deviation z = y - y_- written without cancellation so that launches
// 1e-8 away from the rest point keep full relative precision.
Vec3 deviation_rhs(const Vec3& z, const EndStates& es) {
  const double vm = es.v_minus;
  const double v = vm + z[0];
  if (!(v > 0.0)) throw NonPositiveVolume("profile orbit reached v <= 0");
  const double m = std::expm1(z[1]);
  const double bracket = es.sigma * es.sigma * z[0] - z[0] / (v * vm) - 0.5 * z[2] * z[2] + m / vm;
  return Vec3(-(v / es.sigma) * bracket, v * z[2], z[0] / vm + m + z[0] * m / vm);
}

Vec3 rk4_deviation(const Vec3& z, double h, const EndStates& es) {
  const Vec3 k1 = deviation_rhs(z, es);
  const Vec3 k2 = deviation_rhs(z + 0.5 * h * k1, es);
  const Vec3 k3 = deviation_rhs(z + 0.5 * h * k2, es);
  const Vec3 k4 = deviation_rhs(z + h * k3, es);
  return z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

struct Shot {
  int side = 0;  // +1 overshoots v+, -1 falls below v-, 0 stayed inside the budget
  std::vector<Vec3> path;
};

Shot shoot(const Vec3& launch, double h, std::size_t max_steps, const EndStates& es, bool keep) {
  const double jump = es.v_plus - es.v_minus;
  Shot shot;
  Vec3 z = launch;
  if (keep) shot.path.push_back(z);
  for (std::size_t k = 0; k < max_steps; ++k) {
    Vec3 next;
    try {
      next = rk4_deviation(z, h, es);
    } catch (const NonPositiveVolume&) {
      shot.side = -1;
      return shot;
    }
    if (!next.allFinite()) {
      shot.side = z[0] > 0.5 * jump ? 1 : -1;
      return shot;
    }
    z = next;
    if (keep) shot.path.push_back(z);
    if (z[0] > 1.5 * jump) {
      shot.side = 1;
      return shot;
    }
    if (z[0] < -0.5 * jump) {
      shot.side = -1;
      return shot;
    }
  }
  return shot;
}

struct Candidate {
  double angle = 0.0;
  std::vector<Vec3> path;  // deviations from the left rest point
  std::size_t best = 0;    // index of the closest reliable approach to the right rest point
  double distance = std::numeric_limits<double>::infinity();
};

// Trust the shot only while the two bracketing orbits agree; past that point the
// residual unstable component at the right rest point dominates.
Candidate assess(const Shot& a, const Shot& b, double angle, const Vec3& target, double vmid_dev) {
  Candidate c;
  c.angle = angle;
  const std::size_t n = std::min(a.path.size(), b.path.size());
  bool crossed = false;
  for (std::size_t k = 0; k < n; ++k) {
    const double dist = (a.path[k] - target).norm();
    const double sep = (a.path[k] - b.path[k]).norm();
    if (sep > 1e-3 * dist) break;
    if (k > 0 && a.path[k][0] < a.path[k - 1][0]) {
      if (crossed) break;
    }
    if (a.path[k][0] >= vmid_dev) crossed = true;
    if (crossed && dist < c.distance) {
      c.distance = dist;
      c.best = k;
    }
  }
  c.path = a.path;
  return c;
}

struct Guess {
  std::vector<Vec3> nodes;  // absolute (v, phi, E)
  std::size_t anchor = 0;
};

Guess build_guess(const Candidate& cand, const Spectrum& left_spec, const Spectrum& right,
                  const EndStates& es, double h, double eps, std::size_t budget) {
  const Vec3 left = rest_point(es.v_minus);
  const Vec3 target = rest_point(es.v_plus);
  const double vmid = 0.5 * (es.v_minus + es.v_plus);
  Guess g;

  // Launches farther out than eps get a linearised unstable tail in backward time.
  const Eigen::Vector3cd lc = left_spec.left * cand.path.front().cast<std::complex<double>>();
  std::vector<Vec3> head;
  for (std::size_t m = 1; m < budget && cand.path.front().norm() > eps; ++m) {
    Eigen::Vector3cd dev = Eigen::Vector3cd::Zero();
    for (int j = 0; j < 3; ++j) {
      if (left_spec.values[j].real() <= 0.0) continue;
      dev += lc[j] * std::exp(-left_spec.values[j] * (static_cast<double>(m) * h)) * left_spec.vectors.col(j);
    }
    head.push_back(left + dev.real());
    if (dev.real().norm() < eps) break;
  }
  g.nodes.assign(head.rbegin(), head.rend());
  for (std::size_t k = 0; k <= cand.best; ++k) g.nodes.push_back(left + cand.path[k]);

  // Continue on the linearised stable subspace of the right rest point.
  const Vec3 d = g.nodes.back() - target;
  const Eigen::Vector3cd coeff = right.left * d.cast<std::complex<double>>();
  for (std::size_t m = 1; m < budget; ++m) {
    Eigen::Vector3cd dev = Eigen::Vector3cd::Zero();
    for (int j = 0; j < 3; ++j) {
      if (right.values[j].real() >= 0.0) continue;
      dev += coeff[j] * std::exp(right.values[j] * (static_cast<double>(m) * h)) * right.vectors.col(j);
    }
    const Vec3 y = target + dev.real();
    g.nodes.push_back(y);
    if (dev.real().norm() < eps) break;
  }

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < g.nodes.size(); ++k) {
    const double gap = std::abs(g.nodes[k][0] - vmid);
    if (gap < best) {
      best = gap;
      g.anchor = k;
    }
  }
  return g;
}

struct PolishResult {
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
};

// Hermite-Simpson collocation with projection boundary conditions and the
// phase condition v(anchor) = vmid, solved by Newton on the whole orbit.
PolishResult polish(std::vector<Vec3>& nodes, std::size_t anchor, double h, const Spectrum& left,
                    const Spectrum& right, const EndStates& es) {
  PolishResult out;
  const std::size_t n = nodes.size();
  std::vector<Eigen::RowVector3d> left_rows, right_rows;
  for (int j = 0; j < 3; ++j) {
    if (left.values[j].real() < 0.0) left_rows.push_back(real_dual_row(left, j));
    if (right.values[j].real() > 0.0) right_rows.push_back(real_dual_row(right, j));
  }
  if (left_rows.size() + right_rows.size() != 2 || n < 3) return out;

  const Vec3 yl = rest_point(es.v_minus);
  const Vec3 yr = rest_point(es.v_plus);
  const double vmid = 0.5 * (es.v_minus + es.v_plus);
  const auto dim = static_cast<Eigen::Index>(3 * n);
  const Mat3 I = Mat3::Identity();

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  bool analyzed = false;
  double previous = std::numeric_limits<double>::infinity();

  for (int it = 0; it < 30; ++it) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(n * 27 + 16);
    Eigen::VectorXd F(dim);
    Eigen::Index row = 0;

    for (const auto& r : left_rows) {
      F[row] = r.dot(nodes[0] - yl);
      for (int c = 0; c < 3; ++c) trip.emplace_back(row, c, r[c]);
      ++row;
    }
    std::vector<Vec3> f(n);
    std::vector<Mat3> J(n);
    for (std::size_t k = 0; k < n; ++k) {
      f[k] = rhs(nodes[k], es);
      J[k] = jacobian_matrix(nodes[k], es);
    }
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const Vec3 ym = 0.5 * (nodes[k] + nodes[k + 1]) + (h / 8.0) * (f[k] - f[k + 1]);
      const Vec3 fm = rhs(ym, es);
      const Mat3 Jm = jacobian_matrix(ym, es);
      const Vec3 res = nodes[k + 1] - nodes[k] - (h / 6.0) * (f[k] + 4.0 * fm + f[k + 1]);
      const Mat3 dk = -I - (h / 6.0) * (J[k] + 4.0 * Jm * (0.5 * I + (h / 8.0) * J[k]));
      const Mat3 dk1 = I - (h / 6.0) * (4.0 * Jm * (0.5 * I - (h / 8.0) * J[k + 1]) + J[k + 1]);
      for (int r = 0; r < 3; ++r) {
        F[row + r] = res[r];
        for (int c = 0; c < 3; ++c) {
          trip.emplace_back(row + r, static_cast<Eigen::Index>(3 * k) + c, dk(r, c));
          trip.emplace_back(row + r, static_cast<Eigen::Index>(3 * (k + 1)) + c, dk1(r, c));
        }
      }
      row += 3;
    }
    F[row] = nodes[anchor][0] - vmid;
    trip.emplace_back(row, static_cast<Eigen::Index>(3 * anchor), 1.0);
    ++row;
    for (const auto& r : right_rows) {
      F[row] = r.dot(nodes[n - 1] - yr);
      for (int c = 0; c < 3; ++c) trip.emplace_back(row, static_cast<Eigen::Index>(3 * (n - 1)) + c, r[c]);
      ++row;
    }

    const double norm = F.lpNorm<Eigen::Infinity>();
    out.residual = norm;
    out.iterations = it;
    if (!std::isfinite(norm) || norm > 1e3 * previous + 1e-6) return out;
    if (norm < 1e-13) {
      out.converged = true;
      return out;
    }
    previous = norm;

    Eigen::SparseMatrix<double> A(dim, dim);
    A.setFromTriplets(trip.begin(), trip.end());
    if (!analyzed) {
      lu.analyzePattern(A);
      analyzed = true;
    }
    lu.factorize(A);
    if (lu.info() != Eigen::Success) return out;
    const Eigen::VectorXd delta = lu.solve(-F);
    if (!delta.allFinite()) return out;
    for (std::size_t k = 0; k < n; ++k) nodes[k] += delta.segment<3>(static_cast<Eigen::Index>(3 * k));
    if (delta.lpNorm<Eigen::Infinity>() < 1e-15) {
      out.converged = true;
      out.iterations = it + 1;
      return out;
    }
  }
  return out;
}

// Continues both ends of a converged orbit along the linearised invariant
// subspaces until the distance to the rest point drops below tol, so that the
// constant far-field extension joins the table without a visible jump.
void extend_tails(Guess& g, const Spectrum& left, const Spectrum& right, const EndStates& es, double h, double tol,
                  std::size_t budget) {
  auto tail = [&](const Vec3& start, const Vec3& rest, const Spectrum& spec, bool unstable_side, double dir) {
    std::vector<Vec3> out;
    const Eigen::Vector3cd c = spec.left * (start - rest).cast<std::complex<double>>();
    for (std::size_t m = 1; m < budget; ++m) {
      Eigen::Vector3cd dev = Eigen::Vector3cd::Zero();
      for (int j = 0; j < 3; ++j) {
        if ((spec.values[j].real() > 0.0) != unstable_side) continue;
        dev += c[j] * std::exp(spec.values[j] * (dir * static_cast<double>(m) * h)) * spec.vectors.col(j);
      }
      out.push_back(rest + dev.real());
      if (dev.real().norm() < tol) break;
    }
    return out;
  };
  const auto head = tail(g.nodes.front(), rest_point(es.v_minus), left, true, -1.0);
  const auto back = tail(g.nodes.back(), rest_point(es.v_plus), right, false, 1.0);
  std::vector<Vec3> nodes(head.rbegin(), head.rend());
  nodes.insert(nodes.end(), g.nodes.begin(), g.nodes.end());
  nodes.insert(nodes.end(), back.begin(), back.end());
  g.anchor += head.size();
  g.nodes = std::move(nodes);
}

std::vector<std::complex<double>> to_list(const Eigen::Vector3cd& v) {
  return {v[0], v[1], v[2]};
}

}  // namespace

EndStates shock_speed(double v_minus, double u_minus, double v_plus) {
  if (!(v_minus > 0.0) || !(v_plus > 0.0)) throw NonPositiveVolume("end-state volumes must be positive");
  if (v_plus == v_minus) throw DegenerateShock("v_plus == v_minus: zero-strength shock");
  if (v_plus < v_minus) throw LaxViolation("Lax condition v_minus < v_plus violated for the 2-shock");
  EndStates es;
  es.v_minus = v_minus;
  es.v_plus = v_plus;
  es.u_minus = u_minus;
  // -(p~(v+) - p~(v-)) / (v+ - v-) simplifies to 2 / (v- v+) for p~ = 2 / v.
  es.sigma = std::sqrt(2.0 / (v_minus * v_plus));
  es.u_plus = u_minus - es.sigma * (v_plus - v_minus);
  es.delta_S = u_minus - es.u_plus;
  es.phi_minus = -std::log(v_minus);
  es.phi_plus = -std::log(v_plus);
  return es;
}

std::array<double, 2> rh_residuals(const EndStates& es) {
  const double mass = -es.sigma * (es.v_plus - es.v_minus) - (es.u_plus - es.u_minus);
  const double momentum = -es.sigma * (es.u_plus - es.u_minus) +
                          (eos::modified_pressure(es.v_plus) - eos::modified_pressure(es.v_minus));
  return {mass, momentum};
}

bool check_lax(const EndStates& es) {
  if (!(es.v_minus > 0.0) || !(es.v_plus > 0.0)) return false;
  return eos::sound_speed(es.v_plus) < es.sigma && es.sigma < eos::sound_speed(es.v_minus);
}

OdeState profile_rhs(const OdeState& y, const EndStates& es) {
  const auto [v, phi, E] = y;
  if (!(v > 0.0)) throw NonPositiveVolume("profile_rhs: v <= 0");
  const double s = es.sigma;
  const double bracket = s * s * (v - es.v_minus) + eos::modified_pressure(v) -
                         eos::modified_pressure(es.v_minus) - 0.5 * E * E - 1.0 / v + std::exp(phi);
  return {-(v / s) * bracket, v * E, v * std::exp(phi) - 1.0};
}

std::array<std::array<double, 3>, 3> profile_jacobian(const OdeState& y, const EndStates& es) {
  const auto [v, phi, E] = y;
  const double s = es.sigma;
  const double ephi = std::exp(phi);
  const double bracket = s * s * (v - es.v_minus) + 1.0 / v - 2.0 / es.v_minus - 0.5 * E * E + ephi;
  return {{{-bracket / s - (v / s) * (s * s - 1.0 / (v * v)), -(v / s) * ephi, (v / s) * E},
           {E, 0.0, v},
           {ephi, v * ephi, 0.0}}};
}

TailRates linear_tail_rates(const EndStates& es) {
  const Spectrum left = spectrum_at(es.v_minus, es);
  const Spectrum right = spectrum_at(es.v_plus, es);
  TailRates r;
  r.left = std::numeric_limits<double>::infinity();
  r.right = std::numeric_limits<double>::infinity();
  for (int j = 0; j < 3; ++j) {
    if (left.values[j].real() > 0.0) r.left = std::min(r.left, left.values[j].real());
    if (right.values[j].real() < 0.0) r.right = std::min(r.right, -right.values[j].real());
  }
  return r;
}

ShockProfile solve_profile(const EndStates& es, const SolverParams& params) {
  if (!check_lax(es)) throw LaxViolation("solve_profile: end states violate the Lax condition");
  if (es.delta_S > params.strength_ceiling) {
    throw ValidationError({"shock strength " + std::to_string(es.delta_S) + " exceeds the configured ceiling " +
                           std::to_string(params.strength_ceiling)});
  }

  const double h = params.step > 0.0 ? params.step : std::min(0.01, 0.01 / es.delta_S);
  const double eps = params.launch_factor * es.delta_S;
  const auto budget = static_cast<std::size_t>(std::ceil(params.xi_budget_factor / es.delta_S / h));

  const Spectrum left = spectrum_at(es.v_minus, es);
  const Spectrum right = spectrum_at(es.v_plus, es);

  std::vector<int> unstable;
  for (int j = 0; j < 3; ++j)
    if (left.values[j].real() > 0.0) unstable.push_back(j);
  if (unstable.size() != 1 && unstable.size() != 2) {
    throw UnexpectedSpectrum("left rest point has " + std::to_string(unstable.size()) +
                             " unstable directions; expected 1 or 2");
  }

  ShockProfile out;
  out.endstates = es;
  out.solver.unstable_dim = static_cast<int>(unstable.size());
  out.solver.step = h;
  out.solver.left_eigenvalues = to_list(left.values);
  out.solver.right_eigenvalues = to_list(right.values);

  Vec3 w1, w2;
  const auto& c0 = left.vectors.col(unstable[0]);
  if (unstable.size() == 2 && std::abs(left.values[unstable[0]].imag()) > 0.0) {
    out.solver.complex_pair = true;
    w1 = c0.real();
    w2 = c0.imag();
  } else {
    w1 = c0.real();
    if (unstable.size() == 2) w2 = left.vectors.col(unstable[1]).real();
  }
  w1.normalize();
  if (unstable.size() == 2) w2.normalize();
  if (unstable.size() == 1 && w1[0] < 0.0) w1 = -w1;

  const Vec3 target = rest_point(es.v_plus) - rest_point(es.v_minus);
  const double vmid_dev = 0.5 * (es.v_plus - es.v_minus);
  const double jump = es.v_plus - es.v_minus;

  auto search = [&](double radius) {
    auto launch = [&](double angle) { return radius * (std::cos(angle) * w1 + std::sin(angle) * w2); };
    Candidate best;
    if (unstable.size() == 1) {
      const Shot shot = shoot(radius * w1, h, budget, es, true);
      return assess(shot, shot, 0.0, target, vmid_dev);
    }
    const int n = std::max(8, params.angle_samples);
    std::vector<double> angles(n + 1);
    std::vector<int> sides(n + 1);
    for (int j = 0; j <= n; ++j) {
      angles[j] = 2.0 * std::numbers::pi * j / n;
      sides[j] = j < n ? shoot(launch(angles[j]), h, budget, es, false).side : sides[0];
    }
    for (int j = 0; j < n; ++j) {
      if (sides[j] * sides[j + 1] >= 0) continue;
      double a = angles[j], b = angles[j + 1];
      const int side_a = sides[j];
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        if (shoot(launch(m), h, budget, es, false).side == side_a) {
          a = m;
        } else {
          b = m;
        }
      }
      const Shot sa = shoot(launch(a), h, budget, es, true);
      const Shot sb = shoot(launch(b), h, budget, es, true);
      Candidate c = assess(sa, sb, a, target, vmid_dev);
      if (c.distance < best.distance) best = std::move(c);
    }
    return best;
  };

  // A strongly separated pair of real unstable rates makes the connection leave
  // along the slow direction with a fast component below round-off at small
  // radii, so the launch radius is widened until the bracket resolves it.
  Candidate best;
  double radius = eps;
  for (int attempt = 0; attempt < 4; ++attempt, radius *= 100.0) {
    best = search(radius);
    if (std::isfinite(best.distance) && best.distance <= 0.05 * jump) break;
    if (radius * 100.0 > 1e-2 * jump) break;
  }
  out.solver.launch_distance = radius;

  if (!std::isfinite(best.distance) || best.distance > 0.5 * jump) {
    throw NoConnection("shooting did not approach the right rest point (closest distance " +
                       std::to_string(best.distance) + ")");
  }
  out.solver.launch_angle = best.angle;
  out.solver.closest_approach = best.distance;

  Guess guess = build_guess(best, left, right, es, h, eps, budget);
  out.solver.method = "shooting";
  bool polished_ok = false;
  if (params.polish) {
    std::vector<Vec3> polished = guess.nodes;
    const PolishResult pr = polish(polished, guess.anchor, h, left, right, es);
    out.solver.newton_iters = pr.iterations;
    out.solver.collocation_residual = pr.residual;
    if (pr.converged) {
      guess.nodes = std::move(polished);
      out.solver.method = "shooting+collocation";
      polished_ok = true;
    }
  }
  if (!polished_ok && best.distance > 0.05 * jump) {
    throw NoConnection("shooting stalled at distance " + std::to_string(best.distance) +
                       " from the right rest point and collocation did not converge");
  }
  if (polished_ok) extend_tails(guess, left, right, es, h, params.tail_tol, budget);
  guess.nodes[guess.anchor][0] = 0.5 * (es.v_minus + es.v_plus);

  // Keep the longest stretch around the anchor on which the orbit is strictly monotone.
  const auto& nodes = guess.nodes;
  auto monotone_step = [&](std::size_t k) {
    return nodes[k + 1][0] > nodes[k][0] && nodes[k + 1][1] < nodes[k][1];
  };
  std::size_t lo = guess.anchor, hi = guess.anchor;
  while (lo > 0 && monotone_step(lo - 1)) --lo;
  while (hi + 1 < nodes.size() && monotone_step(hi)) ++hi;

  const std::size_t count = hi - lo + 1;
  out.xi.resize(count);
  out.vbar.resize(count);
  out.phibar.resize(count);
  out.Ebar.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    const auto& y = nodes[lo + k];
    out.xi[k] = (static_cast<double>(lo + k) - static_cast<double>(guess.anchor)) * h;
    out.vbar[k] = y[0];
    out.phibar[k] = y[1];
    out.Ebar[k] = y[2];
  }
  finalize_profile(out);

  const double left_gap = std::max(std::abs(out.vbar.front() - es.v_minus), std::abs(out.phibar.front() - es.phi_minus));
  const double right_gap = std::max(std::abs(out.vbar.back() - es.v_plus), std::abs(out.phibar.back() - es.phi_plus));
  if (left_gap > params.farfield_tol || right_gap > params.farfield_tol) {
    throw NoConnection("profile does not reach the far field within tolerance (left " + std::to_string(left_gap) +
                       ", right " + std::to_string(right_gap) + ")");
  }
  return out;
}

void finalize_profile(ShockProfile& p) {
  const EndStates& es = p.endstates;
  const std::size_t n = p.xi.size();
  p.ubar.resize(n);
  p.dvbar.resize(n);
  p.dubar.resize(n);
  p.dphibar.resize(n);
  p.dEbar.resize(n);
  const double vmid = 0.5 * (es.v_minus + es.v_plus);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    p.ubar[k] = es.u_minus - es.sigma * (p.vbar[k] - es.v_minus);
    const OdeState f = profile_rhs({p.vbar[k], p.phibar[k], p.Ebar[k]}, es);
    p.dvbar[k] = f[0];
    p.dubar[k] = -es.sigma * f[0];
    p.dphibar[k] = f[1];
    p.dEbar[k] = f[2];
    const double gap = std::abs(p.xi[k]);
    if (gap < best && std::abs(p.vbar[k] - vmid) < 1e-9) {
      best = gap;
      p.anchor_index = k;
    }
  }
}

}  // namespace nsp::profile
