#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nsp/evolve.hpp"
#include "nsp/grid.hpp"
#include "nsp/poisson.hpp"
#include "nsp/profile.hpp"
#include "nsp/shift.hpp"

namespace nsp::relent {

/// Relative internal energy Q(v|vbar) for Q(v) = -2 ln v.
double rel_q(double v, double vbar);

/// Relative modified pressure p~(v|vbar) for p~(v) = 2/v.
double rel_p(double v, double vbar);

struct RelConstants {
  double C_star = 0.0;  // (1 - sqrt(delta_S)/2) v_-
  double M = 0.0;       // shift gain
  double delta_S = 0.0;
  double sigma = 0.0;
};

RelConstants rel_constants(const profile::EndStates& es);

/// Right-hand sides of the two constant-free lower bounds on Q(v|vbar).
double relbd2_rhs(double v, double vbar);
double relbd3_rhs(double v, double vbar);

struct Lemma21Report {
  std::size_t samples = 0;
  std::size_t relbd2_violations = 0;
  std::size_t relbd3_violations = 0;
  double relbd2_min_margin = 0.0;  // min of Q - rhs over the sample
  double relbd3_min_margin = 0.0;
  double relbd1_constant = 0.0;    // smallest C making the cubic upper bound hold
  double relbd4_constant = 0.0;
  bool relbd2_ok() const noexcept { return relbd2_violations == 0; }
  bool relbd3_ok() const noexcept { return relbd3_violations == 0; }
};

/// Samples vbar in [c - rbar, c + rbar] and v - vbar in [-rv, rv] on a
/// samples x samples grid. Each radius must not exceed 0.25 c.
Lemma21Report lemma21_check(double vbar_center, double vbar_radius, double v_radius, int samples);

/// Pointwise modulated relative functional.
double eta_density(double v, double u, double vbar, double ubar, double phibar, double dphi_tilde,
                   double ddphi_tilde);

struct EtaSnapshot {
  double eta_weighted = 0.0;
  double eta_plain = 0.0;
  double quad_norm = 0.0;
  double ratio_min = 0.0;  // pointwise eta / quad over nodes above the floor
  double ratio_max = 0.0;
  std::size_t ratio_nodes = 0;
};

/// Nodes whose quadratic density is below floor * max(quad) are left out of the ratio envelope.
EtaSnapshot eta_integral(const evolve::State& s, std::span<const double> phi, const shift::ShiftedFrame& frame,
                         const Grid& grid, double floor = 1e-8);

struct GoodTerms {
  double G1 = 0.0;
  double GS = 0.0;
  double D = 0.0;
};

GoodTerms good_terms(const evolve::State& s, const shift::ShiftedFrame& frame, const Grid& grid,
                     const RelConstants& c);

/// Discrete H^k norm: sqrt of the summed trapezoidal L2 norms of every field and its
/// forward differences up to order k (k <= 3).
double sobolev_norm(const std::vector<std::span<const double>>& fields, int k, const Grid& grid);
double sobolev_norm(std::span<const double> field, int k, const Grid& grid);

/// ||phi_tilde||_{H^k} / ||v_tilde||_{H^{k-1}}; throws ZeroDenominator when v_tilde vanishes.
double elliptic_ratio(std::span<const double> phi_tilde, std::span<const double> v_tilde, const Grid& grid, int k);

}  // namespace nsp::relent
