#pragma once

// Exponent arithmetic for well-posedness thresholds on products of spheres
// and tori: critical regularity, Sogge exponents, the multilinear estimate
// constants, and the threshold calculator. Everything is exact rational
// arithmetic; slack parameters are explicit inputs.

#include <optional>
#include <string>
#include <vector>

#include "harmlab/estimate.hpp"
#include "harmlab/manifold.hpp"
#include "harmlab/rational.hpp"

namespace harmlab::regularity {

// s_c = d/2 - 1/k
Rational critical_regularity(const ManifoldSpec& spec, int k);

// Sogge spectral-projector exponent delta(p, d):
//   (d-1)/2 - d/p          for p >= 2(d+1)/(d-1)
//   (d-1)/2 * (1/2 - 1/p)  for 2 <= p <= 2(d+1)/(d-1)
Rational sogge_delta(const Rational& p, int dim);

// Smallest applicable gamma(p) exponent for the restricted p=q Strichartz
// estimate; empty optional when no case applies.
std::optional<Rational> gamma_exponent(const ManifoldSpec& spec, const Rational& p,
                                       const Rational& eps);

struct MlsParams {
  Rational delta0{1, 10};  // the existential delta_0 > 0, caller-chosen knob
  Rational eta{1, 100};    // eta > 0 slack for 3-sphere factors
  Rational eps{1, 100};    // eps > 0 slack in the r=2 cases
  // The free delta actually used defaults to delta0/2.
  Rational delta() const { return delta0 / 2; }
};

// Right-hand-side constant of the multilinear Strichartz estimate for
// (spec, k); throws std::invalid_argument on pairs covered by no case.
EstimateConstant mls_constant(const ManifoldSpec& spec, int k, const MlsParams& params = {});

// Joint spectral projector constant C(N_1,...,N_{k+1}) on a product of
// spheres; eta must be > 0 when k >= 2.
EstimateConstant mljspe_constant(const ManifoldSpec& spec, int k, const Rational& eta = {1, 100});

enum class Strictness { AtLeast, StrictlyAbove };  // "s >= X" vs "s > X"
enum class Regime { Critical, AlmostCritical, Subcritical };

std::string to_string(Strictness s);
std::string to_string(Regime r);

struct ThresholdResult {
  Regime regime;
  Rational s_bound;
  Strictness strict;
  std::string source;  // citation tag of the winning rule
};

// Every threshold rule applicable to (spec, k), unsorted.
std::vector<ThresholdResult> threshold_candidates(const ManifoldSpec& spec, int k);

// Best threshold: smallest bound; ties broken toward "s >=".
// Requires r >= 2. Always succeeds (general fallback s > d/2 - 1/(2k)).
ThresholdResult lwp_threshold(const ManifoldSpec& spec, int k);

// CSV rows (r2, r3, r, k, regime, s_bound, strict, source) for k in
// [k_min, k_max]; header included.
std::string threshold_table_csv(const ManifoldSpec& spec, int k_min, int k_max);

struct StrichartzTriple {
  Rational p, q, s;
  int case_id = 0;  // which of the admissibility cases (1)-(5) produced it
};

// All admissible triples at a given p (exact side conditions).
std::vector<StrichartzTriple> admissible_triples(const ManifoldSpec& spec, const Rational& p,
                                                 const Rational& eps = {0});

struct LinearThresholdResult {
  Rational p0, q0, s0;
  Rational threshold;  // s0 + d/q0; local well-posedness for s > threshold
  int case_id = 0;
};

// Minimizes s0 + d/q0 over admissible triples with p0 > 2k drawn from the
// given grid of p values; empty optional when no admissible triple exists.
std::optional<LinearThresholdResult> optimize_linear_threshold(const ManifoldSpec& spec, int k,
                                                               const std::vector<Rational>& p_grid,
                                                               const Rational& eps = {0});

// Default search grid: p = 2k + j*step for j = 1..count, plus the exact
// case boundaries (2+8/r, 2(r+2)/r, Sogge junctions, 2+4(d'+1)/(d'r)).
std::vector<Rational> default_p_grid(const ManifoldSpec& spec, int k,
                                     const Rational& step = {1, 100}, int count = 1000);

}  // namespace harmlab::regularity
