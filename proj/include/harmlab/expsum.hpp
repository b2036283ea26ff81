#pragma once

// Torus exponential sums and the machinery around them: L^p norms on
// [0,2pi]^{1+r1} with alias-exact grids (even integer p) or oversampled
// convergence-checked grids, smooth cutoff sequences, Weyl sums,
// Dirichlet approximation, major/minor arc measurements, level-set
// (distributional) measurements, and the F/G diagnostics.
//
// Period conventions follow the source material: spectral-side sums use
// period 2pi and phases e^{-it|xi|^2}; the cutoff/Weyl apparatus lives on
// the unit period with phases e^{2pi i t n^2}. Conversions are internal.

#include <complex>
#include <span>
#include <vector>

#include "harmlab/experiments.hpp"
#include "harmlab/lattice.hpp"
#include "harmlab/quadrature.hpp"

namespace harmlab::expsum {

using Complex = std::complex<double>;

struct CoefficientVector {
  std::vector<lattice::Frequency> support;  // no duplicates
  std::vector<Complex> values;

  void validate() const;
  double norm2() const;
  std::size_t size() const { return support.size(); }
  int r() const { return support.empty() ? 0 : static_cast<int>(support[0].coords.size()); }
};

// sum_xi a_xi e^{-i t |xi|^2 + i <x1, xi_1>}; xi_1 = last r1 coords of xi,
// r1 = x1.size()
Complex exp_sum(const CoefficientVector& a, double t, std::span<const double> x1);

struct GridSizing {
  int oversample = 4;                // for non-even p
  double tol = 1e-6;                 // relative doubling-check tolerance
  std::size_t budget = 40'000'000;   // max grid points
};

// L^p_{t,x1}([0,2pi]^{1+r1}) norm of the sum, probability measure by
// default. For even integer p the grid is alias-exact: per variable,
// m = 2F+1 with F = (p/2) * (frequency span of the sum). Other p get a
// 4x-oversampled grid with a doubling convergence check.
double exp_sum_norm(const CoefficientVector& a, double p, int r1, const GridSizing& sizing = {},
                    quadrature::Measure measure = quadrature::Measure::Probability);

// Same value computed by direct pointwise summation over the same grid;
// the reference path for the FFT-based evaluation. Small inputs only.
double exp_sum_norm_direct(const CoefficientVector& a, double p, int r1,
                           const GridSizing& sizing = {},
                           quadrature::Measure measure = quadrature::Measure::Probability);

// Values of the sum on the uniform (t, x1,...) grid of the given sizes
// (row-major, t slowest). Sampling is exact for any grid size; callers
// choosing sizes for norm computations must majorize the relevant spans.
std::vector<Complex> exp_sum_on_grid(const CoefficientVector& a, int r1,
                                     const std::vector<int>& dims);

// --- extremizer sweeps for the cube/slab exponential-sum bounds ----------

enum class CoefFamily { Constant, RandomSign, Gaussian, Slab };
const char* family_name(CoefFamily f);

struct SweepOptions {
  int trials = 20;          // shift draws per (N, family)
  std::uint64_t seed = 1;
  long long shift_range_mult = 4;  // b drawn uniformly from [0, mult*N]^r
  GridSizing sizing = {};
};

struct RatioRow {
  double N1 = 0, N2 = 0;
  CoefFamily family = CoefFamily::Constant;
  std::vector<long long> shift;
  double ratio = 0;  // ||sum||_p / ||a||_2
};

struct VerifyReport {
  std::optional<experiments::FitResult> fit;  // log max-ratio vs log N (>= 3 points)
  std::vector<double> schedule;               // N values
  std::vector<double> max_ratio;              // per N
  std::vector<RatioRow> rows;                 // every draw
  double bound_exponent = 0;                  // r/2 - (2+r1)/p
};

// Cube-supported coefficient sweep against the N^{r/2-(2+r1)/p} bound.
// Requires p in the admissible range: p > 2 when r1 = 0 and r0 >= 2,
// otherwise p > max{2(r1+2)/r, 2}.
VerifyReport verify_i1(int r0, int r1, double p, const std::vector<long long>& N_list,
                       const SweepOptions& opts = {});

struct SlabGainRow {
  double N1 = 0, N2 = 0;
  double ratio = 0;          // measured slab ratio
  double cube_bound = 0;     // N2^{r/2-(2+r1)/p}
  double gain_base = 0;      // N2/N1 + 1/N2
  double gain_measured = 0;  // ratio / cube_bound
};

struct VerifyI2Report {
  std::vector<SlabGainRow> rows;
  // fit of log(gain_measured) vs log(gain_base): the measured delta_0
  std::optional<experiments::FitResult> gain_fit;
};

// Slab-supported sweep for the (N2/N1 + 1/N2)^{delta_0} gain; schedule is
// a list of (N1, N2) pairs with N1 >= N2.
VerifyI2Report verify_i2(int r0, int r1, double p,
                         const std::vector<std::pair<long long, long long>>& schedule,
                         const SweepOptions& opts = {});

// --- section-5 apparatus: cutoffs, Weyl sums, arcs ------------------------

struct CutoffSeq {
  long long b = 0;  // shift
  long long N = 2;

  // sigma_b(n): raised-cosine ramp over (b-N, b), plateau 1 on [b, b+N],
  // mirrored ramp over (b+N, b+2N), zero outside
  double value(long long n) const;
  long long support_lo() const { return b - N + 1; }
  long long support_hi() const { return b + 2 * N - 1; }
  double max_increment() const;
  double increment_variation() const;
};

CutoffSeq build_cutoff(long long b, long long N);

// f_b(t) = sum_n sigma_b(n)^2 e^{2 pi i t n^2}
Complex weyl_sum(const CutoffSeq& c, double t);

struct RationalApprox {
  long long a = 0;  // 0 <= a <= q (a = 0 only with q = 1; 0/1 is 1/1 mod 1)
  long long q = 1;  // gcd(a, q) = 1
};

// Best continued-fraction approximation with q <= Q and |t - a/q| < 1/(qQ).
RationalApprox dirichlet_approx(double t, long long Q);

struct ArcLabel {
  bool major = false;
  RationalApprox frac;  // populated for major arcs
  long long N = 0;
};

// major iff exists q <= N^{1/10}, gcd(a,q)=1, with |t - a/q| <= N^{1/10-2};
// distances are taken mod 1, so t = 0 lands in the arc of 1/1.
ArcLabel classify_arc(double t, long long N);

struct MajorArcSample {
  long long a = 1, q = 1;
  double offset = 0;  // t = a/q + offset
};

// max over samples and shifts of |f_b(t)| q^{1/2} (|t-a/q| + N^{-2})^{1/2};
// requires q < N and |offset| < 1/(qN).
double major_arc_ratio(long long N, std::span<const MajorArcSample> samples,
                       std::span<const long long> b_samples);

// max over samples and shifts of |f_b(t)| / N^{1-1/20}; every t must
// classify as minor at this N.
double minor_arc_ratio(long long N, std::span<const double> t_samples,
                       std::span<const long long> b_samples);

// Fraction of the [0,1] time grid where |sum_xi sigma_b(xi) a_xi
// e^{-2 pi i t |xi|^2}| exceeds delta N^{r/2}; a must be l2-normalized,
// one cutoff per coordinate (all of width N). r1 = 0 context.
double level_set_measure(const CoefficientVector& a, std::span<const CutoffSeq> cutoffs,
                         double delta, int grid_mult = 8,
                         const GridSizing& sizing = {});

// F(theta) = (N^2 |sin theta| + 1)^{-r gamma / 2}
double eval_F(double theta, long long N, int r, double gamma);
// G(t) = sum over Farey fractions a/q, q <= Q, of q^{-r gamma/2} F(t - a/q);
// requires r*gamma > 2.
double eval_G(double t, long long N, long long Q, int r, double gamma);

}  // namespace harmlab::expsum
