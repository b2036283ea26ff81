#include "harmlab/expsum.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <random>
#include <set>

namespace harmlab::expsum {

namespace {

constexpr double kTwoPi = 2.0 * quadrature::kPi;

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mutex fftw_mutex;  // plan creation is not thread-safe

// in-place multidimensional forward DFT: out[j] = sum_k in[k] e^{-2pi i <j,k>/m}
void fft_forward(std::vector<Complex>& data, const std::vector<int>& dims) {
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_mutex);
    plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(),
                         reinterpret_cast<fftw_complex*>(data.data()),
                         reinterpret_cast<fftw_complex*>(data.data()), FFTW_FORWARD,
                         FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_mutex);
    fftw_destroy_plan(plan);
  }
}

struct GridPlan {
  std::vector<int> dims;       // m_t, m_1, ..., m_r1
  long long l_min = 0;         // common phase shift, drops out of |g|
  std::size_t total() const {
    std::size_t n = 1;
    for (int d : dims) n *= static_cast<std::size_t>(d);
    return n;
  }
};

bool is_even_integer(double p) {
  long long r = std::llround(p);
  return std::abs(p - static_cast<double>(r)) < 1e-12 && r >= 2 && r % 2 == 0;
}

GridPlan make_plan(const CoefficientVector& a, double p, int r1, const GridSizing& sizing,
                   int oversample_override = 0) {
  GridPlan plan;
  const int r = a.r();
  if (r1 < 0 || r1 > r) throw std::invalid_argument("exp_sum_norm: bad r1");
  long long l_lo = 0, l_hi = 0;
  std::vector<long long> mu_lo(r1, 0), mu_hi(r1, 0);
  bool first = true;
  for (const auto& f : a.support) {
    long long l = f.norm2();
    if (first) {
      l_lo = l_hi = l;
      for (int i = 0; i < r1; ++i) mu_lo[i] = mu_hi[i] = f.coords[r - r1 + i];
      first = false;
    } else {
      l_lo = std::min(l_lo, l);
      l_hi = std::max(l_hi, l);
      for (int i = 0; i < r1; ++i) {
        mu_lo[i] = std::min(mu_lo[i], f.coords[r - r1 + i]);
        mu_hi[i] = std::max(mu_hi[i], f.coords[r - r1 + i]);
      }
    }
  }
  plan.l_min = l_lo;
  auto grid_size = [&](long long span) -> int {
    if (is_even_integer(p) && oversample_override == 0) {
      long long F = (std::llround(p) / 2) * span;
      return static_cast<int>(2 * F + 1);
    }
    int ov = oversample_override > 0 ? oversample_override : sizing.oversample;
    return static_cast<int>(ov * std::max(span, 1LL) + 1);
  };
  plan.dims.push_back(grid_size(l_hi - l_lo));
  for (int i = 0; i < r1; ++i) plan.dims.push_back(grid_size(mu_hi[i] - mu_lo[i]));
  if (plan.total() > sizing.budget)
    throw quadrature::BudgetError("exp_sum_norm: grid exceeds budget (" +
                                  std::to_string(plan.total()) + " points)");
  return plan;
}

// grid values of the sum via one forward FFT; t phase e^{-itl} is a forward
// index, torus phases e^{+i x mu} enter with mu negated
std::vector<Complex> grid_values_fft(const CoefficientVector& a, int r1, const GridPlan& plan) {
  const int r = a.r();
  std::vector<Complex> data(plan.total(), Complex(0, 0));
  for (std::size_t k = 0; k < a.support.size(); ++k) {
    const auto& f = a.support[k];
    long long idx0 = (f.norm2() - plan.l_min) % plan.dims[0];
    std::size_t flat = static_cast<std::size_t>(idx0);
    for (int i = 0; i < r1; ++i) {
      long long m = plan.dims[1 + i];
      long long mu = -f.coords[r - r1 + i];  // negate for the e^{+i x mu} sign
      long long idx = ((mu % m) + m) % m;
      flat = flat * static_cast<std::size_t>(m) + static_cast<std::size_t>(idx);
    }
    data[flat] += a.values[k];
  }
  fft_forward(data, plan.dims);
  return data;
}

double norm_from_values(const std::vector<Complex>& vals, double p, int r1,
                        quadrature::Measure measure) {
  long double acc = 0;
  for (const Complex& v : vals) acc += std::pow(static_cast<long double>(std::abs(v)), p);
  acc /= vals.size();
  double norm = static_cast<double>(std::pow(acc, 1.0L / p));
  if (measure == quadrature::Measure::Raw) norm *= std::pow(kTwoPi, (1.0 + r1) / p);
  return norm;
}

double norm_with_plan(const CoefficientVector& a, double p, int r1, const GridPlan& plan,
                      quadrature::Measure measure) {
  auto vals = grid_values_fft(a, r1, plan);
  return norm_from_values(vals, p, r1, measure);
}

}  // namespace

void CoefficientVector::validate() const {
  if (support.size() != values.size())
    throw std::invalid_argument("CoefficientVector: support/value size mismatch");
  std::set<std::vector<long long>> seen;
  std::size_t dim = support.empty() ? 0 : support[0].coords.size();
  for (const auto& f : support) {
    if (f.coords.size() != dim)
      throw std::invalid_argument("CoefficientVector: mixed frequency dimensions");
    if (!seen.insert(f.coords).second)
      throw std::invalid_argument("CoefficientVector: duplicate support point");
  }
}

double CoefficientVector::norm2() const {
  long double acc = 0;
  for (const Complex& v : values) acc += std::norm(v);
  return static_cast<double>(std::sqrt(acc));
}

Complex exp_sum(const CoefficientVector& a, double t, std::span<const double> x1) {
  const int r = a.r();
  const int r1 = static_cast<int>(x1.size());
  Complex acc = 0;
  for (std::size_t k = 0; k < a.support.size(); ++k) {
    long double phase = -static_cast<long double>(t) * a.support[k].norm2();
    for (int i = 0; i < r1; ++i)
      phase += static_cast<long double>(x1[i]) * a.support[k].coords[r - r1 + i];
    acc += a.values[k] * Complex(std::cos(static_cast<double>(phase)),
                                 std::sin(static_cast<double>(phase)));
  }
  return acc;
}

double exp_sum_norm(const CoefficientVector& a, double p, int r1, const GridSizing& sizing,
                    quadrature::Measure measure) {
  a.validate();
  if (!(p >= 1)) throw std::invalid_argument("exp_sum_norm: p must be >= 1");
  if (a.support.empty()) return 0.0;
  GridPlan plan = make_plan(a, p, r1, sizing);
  double n1 = norm_with_plan(a, p, r1, plan, measure);
  if (is_even_integer(p)) return n1;
  // non-even p: |g|^p is not band-limited, so refine by doubling until two
  // consecutive grids agree to the declared tolerance
  for (int round = 0; round < 8; ++round) {
    GridPlan refined = plan;
    for (auto& d : refined.dims) d = 2 * d + 1;
    if (refined.total() > sizing.budget)
      throw quadrature::BudgetError("exp_sum_norm: doubling check exceeds budget");
    double n2 = norm_with_plan(a, p, r1, refined, measure);
    if (std::abs(n1 - n2) <= sizing.tol * std::max(n2, 1e-300)) return n2;
    plan = refined;
    n1 = n2;
  }
  throw std::runtime_error("exp_sum_norm: grid too small for requested tolerance");
}

std::vector<Complex> exp_sum_on_grid(const CoefficientVector& a, int r1,
                                     const std::vector<int>& dims) {
  a.validate();
  if (dims.size() != static_cast<std::size_t>(1 + r1))
    throw std::invalid_argument("exp_sum_on_grid: need one size per variable");
  GridPlan plan;
  plan.dims = dims;
  plan.l_min = 0;
  return grid_values_fft(a, r1, plan);
}

double exp_sum_norm_direct(const CoefficientVector& a, double p, int r1, const GridSizing& sizing,
                           quadrature::Measure measure) {
  a.validate();
  if (a.support.empty()) return 0.0;
  GridPlan plan = make_plan(a, p, r1, sizing);
  std::vector<int> idx(plan.dims.size(), 0);
  std::vector<Complex> vals(plan.total());
  std::vector<double> x1(r1);
  for (std::size_t flat = 0; flat < vals.size(); ++flat) {
    double t = kTwoPi * idx[0] / plan.dims[0];
    for (int i = 0; i < r1; ++i) x1[i] = kTwoPi * idx[1 + i] / plan.dims[1 + i];
    vals[flat] = exp_sum(a, t, x1);
    for (std::size_t d = idx.size(); d-- > 0;) {
      if (++idx[d] < plan.dims[d]) break;
      idx[d] = 0;
    }
  }
  return norm_from_values(vals, p, r1, measure);
}

const char* family_name(CoefFamily f) {
  switch (f) {
    case CoefFamily::Constant: return "const";
    case CoefFamily::RandomSign: return "sign";
    case CoefFamily::Gaussian: return "gauss";
    default: return "slab";
  }
}

namespace {

CoefficientVector draw_family(CoefFamily family, const std::vector<long long>& shift, long long N,
                              std::mt19937_64& rng) {
  lattice::Cube cube;
  for (long long s : shift) cube.b.push_back(Rational(s));
  cube.N = Rational(N);
  CoefficientVector a;
  if (family == CoefFamily::Slab) {
    // thin layer: N1 = N^2 so the slab thickness is max{N^2/N^2, 1} = 1
    auto slabs = lattice::slab_decompose(cube, Rational(N) * Rational(N), Rational(N));
    const lattice::Slab* pick = nullptr;
    for (const auto& s : slabs)
      if (!pick || s.points.size() > pick->points.size()) pick = &s;
    a.support = pick->points;
    a.values.assign(a.support.size(), Complex(1, 0));
    return a;
  }
  a.support = lattice::enumerate_cube(cube, 0);
  a.values.resize(a.support.size());
  std::normal_distribution<double> gauss;
  std::uniform_int_distribution<int> coin(0, 1);
  for (auto& v : a.values) {
    switch (family) {
      case CoefFamily::Constant: v = Complex(1, 0); break;
      case CoefFamily::RandomSign: v = Complex(coin(rng) ? 1.0 : -1.0, 0); break;
      default: v = Complex(gauss(rng), gauss(rng)); break;
    }
  }
  return a;
}

bool i1_admissible(int r0, int r1, double p) {
  int r = r0 + r1;
  if (r1 == 0 && r0 >= 2) return p > 2.0;
  return p > std::max(2.0 * (r1 + 2) / r, 2.0);
}

}  // namespace

VerifyReport verify_i1(int r0, int r1, double p, const std::vector<long long>& N_list,
                       const SweepOptions& opts) {
  const int r = r0 + r1;
  if (r < 1) throw std::invalid_argument("verify_i1: need r >= 1");
  if (!i1_admissible(r0, r1, p))
    throw std::invalid_argument("verify_i1: p outside the admissible range for (r0, r1)");

  VerifyReport report;
  report.bound_exponent = r / 2.0 - (2.0 + r1) / p;
  std::vector<std::pair<double, double>> fit_pts;
  for (long long N : N_list) {
    double best = 0;
    for (CoefFamily family : {CoefFamily::Constant, CoefFamily::RandomSign, CoefFamily::Gaussian,
                              CoefFamily::Slab}) {
      for (int trial = 0; trial < opts.trials; ++trial) {
        std::mt19937_64 rng(mix64(opts.seed ^ mix64(static_cast<std::uint64_t>(N) ^
                                                    mix64(static_cast<int>(family) * 1000003ULL +
                                                          trial))));
        std::uniform_int_distribution<long long> shift_draw(0, opts.shift_range_mult * N);
        std::vector<long long> shift(r);
        for (auto& s : shift) s = shift_draw(rng);
        CoefficientVector a = draw_family(family, shift, N, rng);
        double ratio = exp_sum_norm(a, p, r1, opts.sizing) / a.norm2();
        report.rows.push_back({static_cast<double>(N), static_cast<double>(N), family, shift,
                               ratio});
        best = std::max(best, ratio);
      }
    }
    report.schedule.push_back(static_cast<double>(N));
    report.max_ratio.push_back(best);
    fit_pts.push_back({static_cast<double>(N), best});
  }
  if (fit_pts.size() >= 3) report.fit = experiments::fit_exponent(fit_pts);
  return report;
}

VerifyI2Report verify_i2(int r0, int r1, double p,
                         const std::vector<std::pair<long long, long long>>& schedule,
                         const SweepOptions& opts) {
  const int r = r0 + r1;
  if (r < 1) throw std::invalid_argument("verify_i2: need r >= 1");
  if (!i1_admissible(r0, r1, p))
    throw std::invalid_argument("verify_i2: p outside the admissible range for (r0, r1)");

  VerifyI2Report report;
  std::vector<std::pair<double, double>> gain_pts;
  for (auto [N1, N2] : schedule) {
    if (N1 < N2 || N2 < 1) throw std::invalid_argument("verify_i2: need N1 >= N2 >= 1");
    double best = 0;
    for (int trial = 0; trial < opts.trials; ++trial) {
      std::mt19937_64 rng(mix64(opts.seed ^ mix64(static_cast<std::uint64_t>(N1 * 131 + N2) ^
                                                  mix64(trial))));
      std::uniform_int_distribution<long long> shift_draw(0, opts.shift_range_mult * N2);
      lattice::Cube cube;
      for (int i = 0; i < r; ++i) cube.b.push_back(Rational(shift_draw(rng)));
      cube.N = Rational(N2);
      auto slabs = lattice::slab_decompose(cube, Rational(N1), Rational(N2));
      const lattice::Slab* pick = nullptr;
      for (const auto& s : slabs)
        if (!pick || s.points.size() > pick->points.size()) pick = &s;
      for (bool constant : {true, false}) {
        CoefficientVector a;
        a.support = pick->points;
        a.values.resize(a.support.size());
        std::normal_distribution<double> gauss;
        for (auto& v : a.values)
          v = constant ? Complex(1, 0) : Complex(gauss(rng), gauss(rng));
        best = std::max(best, exp_sum_norm(a, p, r1, opts.sizing) / a.norm2());
      }
    }
    SlabGainRow row;
    row.N1 = static_cast<double>(N1);
    row.N2 = static_cast<double>(N2);
    row.ratio = best;
    row.cube_bound = std::pow(static_cast<double>(N2), r / 2.0 - (2.0 + r1) / p);
    row.gain_base = static_cast<double>(N2) / N1 + 1.0 / N2;
    row.gain_measured = row.ratio / row.cube_bound;
    report.rows.push_back(row);
    gain_pts.push_back({row.gain_base, row.gain_measured});
  }
  // distinct gain bases needed for a meaningful fit
  std::set<double> bases;
  for (auto& [b, g] : gain_pts) bases.insert(b);
  if (bases.size() >= 3) report.gain_fit = experiments::fit_exponent(gain_pts);
  return report;
}

double CutoffSeq::value(long long n) const {
  long long u = n - b;
  if (u <= -N || u >= 2 * N) return 0.0;
  if (u >= 0 && u <= N) return 1.0;
  if (u < 0) return 0.5 * (1.0 - std::cos(quadrature::kPi * (u + N) / static_cast<double>(N)));
  return 0.5 * (1.0 - std::cos(quadrature::kPi * (2 * N - u) / static_cast<double>(N)));
}

double CutoffSeq::max_increment() const {
  double best = 0;
  for (long long n = b - N - 1; n <= b + 2 * N; ++n)
    best = std::max(best, std::abs(value(n + 1) - value(n)));
  return best;
}

double CutoffSeq::increment_variation() const {
  double total = 0;
  for (long long n = b - N - 2; n <= b + 2 * N + 1; ++n) {
    double d1 = value(n + 1) - value(n);
    double d2 = value(n + 2) - value(n + 1);
    total += std::abs(d2 - d1);
  }
  return total;
}

CutoffSeq build_cutoff(long long b, long long N) {
  if (N < 2) throw std::invalid_argument("build_cutoff: N must be >= 2");
  return CutoffSeq{b, N};
}

Complex weyl_sum(const CutoffSeq& c, double t) {
  Complex acc = 0;
  for (long long n = c.b - c.N; n <= c.b + 2 * c.N; ++n) {
    double s = c.value(n);
    if (s == 0.0) continue;
    long double frac = std::fmod(static_cast<long double>(t) * n * n, 1.0L);
    double angle = static_cast<double>(kTwoPi * frac);
    acc += s * s * Complex(std::cos(angle), std::sin(angle));
  }
  return acc;
}

RationalApprox dirichlet_approx(double t, long long Q) {
  if (Q < 1) throw std::invalid_argument("dirichlet_approx: Q must be >= 1");
  if (t < 0.0 || t > 1.0) throw std::invalid_argument("dirichlet_approx: t must be in [0,1]");
  // continued-fraction convergents h_k/q_k until the denominator passes Q
  long double x = t;
  long long h_prev = 1, h_cur = static_cast<long long>(std::floor(static_cast<double>(x)));
  long long q_prev = 0, q_cur = 1;
  long double frac = x - h_cur;
  for (int iter = 0; iter < 64; ++iter) {
    if (frac < 1e-15L) break;
    long double inv = 1.0L / frac;
    long long digit = static_cast<long long>(std::floor(static_cast<double>(inv)));
    long long h_next = digit * h_cur + h_prev;
    long long q_next = digit * q_cur + q_prev;
    if (q_next > Q) break;
    h_prev = h_cur;
    h_cur = h_next;
    q_prev = q_cur;
    q_cur = q_next;
    frac = inv - digit;
  }
  return RationalApprox{h_cur, q_cur};
}

ArcLabel classify_arc(double t, long long N) {
  if (t < 0.0 || t > 1.0) throw std::invalid_argument("classify_arc: t must be in [0,1]");
  if (N < 2) throw std::invalid_argument("classify_arc: N must be >= 2");
  ArcLabel label;
  label.N = N;
  const long long q_max = static_cast<long long>(std::floor(std::pow(static_cast<double>(N), 0.1) + 1e-9));
  const double width = std::pow(static_cast<double>(N), 0.1) /
                       (static_cast<double>(N) * static_cast<double>(N));
  // q_max is tiny (N^{1/10}); scan every denominator rather than trusting a
  // single convergent near the arc boundary
  for (long long q = 1; q <= q_max; ++q) {
    long long a = std::llround(t * static_cast<double>(q));
    double dist = std::abs(t - static_cast<double>(a) / static_cast<double>(q));
    if (dist <= width) {
      long long g = std::gcd(a, q);
      long long ar = g ? a / g : 0, qr = g ? q / g : 1;
      if (ar == 0) {  // 0/1 is 1/1 under the periodic identification
        ar = 1;
        qr = 1;
      }
      label.major = true;
      label.frac = RationalApprox{ar, qr};
      return label;
    }
  }
  label.major = false;
  label.frac = dirichlet_approx(t, std::max<long long>(q_max, 1));
  return label;
}

double major_arc_ratio(long long N, std::span<const MajorArcSample> samples,
                       std::span<const long long> b_samples) {
  if (N < 2) throw std::invalid_argument("major_arc_ratio: N must be >= 2");
  double best = 0;
  CutoffSeq cut = build_cutoff(0, N);
  for (const auto& s : samples) {
    if (s.q < 1 || s.q >= N || std::gcd(s.a, s.q) != 1)
      throw std::invalid_argument("major_arc_ratio: need 1 <= a <= q < N with gcd(a,q)=1");
    if (!(std::abs(s.offset) < 1.0 / (static_cast<double>(s.q) * N)))
      throw std::invalid_argument("major_arc_ratio: offset outside |t-a/q| < 1/(qN)");
    double t = static_cast<double>(s.a) / s.q + s.offset;
    double window = std::sqrt(std::abs(s.offset) + 1.0 / (static_cast<double>(N) * N));
    for (long long b : b_samples) {
      cut.b = b;
      double val = std::abs(weyl_sum(cut, t)) * std::sqrt(static_cast<double>(s.q)) * window;
      best = std::max(best, val);
    }
  }
  return best;
}

double minor_arc_ratio(long long N, std::span<const double> t_samples,
                       std::span<const long long> b_samples) {
  if (N < 2) throw std::invalid_argument("minor_arc_ratio: N must be >= 2");
  CutoffSeq cut = build_cutoff(0, N);
  double scale = std::pow(static_cast<double>(N), 1.0 - 1.0 / 20.0);
  double best = 0;
  for (double t : t_samples) {
    if (classify_arc(t, N).major)
      throw std::invalid_argument("minor_arc_ratio: sample classified major");
    for (long long b : b_samples) {
      cut.b = b;
      best = std::max(best, std::abs(weyl_sum(cut, t)) / scale);
    }
  }
  return best;
}

double level_set_measure(const CoefficientVector& a, std::span<const CutoffSeq> cutoffs,
                         double delta, int grid_mult, const GridSizing& sizing) {
  a.validate();
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("level_set_measure: delta must be in (0,1)");
  if (std::abs(a.norm2() - 1.0) > 1e-9)
    throw std::invalid_argument("level_set_measure: coefficients must be l2-normalized");
  const int r = a.r();
  if (static_cast<int>(cutoffs.size()) != r)
    throw std::invalid_argument("level_set_measure: need one cutoff per coordinate");
  const long long N = cutoffs[0].N;
  for (const auto& c : cutoffs)
    if (c.N != N) throw std::invalid_argument("level_set_measure: cutoff widths must agree");

  // coefficients sigma_b(xi) a_xi bucketed by |xi|^2
  long long l_lo = 0, l_hi = 0;
  bool first = true;
  std::map<long long, Complex> buckets;
  for (std::size_t k = 0; k < a.support.size(); ++k) {
    double s = 1.0;
    for (int i = 0; i < r; ++i) s *= cutoffs[i].value(a.support[k].coords[i]);
    if (s == 0.0) continue;
    long long l = a.support[k].norm2();
    buckets[l] += s * a.values[k];
    if (first) {
      l_lo = l_hi = l;
      first = false;
    } else {
      l_lo = std::min(l_lo, l);
      l_hi = std::max(l_hi, l);
    }
  }
  if (buckets.empty()) return 0.0;
  long long span = l_hi - l_lo;
  std::size_t m = static_cast<std::size_t>(grid_mult * std::max(span, 1LL) + 1);
  if (m > sizing.budget) throw quadrature::BudgetError("level_set_measure: grid exceeds budget");
  std::vector<Complex> data(m, Complex(0, 0));
  for (auto& [l, c] : buckets) data[static_cast<std::size_t>((l - l_lo) % m)] += c;
  std::vector<int> dims = {static_cast<int>(m)};
  fft_forward(data, dims);

  const double threshold = delta * std::pow(static_cast<double>(N), r / 2.0);
  std::size_t count = 0;
  for (const Complex& v : data)
    if (std::abs(v) > threshold) ++count;
  return static_cast<double>(count) / static_cast<double>(m);
}

double eval_F(double theta, long long N, int r, double gamma) {
  double base = static_cast<double>(N) * N * std::abs(std::sin(theta)) + 1.0;
  return std::pow(base, -0.5 * r * gamma);
}

double eval_G(double t, long long N, long long Q, int r, double gamma) {
  if (!(r * gamma > 2.0)) throw std::invalid_argument("eval_G: need r*gamma > 2");
  if (Q < 1) throw std::invalid_argument("eval_G: Q must be >= 1");
  double acc = 0;
  for (long long q = 1; q <= Q; ++q) {
    double qfac = std::pow(static_cast<double>(q), -0.5 * r * gamma);
    for (long long aa = 1; aa <= q; ++aa) {
      if (std::gcd(aa, q) != 1) continue;
      acc += qfac * eval_F(t - static_cast<double>(aa) / q, N, r, gamma);
    }
  }
  return acc;
}

}  // namespace harmlab::expsum
