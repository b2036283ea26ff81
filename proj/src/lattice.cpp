#include "harmlab/lattice.hpp"

#include <algorithm>
#include <cmath>

namespace harmlab::lattice {

namespace {

long long rfloor(const Rational& x) {
  long long n = x.numerator(), d = x.denominator();  // d > 0 after normalization
  if (n >= 0) return n / d;
  return -((-n + d - 1) / d);
}
long long rceil(const Rational& x) { return -rfloor(-x); }

long long isqrt_ll(long long v) {
  if (v < 0) return -1;
  long long s = static_cast<long long>(std::sqrt(static_cast<double>(v)));
  while (s > 0 && s * s > v) --s;
  while ((s + 1) * (s + 1) <= v) ++s;
  return s;
}

// sign of a - c*sqrt(q) for rationals a, c and q >= 0, exact via 128-bit
// sign-aware squaring
int cmp_vs_sqrt(const Rational& a, const Rational& c, const Rational& q) {
  auto sgn = [](const Rational& x) { return x > Rational(0) ? 1 : (x < Rational(0) ? -1 : 0); };
  if (q == Rational(0) || sgn(c) == 0) return sgn(a);
  int sa = sgn(a), sc = sgn(c);
  if (sa >= 0 && sc < 0) return 1;
  if (sa < 0 && sc > 0) return -1;
  // both sides share a sign: compare squares
  using I = __int128;
  I an = a.numerator(), ad = a.denominator();
  I cn = c.numerator(), cd = c.denominator();
  I qn = q.numerator(), qd = q.denominator();
  I lhs = an * an * cd * cd * qd;  // a^2 scaled
  I rhs = cn * cn * ad * ad * qn;  // c^2 q scaled
  int mag = lhs == rhs ? 0 : (lhs > rhs ? 1 : -1);
  // for negative a, c the comparison flips
  return (sa >= 0 && sc >= 0) ? mag : -mag;
}

}  // namespace

bool Cube::contains(const Frequency& f) const {
  if (f.coords.size() != b.size()) return false;
  for (std::size_t i = 0; i < b.size(); ++i) {
    Rational n(f.coords[i]);
    if (n < b[i] || n > b[i] + N) return false;
  }
  return true;
}

std::vector<Rational> Cube::center() const {
  std::vector<Rational> c(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) c[i] = b[i] + N / 2;
  return c;
}

std::vector<Frequency> enumerate_cube(const Cube& c, int r0, std::size_t budget) {
  const int r = c.r();
  if (r0 < 0 || r0 > r) throw std::invalid_argument("enumerate_cube: bad r0");
  if (c.N <= Rational(0)) throw std::invalid_argument("enumerate_cube: cube side must be > 0");
  std::vector<long long> lo(r), hi(r);
  std::size_t total = 1;
  for (int i = 0; i < r; ++i) {
    lo[i] = rceil(c.b[i]);
    hi[i] = rfloor(c.b[i] + c.N);
    if (i < r0) lo[i] = std::max(lo[i], 0LL);
    if (lo[i] > hi[i]) return {};
    std::size_t count = static_cast<std::size_t>(hi[i] - lo[i] + 1);
    if (count > budget / std::max<std::size_t>(total, 1))
      throw BudgetError("enumerate_cube: point budget exceeded");
    total *= count;
  }
  std::vector<Frequency> out;
  out.reserve(total);
  Frequency cur;
  cur.coords.assign(lo.begin(), lo.end());
  for (std::size_t flat = 0; flat < total; ++flat) {
    out.push_back(cur);
    for (int i = r; i-- > 0;) {
      if (++cur.coords[i] <= hi[i]) break;
      cur.coords[i] = lo[i];
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Rational slab_thickness(const Rational& N1, const Rational& N2) {
  Rational m = N2 * N2 / N1;
  return m > Rational(1) ? m : Rational(1);
}

int slab_index(const Frequency& f, const std::vector<Rational>& xi0, const Rational& M) {
  if (f.coords.size() != xi0.size()) throw std::invalid_argument("slab_index: dimension mismatch");
  if (M <= Rational(0)) throw std::invalid_argument("slab_index: thickness must be > 0");
  Rational u(0), q(0);
  for (std::size_t i = 0; i < xi0.size(); ++i) {
    u += Rational(f.coords[i]) * xi0[i];
    q += xi0[i] * xi0[i];
  }
  if (q == Rational(0)) throw std::invalid_argument("slab_index: degenerate center xi0 = 0");
  // m = floor(u / (M sqrt(q))) + 1, located by a float guess and fixed up
  // with exact comparisons
  double x = to_double(u) / (to_double(M) * std::sqrt(to_double(q)));
  long long m = static_cast<long long>(std::floor(x)) + 1;
  // want (m-1) M sqrt(q) <= u < m M sqrt(q)
  while (cmp_vs_sqrt(u, Rational(m - 1) * M, q) < 0) --m;
  while (cmp_vs_sqrt(u, Rational(m) * M, q) >= 0) ++m;
  return static_cast<int>(m);
}

std::vector<Slab> slab_decompose(const Cube& c, const Rational& N1, const Rational& N2, int r0,
                                 std::size_t budget) {
  if (N1 < N2 || N2 < Rational(1))
    throw std::invalid_argument("slab_decompose: need N1 >= N2 >= 1");
  if (c.N != N2) throw std::invalid_argument("slab_decompose: cube side must equal N2");
  auto xi0 = c.center();
  bool degenerate = true;
  for (const auto& v : xi0)
    if (v != Rational(0)) degenerate = false;
  if (degenerate) throw std::invalid_argument("slab_decompose: cube centered at the origin");

  const Rational M = slab_thickness(N1, N2);
  std::map<int, Slab> by_index;
  for (auto& f : enumerate_cube(c, r0, budget)) {
    int m = slab_index(f, xi0, M);
    auto& slab = by_index[m];
    slab.m = m;
    slab.M = M;
    slab.points.push_back(std::move(f));
  }
  std::vector<Slab> out;
  out.reserve(by_index.size());
  for (auto& [m, slab] : by_index) out.push_back(std::move(slab));
  return out;
}

std::map<LevelKey, std::vector<Frequency>> level_sets(const std::vector<Frequency>& freqs,
                                                      bool keep_torus, int r1) {
  std::map<LevelKey, std::vector<Frequency>> out;
  for (const auto& f : freqs) {
    LevelKey key;
    key.l = f.norm2();
    if (keep_torus && r1 > 0) {
      if (static_cast<int>(f.coords.size()) < r1)
        throw std::invalid_argument("level_sets: r1 exceeds coordinate count");
      key.mu.assign(f.coords.end() - r1, f.coords.end());
    }
    out[key].push_back(f);
  }
  return out;
}

long long circle_count(const Rational& b1, const Rational& b2, const Rational& N, long long A) {
  if (A < 0) throw std::invalid_argument("circle_count: A must be >= 0");
  if (N <= Rational(0)) throw std::invalid_argument("circle_count: N must be > 0");
  long long count = 0;
  long long lo = rceil(b1), hi = rfloor(b1 + N);
  for (long long n1 = lo; n1 <= hi; ++n1) {
    long long rem = A - n1 * n1;
    if (rem < 0) continue;
    long long s = isqrt_ll(rem);
    if (s * s != rem) continue;
    for (long long n2 : {s, -s}) {
      Rational v(n2);
      if (v >= b2 && v <= b2 + N) ++count;
      if (s == 0) break;  // count the double root once
    }
  }
  return count;
}

MaxCircleCount max_circle_count_origin(long long N, long long A_lo, long long A_hi) {
  if (N < 0 || (N + 1) * (N + 1) > static_cast<long long>(kDefaultPointBudget))
    throw BudgetError("max_circle_count_origin: box too large");
  std::map<long long, long long> buckets;
  for (long long a = 0; a <= N; ++a)
    for (long long b = 0; b <= N; ++b) {
      long long A = a * a + b * b;
      if (A >= A_lo && A <= A_hi) ++buckets[A];
    }
  MaxCircleCount best;
  for (auto& [A, cnt] : buckets) {
    if (cnt > best.max_count) {
      best.max_count = cnt;
      best.arg_A = A;
    }
  }
  return best;
}

MaxCircleCount max_circle_count_all_offsets(long long N, long long A_lo, long long A_hi) {
  MaxCircleCount best;
  for (long long A = A_lo + 1; A <= A_hi; ++A) {
    // all integer points on the circle of radius sqrt(A)
    std::vector<std::pair<long long, long long>> pts;
    long long s = isqrt_ll(A);
    for (long long x = -s; x <= s; ++x) {
      long long rem = A - x * x;
      long long y = isqrt_ll(rem);
      if (y * y != rem) continue;
      pts.push_back({x, y});
      if (y > 0) pts.push_back({x, -y});
    }
    // an optimal box may be anchored with its lower-left corner at a point
    for (auto& [bx, by] : pts) {
      long long cnt_rowmax = 0;
      for (auto& [px, py] : pts)
        if (px >= bx && px <= bx + N) ++cnt_rowmax;
      if (cnt_rowmax <= best.max_count) continue;  // even ignoring y it cannot win
      for (auto& [cx, cy] : pts) {
        long long cnt = 0;
        for (auto& [px, py] : pts)
          if (px >= bx && px <= bx + N && py >= cy && py <= cy + N) ++cnt;
        if (cnt > best.max_count) best = {cnt, A, bx, cy};
      }
    }
  }
  return best;
}

std::vector<Frequency> window_enumerate(const SpectralWindow& w, const ManifoldSpec& spec,
                                        std::size_t budget) {
  if (w.N < Rational(1)) throw std::invalid_argument("window_enumerate: N must be >= 1");
  const int r = spec.r(), r0 = spec.r0();
  long long hi = rfloor(2 * w.N);
  std::size_t total = 1;
  for (int i = 0; i < r; ++i) {
    std::size_t count = static_cast<std::size_t>(i < r0 ? hi + 1 : 2 * hi + 1);
    if (count > budget / std::max<std::size_t>(total, 1))
      throw BudgetError("window_enumerate: point budget exceeded");
    total *= count;
  }
  Rational lo2 = w.N * w.N, hi2 = 4 * w.N * w.N;
  std::vector<Frequency> out;
  Frequency cur;
  cur.coords.assign(r, 0);
  for (int i = 0; i < r; ++i) cur.coords[i] = i < r0 ? 0 : -hi;
  for (std::size_t flat = 0; flat < total; ++flat) {
    Rational n2(cur.norm2());
    if (n2 >= lo2 && n2 <= hi2) out.push_back(cur);
    for (int i = r; i-- > 0;) {
      if (++cur.coords[i] <= hi) break;
      cur.coords[i] = i < r0 ? 0 : -hi;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string frequencies_to_csv(const std::vector<Frequency>& freqs) {
  std::string out;
  if (freqs.empty()) return "norm2\n";
  const std::size_t r = freqs[0].coords.size();
  for (std::size_t i = 0; i < r; ++i) out += "n" + std::to_string(i + 1) + ",";
  out += "norm2\n";
  for (const auto& f : freqs) {
    for (long long c : f.coords) out += std::to_string(c) + ",";
    out += std::to_string(f.norm2()) + "\n";
  }
  return out;
}

}  // namespace harmlab::lattice
