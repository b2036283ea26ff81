#include "harmlab/regularity.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace harmlab::regularity {

Rational critical_regularity(const ManifoldSpec& spec, int k) {
  if (k < 1) throw std::invalid_argument("critical_regularity: k must be >= 1");
  return Rational(spec.dim(), 2) - Rational(1, k);
}

Rational sogge_delta(const Rational& p, int dim) {
  if (dim < 2) throw std::invalid_argument("sogge_delta: dim must be >= 2");
  if (p < Rational(2)) throw std::invalid_argument("sogge_delta: p must be >= 2");
  Rational junction(2 * (dim + 1), dim - 1);
  if (p >= junction) return Rational(dim - 1, 2) - Rational(dim) / p;
  return Rational(dim - 1, 2) * (Rational(1, 2) - Rational(1) / p);
}

std::optional<Rational> gamma_exponent(const ManifoldSpec& spec, const Rational& p,
                                       const Rational& eps) {
  if (p < Rational(2)) throw std::invalid_argument("gamma_exponent: p must be >= 2");
  const int r = spec.r(), r0 = spec.r0(), r1 = spec.r1();
  std::optional<Rational> best;
  auto offer = [&](const Rational& v) {
    if (!best || v < *best) best = v;
  };
  if (p > Rational(2) && r1 == 0) offer(Rational(r, 2) - Rational(2) / p);
  if (p > Rational(2 * (r + 2), r)) offer(Rational(r, 2) - Rational(2 + r1) / p);
  if (r0 >= 2) offer(Rational(r, 2) - Rational(2 + r1) / p + eps);
  if (p == Rational(2) && r0 <= 1) offer(Rational(0));
  return best;
}

EstimateConstant mls_constant(const ManifoldSpec& spec, int k, const MlsParams& params) {
  if (k < 1) throw std::invalid_argument("mls_constant: k must be >= 1");
  const int r = spec.r();
  if (r < 2) throw std::invalid_argument("mls_constant: no case covers r = 1");
  const Rational d(spec.dim());
  const Rational r2(spec.r2()), r3(spec.r3());
  const Rational delta = params.delta(), eta = params.eta, eps = params.eps;

  EstimateConstant c;
  c.delta_used = delta;
  c.eta_used = eta;
  c.eps_used = eps;

  if (k == 1) {
    if (r >= 3) {  // case (i)
      c.base_exponents[2] = d / 2 - 1 + r2 / 4;
      if (r3 != Rational(0)) c.log_powers[2] = r3 / 2;
      c.gain_exponent = delta;
      c.gain_numerator_index = 2;
    } else if (spec.r0() == 2 && spec.r1() == 0 && spec.sphere_dims[0] >= 4 &&
               spec.sphere_dims[1] >= 4) {  // case (iii)
      c.base_exponents[2] = d / 2 - 1;
      c.gain_exponent = delta;
      c.gain_numerator_index = 2;
    } else {  // case (ii), r = 2
      c.base_exponents[2] = d / 2 - 1 + r2 / 4 + eps;
      if (r3 != Rational(0)) c.log_powers[2] = r3 / 2;
      c.epsilon_slack = true;
    }
    return c;
  }

  // k >= 2: cases (iv) and (v)
  const bool with_eps = (r == 2);
  c.base_exponents[2] =
      d / 2 - 1 + r2 / 4 + r3 * eta + delta * (k - 1) + (with_eps ? eps : Rational(0));
  c.base_exponents[3] = d / 2 - r2 / 4 - r3 * eta - delta - (with_eps ? eps : Rational(0));
  for (int j = 4; j <= k + 1; ++j) c.base_exponents[j] = d / 2 - delta;
  c.gain_exponent = delta;
  c.gain_numerator_index = k + 1;
  c.epsilon_slack = with_eps;
  return c;
}

EstimateConstant mljspe_constant(const ManifoldSpec& spec, int k, const Rational& eta) {
  if (!spec.sphere_only() || spec.r0() < 1)
    throw std::invalid_argument("mljspe_constant: spec must be a product of spheres");
  if (k < 1) throw std::invalid_argument("mljspe_constant: k must be >= 1");
  const Rational d(spec.dim());
  const Rational r(spec.r()), r2(spec.r2()), r3(spec.r3());

  EstimateConstant c;
  c.eta_used = eta;
  if (k == 1) {
    c.base_exponents[2] = (d - 2 * r) / 2 + r2 / 4;
    if (r3 != Rational(0)) c.log_powers[2] = r3 / 2;
    return c;
  }
  if (eta <= Rational(0)) throw std::invalid_argument("mljspe_constant: eta must be > 0 for k >= 2");
  c.base_exponents[2] = (d - 2 * r) / 2 + r2 / 4 + r3 * eta;
  c.base_exponents[3] = (d - r) / 2 - r2 / 4 - r3 * eta;
  for (int j = 4; j <= k + 1; ++j) c.base_exponents[j] = (d - r) / 2;
  return c;
}

std::string to_string(Strictness s) { return s == Strictness::AtLeast ? ">=" : ">"; }
std::string to_string(Regime r) {
  switch (r) {
    case Regime::Critical: return "critical";
    case Regime::AlmostCritical: return "almost-critical";
    default: return "subcritical";
  }
}

namespace {

struct Rule {
  std::function<bool(const ManifoldSpec&, int)> applies;
  std::function<Rational(const ManifoldSpec&, int)> bound;
  Strictness strict;
  const char* source;
};

Rational s_c(const ManifoldSpec& m, int k) { return critical_regularity(m, k); }
Rational half_d_minus(const ManifoldSpec& m, const Rational& x) {
  return Rational(m.dim(), 2) - x;
}

// Threshold rule table, most specific first. The source tag names the
// matching condition and bound so table exports are self-describing.
const std::vector<Rule>& rule_table() {
  static const std::vector<Rule> rules = {
      // --- critical rows (s >= s_c)
      {[](const ManifoldSpec& m, int k) { return m.r2() <= 1 && k >= 2; },
       [](const ManifoldSpec& m, int k) { return s_c(m, k); }, Strictness::AtLeast,
       "critical: r2<=1, k>=2"},
      {[](const ManifoldSpec& m, int k) {
         return m.r0() == 2 && m.r1() == 0 && m.sphere_dims[0] >= 4 && m.sphere_dims[1] >= 4;
       },
       [](const ManifoldSpec& m, int k) { return s_c(m, k); }, Strictness::AtLeast,
       "critical: two spheres of dim >= 4"},
      {[](const ManifoldSpec& m, int k) { return m.r2() == 2 && k >= 3; },
       [](const ManifoldSpec& m, int k) { return s_c(m, k); }, Strictness::AtLeast,
       "critical: r2=2, k>=3"},
      {[](const ManifoldSpec& m, int k) { return m.r2() == 3 && k >= 5; },
       [](const ManifoldSpec& m, int k) { return s_c(m, k); }, Strictness::AtLeast,
       "critical: r2=3, k>=5"},
      {[](const ManifoldSpec& m, int k) {
         return m.sphere_dims == std::vector<int>{3} && m.r1() >= 2 && k == 1;
       },
       [](const ManifoldSpec& m, int k) { return s_c(m, k); }, Strictness::AtLeast,
       "critical: S3 x T^r1, r1>=2, k=1"},
      {[](const ManifoldSpec& m, int k) { return m.r2() == 0 && m.r3() == 0 && m.r() >= 3 && k == 1; },
       [](const ManifoldSpec& m, int k) { return s_c(m, k); }, Strictness::AtLeast,
       "critical: r2=r3=0, r>=3, k=1"},
      // --- almost-critical rows (s > s_c)
      {[](const ManifoldSpec& m, int k) { return m.r2() == 2 && (m.r() == 2 || m.r() == 3) && k == 2; },
       [](const ManifoldSpec& m, int k) { return s_c(m, k); }, Strictness::StrictlyAbove,
       "almost-critical: r2=2, r=2..3, k=2"},
      {[](const ManifoldSpec& m, int k) { return m.r2() == 0 && k >= 1; },
       [](const ManifoldSpec& m, int k) { return s_c(m, k); }, Strictness::StrictlyAbove,
       "almost-critical: r2=0, k>=1"},
      {[](const ManifoldSpec& m, int k) { return m.r2() == 2 && k >= 2; },
       [](const ManifoldSpec& m, int k) { return s_c(m, k); }, Strictness::StrictlyAbove,
       "almost-critical: r2=2, k>=2"},
      {[](const ManifoldSpec& m, int k) { return m.r2() == 3 && m.r() >= 4 && k == 2; },
       [](const ManifoldSpec& m, int k) { return s_c(m, k); }, Strictness::StrictlyAbove,
       "almost-critical: r2=3, r>=4, k=2"},
      {[](const ManifoldSpec& m, int k) { return m.r2() == 3 && k >= 3; },
       [](const ManifoldSpec& m, int k) { return s_c(m, k); }, Strictness::StrictlyAbove,
       "almost-critical: r2=3, k>=3"},
      {[](const ManifoldSpec& m, int k) { return m.r2() >= 4 && k >= 2; },
       [](const ManifoldSpec& m, int k) { return s_c(m, k); }, Strictness::StrictlyAbove,
       "almost-critical: r2>=4, k>=2"},
      // --- sub-critical rows
      {[](const ManifoldSpec& m, int k) { return m.r2() == 1 && m.r() <= 11 && k == 1; },
       [](const ManifoldSpec& m, int) { return half_d_minus(m, {3, 4}); },
       Strictness::StrictlyAbove, "subcritical d/2-3/4: r2=1, r<=11, k=1"},
      {[](const ManifoldSpec& m, int k) { return m.r2() == 1 && m.r() >= 12 && k == 1; },
       [](const ManifoldSpec& m, int) { return half_d_minus(m, {m.r(), m.r() + 4}); },
       Strictness::StrictlyAbove, "subcritical d/2-r/(r+4): r2=1, r>=12, k=1"},
      {[](const ManifoldSpec& m, int k) { return m.r2() == 2 && m.r() <= 4 && k == 1; },
       [](const ManifoldSpec& m, int) { return half_d_minus(m, {1, 2}); }, Strictness::AtLeast,
       "subcritical d/2-1/2: r2=2, r<=4, k=1"},
      {[](const ManifoldSpec& m, int k) { return m.r2() == 2 && m.r() >= 5 && k == 1; },
       [](const ManifoldSpec& m, int) { return half_d_minus(m, {m.r(), m.r() + 4}); },
       Strictness::AtLeast, "subcritical d/2-r/(r+4): r2=2, r>=5, k=1"},
      {[](const ManifoldSpec& m, int k) { return m.r2() == 3 && m.r() <= 4 && k == 1; },
       [](const ManifoldSpec& m, int) { return half_d_minus(m, {1, 2}); },
       Strictness::StrictlyAbove, "subcritical d/2-1/2: r2=3, r<=4, k=1"},
      {[](const ManifoldSpec& m, int k) { return m.r2() == 3 && m.r() >= 5 && k == 1; },
       [](const ManifoldSpec& m, int) { return half_d_minus(m, {m.r(), m.r() + 4}); },
       Strictness::StrictlyAbove, "subcritical d/2-r/(r+4): r2=3, r>=5, k=1"},
      {[](const ManifoldSpec& m, int k) {
         return m.sphere_dims == std::vector<int>{2, 2, 2} && m.r1() == 0 && k == 2;
       },
       [](const ManifoldSpec& m, int) { return half_d_minus(m, {3, 7}); },
       Strictness::StrictlyAbove, "subcritical d/2-3/7: S2 x S2 x S2, k=2"},
      {[](const ManifoldSpec& m, int k) { return m.r2() >= 4 && k == 1; },
       [](const ManifoldSpec& m, int) { return half_d_minus(m, {m.r(), m.r() + 4}); },
       Strictness::StrictlyAbove, "subcritical d/2-r/(r+4): r2>=4, k=1"},
      // --- general fallback on any compact manifold
      {[](const ManifoldSpec&, int) { return true; },
       [](const ManifoldSpec& m, int k) { return half_d_minus(m, {1, 2 * k}); },
       Strictness::StrictlyAbove, "general compact bound: s > d/2-1/(2k)"},
  };
  return rules;
}

}  // namespace

std::vector<ThresholdResult> threshold_candidates(const ManifoldSpec& spec, int k) {
  if (k < 1) throw std::invalid_argument("threshold_candidates: k must be >= 1");
  std::vector<ThresholdResult> out;
  const Rational sc = s_c(spec, k);
  for (const Rule& rule : rule_table()) {
    if (!rule.applies(spec, k)) continue;
    Rational b = rule.bound(spec, k);
    Regime regime = Regime::Subcritical;
    if (b == sc) regime = rule.strict == Strictness::AtLeast ? Regime::Critical : Regime::AlmostCritical;
    out.push_back({regime, b, rule.strict, rule.source});
  }
  return out;
}

ThresholdResult lwp_threshold(const ManifoldSpec& spec, int k) {
  if (spec.r() < 2) throw std::invalid_argument("lwp_threshold: requires r >= 2");
  auto cands = threshold_candidates(spec, k);
  const ThresholdResult* best = nullptr;
  for (const auto& c : cands) {
    if (!best || c.s_bound < best->s_bound ||
        (c.s_bound == best->s_bound && c.strict == Strictness::AtLeast &&
         best->strict == Strictness::StrictlyAbove))
      best = &c;
  }
  return *best;
}

std::string threshold_table_csv(const ManifoldSpec& spec, int k_min, int k_max) {
  std::ostringstream os;
  os << "r2,r3,r,k,regime,s_bound,strict,source\n";
  for (int k = k_min; k <= k_max; ++k) {
    ThresholdResult t = lwp_threshold(spec, k);
    os << spec.r2() << "," << spec.r3() << "," << spec.r() << "," << k << ","
       << to_string(t.regime) << "," << harmlab::to_string(t.s_bound) << ","
       << to_string(t.strict) << "," << t.source << "\n";
  }
  return os.str();
}

std::vector<StrichartzTriple> admissible_triples(const ManifoldSpec& spec, const Rational& p,
                                                 const Rational& eps) {
  if (p < Rational(2)) return {};
  std::vector<StrichartzTriple> out;
  const Rational d(spec.dim());
  const int r = spec.r();

  // (1) trivial q = 2 triple
  out.push_back({p, Rational(2), Rational(0), 1});
  // (2) scaling line 2/p + d/q = d/2, s = 1/p
  if (d * p > Rational(4)) {
    Rational q = 2 * d * p / (d * p - 4);
    out.push_back({p, q, Rational(1) / p, 2});
  }
  // (3) p = q with gamma(p) + sum of Sogge exponents
  if (auto g = gamma_exponent(spec, p, eps)) {
    Rational s = *g;
    for (int di : spec.sphere_dims) s += sogge_delta(p, di);
    out.push_back({p, p, s, 3});
  }
  // (4) p = q >= 2 + 8/r scale-invariant range
  if (p >= Rational(2) + Rational(8, r)) out.push_back({p, p, d / 2 - (d + 2) / p, 4});
  // (5) odd sphere-only improvement
  if (spec.r1() == 0 && spec.r0() >= 1 && spec.all_sphere_dims_odd()) {
    auto dp = spec.d_prime();
    if (dp && p >= Rational(2) + Rational(4 * (*dp + 1), *dp * r))
      out.push_back({p, p, d / 2 - (d + 2) / p, 5});
  }
  return out;
}

std::optional<LinearThresholdResult> optimize_linear_threshold(const ManifoldSpec& spec, int k,
                                                               const std::vector<Rational>& p_grid,
                                                               const Rational& eps) {
  const Rational d(spec.dim());
  std::optional<LinearThresholdResult> best;
  for (const Rational& p : p_grid) {
    if (p <= Rational(2 * k)) continue;  // Prop: p0 > 2k
    for (const StrichartzTriple& t : admissible_triples(spec, p, eps)) {
      Rational threshold = t.s + d / t.q;
      if (!best || threshold < best->threshold ||
          (threshold == best->threshold && p < best->p0)) {
        best = LinearThresholdResult{t.p, t.q, t.s, threshold, t.case_id};
      }
    }
  }
  return best;
}

std::vector<Rational> default_p_grid(const ManifoldSpec& spec, int k, const Rational& step,
                                     int count) {
  std::vector<Rational> grid;
  const Rational base(2 * k);
  for (int j = 1; j <= count; ++j) grid.push_back(base + step * j);
  const int r = spec.r();
  grid.push_back(Rational(2) + Rational(8, r));
  grid.push_back(Rational(2 * (r + 2), r));
  for (int di : spec.sphere_dims) grid.push_back(Rational(2 * (di + 1), di - 1));
  if (auto dp = spec.d_prime()) grid.push_back(Rational(2) + Rational(4 * (*dp + 1), *dp * r));
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  std::erase_if(grid, [&](const Rational& p) { return p <= base || p < Rational(2); });
  return grid;
}

}  // namespace harmlab::regularity
