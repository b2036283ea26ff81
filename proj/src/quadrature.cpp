#include "harmlab/quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace harmlab::quadrature {

void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  gsl_integration_glfixed_table* table =
      gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(order));
  nodes.resize(order);
  weights.resize(order);
  for (int i = 0; i < order; ++i) {
    double x, w;
    gsl_integration_glfixed_point(-1.0, 1.0, static_cast<std::size_t>(i), &x, &w, table);
    nodes[i] = x;
    weights[i] = w;
  }
  gsl_integration_glfixed_table_free(table);
}

LatitudeRule latitude_rule(int m, int exact_degree) {
  if (m < 2) throw std::invalid_argument("latitude_rule: sphere_dim must be >= 2");
  if (exact_degree < 0) throw std::invalid_argument("latitude_rule: negative degree");
  LatitudeRule rule;
  if (m % 2 == 0) {
    // integer weight exponent: fold (1-t^2)^{(m-2)/2} into Gauss-Legendre
    const int beta = (m - 2) / 2;
    const int poly_deg = exact_degree + 2 * beta;
    const int order = poly_deg / 2 + 1;  // 2*order-1 >= poly_deg
    gauss_legendre(order, rule.nodes, rule.weights);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      rule.weights[i] *= std::pow(1.0 - rule.nodes[i] * rule.nodes[i], beta);
  } else {
    // half-integer exponent: Chebyshev second kind carries sqrt(1-t^2),
    // the remaining (1-t^2)^{(m-3)/2} is folded in
    const int beta = (m - 3) / 2;
    const int poly_deg = exact_degree + 2 * beta;
    const int order = poly_deg / 2 + 1;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    for (int i = 1; i <= order; ++i) {
      double theta = kPi * i / (order + 1);
      double s = std::sin(theta);
      rule.nodes[i - 1] = std::cos(theta);
      rule.weights[i - 1] = (kPi / (order + 1)) * s * s * std::pow(s * s, beta);
    }
  }
  double total = std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0);
  for (double& w : rule.weights) w /= total;
  return rule;
}

SphereQuadrature build_sphere_quadrature(int dim, int exact_degree, std::size_t node_budget) {
  if (dim < 1) throw std::invalid_argument("build_sphere_quadrature: dim must be >= 1");
  if (exact_degree < 0) throw std::invalid_argument("build_sphere_quadrature: negative degree");

  SphereQuadrature q;
  q.dim = dim;
  q.exact_degree = exact_degree;

  if (dim == 1) {
    int m = exact_degree + 1;
    q.nodes.reserve(m);
    for (int j = 0; j < m; ++j) {
      double theta = 2.0 * kPi * j / m;
      q.nodes.push_back({std::cos(theta), std::sin(theta)});
      q.weights.push_back(1.0 / m);
    }
    return q;
  }

  // estimate node count before recursing
  std::size_t estimate = static_cast<std::size_t>(exact_degree) + 1;
  for (int m = 2; m <= dim; ++m) {
    int beta2 = (m % 2 == 0) ? (m - 2) : (m - 3);
    estimate *= static_cast<std::size_t>((exact_degree + beta2) / 2 + 1);
    if (estimate > node_budget)
      throw BudgetError("build_sphere_quadrature: node budget exceeded for dim " +
                        std::to_string(dim) + " degree " + std::to_string(exact_degree));
  }

  SphereQuadrature sub = build_sphere_quadrature(dim - 1, exact_degree, node_budget);
  LatitudeRule lat = latitude_rule(dim, exact_degree);

  q.nodes.reserve(lat.nodes.size() * sub.nodes.size());
  q.weights.reserve(lat.nodes.size() * sub.nodes.size());
  for (std::size_t i = 0; i < lat.nodes.size(); ++i) {
    double t = lat.nodes[i];
    double s = std::sqrt(std::max(0.0, 1.0 - t * t));
    for (std::size_t j = 0; j < sub.nodes.size(); ++j) {
      std::vector<double> x(dim + 1);
      x[0] = t;
      for (int c = 0; c <= dim - 1; ++c) x[c + 1] = s * sub.nodes[j][c];
      q.nodes.push_back(std::move(x));
      q.weights.push_back(lat.weights[i] * sub.weights[j]);
    }
  }
  return q;
}

std::size_t ProductDomain::factor_size(std::size_t i) const {
  const auto& f = factors.at(i).rule;
  if (std::holds_alternative<SphereQuadrature>(f)) return std::get<SphereQuadrature>(f).size();
  return static_cast<std::size_t>(std::get<PeriodicGrid>(f).num_points);
}

std::size_t ProductDomain::total_points() const {
  std::size_t n = 1;
  for (std::size_t i = 0; i < factors.size(); ++i) n *= factor_size(i);
  return n;
}

int ProductDomain::factor_index(const std::string& id) const {
  for (std::size_t i = 0; i < factors.size(); ++i)
    if (factors[i].id == id) return static_cast<int>(i);
  return -1;
}

std::span<const double> ProductPoint::sphere(std::size_t factor) const {
  const auto& q = std::get<SphereQuadrature>(domain->factors.at(factor).rule);
  return std::span<const double>(q.nodes[index[factor]]);
}

double ProductPoint::angle(std::size_t factor) const {
  const auto& g = std::get<PeriodicGrid>(domain->factors.at(factor).rule);
  return g.node(static_cast<int>(index[factor]));
}

namespace {

double node_weight(const ProductDomain& dom, std::size_t factor, std::size_t i) {
  const auto& f = dom.factors[factor].rule;
  if (std::holds_alternative<SphereQuadrature>(f))
    return std::get<SphereQuadrature>(f).weights[i];
  const auto& g = std::get<PeriodicGrid>(f);
  double w = 1.0 / g.num_points;
  if (dom.measure == Measure::Raw) w *= 2.0 * kPi;
  return w;
}

template <typename Fn>
void for_each_point(const ProductDomain& dom, Fn&& fn) {
  const std::size_t nf = dom.factors.size();
  std::vector<std::size_t> sizes(nf), idx(nf, 0);
  for (std::size_t i = 0; i < nf; ++i) sizes[i] = dom.factor_size(i);
  std::size_t total = dom.total_points();
  for (std::size_t flat = 0; flat < total; ++flat) {
    fn(flat, idx);
    // odometer increment, last factor fastest
    for (std::size_t i = nf; i-- > 0;) {
      if (++idx[i] < sizes[i]) break;
      idx[i] = 0;
    }
  }
}

}  // namespace

Complex integrate(const ProductDomain& domain, const Evaluator& f, std::size_t node_budget) {
  if (domain.total_points() > node_budget)
    throw BudgetError("integrate: product grid exceeds node budget");
  Complex acc = 0.0;
  for_each_point(domain, [&](std::size_t, const std::vector<std::size_t>& idx) {
    double w = 1.0;
    for (std::size_t i = 0; i < domain.factors.size(); ++i) w *= node_weight(domain, i, idx[i]);
    ProductPoint p{&domain, std::span<const std::size_t>(idx)};
    acc += w * f(p);
  });
  return acc;
}

double mixed_norm(const ProductDomain& domain, const MixedNormSpec& spec, const Evaluator& f,
                  std::size_t node_budget) {
  const std::size_t nf = domain.factors.size();
  if (spec.entries.size() != nf)
    throw std::invalid_argument("mixed_norm: spec must cover every domain factor exactly once");
  std::vector<int> order;  // factor index per reduction step, innermost first
  std::vector<bool> seen(nf, false);
  for (const auto& e : spec.entries) {
    int idx = domain.factor_index(e.var);
    if (idx < 0 || seen[idx])
      throw std::invalid_argument("mixed_norm: variable '" + e.var + "' unknown or repeated");
    seen[idx] = true;
    order.push_back(idx);
  }
  std::size_t total = domain.total_points();
  if (total > node_budget) throw BudgetError("mixed_norm: product grid exceeds node budget");

  // |f| on the full grid, row-major with the last factor fastest
  std::vector<double> values(total);
  for_each_point(domain, [&](std::size_t flat, const std::vector<std::size_t>& idx) {
    ProductPoint p{&domain, std::span<const std::size_t>(idx)};
    values[flat] = std::abs(f(p));
  });

  // reduce one variable at a time
  std::vector<std::size_t> sizes(nf);
  for (std::size_t i = 0; i < nf; ++i) sizes[i] = domain.factor_size(i);
  std::vector<int> alive(nf);
  std::iota(alive.begin(), alive.end(), 0);

  for (std::size_t step = 0; step < order.size(); ++step) {
    int target = order[step];
    auto pos_it = std::find(alive.begin(), alive.end(), target);
    std::size_t pos = static_cast<std::size_t>(pos_it - alive.begin());
    std::size_t n_t = sizes[target];

    std::size_t inner = 1;  // product of sizes after pos
    for (std::size_t i = pos + 1; i < alive.size(); ++i) inner *= sizes[alive[i]];
    std::size_t outer = values.size() / (inner * n_t);

    double p = spec.entries[step].p;
    if (!(p >= 1.0)) throw std::invalid_argument("mixed_norm: exponents must be >= 1");
    std::vector<double> reduced(outer * inner);
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t in = 0; in < inner; ++in) {
        double acc = 0.0, mx = 0.0;
        for (std::size_t t = 0; t < n_t; ++t) {
          double v = values[(o * n_t + t) * inner + in];
          if (std::isinf(p)) {
            mx = std::max(mx, v);
          } else {
            acc += node_weight(domain, static_cast<std::size_t>(target), t) * std::pow(v, p);
          }
        }
        reduced[o * inner + in] = std::isinf(p) ? mx : std::pow(acc, 1.0 / p);
      }
    }
    values = std::move(reduced);
    alive.erase(pos_it);
  }
  return values.at(0);
}

}  // namespace harmlab::quadrature
