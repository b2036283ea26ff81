#pragma once

// Exact-degree integration on spheres, products, and periodic grids.
//
// The sphere rule is the iterated polar construction: S^d is peeled one
// latitude at a time, x = (t, sqrt(1-t^2) u) with u in S^{d-1}. The level
// weight (1-t^2)^{(m-2)/2} is folded into a Gauss-Legendre rule when the
// exponent is an integer (m even) and into a Chebyshev (second kind) rule
// when a half-integer power remains (m odd); the final circle gets a
// uniform grid. A rule built with exact_degree D integrates every
// polynomial of total degree <= D on the sphere exactly.
//
// All measures are normalized to probability measures; a Raw option
// restores the 2*pi-per-variable periodic measure where callers want it.

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace harmlab::quadrature {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr std::size_t kDefaultNodeBudget = 20'000'000;

struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// 1-D rule integrating f(t) against the normalized latitude weight
// (1-t^2)^{(m-2)/2} dt on [-1,1]; exact for deg f <= exact_degree.
struct LatitudeRule {
  std::vector<double> nodes;
  std::vector<double> weights;  // sum to 1
};
LatitudeRule latitude_rule(int sphere_dim, int exact_degree);

// Plain Gauss-Legendre on [-1,1] (weights sum to 2); exact through degree
// 2*order - 1.
void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights);

struct SphereQuadrature {
  int dim = 0;
  int exact_degree = 0;
  std::vector<std::vector<double>> nodes;  // each node has dim+1 coords, |x| = 1
  std::vector<double> weights;             // sum to 1

  std::size_t size() const { return nodes.size(); }
};

SphereQuadrature build_sphere_quadrature(int dim, int exact_degree,
                                         std::size_t node_budget = kDefaultNodeBudget);

struct PeriodicGrid {
  int num_points = 1;  // m >= 1; nodes 2*pi*j/m
  double node(int j) const { return 2.0 * kPi * j / num_points; }
};

enum class Measure { Probability, Raw };

template <typename F>
Complex integrate(const SphereQuadrature& q, F&& f) {
  Complex acc = 0.0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i)
    acc += q.weights[i] * Complex(f(std::span<const double>(q.nodes[i])));
  return acc;
}

template <typename F>
Complex integrate(const PeriodicGrid& g, F&& f, Measure measure = Measure::Probability) {
  Complex acc = 0.0;
  for (int j = 0; j < g.num_points; ++j) acc += Complex(f(g.node(j)));
  acc /= static_cast<double>(g.num_points);
  if (measure == Measure::Raw) acc *= 2.0 * kPi;
  return acc;
}

// --- products and iterated mixed norms ------------------------------------

struct ProductDomain {
  struct Factor {
    std::string id;
    std::variant<SphereQuadrature, PeriodicGrid> rule;
  };
  std::vector<Factor> factors;
  Measure measure = Measure::Probability;

  std::size_t factor_size(std::size_t i) const;
  std::size_t total_points() const;
  int factor_index(const std::string& id) const;
};

// View of one node of the product grid.
struct ProductPoint {
  const ProductDomain* domain = nullptr;
  std::span<const std::size_t> index;  // one entry per factor

  std::span<const double> sphere(std::size_t factor) const;
  double angle(std::size_t factor) const;
};

using Evaluator = std::function<Complex(const ProductPoint&)>;

Complex integrate(const ProductDomain& domain, const Evaluator& f,
                  std::size_t node_budget = kDefaultNodeBudget);

// Iterated norm L^{p_1}_{v_1} L^{p_2}_{v_2} ... computed innermost first;
// entries must cover the domain's factors exactly once. p = infinity takes
// a max over nodes (a lower bound for the true sup).
struct MixedNormSpec {
  struct Entry {
    std::string var;
    double p = 2.0;
  };
  std::vector<Entry> entries;  // innermost to outermost
};

double mixed_norm(const ProductDomain& domain, const MixedNormSpec& spec, const Evaluator& f,
                  std::size_t node_budget = kDefaultNodeBudget);

}  // namespace harmlab::quadrature
