#include "harmlab/specialfn.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>

#include "harmlab/quadrature.hpp"

namespace harmlab::specialfn {

double gegenbauer(double alpha, int n, double x) {
  if (n < 0) throw std::invalid_argument("gegenbauer: n must be >= 0");
  if (n > kMaxDegree) throw std::invalid_argument("gegenbauer: degree cap is 256");
  if (!(alpha > 0)) throw std::invalid_argument("gegenbauer: alpha must be > 0");
  if (n == 0) return 1.0;
  long double prev2 = 1.0L;              // C_0
  long double prev1 = 2.0L * alpha * x;  // C_1
  if (n == 1) return static_cast<double>(prev1);
  for (int m = 2; m <= n; ++m) {
    long double cur = (2.0L * x * (m + alpha - 1) * prev1 - (m + 2 * alpha - 2) * prev2) / m;
    prev2 = prev1;
    prev1 = cur;
  }
  return static_cast<double>(prev1);
}

void SphereMode::validate() const {
  if (dim < 2) throw std::invalid_argument("SphereMode: dim must be >= 2");
  if (degree < 0 || degree > kMaxDegree)
    throw std::invalid_argument("SphereMode: degree out of [0,256]");
  if (axis[0] < 0 || axis[0] > dim) throw std::invalid_argument("SphereMode: axis out of range");
  if (kind == Kind::HighestWeight) {
    if (axis[1] < 0 || axis[1] > dim || axis[1] == axis[0])
      throw std::invalid_argument("SphereMode: highest-weight axis must be two distinct coords");
  }
}

SpherePoint::SpherePoint(int d, std::vector<double> c) : dim(d), coords(std::move(c)) {
  if (static_cast<int>(coords.size()) != d + 1)
    throw std::invalid_argument("SpherePoint: wrong coordinate count");
  double n2 = 0;
  for (double v : coords) n2 += v * v;
  if (std::abs(n2 - 1.0) > 1e-12) throw std::invalid_argument("SpherePoint: not a unit vector");
}

double hw_power_mean(int dim, int n) {
  // E[(x_i^2 + x_j^2)^n] over S^d: peeling latitudes off the d-1 coordinates
  // outside the (i,j) plane factorizes the mean into 1-D integrals of
  // (1-t^2)^n against each level weight.
  double mean = 1.0;
  for (int m = 2; m <= dim; ++m) {
    auto rule = quadrature::latitude_rule(m, 2 * n);
    double acc = 0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      acc += rule.weights[i] * std::pow(1.0 - rule.nodes[i] * rule.nodes[i], n);
    mean *= acc;
  }
  return mean;
}

namespace {

struct CacheKey {
  int dim, degree, kind;
  auto operator<=>(const CacheKey&) const = default;
};

// write-once normalization cache; concurrent reads, idempotent fills
std::shared_mutex cache_mutex;
std::map<CacheKey, double> cache;

double compute_normalization(const SphereMode& mode) {
  if (mode.degree == 0) return 1.0;
  if (mode.kind == Kind::Zonal) {
    // || C_n^{(d-1)/2}(<p,pole>) ||_{L^2}^2 depends on the latitude alone
    double alpha = (mode.dim - 1) / 2.0;
    auto rule = quadrature::latitude_rule(mode.dim, 2 * mode.degree);
    double mass = 0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      double v = gegenbauer(alpha, mode.degree, rule.nodes[i]);
      mass += rule.weights[i] * v * v;
    }
    if (!(mass > 0)) throw std::runtime_error("normalization_constant: nonpositive mass");
    return 1.0 / std::sqrt(mass);
  }
  double mass = hw_power_mean(mode.dim, mode.degree);
  if (!(mass > 0)) throw std::runtime_error("normalization_constant: nonpositive mass");
  return 1.0 / std::sqrt(mass);
}

}  // namespace

double normalization_constant(const SphereMode& mode) {
  mode.validate();
  CacheKey key{mode.dim, mode.degree, static_cast<int>(mode.kind)};
  {
    std::shared_lock lock(cache_mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  double value = compute_normalization(mode);
  std::unique_lock lock(cache_mutex);
  return cache.emplace(key, value).first->second;
}

Complex zonal_harmonic(const SphereMode& mode, std::span<const double> p) {
  if (static_cast<int>(p.size()) != mode.dim + 1)
    throw std::invalid_argument("zonal_harmonic: point dimension mismatch");
  double t = p[mode.axis[0]];
  double alpha = (mode.dim - 1) / 2.0;
  return Complex(normalization_constant(mode) * gegenbauer(alpha, mode.degree, t), 0.0);
}

Complex highest_weight_harmonic(const SphereMode& mode, std::span<const double> p) {
  if (static_cast<int>(p.size()) != mode.dim + 1)
    throw std::invalid_argument("highest_weight_harmonic: point dimension mismatch");
  Complex z(p[mode.axis[0]], p[mode.axis[1]]);
  Complex zn = 1.0;
  for (int i = 0; i < mode.degree; ++i) zn *= z;
  return normalization_constant(mode) * zn;
}

Complex evaluate(const SphereMode& mode, std::span<const double> p) {
  return mode.kind == Kind::Zonal ? zonal_harmonic(mode, p) : highest_weight_harmonic(mode, p);
}

}  // namespace harmlab::specialfn
