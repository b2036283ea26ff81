#pragma once

// Product manifolds S^{d_1} x ... x S^{d_r0} x T^{r1} and the derived
// combinatorics every estimate in this project keys on.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace harmlab {

struct ManifoldSpec {
  std::vector<int> sphere_dims;  // each >= 2
  int torus_dim = 0;             // r1 >= 0

  ManifoldSpec() = default;
  ManifoldSpec(std::vector<int> spheres, int torus)
      : sphere_dims(std::move(spheres)), torus_dim(torus) {
    validate();
  }

  void validate() const {
    if (torus_dim < 0) throw std::invalid_argument("ManifoldSpec: torus_dim < 0");
    for (int d : sphere_dims)
      if (d < 2) throw std::invalid_argument("ManifoldSpec: sphere factor of dim < 2");
    if (r() < 1) throw std::invalid_argument("ManifoldSpec: needs at least one factor (r >= 1)");
  }

  int r0() const { return static_cast<int>(sphere_dims.size()); }
  int r1() const { return torus_dim; }
  int r() const { return r0() + r1(); }

  // total dimension d = sum d_i + r1
  int dim() const {
    int d = torus_dim;
    for (int di : sphere_dims) d += di;
    return d;
  }

  int count_dim(int target) const {
    int c = 0;
    for (int di : sphere_dims)
      if (di == target) ++c;
    return c;
  }
  int r2() const { return count_dim(2); }
  int r3() const { return count_dim(3); }

  // d' = min{d_i : d_i != 2}; min over the empty set is +infinity,
  // represented as an empty optional.
  std::optional<int> d_prime() const {
    std::optional<int> best;
    for (int di : sphere_dims)
      if (di != 2 && (!best || di < *best)) best = di;
    return best;
  }

  bool sphere_only() const { return torus_dim == 0; }
  bool all_sphere_dims_odd() const {
    for (int di : sphere_dims)
      if (di % 2 == 0) return false;
    return true;
  }

  std::string name() const {
    std::string s;
    for (int di : sphere_dims) {
      if (!s.empty()) s += "x";
      s += "S" + std::to_string(di);
    }
    if (torus_dim > 0) {
      if (!s.empty()) s += "x";
      s += "T" + std::to_string(torus_dim);
    }
    return s;
  }
};

}  // namespace harmlab
