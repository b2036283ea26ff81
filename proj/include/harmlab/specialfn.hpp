#pragma once

// Sphere eigenfunction witnesses: zonal (Gegenbauer kernel about a pole)
// and highest-weight ((x_i + i x_j)^n) spherical harmonics on S^d, with
// L^2 norm 1 under the normalized (probability) surface measure.
//
// Conventions: the model frequency of a degree-n mode is n itself; the true
// Laplace eigenvalue -n(n+d-1) is derived data. Default pole is e_1 and the
// default highest-weight axis is the (x_1, x_2) plane. Degrees are capped
// at 256; recurrences accumulate in long double.

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

namespace harmlab::specialfn {

using Complex = std::complex<double>;

inline constexpr int kMaxDegree = 256;

// Gegenbauer (ultraspherical) polynomial C_n^{(alpha)}(x) by the three-term
// recurrence C_n = (2x(n+alpha-1) C_{n-1} - (n+2alpha-2) C_{n-2}) / n.
double gegenbauer(double alpha, int n, double x);

enum class Kind { Zonal, HighestWeight };

struct SphereMode {
  int dim = 2;     // d >= 2
  int degree = 0;  // n >= 0
  Kind kind = Kind::Zonal;
  // zonal: axis[0] is the pole coordinate; highest weight: (axis[0], axis[1])
  // span the rotation plane. 0-based ambient coordinate indices in [0, d].
  int axis[2] = {0, 1};

  void validate() const;
  long long true_eigenvalue() const {  // -n(n+d-1)
    return -static_cast<long long>(degree) * (degree + dim - 1);
  }
};

struct SpherePoint {
  int dim = 2;
  std::vector<double> coords;  // unit vector in R^{d+1}

  SpherePoint(int d, std::vector<double> c);
};

// L^2(S^d)-normalizing constant for the mode (positive); computed once by
// exact-degree 1-D quadrature and cached by (dim, degree, kind).
double normalization_constant(const SphereMode& mode);

// Mode values; complex-valued for uniform packet algebra.
Complex zonal_harmonic(const SphereMode& mode, std::span<const double> p);
Complex highest_weight_harmonic(const SphereMode& mode, std::span<const double> p);
Complex evaluate(const SphereMode& mode, std::span<const double> p);

inline Complex evaluate(const SphereMode& mode, const SpherePoint& p) {
  return evaluate(mode, std::span<const double>(p.coords));
}

// Mean of (1 - t^2)^n over S^d in the product-of-latitudes form; the
// highest-weight normalization is 1/sqrt of the corresponding separable
// product. Exposed for tests.
double hw_power_mean(int dim, int n);

}  // namespace harmlab::specialfn
