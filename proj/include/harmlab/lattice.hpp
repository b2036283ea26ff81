#pragma once

// Frequency-lattice combinatorics: shifted cubes J_{b,N}, slab
// decompositions K_m, level sets of (|xi|^2, xi_1), spectral annuli, and
// lattice-point counting on circles. Cube offsets are exact rationals and
// all membership tests are exact integer arithmetic (slab boundaries
// compare a rational against a rational multiple of sqrt(|xi0|^2) via
// sign-aware squaring in 128-bit).

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "harmlab/manifold.hpp"
#include "harmlab/rational.hpp"

namespace harmlab::lattice {

inline constexpr std::size_t kDefaultPointBudget = 10'000'000;

struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Frequency {
  std::vector<long long> coords;

  long long norm2() const {
    long long s = 0;
    for (long long c : coords) s += c * c;
    return s;
  }
  auto operator<=>(const Frequency&) const = default;
};

struct Cube {
  std::vector<Rational> b;  // offset, one per coordinate
  Rational N;               // side length > 0

  int r() const { return static_cast<int>(b.size()); }
  // closed box: b_i <= n_i <= b_i + N
  bool contains(const Frequency& f) const;
  std::vector<Rational> center() const;  // b + N/2
};

// All lattice points of the cube with n_i >= 0 enforced on the first r0
// coordinates; lexicographically sorted.
std::vector<Frequency> enumerate_cube(const Cube& c, int r0,
                                      std::size_t budget = kDefaultPointBudget);

struct Slab {
  int m = 0;       // slab index: <xi, xi0>/|xi0| in [(m-1)M, mM)
  Rational M;      // thickness max{N2^2/N1, 1}
  std::vector<Frequency> points;
};

// Slab thickness for the (N1, N2) interaction.
Rational slab_thickness(const Rational& N1, const Rational& N2);

// Exact slab index of a point with respect to center xi0 and thickness M:
// the unique m with <xi,xi0>/|xi0| in [(m-1)M, mM).
int slab_index(const Frequency& f, const std::vector<Rational>& xi0, const Rational& M);

// Decomposes the cube of side N2 into slabs orthogonal to its center
// direction; only nonempty slabs are returned, ordered by index. Throws
// std::invalid_argument when the cube center is the origin.
std::vector<Slab> slab_decompose(const Cube& c, const Rational& N1, const Rational& N2, int r0 = 0,
                                 std::size_t budget = kDefaultPointBudget);

struct LevelKey {
  long long l = 0;                // |xi|^2
  std::vector<long long> mu;     // xi_1 (empty when keep_torus is false)
  auto operator<=>(const LevelKey&) const = default;
};

// Partition by |xi|^2, and additionally by the torus component xi_1 (the
// last r1 coordinates) when keep_torus is set.
std::map<LevelKey, std::vector<Frequency>> level_sets(const std::vector<Frequency>& freqs,
                                                      bool keep_torus, int r1 = 0);

// Exact count of integer points (n1, n2) in [b1,b1+N] x [b2,b2+N] with
// n1^2 + n2^2 = A.
long long circle_count(const Rational& b1, const Rational& b2, const Rational& N, long long A);

struct MaxCircleCount {
  long long max_count = 0;
  long long arg_A = 0;
  long long arg_b1 = 0, arg_b2 = 0;  // meaningful for the exhaustive strategy
};

// Strategy b = 0: bucket the points of [0,N]^2 by their squared norm and
// take the largest bucket among A in [A_lo, A_hi].
MaxCircleCount max_circle_count_origin(long long N, long long A_lo, long long A_hi);

// Exhaustive strategy: for each A in (A_lo, A_hi], enumerate the circle
// points and maximize the count over every integer box of side N meeting
// the circle.
MaxCircleCount max_circle_count_all_offsets(long long N, long long A_lo, long long A_hi);

struct SpectralWindow {
  Rational N;  // |xi| in [N, 2N]
};

// All xi with N <= |xi| <= 2N, nonnegative in the first r0 coordinates.
std::vector<Frequency> window_enumerate(const SpectralWindow& w, const ManifoldSpec& spec,
                                        std::size_t budget = kDefaultPointBudget);

// One row per point: n_1,...,n_r,norm2
std::string frequencies_to_csv(const std::vector<Frequency>& freqs);

}  // namespace harmlab::lattice
