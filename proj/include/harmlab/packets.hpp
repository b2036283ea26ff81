#pragma once

// Spectrally localized wave packets on products of spheres and tori, the
// model propagator e^{it Delta} acting on them, and multilinear space-time
// L^2 norms computed exactly through the level-set expansion
//   ||prod_j e^{it Delta} f^j||^2_{L^2([0,2pi] x M)}
//     = sum_{(l,mu)} || sum_{combos in cell} prod_j f^j_{xi^j} ||^2_{L^2(M_0)},
// with the sphere-factor inner products evaluated by exact-degree
// quadrature (1-D latitude rules when a factor sees only zonal modes with
// a common pole or only highest-weight modes with a common axis).
//
// Phases use the model spectrum: the frequency of a degree-n factor mode
// is n itself, so |xi|^2 is an exact integer.

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "harmlab/estimate.hpp"
#include "harmlab/lattice.hpp"
#include "harmlab/manifold.hpp"
#include "harmlab/quadrature.hpp"
#include "harmlab/regularity.hpp"
#include "harmlab/specialfn.hpp"

namespace harmlab::packets {

using Complex = std::complex<double>;

struct JointMode {
  std::vector<specialfn::SphereMode> sphere_modes;  // one per sphere factor
  std::vector<long long> torus_freq;                // xi_1

  lattice::Frequency frequency() const;  // (n_1,...,n_{r0}, xi_1)
  long long norm2() const;               // exact |xi|^2
};

struct Packet {
  std::vector<std::pair<JointMode, Complex>> terms;
  std::optional<lattice::SpectralWindow> window;

  double l2_norm() const;  // sqrt(sum |coef|^2); modes are orthonormal
};

// Validates dimensions against the manifold, the window constraint
// N <= |xi| <= 2N, and pairwise orthogonality (duplicate spectra must
// carry quadrature-orthogonal sphere parts; exact duplicates are
// rejected).
Packet make_packet(const ManifoldSpec& spec, std::vector<std::pair<JointMode, Complex>> terms,
                   std::optional<lattice::SpectralWindow> window = {});

// e^{it Delta} applied to the packet, evaluated at a point:
// sum coef e^{-it|xi|^2} prod_i y_i(x0_i) e^{i<x1,xi_1>}
Complex evaluate_packet(const Packet& p, const ManifoldSpec& spec,
                        const std::vector<std::vector<double>>& x0,
                        std::span<const double> x1, double t);

// ||prod_j f^j||_{L^2(M_0)} for single modes, factorized over the sphere
// factors; exact-degree quadrature per factor.
double product_L2_factorized(const ManifoldSpec& spec, const std::vector<JointMode>& modes,
                             std::size_t node_budget = quadrature::kDefaultNodeBudget);

// ||prod_j e^{it Delta} f^j||_{L^2([0,2pi] x M)} by the exact level-set
// expansion. Throws BudgetError when the combo count or the quadrature
// grids exceed the budget.
double strichartz_lhs(const ManifoldSpec& spec, const std::vector<Packet>& packets,
                      std::size_t combo_budget = 2'000'000,
                      std::size_t node_budget = quadrature::kDefaultNodeBudget);

// |<u_A, u_B>| with u_X = (e^{itDelta} P_X f1) prod_{j>=2} e^{itDelta} f^j
// over L^2([0,2pi] x M) with probability measures; exactly zero when the
// level-set keys of the two sides are disjoint.
using RegionFilter = std::function<bool(const lattice::Frequency&)>;
double orthogonality_probe(const ManifoldSpec& spec, const std::vector<Packet>& packets,
                           const RegionFilter& region_a, const RegionFilter& region_b,
                           std::size_t combo_budget = 2'000'000,
                           std::size_t node_budget = quadrature::kDefaultNodeBudget);

// ||e^{itDelta} f||_{L^2(M)} by direct quadrature on a full product grid;
// the slow reference path used by unitarity checks.
double packet_l2_on_grid(const ManifoldSpec& spec, const Packet& p, double t,
                         std::size_t node_budget = quadrature::kDefaultNodeBudget);

struct ProductNormReport {
  double lhs = 0;
  double rhs_constant = 0;  // estimate constant at the N_j (times unit norms)
  double ratio = 0;         // lhs / rhs_constant
  std::vector<double> N;    // spectral parameters N_1 >= ... >= N_{k+1}
  std::string label;
  int trial = 0;
};

// Joint-projector sharpness runs: witnesses are exact joint eigenfunctions
// (the projector acts as the identity on them). degrees[j][i] is the
// degree of witness j at sphere factor i; kinds[i] picks the witness
// family per factor.
struct ProjectorPoint {
  std::vector<std::vector<int>> degrees;  // [j][i]
};
std::vector<ProductNormReport> projector_experiment(
    const ManifoldSpec& spec, int k, const std::vector<ProjectorPoint>& schedule,
    const std::vector<specialfn::Kind>& kinds, const Rational& eta = {1, 100},
    std::size_t node_budget = quadrature::kDefaultNodeBudget);

enum class PacketFamily { SingleMode, RandomWindow, SlabLocalized };
const char* family_name(PacketFamily f);

struct StrichartzOptions {
  int trials = 4;
  std::uint64_t seed = 1;
  std::size_t max_modes_per_packet = 48;
  std::size_t combo_budget = 2'000'000;
  std::size_t node_budget = quadrature::kDefaultNodeBudget;
  regularity::MlsParams params = {};
};

// Draws packets spectrally localized to the windows [N_j, 2N_j], computes
// the multilinear space-time norm, and reports the ratio against the
// right-hand-side constant: one report per schedule point, family and
// trial. Callers take the max over trials per point.
std::vector<ProductNormReport> strichartz_experiment(
    const ManifoldSpec& spec, int k, const std::vector<std::vector<double>>& window_schedule,
    const std::vector<PacketFamily>& families, const StrichartzOptions& opts = {});

}  // namespace harmlab::packets
