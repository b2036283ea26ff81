#include "harmlab/packets.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>

namespace harmlab::packets {

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct ModeKey {
  int factor;
  int kind;
  int axis0, axis1;
  int degree;
  auto operator<=>(const ModeKey&) const = default;
};

ModeKey key_of(int factor, const specialfn::SphereMode& m) {
  return ModeKey{factor, static_cast<int>(m.kind), m.axis[0],
                 m.kind == specialfn::Kind::HighestWeight ? m.axis[1] : -1, m.degree};
}

// quadrature representation of one sphere factor inside the cell expansion
struct FactorGrid {
  bool latitude = false;              // zonal-only factor with a common pole
  quadrature::LatitudeRule lat;       // when latitude
  quadrature::SphereQuadrature full;  // otherwise
  std::size_t size() const { return latitude ? lat.nodes.size() : full.size(); }
  double weight(std::size_t i) const { return latitude ? lat.weights[i] : full.weights[i]; }
};

std::vector<Complex> mode_values(const FactorGrid& grid, const specialfn::SphereMode& mode) {
  std::vector<Complex> vals(grid.size());
  if (grid.latitude) {
    double alpha = (mode.dim - 1) / 2.0;
    double c = specialfn::normalization_constant(mode);
    for (std::size_t i = 0; i < vals.size(); ++i)
      vals[i] = Complex(c * specialfn::gegenbauer(alpha, mode.degree, grid.lat.nodes[i]), 0.0);
  } else {
    for (std::size_t i = 0; i < vals.size(); ++i)
      vals[i] = specialfn::evaluate(mode, std::span<const double>(grid.full.nodes[i]));
  }
  return vals;
}

void validate_mode_shape(const ManifoldSpec& spec, const JointMode& m) {
  if (static_cast<int>(m.sphere_modes.size()) != spec.r0())
    throw std::invalid_argument("packet: sphere mode count does not match manifold");
  for (int i = 0; i < spec.r0(); ++i) {
    m.sphere_modes[i].validate();
    if (m.sphere_modes[i].dim != spec.sphere_dims[i])
      throw std::invalid_argument("packet: sphere mode dimension mismatch");
  }
  if (static_cast<int>(m.torus_freq.size()) != spec.r1())
    throw std::invalid_argument("packet: torus frequency length mismatch");
}

bool same_mode(const JointMode& a, const JointMode& b) {
  if (a.torus_freq != b.torus_freq) return false;
  for (std::size_t i = 0; i < a.sphere_modes.size(); ++i) {
    const auto &ma = a.sphere_modes[i], &mb = b.sphere_modes[i];
    if (ma.degree != mb.degree || ma.kind != mb.kind || ma.axis[0] != mb.axis[0]) return false;
    if (ma.kind == specialfn::Kind::HighestWeight && ma.axis[1] != mb.axis[1]) return false;
  }
  return true;
}

// inner product of two joint modes over M_0 by per-factor quadrature
Complex joint_mode_inner(const ManifoldSpec& spec, const JointMode& a, const JointMode& b) {
  Complex prod = 1.0;
  for (int i = 0; i < spec.r0(); ++i) {
    const auto &ma = a.sphere_modes[i], &mb = b.sphere_modes[i];
    auto q = quadrature::build_sphere_quadrature(spec.sphere_dims[i], ma.degree + mb.degree);
    Complex ip = quadrature::integrate(q, [&](std::span<const double> x) {
      return specialfn::evaluate(ma, x) * std::conj(specialfn::evaluate(mb, x));
    });
    prod *= ip;
    if (std::abs(prod) < 1e-14) return 0.0;
  }
  return prod;
}

}  // namespace

lattice::Frequency JointMode::frequency() const {
  lattice::Frequency f;
  for (const auto& m : sphere_modes) f.coords.push_back(m.degree);
  for (long long v : torus_freq) f.coords.push_back(v);
  return f;
}

long long JointMode::norm2() const { return frequency().norm2(); }

double Packet::l2_norm() const {
  long double acc = 0;
  for (const auto& [m, c] : terms) acc += std::norm(c);
  return static_cast<double>(std::sqrt(acc));
}

Packet make_packet(const ManifoldSpec& spec, std::vector<std::pair<JointMode, Complex>> terms,
                   std::optional<lattice::SpectralWindow> window) {
  Packet p;
  p.window = window;
  std::map<std::vector<long long>, std::vector<std::size_t>> by_spectrum;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    validate_mode_shape(spec, terms[i].first);
    if (window) {
      Rational n2(terms[i].first.norm2());
      if (n2 < window->N * window->N || n2 > 4 * window->N * window->N)
        throw std::invalid_argument("packet: term outside the spectral window [N,2N]");
    }
    by_spectrum[terms[i].first.frequency().coords].push_back(i);
  }
  // same joint spectrum: modes must be distinct and quadrature-orthogonal
  for (const auto& [spectrum, idx] : by_spectrum) {
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = a + 1; b < idx.size(); ++b) {
        if (same_mode(terms[idx[a]].first, terms[idx[b]].first))
          throw std::invalid_argument("packet: duplicate mode");
        Complex ip = joint_mode_inner(spec, terms[idx[a]].first, terms[idx[b]].first);
        if (std::abs(ip) > 1e-10)
          throw std::invalid_argument("packet: non-orthogonal modes with equal joint spectrum");
      }
  }
  p.terms = std::move(terms);
  return p;
}

Complex evaluate_packet(const Packet& p, const ManifoldSpec& spec,
                        const std::vector<std::vector<double>>& x0, std::span<const double> x1,
                        double t) {
  if (static_cast<int>(x0.size()) != spec.r0() || static_cast<int>(x1.size()) != spec.r1())
    throw std::invalid_argument("evaluate_packet: point shape mismatch");
  Complex acc = 0;
  for (const auto& [mode, coef] : p.terms) {
    double phase = -t * static_cast<double>(mode.norm2());
    for (int i = 0; i < spec.r1(); ++i) phase += x1[i] * static_cast<double>(mode.torus_freq[i]);
    Complex v = std::polar(1.0, phase);
    for (int i = 0; i < spec.r0(); ++i)
      v *= specialfn::evaluate(mode.sphere_modes[i], std::span<const double>(x0[i]));
    acc += coef * v;
  }
  return acc;
}

double product_L2_factorized(const ManifoldSpec& spec, const std::vector<JointMode>& modes,
                             std::size_t node_budget) {
  if (modes.empty()) throw std::invalid_argument("product_L2_factorized: no modes");
  for (const auto& m : modes) validate_mode_shape(spec, m);
  double total = 1.0;
  for (int i = 0; i < spec.r0(); ++i) {
    int degree_sum = 0;
    bool all_zonal = true, all_hw = true;
    int pole = modes[0].sphere_modes[i].axis[0];
    int ax0 = modes[0].sphere_modes[i].axis[0], ax1 = modes[0].sphere_modes[i].axis[1];
    for (const auto& m : modes) {
      const auto& sm = m.sphere_modes[i];
      degree_sum += sm.degree;
      if (sm.kind != specialfn::Kind::Zonal || sm.axis[0] != pole) all_zonal = false;
      if (sm.kind != specialfn::Kind::HighestWeight || sm.axis[0] != ax0 || sm.axis[1] != ax1)
        all_hw = false;
    }
    const int d = spec.sphere_dims[i];
    double mass;  // integral of |prod_j y_j|^2 over this factor
    if (all_zonal) {
      auto rule = quadrature::latitude_rule(d, 2 * degree_sum);
      double alpha = (d - 1) / 2.0;
      long double acc = 0;
      for (std::size_t n = 0; n < rule.nodes.size(); ++n) {
        double prod = 1.0;
        for (const auto& m : modes) {
          const auto& sm = m.sphere_modes[i];
          prod *= specialfn::normalization_constant(sm) *
                  specialfn::gegenbauer(alpha, sm.degree, rule.nodes[n]);
        }
        acc += rule.weights[n] * prod * prod;
      }
      mass = static_cast<double>(acc);
    } else if (all_hw) {
      // |prod_j c_j z^{n_j}|^2 = (prod c_j^2) u^{sum n_j} with u the
      // squared axis-plane radius
      double c2 = 1.0;
      for (const auto& m : modes) {
        double c = specialfn::normalization_constant(m.sphere_modes[i]);
        c2 *= c * c;
      }
      mass = c2 * specialfn::hw_power_mean(d, degree_sum);
    } else {
      auto q = quadrature::build_sphere_quadrature(d, 2 * degree_sum, node_budget);
      long double acc = 0;
      for (std::size_t n = 0; n < q.size(); ++n) {
        Complex prod = 1.0;
        for (const auto& m : modes)
          prod *= specialfn::evaluate(m.sphere_modes[i], std::span<const double>(q.nodes[n]));
        acc += q.weights[n] * std::norm(prod);
      }
      mass = static_cast<double>(acc);
    }
    total *= std::sqrt(std::max(0.0, mass));
  }
  return total;  // torus factors are unimodular characters with unit L^2 mass
}

namespace {

// Shared cell machinery: per-factor grids sized for every mode in sight,
// cached per-mode value arrays, and the combo walk that accumulates
// sum_c A_c prod_i phi^i_c on the product grid for each (l, mu) cell.
struct CellEngine {
  const ManifoldSpec* spec;
  std::vector<FactorGrid> grids;
  std::map<ModeKey, std::vector<Complex>> cache;

  CellEngine(const ManifoldSpec& s, const std::vector<Packet>& packets, std::size_t node_budget)
      : spec(&s) {
    for (int i = 0; i < s.r0(); ++i) {
      bool all_zonal = true;
      int pole = -1;
      int max_deg = 0;
      for (const auto& p : packets) {
        int pk = 0;
        for (const auto& [m, c] : p.terms) {
          const auto& sm = m.sphere_modes[i];
          if (pole < 0) pole = sm.axis[0];
          if (sm.kind != specialfn::Kind::Zonal || sm.axis[0] != pole) all_zonal = false;
          pk = std::max(pk, sm.degree);
        }
        max_deg += pk;
      }
      FactorGrid g;
      g.latitude = all_zonal;
      if (all_zonal)
        g.lat = quadrature::latitude_rule(s.sphere_dims[i], 2 * max_deg);
      else
        g.full = quadrature::build_sphere_quadrature(s.sphere_dims[i], 2 * max_deg, node_budget);
      grids.push_back(std::move(g));
    }
  }

  const std::vector<Complex>& values(int factor, const specialfn::SphereMode& m) {
    ModeKey key = key_of(factor, m);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    return cache.emplace(key, mode_values(grids[factor], m)).first->second;
  }

  std::size_t tensor_size() const {
    std::size_t n = 1;
    for (const auto& g : grids) n *= g.size();
    return n;
  }

  // weighted sum over the product grid of fn(flat index)
  template <typename Fn>
  long double weighted_sum(Fn&& fn) const {
    const int r0 = static_cast<int>(grids.size());
    std::vector<std::size_t> gi(r0, 0);
    long double acc = 0;
    std::size_t total = tensor_size();
    for (std::size_t flat = 0; flat < total; ++flat) {
      double w = 1.0;
      for (int i = 0; i < r0; ++i) w *= grids[i].weight(gi[i]);
      acc += w * fn(flat);
      for (int i = r0; i-- > 0;) {
        if (++gi[i] < grids[i].size()) break;
        gi[i] = 0;
      }
    }
    return acc;
  }

  // accumulate every combo allowed by the filter into its (l, mu) cell
  std::map<lattice::LevelKey, std::vector<Complex>> accumulate_cells(
      const std::vector<Packet>& packets, std::size_t combo_budget, std::size_t node_budget,
      const RegionFilter* filter_first) {
    const int r0 = spec->r0(), r1 = spec->r1();
    const std::size_t tensor = tensor_size();
    std::map<lattice::LevelKey, std::vector<Complex>> cells;
    std::size_t total = 1;
    for (const auto& p : packets) {
      if (p.terms.empty()) return cells;
      if (p.terms.size() > combo_budget / total)
        throw quadrature::BudgetError("packets: combo budget exceeded");
      total *= p.terms.size();
    }
    if (tensor > 0 && total > node_budget / tensor)
      throw quadrature::BudgetError("packets: cell accumulation exceeds node budget");

    std::vector<std::size_t> idx(packets.size(), 0);
    std::vector<const std::vector<Complex>*> arrays(r0 * packets.size());
    for (std::size_t flat = 0; flat < total; ++flat) {
      if (!filter_first || (*filter_first)(packets[0].terms[idx[0]].first.frequency())) {
        Complex coef = 1.0;
        lattice::LevelKey key;
        key.mu.assign(r1, 0);
        for (std::size_t j = 0; j < packets.size(); ++j) {
          const auto& [mode, c] = packets[j].terms[idx[j]];
          coef *= c;
          key.l += mode.norm2();
          for (int i = 0; i < r1; ++i) key.mu[i] += mode.torus_freq[i];
        }
        auto& cell = cells[key];
        if (cell.empty()) cell.assign(tensor, Complex(0, 0));
        if (r0 == 0) {
          cell[0] += coef;
        } else {
          for (int i = 0; i < r0; ++i)
            for (std::size_t j = 0; j < packets.size(); ++j)
              arrays[i * packets.size() + j] =
                  &values(i, packets[j].terms[idx[j]].first.sphere_modes[i]);
          std::vector<std::size_t> gi(r0, 0);
          for (std::size_t cell_flat = 0; cell_flat < tensor; ++cell_flat) {
            Complex v = coef;
            for (int i = 0; i < r0; ++i) {
              Complex fv = 1.0;
              for (std::size_t j = 0; j < packets.size(); ++j)
                fv *= (*arrays[i * packets.size() + j])[gi[i]];
              v *= fv;
            }
            cell[cell_flat] += v;
            for (int i = r0; i-- > 0;) {
              if (++gi[i] < grids[i].size()) break;
              gi[i] = 0;
            }
          }
        }
      }
      for (std::size_t d = idx.size(); d-- > 0;) {
        if (++idx[d] < packets[d].terms.size()) break;
        idx[d] = 0;
      }
    }
    return cells;
  }
};

}  // namespace

double strichartz_lhs(const ManifoldSpec& spec, const std::vector<Packet>& packets,
                      std::size_t combo_budget, std::size_t node_budget) {
  if (packets.size() < 2) throw std::invalid_argument("strichartz_lhs: need k+1 >= 2 packets");
  for (const auto& p : packets)
    for (const auto& [m, c] : p.terms) validate_mode_shape(spec, m);

  CellEngine engine(spec, packets, node_budget);
  auto cells = engine.accumulate_cells(packets, combo_budget, node_budget, nullptr);
  long double mass = 0;
  for (auto& [key, cell] : cells)
    mass += engine.weighted_sum([&](std::size_t flat) { return std::norm(cell[flat]); });
  return static_cast<double>(std::sqrt(std::max<long double>(0, mass)));
}

double orthogonality_probe(const ManifoldSpec& spec, const std::vector<Packet>& packets,
                           const RegionFilter& region_a, const RegionFilter& region_b,
                           std::size_t combo_budget, std::size_t node_budget) {
  if (packets.size() < 2) throw std::invalid_argument("orthogonality_probe: need >= 2 packets");
  for (const auto& p : packets)
    for (const auto& [m, c] : p.terms) validate_mode_shape(spec, m);

  CellEngine engine(spec, packets, node_budget);
  auto cells_a = engine.accumulate_cells(packets, combo_budget, node_budget, &region_a);
  auto cells_b = engine.accumulate_cells(packets, combo_budget, node_budget, &region_b);
  Complex ip = 0;
  for (auto& [key, ta] : cells_a) {
    auto it = cells_b.find(key);
    if (it == cells_b.end()) continue;
    const auto& tb = it->second;
    long double re = engine.weighted_sum(
        [&](std::size_t flat) { return (ta[flat] * std::conj(tb[flat])).real(); });
    long double im = engine.weighted_sum(
        [&](std::size_t flat) { return (ta[flat] * std::conj(tb[flat])).imag(); });
    ip += Complex(static_cast<double>(re), static_cast<double>(im));
  }
  return std::abs(ip);
}

double packet_l2_on_grid(const ManifoldSpec& spec, const Packet& p, double t,
                         std::size_t node_budget) {
  int max_deg = 0;
  long long max_freq = 1;
  for (const auto& [m, c] : p.terms) {
    for (const auto& sm : m.sphere_modes) max_deg = std::max(max_deg, sm.degree);
    for (long long v : m.torus_freq) max_freq = std::max(max_freq, std::abs(v));
  }
  quadrature::ProductDomain dom;
  for (int i = 0; i < spec.r0(); ++i)
    dom.factors.push_back(
        {"s" + std::to_string(i),
         quadrature::build_sphere_quadrature(spec.sphere_dims[i], 2 * max_deg, node_budget)});
  for (int i = 0; i < spec.r1(); ++i)
    dom.factors.push_back(
        {"x" + std::to_string(i), quadrature::PeriodicGrid{static_cast<int>(2 * max_freq + 1)}});

  auto f = [&](const quadrature::ProductPoint& pt) {
    std::vector<std::vector<double>> x0;
    for (int i = 0; i < spec.r0(); ++i) {
      auto s = pt.sphere(i);
      x0.emplace_back(s.begin(), s.end());
    }
    std::vector<double> x1;
    for (int i = 0; i < spec.r1(); ++i) x1.push_back(pt.angle(spec.r0() + i));
    Complex v = evaluate_packet(p, spec, x0, x1, t);
    return Complex(std::norm(v), 0.0);
  };
  Complex mass = quadrature::integrate(dom, f, node_budget);
  return std::sqrt(std::max(0.0, mass.real()));
}

std::vector<ProductNormReport> projector_experiment(const ManifoldSpec& spec, int k,
                                                    const std::vector<ProjectorPoint>& schedule,
                                                    const std::vector<specialfn::Kind>& kinds,
                                                    const Rational& eta,
                                                    std::size_t node_budget) {
  if (!spec.sphere_only())
    throw std::invalid_argument("projector_experiment: spec must be a product of spheres");
  if (static_cast<int>(kinds.size()) != spec.r0())
    throw std::invalid_argument("projector_experiment: one witness kind per factor");
  EstimateConstant rhs = regularity::mljspe_constant(spec, k, eta);

  std::vector<ProductNormReport> reports;
  for (const auto& point : schedule) {
    if (static_cast<int>(point.degrees.size()) != k + 1)
      throw std::invalid_argument("projector_experiment: need k+1 witnesses per point");
    std::vector<JointMode> modes;
    std::vector<double> Ns;
    for (const auto& degs : point.degrees) {
      if (static_cast<int>(degs.size()) != spec.r0())
        throw std::invalid_argument("projector_experiment: degree vector length mismatch");
      JointMode m;
      double n2 = 0;
      for (int i = 0; i < spec.r0(); ++i) {
        specialfn::SphereMode sm;
        sm.dim = spec.sphere_dims[i];
        sm.degree = degs[i];
        sm.kind = kinds[i];
        sm.axis[0] = kinds[i] == specialfn::Kind::Zonal ? 0 : 0;
        sm.axis[1] = 1;
        m.sphere_modes.push_back(sm);
        n2 += static_cast<double>(degs[i]) * degs[i];
      }
      modes.push_back(std::move(m));
      Ns.push_back(std::max(1.0, std::sqrt(n2)));  // lambda lives in R^r_{>=1}
    }
    std::sort(Ns.begin(), Ns.end(), std::greater<>());
    ProductNormReport rep;
    rep.lhs = product_L2_factorized(spec, modes, node_budget);
    rep.rhs_constant = rhs.evaluate(Ns);
    rep.ratio = rep.lhs / rep.rhs_constant;
    rep.N = Ns;
    rep.label = "projector";
    reports.push_back(std::move(rep));
  }
  return reports;
}

const char* family_name(PacketFamily f) {
  switch (f) {
    case PacketFamily::SingleMode: return "single";
    case PacketFamily::RandomWindow: return "window";
    default: return "slab";
  }
}

namespace {

Packet draw_packet(const ManifoldSpec& spec, double N, PacketFamily family, double N2_side,
                   std::mt19937_64& rng, std::size_t max_modes) {
  long long Ni = std::llround(N);
  if (Ni < 1 || std::abs(N - static_cast<double>(Ni)) > 1e-9)
    throw std::invalid_argument("strichartz_experiment: window sizes must be integers >= 1");
  lattice::SpectralWindow w{Rational(Ni)};
  auto freqs = lattice::window_enumerate(w, spec);
  if (freqs.empty()) throw std::runtime_error("strichartz_experiment: empty window");

  std::vector<lattice::Frequency> chosen;
  if (family == PacketFamily::SingleMode) {
    std::uniform_int_distribution<std::size_t> pick(0, freqs.size() - 1);
    chosen.push_back(freqs[pick(rng)]);
  } else if (family == PacketFamily::RandomWindow) {
    std::vector<std::size_t> order(freqs.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::size_t count = std::min(max_modes, freqs.size());
    for (std::size_t i = 0; i < count; ++i) chosen.push_back(freqs[order[i]]);
    std::sort(chosen.begin(), chosen.end());
  } else {
    // slab-localized: a side-N2 cube anchored at a window point, sliced by
    // the slab decomposition; keep the largest slab, window-filtered
    std::uniform_int_distribution<std::size_t> pick(0, freqs.size() - 1);
    const auto& anchor = freqs[pick(rng)];
    lattice::Cube cube;
    for (long long c : anchor.coords) cube.b.push_back(Rational(c));
    long long side = std::max<long long>(1, std::llround(N2_side));
    cube.N = Rational(side);
    auto slabs = lattice::slab_decompose(cube, Rational(std::max(Ni, side)), Rational(side),
                                         spec.r0());
    const lattice::Slab* best = nullptr;
    for (const auto& s : slabs)
      if (!best || s.points.size() > best->points.size()) best = &s;
    Rational lo2 = w.N * w.N, hi2 = 4 * w.N * w.N;
    for (const auto& f : best->points) {
      Rational n2(f.norm2());
      if (n2 >= lo2 && n2 <= hi2) chosen.push_back(f);
      if (chosen.size() >= max_modes) break;
    }
    if (chosen.empty()) chosen.push_back(anchor);
  }

  std::vector<std::pair<JointMode, Complex>> terms;
  std::normal_distribution<double> gauss;
  for (const auto& f : chosen) {
    JointMode m;
    for (int i = 0; i < spec.r0(); ++i) {
      specialfn::SphereMode sm;
      sm.dim = spec.sphere_dims[i];
      sm.degree = static_cast<int>(f.coords[i]);
      sm.kind = specialfn::Kind::Zonal;
      sm.axis[0] = 0;
      sm.axis[1] = 1;
      m.sphere_modes.push_back(sm);
    }
    for (int i = 0; i < spec.r1(); ++i) m.torus_freq.push_back(f.coords[spec.r0() + i]);
    Complex c = family == PacketFamily::RandomWindow ? Complex(gauss(rng), gauss(rng))
                                                     : Complex(1.0, 0.0);
    terms.push_back({std::move(m), c});
  }
  long double norm2acc = 0;
  for (auto& [m, c] : terms) norm2acc += std::norm(c);
  double inv = 1.0 / std::sqrt(static_cast<double>(norm2acc));
  for (auto& [m, c] : terms) c *= inv;
  return make_packet(spec, std::move(terms), w);
}

}  // namespace

std::vector<ProductNormReport> strichartz_experiment(
    const ManifoldSpec& spec, int k, const std::vector<std::vector<double>>& window_schedule,
    const std::vector<PacketFamily>& families, const StrichartzOptions& opts) {
  if (k < 1) throw std::invalid_argument("strichartz_experiment: k must be >= 1");
  EstimateConstant rhs = regularity::mls_constant(spec, k, opts.params);

  std::vector<ProductNormReport> reports;
  for (std::size_t pt = 0; pt < window_schedule.size(); ++pt) {
    const auto& Ns = window_schedule[pt];
    if (static_cast<int>(Ns.size()) != k + 1)
      throw std::invalid_argument("strichartz_experiment: need k+1 window sizes per point");
    for (std::size_t j = 1; j < Ns.size(); ++j)
      if (Ns[j] > Ns[j - 1])
        throw std::invalid_argument("strichartz_experiment: windows must satisfy N1 >= ... ");
    for (PacketFamily family : families) {
      for (int trial = 0; trial < opts.trials; ++trial) {
        std::mt19937_64 rng(mix64(opts.seed ^
                                  mix64(pt * 1000003ULL + trial * 101 + static_cast<int>(family))));
        std::vector<Packet> packets;
        for (int j = 0; j <= k; ++j) {
          PacketFamily fam_j = (family == PacketFamily::SlabLocalized && j > 0)
                                   ? PacketFamily::RandomWindow
                                   : family;
          packets.push_back(draw_packet(spec, Ns[j], fam_j, Ns[1], rng,
                                        opts.max_modes_per_packet));
        }
        ProductNormReport rep;
        rep.lhs = strichartz_lhs(spec, packets, opts.combo_budget, opts.node_budget);
        rep.rhs_constant = rhs.evaluate(Ns);
        rep.ratio = rep.lhs / rep.rhs_constant;
        rep.N = Ns;
        rep.label = family_name(family);
        rep.trial = trial;
        reports.push_back(std::move(rep));
      }
    }
  }
  return reports;
}

}  // namespace harmlab::packets
