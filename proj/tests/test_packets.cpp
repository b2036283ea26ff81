#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "harmlab/expsum.hpp"
#include "harmlab/packets.hpp"
#include "oracles.hpp"

using namespace harmlab;
using namespace harmlab::packets;
namespace sf = harmlab::specialfn;
using Complexd = std::complex<double>;

namespace {

double slope_loglog(const std::vector<double>& xs, const std::vector<double>& ys) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = xs.size();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double x = std::log(xs[i]), y = std::log(ys[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

JointMode zonal_mode(const ManifoldSpec& spec, const std::vector<int>& degrees,
                     const std::vector<long long>& torus = {}) {
  JointMode m;
  for (int i = 0; i < spec.r0(); ++i)
    m.sphere_modes.push_back(
        sf::SphereMode{spec.sphere_dims[i], degrees[i], sf::Kind::Zonal, {0, 1}});
  m.torus_freq = torus;
  return m;
}

JointMode hw_mode(const ManifoldSpec& spec, const std::vector<int>& degrees,
                  std::pair<int, int> axis = {0, 1}) {
  JointMode m;
  for (int i = 0; i < spec.r0(); ++i)
    m.sphere_modes.push_back(sf::SphereMode{
        spec.sphere_dims[i], degrees[i], sf::Kind::HighestWeight, {axis.first, axis.second}});
  return m;
}

JointMode torus_mode(const std::vector<long long>& xi) {
  JointMode m;
  m.torus_freq = xi;
  return m;
}

}  // namespace

TEST_CASE("joint mode frequency and packet validation") {
  ManifoldSpec s2t1({2}, 1);
  JointMode m = zonal_mode(s2t1, {3}, {-2});
  CHECK(m.frequency().coords == std::vector<long long>{3, -2});
  CHECK(m.norm2() == 13);

  // window validation
  lattice::SpectralWindow w{Rational(3)};  // |xi| in [3,6]
  CHECK_NOTHROW(make_packet(s2t1, {{zonal_mode(s2t1, {3}, {-2}), 1.0}}, w));
  CHECK_THROWS_AS(make_packet(s2t1, {{zonal_mode(s2t1, {1}, {0}), 1.0}}, w),
                  std::invalid_argument);

  // duplicate mode rejected
  CHECK_THROWS_AS(
      make_packet(s2t1, {{zonal_mode(s2t1, {3}, {0}), 1.0}, {zonal_mode(s2t1, {3}, {0}), 2.0}}),
      std::invalid_argument);

  // same spectrum: a zonal mode about e_0 and a highest-weight mode in the
  // perpendicular (x_1, x_2) plane are orthogonal and accepted
  ManifoldSpec s2({2}, 0);
  JointMode hz = zonal_mode(s2, {2});
  JointMode hh = hw_mode(s2, {2}, {1, 2});
  CHECK_NOTHROW(make_packet(s2, {{hz, 1.0}, {hh, 1.0}}));
  // the highest-weight mode in the plane containing the pole is not
  // orthogonal to the zonal mode; the quadrature check rejects the pair
  JointMode hh_pole = hw_mode(s2, {2}, {0, 1});
  CHECK_THROWS_AS(make_packet(s2, {{hz, 1.0}, {hh_pole, 1.0}}), std::invalid_argument);
  // same kind with different poles is not orthogonal either
  JointMode tilted = zonal_mode(s2, {2});
  tilted.sphere_modes[0].axis[0] = 1;
  CHECK_THROWS_AS(make_packet(s2, {{hz, 1.0}, {tilted, 1.0}}), std::invalid_argument);
}

TEST_CASE("evaluate_packet basics") {
  ManifoldSpec s2t1({2}, 1);
  std::vector<std::vector<double>> x0 = {{0.6, 0.8, 0.0}};
  std::vector<double> x1 = {1.1};

  // constant mode: value is the coefficient at every (x, t)
  Packet constant = make_packet(s2t1, {{zonal_mode(s2t1, {0}, {0}), Complexd(0.3, -0.4)}});
  CHECK(std::abs(evaluate_packet(constant, s2t1, x0, x1, 0.0) - Complexd(0.3, -0.4)) < 1e-14);
  CHECK(std::abs(evaluate_packet(constant, s2t1, x0, x1, 0.77) - Complexd(0.3, -0.4)) < 1e-14);

  // single term: modulus is time invariant
  Packet single = make_packet(s2t1, {{zonal_mode(s2t1, {4}, {-1}), Complexd(1, 1)}});
  double m0 = std::abs(evaluate_packet(single, s2t1, x0, x1, 0.0));
  for (double t : {0.3, 1.7, 5.0})
    CHECK(std::abs(std::abs(evaluate_packet(single, s2t1, x0, x1, t)) - m0) < 1e-12);

  // integer frequencies recur at t = 2pi
  Packet two = make_packet(
      s2t1, {{zonal_mode(s2t1, {1}, {2}), 1.0}, {zonal_mode(s2t1, {2}, {1}), 0.5}});
  Complexd at0 = evaluate_packet(two, s2t1, x0, x1, 0.0);
  Complexd at2pi = evaluate_packet(two, s2t1, x0, x1, 2 * quadrature::kPi);
  CHECK(std::abs(at0 - at2pi) < 1e-9);
}

TEST_CASE("product_L2_factorized") {
  SUBCASE("all constants give 1") {
    ManifoldSpec m({2, 3}, 0);
    std::vector<JointMode> modes = {zonal_mode(m, {0, 0}), zonal_mode(m, {0, 0})};
    CHECK(std::abs(product_L2_factorized(m, modes) - 1.0) < 1e-12);
  }
  SUBCASE("S2 highest-weight pair: quarter-power growth per factor") {
    ManifoldSpec s2({2}, 0);
    std::vector<double> ns = {8, 16, 32, 64}, ratios;
    for (double n : ns) {
      int ni = static_cast<int>(n);
      std::vector<JointMode> modes = {hw_mode(s2, {ni}), hw_mode(s2, {ni})};
      ratios.push_back(product_L2_factorized(s2, modes));
    }
    double slope = slope_loglog(ns, ratios);
    CHECK(slope > 0.15);
    CHECK(slope < 0.35);
  }
  SUBCASE("orthogonal-axis highest-weight pair on S3, n=1: exact moment value") {
    ManifoldSpec s3({3}, 0);
    std::vector<JointMode> modes = {hw_mode(s3, {1}, {0, 1}), hw_mode(s3, {1}, {2, 3})};
    // E[(x0^2+x1^2)(x2^2+x3^2)] on S^3 is 4 E[x0^2 x2^2]; each witness
    // normalizes by 1/sqrt(E[x0^2+x1^2]) = sqrt(2)
    double expected = std::sqrt(4.0 * oracles::sphere_moment(3, {2, 0, 2, 0}) * 2.0 * 2.0);
    CHECK(std::abs(product_L2_factorized(s3, modes) - expected) < 1e-10);
  }
}

TEST_CASE("strichartz_lhs") {
  SUBCASE("two single modes: one cell, equals the factorized product norm") {
    ManifoldSpec m({2, 2}, 0);
    JointMode a = zonal_mode(m, {3, 1});
    JointMode b = zonal_mode(m, {2, 2});
    Packet pa = make_packet(m, {{a, Complexd(0.8, 0.6)}});
    Packet pb = make_packet(m, {{b, Complexd(0, 1)}});
    double lhs = strichartz_lhs(m, {pa, pb});
    double expected = product_L2_factorized(m, {a, b});  // |coefs| = 1
    CHECK(std::abs(lhs - expected) < 1e-11);
  }
  SUBCASE("pure torus: matches the exponential-sum grid computation") {
    ManifoldSpec t2({}, 2);
    std::mt19937_64 rng(31);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<Packet> pk;
      std::vector<expsum::CoefficientVector> cv(2);
      for (int j = 0; j < 2; ++j) {
        auto freqs = lattice::window_enumerate(lattice::SpectralWindow{Rational(2)}, t2);
        std::vector<std::pair<JointMode, Complexd>> terms;
        for (auto& f : freqs) {
          Complexd c(g(rng), g(rng));
          terms.push_back({torus_mode(f.coords), c});
          cv[j].support.push_back(f);
          cv[j].values.push_back(c);
        }
        pk.push_back(make_packet(t2, std::move(terms)));
      }
      double lhs = strichartz_lhs(t2, pk);

      // independent route: sample both sums on a product-span grid via FFT
      long long l_lo[2] = {1 << 30, 1 << 30}, l_hi[2] = {-(1 << 30), -(1 << 30)};
      long long span_mu[2] = {0, 0};
      for (int j = 0; j < 2; ++j) {
        long long lo0 = 99, hi0 = -99, lo1 = 99, hi1 = -99;
        for (auto& f : cv[j].support) {
          l_lo[j] = std::min(l_lo[j], f.norm2());
          l_hi[j] = std::max(l_hi[j], f.norm2());
          lo0 = std::min(lo0, f.coords[0]);
          hi0 = std::max(hi0, f.coords[0]);
          lo1 = std::min(lo1, f.coords[1]);
          hi1 = std::max(hi1, f.coords[1]);
        }
        span_mu[j] = std::max(hi0 - lo0, hi1 - lo1);
      }
      long long lspan = (l_hi[0] - l_lo[0]) + (l_hi[1] - l_lo[1]);
      long long muspan = span_mu[0] + span_mu[1];
      std::vector<int> dims = {static_cast<int>(2 * lspan + 1),
                               static_cast<int>(2 * muspan + 1),
                               static_cast<int>(2 * muspan + 1)};
      auto g1 = expsum::exp_sum_on_grid(cv[0], 2, dims);
      auto g2 = expsum::exp_sum_on_grid(cv[1], 2, dims);
      long double acc = 0;
      for (std::size_t i = 0; i < g1.size(); ++i) acc += std::norm(g1[i] * g2[i]);
      double direct = std::sqrt(static_cast<double>(acc / g1.size()));
      CHECK(std::abs(lhs - direct) < 1e-10 * std::max(1.0, direct));
    }
  }
  SUBCASE("unimodular coefficient rotation leaves the norm unchanged") {
    ManifoldSpec m({2}, 1);
    std::vector<std::pair<JointMode, Complexd>> t1 = {{zonal_mode(m, {2}, {1}), 0.5},
                                                      {zonal_mode(m, {3}, {0}), 0.7}};
    auto t2v = t1;
    for (auto& [mm, c] : t2v) c *= std::polar(1.0, 1.234);
    Packet q = make_packet(m, {{zonal_mode(m, {2}, {-1}), 1.0}});
    double a = strichartz_lhs(m, {make_packet(m, t1), q});
    double b = strichartz_lhs(m, {make_packet(m, t2v), q});
    CHECK(std::abs(a - b) < 1e-12);
  }
  SUBCASE("permutation symmetry") {
    ManifoldSpec m({2}, 1);
    Packet p1 =
        make_packet(m, {{zonal_mode(m, {2}, {1}), 0.6}, {zonal_mode(m, {1}, {2}), 0.4}});
    Packet p2 = make_packet(m, {{zonal_mode(m, {1}, {0}), 1.0}});
    Packet p3 =
        make_packet(m, {{zonal_mode(m, {0}, {1}), 0.3}, {zonal_mode(m, {2}, {0}), 0.9}});
    double abc = strichartz_lhs(m, {p1, p2, p3});
    double cab = strichartz_lhs(m, {p3, p1, p2});
    double bca = strichartz_lhs(m, {p2, p3, p1});
    CHECK(std::abs(abc - cab) < 1e-12);
    CHECK(std::abs(abc - bca) < 1e-12);
  }
  SUBCASE("conjugation symmetry") {
    // zonal modes are real; conjugating coefficients and characters
    // realizes complex conjugation (t -> -t), preserving all norms
    ManifoldSpec m({2}, 1);
    std::vector<std::pair<JointMode, Complexd>> terms = {
        {zonal_mode(m, {2}, {1}), Complexd(0.6, -0.2)},
        {zonal_mode(m, {1}, {-2}), Complexd(-0.1, 0.9)}};
    auto conj_terms = terms;
    for (auto& [mm, c] : conj_terms) {
      c = std::conj(c);
      mm.torus_freq[0] = -mm.torus_freq[0];
    }
    Packet q = make_packet(m, {{zonal_mode(m, {1}, {1}), Complexd(0.5, 0.5)}});
    auto conj_q_terms = q.terms;
    for (auto& [mm, c] : conj_q_terms) {
      c = std::conj(c);
      mm.torus_freq[0] = -mm.torus_freq[0];
    }
    double a = strichartz_lhs(m, {make_packet(m, terms), q});
    double b = strichartz_lhs(m, {make_packet(m, conj_terms), make_packet(m, conj_q_terms)});
    CHECK(std::abs(a - b) < 1e-12);
  }
  SUBCASE("level-set expansion equals direct grid integration") {
    ManifoldSpec m({2}, 1);
    std::mt19937_64 rng(47);
    std::normal_distribution<double> g;
    std::vector<std::pair<JointMode, Complexd>> t1, t2;
    for (int n = 0; n <= 3; ++n)
      for (long long xi = -2; xi <= 2; ++xi) {
        if ((n + xi) % 2 == 0)
          t1.push_back({zonal_mode(m, {n}, {xi}), Complexd(g(rng), g(rng))});
        else
          t2.push_back({zonal_mode(m, {n}, {xi}), Complexd(g(rng), g(rng))});
      }
    Packet p1 = make_packet(m, t1), p2 = make_packet(m, t2);
    double cell_route = strichartz_lhs(m, {p1, p2});

    long long lspan = 0;
    {
      long long lo1 = 1 << 30, hi1 = -(1 << 30), lo2 = 1 << 30, hi2 = -(1 << 30);
      for (auto& [mm, c] : t1) {
        lo1 = std::min(lo1, mm.norm2());
        hi1 = std::max(hi1, mm.norm2());
      }
      for (auto& [mm, c] : t2) {
        lo2 = std::min(lo2, mm.norm2());
        hi2 = std::max(hi2, mm.norm2());
      }
      lspan = (hi1 - lo1) + (hi2 - lo2);
    }
    quadrature::ProductDomain dom;
    dom.factors.push_back({"t", quadrature::PeriodicGrid{static_cast<int>(2 * lspan + 1)}});
    dom.factors.push_back({"s", quadrature::build_sphere_quadrature(2, 4 * 3)});
    dom.factors.push_back({"x", quadrature::PeriodicGrid{2 * 8 + 1}});
    auto f = [&](const quadrature::ProductPoint& pt) {
      double t = pt.angle(0);
      std::vector<std::vector<double>> x0 = {
          std::vector<double>(pt.sphere(1).begin(), pt.sphere(1).end())};
      std::vector<double> x1 = {pt.angle(2)};
      Complexd v = evaluate_packet(p1, m, x0, x1, t) * evaluate_packet(p2, m, x0, x1, t);
      return Complexd(std::norm(v), 0);
    };
    double direct = std::sqrt(quadrature::integrate(dom, f).real());
    CHECK(std::abs(cell_route - direct) < 1e-8 * std::max(1.0, direct));
  }
}

TEST_CASE("model flow unitarity") {
  ManifoldSpec m({2}, 1);
  Packet p = make_packet(m, {{zonal_mode(m, {2}, {1}), Complexd(0.6, 0.1)},
                             {zonal_mode(m, {1}, {-1}), Complexd(0.2, -0.5)}});
  double ref = p.l2_norm();
  for (double t : {0.0, 0.37, 2.0}) {
    double grid_norm = packet_l2_on_grid(m, p, t);
    CHECK(std::abs(grid_norm - ref) < 1e-10 * ref);
  }
}

TEST_CASE("orthogonality probe") {
  ManifoldSpec t2({}, 2);
  // f1 supported on two xi_1-separated blocks; f2 a single mode
  std::vector<std::pair<JointMode, Complexd>> f1_terms;
  for (long long a = 0; a <= 1; ++a)
    for (long long b = 0; b <= 1; ++b) {
      f1_terms.push_back({torus_mode({a, b}), Complexd(1, a * 0.5 - b * 0.25)});
      f1_terms.push_back({torus_mode({a + 10, b}), Complexd(0.5, 0.5 * b)});
    }
  Packet f1 = make_packet(t2, f1_terms);
  Packet f2 = make_packet(t2, {{torus_mode({1, -1}), 1.0}});

  auto in_low = [](const lattice::Frequency& f) { return f.coords[0] < 5; };
  auto in_high = [](const lattice::Frequency& f) { return f.coords[0] >= 5; };

  // separated xi_1 sums: disjoint mu keys, exactly zero
  CHECK(orthogonality_probe(t2, {f1, f2}, in_low, in_high) == 0.0);
  // identical regions: the squared norm of that piece
  double same = orthogonality_probe(t2, {f1, f2}, in_low, in_low);
  CHECK(same > 0);
  std::vector<std::pair<JointMode, Complexd>> low_terms;
  for (auto& [mm, c] : f1_terms)
    if (mm.torus_freq[0] < 5) low_terms.push_back({mm, c});
  double low_norm = strichartz_lhs(t2, {make_packet(t2, low_terms), f2});
  CHECK(std::abs(same - low_norm * low_norm) < 1e-10);

  // sphere-carrying case: disjoint degree ranges with disjoint level sets
  ManifoldSpec m({2}, 1);
  std::vector<std::pair<JointMode, Complexd>> g1;
  for (int n = 1; n <= 4; ++n)
    for (long long xi = -1; xi <= 1; ++xi) g1.push_back({zonal_mode(m, {n}, {xi}), 1.0});
  Packet gp = make_packet(m, g1);
  Packet gq = make_packet(m, {{zonal_mode(m, {1}, {0}), 1.0}});
  auto slab_a = [](const lattice::Frequency& f) { return f.coords[0] <= 2; };
  auto slab_b = [](const lattice::Frequency& f) { return f.coords[0] >= 3; };
  double cross = orthogonality_probe(m, {gp, gq}, slab_a, slab_b);
  double self = orthogonality_probe(m, {gp, gq}, slab_a, slab_a);
  CHECK(self > 0);
  CHECK(cross >= 0);
}

TEST_CASE("projector experiment") {
  SUBCASE("S2 x S2 highest-weight witnesses grow at the half power") {
    ManifoldSpec m({2, 2}, 0);
    std::vector<ProjectorPoint> schedule;
    for (int n : {4, 8, 16, 32}) schedule.push_back(ProjectorPoint{{{4 * n, 4 * n}, {n, n}}});
    auto reports =
        projector_experiment(m, 1, schedule, {sf::Kind::HighestWeight, sf::Kind::HighestWeight});
    REQUIRE(reports.size() == 4);
    std::vector<double> xs, ys;
    for (auto& r : reports) {
      xs.push_back(r.N[1]);  // N2
      ys.push_back(r.lhs);   // witnesses have unit norm
    }
    double slope = slope_loglog(xs, ys);
    CHECK(slope > 0.5 - 0.15);
    CHECK(slope < 0.5 + 0.15);
    for (auto& r : reports) CHECK(r.ratio > 0.1);
  }
  SUBCASE("k=2 on S2 with a constant third witness reduces to k=1 exactly") {
    ManifoldSpec s2({2}, 0);
    auto k1 = projector_experiment(s2, 1, {ProjectorPoint{{{8}, {4}}}}, {sf::Kind::Zonal});
    auto k2 = projector_experiment(s2, 2, {ProjectorPoint{{{8}, {4}, {0}}}}, {sf::Kind::Zonal});
    REQUIRE(k1.size() == 1);
    REQUIRE(k2.size() == 1);
    CHECK(std::abs(k1[0].lhs - k2[0].lhs) < 1e-12);
    // r3 = 0 here, so the eta slack drops out and the constants agree at N3=1
    CHECK(std::abs(k1[0].ratio - k2[0].ratio) < 1e-12);
  }
  SUBCASE("input validation") {
    ManifoldSpec s2t({2}, 1);
    CHECK_THROWS_AS(projector_experiment(s2t, 1, {}, {sf::Kind::Zonal}), std::invalid_argument);
  }
}

TEST_CASE("strichartz experiment") {
  SUBCASE("single-mode ratios do not depend on N1") {
    ManifoldSpec t2({}, 2);
    StrichartzOptions opts;
    opts.trials = 1;
    opts.seed = 5;
    auto rep1 = strichartz_experiment(t2, 1, {{8, 2}}, {PacketFamily::SingleMode}, opts);
    auto rep2 = strichartz_experiment(t2, 1, {{16, 2}}, {PacketFamily::SingleMode}, opts);
    REQUIRE(rep1.size() == 1);
    REQUIRE(rep2.size() == 1);
    // single modes: lhs = 1 for unit coefficients; the constant for the
    // r = 2 case depends only on N2
    CHECK(std::abs(rep1[0].lhs - rep2[0].lhs) < 1e-12);
    CHECK(std::abs(rep1[0].rhs_constant - rep2[0].rhs_constant) < 1e-12);
  }
  SUBCASE("families run, are positive and deterministic on S2 x T") {
    ManifoldSpec m({2}, 1);
    StrichartzOptions opts;
    opts.trials = 2;
    opts.seed = 3;
    opts.max_modes_per_packet = 12;
    auto reports = strichartz_experiment(
        m, 1, {{4, 4}, {16, 4}},
        {PacketFamily::SingleMode, PacketFamily::RandomWindow, PacketFamily::SlabLocalized},
        opts);
    REQUIRE(reports.size() == 2 * 3 * 2);  // points x families x trials
    for (auto& r : reports) {
      CAPTURE(r.label);
      CHECK(r.ratio > 0);
    }
    auto again = strichartz_experiment(
        m, 1, {{4, 4}, {16, 4}},
        {PacketFamily::SingleMode, PacketFamily::RandomWindow, PacketFamily::SlabLocalized},
        opts);
    for (std::size_t i = 0; i < reports.size(); ++i)
      CHECK(reports[i].ratio == again[i].ratio);
  }
  SUBCASE("window ordering enforced") {
    ManifoldSpec t2({}, 2);
    CHECK_THROWS_AS(strichartz_experiment(t2, 1, {{2, 8}}, {PacketFamily::SingleMode}),
                    std::invalid_argument);
  }
}
