#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <random>

#include "harmlab/quadrature.hpp"
#include "oracles.hpp"

using namespace harmlab::quadrature;
using Complexd = std::complex<double>;

TEST_CASE("sphere quadrature matches the closed-form moment oracle") {
  for (int d = 2; d <= 5; ++d) {
    const int degree = 8;
    auto q = build_sphere_quadrature(d, degree);
    double wsum = 0;
    for (double w : q.weights) wsum += w;
    CHECK(std::abs(wsum - 1.0) < 1e-12);

    // every monomial x^alpha with |alpha| <= degree
    std::vector<int> alpha(d + 1, 0);
    std::function<void(int, int)> visit = [&](int var, int left) {
      if (var == d + 1) {
        double expected = oracles::sphere_moment(d, alpha);
        Complexd got = integrate(q, [&](std::span<const double> x) {
          double m = 1.0;
          for (int i = 0; i <= d; ++i)
            for (int j = 0; j < alpha[i]; ++j) m *= x[i];
          return Complexd(m, 0.0);
        });
        CAPTURE(d);
        CHECK(std::abs(got.real() - expected) < 1e-10);
        CHECK(std::abs(got.imag()) < 1e-14);
        return;
      }
      for (int a = 0; a <= left; ++a) {
        alpha[var] = a;
        visit(var + 1, left - a);
      }
      alpha[var] = 0;
    };
    // keep the sweep small for d=5: cap total degree at 6 there
    visit(0, d <= 4 ? degree : 6);
  }
}

TEST_CASE("sphere quadrature spec examples") {
  auto q2 = build_sphere_quadrature(2, 2);
  Complexd x1sq = integrate(q2, [](std::span<const double> x) { return Complexd(x[0] * x[0]); });
  CHECK(std::abs(x1sq.real() - 1.0 / 3.0) < 1e-13);

  auto q0 = build_sphere_quadrature(3, 0);
  CHECK(std::abs(integrate(q0, [](std::span<const double>) { return Complexd(1.0); }).real() -
                 1.0) < 1e-14);

  auto q3 = build_sphere_quadrature(3, 2);
  Complexd odd = integrate(q3, [](std::span<const double> x) { return Complexd(x[0] * x[1]); });
  CHECK(std::abs(odd) < 1e-13);

  CHECK_THROWS_AS(build_sphere_quadrature(5, 64, /*node_budget=*/1000), BudgetError);
}

TEST_CASE("nodes live on the sphere") {
  auto q = build_sphere_quadrature(4, 7);
  for (const auto& x : q.nodes) {
    double n2 = 0;
    for (double c : x) n2 += c * c;
    CHECK(std::abs(n2 - 1.0) < 1e-12);
  }
}

TEST_CASE("periodic grid is exact for trig polynomials below the aliasing cap") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    int m = 2 * (5 + trial % 7) + 1;
    int maxf = (m - 1) / 2;
    std::uniform_int_distribution<int> freq(-maxf, maxf);
    std::vector<std::pair<int, Complexd>> terms;
    Complexd mean = 0.0;
    for (int i = 0; i < 6; ++i) {
      int f = freq(rng);
      Complexd c(coef(rng), coef(rng));
      terms.push_back({f, c});
      if (f == 0) mean += c;
    }
    PeriodicGrid g{m};
    Complexd got = integrate(g, [&](double t) {
      Complexd acc = 0.0;
      for (auto& [f, c] : terms) acc += c * std::exp(Complexd(0, f * t));
      return acc;
    });
    CHECK(std::abs(got - mean) < 1e-12);
  }
  // e^{i3t} on m=8 integrates to zero exactly
  PeriodicGrid g8{8};
  CHECK(std::abs(integrate(g8, [](double t) { return std::exp(Complexd(0, 3 * t)); })) < 1e-14);
}

TEST_CASE("mixed norms") {
  SUBCASE("constant is its own norm under probability measures") {
    ProductDomain dom;
    dom.factors.push_back({"t", PeriodicGrid{9}});
    dom.factors.push_back({"x", PeriodicGrid{5}});
    MixedNormSpec spec{{{"t", 4.0}, {"x", 2.0}}};
    double v = mixed_norm(dom, spec, [](const ProductPoint&) { return Complexd(-2.5, 0); });
    CHECK(std::abs(v - 2.5) < 1e-12);
  }
  SUBCASE("L2 of a unimodular character: probability vs raw") {
    ProductDomain dom;
    dom.factors.push_back({"t", PeriodicGrid{4}});
    MixedNormSpec spec{{{"t", 2.0}}};
    auto f = [](const ProductPoint& p) { return std::exp(Complexd(0, -p.angle(0))); };
    CHECK(std::abs(mixed_norm(dom, spec, f) - 1.0) < 1e-12);
    dom.measure = Measure::Raw;
    CHECK(std::abs(mixed_norm(dom, spec, f) - std::sqrt(2 * kPi)) < 1e-12);
  }
  SUBCASE("Hoelder: ||fg||_2 <= ||f||_4 ||g||_4 on random trig polynomials") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::uniform_int_distribution<int> freq(-3, 3);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<std::pair<int, Complexd>> tf, tg;
      for (int i = 0; i < 4; ++i) tf.push_back({freq(rng), Complexd(coef(rng), coef(rng))});
      for (int i = 0; i < 4; ++i) tg.push_back({freq(rng), Complexd(coef(rng), coef(rng))});
      auto evalt = [](const std::vector<std::pair<int, Complexd>>& terms, double t) {
        Complexd acc = 0.0;
        for (auto& [f, c] : terms) acc += c * std::exp(Complexd(0, f * t));
        return acc;
      };
      // |fg|^2 has frequencies up to 12: a 33-point grid is exact here
      ProductDomain dom;
      dom.factors.push_back({"t", PeriodicGrid{33}});
      MixedNormSpec l2{{{"t", 2.0}}}, l4{{{"t", 4.0}}};
      double lhs = mixed_norm(dom, l2, [&](const ProductPoint& p) {
        return evalt(tf, p.angle(0)) * evalt(tg, p.angle(0));
      });
      double f4 =
          mixed_norm(dom, l4, [&](const ProductPoint& p) { return evalt(tf, p.angle(0)); });
      double g4 =
          mixed_norm(dom, l4, [&](const ProductPoint& p) { return evalt(tg, p.angle(0)); });
      CHECK(lhs <= f4 * g4 + 1e-10);
    }
  }
  SUBCASE("Minkowski direction: ||f||_{L^p_a L^q_b} >= ||f||_{L^q_b L^p_a} for p >= q") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      ProductDomain dom;
      dom.factors.push_back({"a", PeriodicGrid{6}});
      dom.factors.push_back({"b", PeriodicGrid{7}});
      std::vector<double> vals(42);
      for (auto& v : vals) v = u(rng);
      auto f = [&](const ProductPoint& p) {
        return Complexd(vals[p.index[0] * 7 + p.index[1]], 0.0);
      };
      double p = 2.0 + 4.0 * u(rng), q = 1.0 + (p - 1.0) * u(rng);  // p >= q >= 1
      // norm notation lists innermost first; Minkowski: the larger exponent
      // taken innermost dominates, L^p_a L^q_b >= L^q_b L^p_a for p >= q
      double inner_p = mixed_norm(dom, MixedNormSpec{{{"a", p}, {"b", q}}}, f);
      double inner_q = mixed_norm(dom, MixedNormSpec{{{"b", q}, {"a", p}}}, f);
      CHECK(inner_p >= inner_q - 1e-10);
    }
  }
  SUBCASE("all-2 mixed norm is the flat L2 norm in any order") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ProductDomain dom;
    dom.factors.push_back({"a", PeriodicGrid{4}});
    dom.factors.push_back({"b", PeriodicGrid{3}});
    dom.factors.push_back({"c", PeriodicGrid{5}});
    std::vector<double> vals(60);
    for (auto& v : vals) v = u(rng);
    auto f = [&](const ProductPoint& p) {
      return Complexd(vals[(p.index[0] * 3 + p.index[1]) * 5 + p.index[2]], 0.0);
    };
    double flat = 0;
    for (double v : vals) flat += v * v;
    flat = std::sqrt(flat / 60.0);
    for (auto order : std::vector<std::vector<std::string>>{
             {"a", "b", "c"}, {"c", "a", "b"}, {"b", "c", "a"}}) {
      MixedNormSpec spec;
      for (auto& v : order) spec.entries.push_back({v, 2.0});
      CHECK(std::abs(mixed_norm(dom, spec, f) - flat) < 1e-12);
    }
  }
  SUBCASE("p = infinity is a max over nodes") {
    ProductDomain dom;
    dom.factors.push_back({"t", PeriodicGrid{16}});
    MixedNormSpec spec{{{"t", std::numeric_limits<double>::infinity()}}};
    double v = mixed_norm(
        dom, spec, [](const ProductPoint& p) { return Complexd(std::cos(p.angle(0)), 0.0); });
    CHECK(std::abs(v - 1.0) < 1e-12);
  }
  SUBCASE("spec must cover the domain exactly") {
    ProductDomain dom;
    dom.factors.push_back({"t", PeriodicGrid{4}});
    dom.factors.push_back({"x", PeriodicGrid{4}});
    auto f = [](const ProductPoint&) { return Complexd(1.0); };
    CHECK_THROWS_AS(mixed_norm(dom, MixedNormSpec{{{"t", 2.0}}}, f), std::invalid_argument);
    CHECK_THROWS_AS(mixed_norm(dom, MixedNormSpec{{{"t", 2.0}, {"t", 2.0}}}, f),
                    std::invalid_argument);
  }
}

TEST_CASE("latitude rule agrees with the full sphere rule on functions of x_0") {
  for (int d : {2, 3, 4, 5}) {
    auto lat = latitude_rule(d, 10);
    auto q = build_sphere_quadrature(d, 10);
    for (int deg : {0, 1, 2, 5, 10}) {
      double via_lat = 0;
      for (std::size_t i = 0; i < lat.nodes.size(); ++i)
        via_lat += lat.weights[i] * std::pow(lat.nodes[i], deg);
      Complexd via_sphere =
          integrate(q, [&](std::span<const double> x) { return Complexd(std::pow(x[0], deg)); });
      CAPTURE(d);
      CAPTURE(deg);
      CHECK(std::abs(via_lat - via_sphere.real()) < 1e-12);
    }
  }
}
