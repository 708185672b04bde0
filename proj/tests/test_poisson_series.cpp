#include <catch2/catch_amalgamated.hpp>
#include <sstream>

#include "resonest/hamiltonian.hpp"
#include "test_helpers.hpp"

using namespace resonest;
using resonest::testing::fd_bracket;
using resonest::testing::random_point;
using resonest::testing::random_series;

namespace {

PoissonSeries cos_series(int k1, int k3, double amp) {
  return PoissonSeries::cosine(FourierIndex(k1, k3), amp, 2);
}

ActionRational inv_2p_minus_2() {
  CoefficientTerm t;
  t.amp = 1.0;
  t.factors.push_back(AffineFactor{-2, {2, 0, 0}, 1});
  return ActionRational::from_terms({t}, 2);
}

double eval(const PoissonSeries& s, double p1, double q1, double q3 = 0, double p3 = 0) {
  return s.evaluate_real({p1, p3, 0}, {q1, q3, 0});
}

}  // namespace

TEST_CASE("addition identities") {
  PoissonSeries f = cos_series(2, -2, 0.7);
  PoissonSeries zero(2);
  REQUIRE((f + zero).entry_count() == f.entry_count());
  PoissonSeries two = f + f;
  REQUIRE(eval(two, 0.3, 0.2, 0.1) == Catch::Approx(2 * eval(f, 0.3, 0.2, 0.1)));
  REQUIRE((f - f).empty());
}

TEST_CASE("product-to-sum identity cos^2") {
  PoissonSeries c = cos_series(1, 0, 1.0);
  PoissonSeries p = c.mul(c);
  // 1/2 + cos(2 q1)/2
  REQUIRE(p.entry_count() == 2);
  REQUIRE(eval(p, 0, 0) == Catch::Approx(1.0));
  REQUIRE(eval(p, 0, M_PI / 2) == Catch::Approx(0.0).margin(1e-15));
  REQUIRE(eval(p, 0, M_PI / 4) == Catch::Approx(0.5));
}

TEST_CASE("rational product keeps the class closed") {
  // [1/(2p1-2)] cos q1 squared -> [1/(2p1-2)^2](1/2 + cos(2q1)/2)
  PoissonSeries f = PoissonSeries::cosine(FourierIndex(1, 0), inv_2p_minus_2(), 2);
  PoissonSeries p = f.mul(f);
  double p1 = 1.75;  // 2p-2 = 1.5
  REQUIRE(eval(p, p1, 0) == Catch::Approx(1.0 / (1.5 * 1.5)));
  for (const auto& [k, c] : p.entries()) REQUIRE(c.in_denominator_class());
  FourierIndex k2(2, 0);
  REQUIRE(!p.coeff(k2).empty());
}

TEST_CASE("angle and action derivatives") {
  PoissonSeries f = cos_series(2, -2, 1.0);
  PoissonSeries dq = f.deriv_angle(0);
  // d/dq1 cos(2q1-2q3) = -2 sin(2q1-2q3)
  REQUIRE(eval(dq, 0, M_PI / 8, 0) == Catch::Approx(-2 * std::sin(M_PI / 4)));
  REQUIRE(f.deriv_action(0).empty());

  // d/dp1 [1/(2p1-2)] sin(q1) = [-2/(2p1-2)^2] sin q1
  ActionRational c = inv_2p_minus_2();
  c *= Complex(0, -0.5);  // sin q1 = -i/2 e^{iq} + c.c.
  PoissonSeries s(2);
  s.accumulate(FourierIndex(1, 0), c);
  REQUIRE(eval(s, 1.75, M_PI / 2) == Catch::Approx(1 / 1.5));
  PoissonSeries ds = s.deriv_action(0);
  REQUIRE(eval(ds, 1.75, M_PI / 2) == Catch::Approx(-2.0 / (1.5 * 1.5)));
}

TEST_CASE("evaluate examples") {
  REQUIRE(eval(cos_series(2, -2, 1.0), 0.5, 0, 0) == Catch::Approx(1.0));
  PoissonSeries s(2);
  ActionRational c = inv_2p_minus_2();
  c *= Complex(0, -0.5);
  s.accumulate(FourierIndex(2, 0), c);  // [1/(2p1-2)] sin(2q1)
  REQUIRE(eval(s, 1.5, M_PI / 4) == Catch::Approx(1.0));
  ActionRational cst = ActionRational::constant(Complex(0.37, 0));
  PoissonSeries k0(2);
  FourierIndex zero(0, 0);
  k0.accumulate(zero, cst);
  REQUIRE(eval(k0, 0.123, 0.456) == Catch::Approx(0.37));
}

TEST_CASE("projections") {
  PoissonSeries p = cos_series(1, 0, 1.0).mul(cos_series(1, 0, 1.0));
  REQUIRE(p.mean_part().entry_count() == 1);
  REQUIRE(p.mean_part().mean_coefficient().terms()[0].amp.real() == Catch::Approx(0.5));
  REQUIRE(p.module_part({}, true).empty());  // empty module -> empty resonant part
  // nonresonant part of the e=0 spin-orbit remainder is the whole of it
  PoissonSeries r = cos_series(2, -2, -0.5e-3);
  PoissonSeries nr = r.module_part({}, false).oscillating_part();
  REQUIRE(nr.entry_count() == r.entry_count());
  REQUIRE(r.order_at_most(3).empty());
  REQUIRE(r.order_at_most(4).entry_count() == 1);
}

TEST_CASE("bracket antisymmetry, bilinearity, Jacobi on random series") {
  std::mt19937_64 rng(12345);
  for (int rep = 0; rep < 25; ++rep) {
    int n = rep % 2 ? 3 : 2;
    PoissonSeries f = random_series(rng, n), g = random_series(rng, n),
                  h = random_series(rng, n);
    PoissonSeries fg = f.bracket(g), gf = g.bracket(f);
    PoissonSeries anti = fg + gf;
    PoissonSeries jac = f.bracket(g.bracket(h)) + g.bracket(h.bracket(f)) + h.bracket(f.bracket(g));
    for (int t = 0; t < 4; ++t) {
      auto p = random_point(rng, n), q = random_point(rng, n);
      double scale = 1 + std::abs(fg.evaluate_real(p, q));
      REQUIRE(std::abs(anti.evaluate_real(p, q)) < 1e-12 * scale);
      double jscale = 1 + std::abs(f.bracket(g.bracket(h)).evaluate_real(p, q));
      REQUIRE(std::abs(jac.evaluate_real(p, q)) < 1e-10 * jscale);
    }
    REQUIRE(f.bracket(f).empty());
  }
}

TEST_CASE("bracket agrees with the finite-difference oracle") {
  std::mt19937_64 rng(777);
  for (int rep = 0; rep < 10; ++rep) {
    int n = rep % 2 ? 3 : 2;
    PoissonSeries f = random_series(rng, n), g = random_series(rng, n);
    PoissonSeries br = f.bracket(g);
    for (int t = 0; t < 10; ++t) {
      auto p = random_point(rng, n), q = random_point(rng, n);
      double exact = br.evaluate_real(p, q);
      double fd = fd_bracket(f, g, p, q);
      REQUIRE(std::abs(exact - fd) < 1e-6 * (1 + std::abs(exact)));
    }
  }
}

TEST_CASE("rational bracket example against finite differences") {
  double c = 0.3;
  PoissonSeries f = cos_series(2, -2, c);
  ActionRational chi = inv_2p_minus_2();
  chi *= Complex(0, -0.5 * c);  // c sin(2q1-2q3)/(2p1-2)
  PoissonSeries g(2);
  g.accumulate(FourierIndex(2, -2), chi);
  PoissonSeries br = f.bracket(g);
  std::mt19937_64 rng(99);
  for (int t = 0; t < 10; ++t) {
    auto p = random_point(rng, 2), q = random_point(rng, 2);
    p[0] = 1.6 + 0.3 * p[0] / 1.5;  // keep clear of p1 = 1
    double exact = br.evaluate_real(p, q);
    double fd = fd_bracket(f, g, p, q);
    REQUIRE(std::abs(exact - fd) < 1e-6 * (1 + std::abs(exact)));
  }
}

TEST_CASE("hermitian symmetry is preserved by the operations") {
  std::mt19937_64 rng(4242);
  for (int rep = 0; rep < 20; ++rep) {
    int n = rep % 2 ? 3 : 2;
    PoissonSeries f = random_series(rng, n), g = random_series(rng, n);
    for (const PoissonSeries& s :
         {f + g, f.mul(g), f.deriv_angle(0), f.deriv_action(0), f.bracket(g),
          f.order_at_most(3)}) {
      for (int t = 0; t < 3; ++t) {
        auto p = random_point(rng, n), q = random_point(rng, n);
        std::array<Complex, 3> cp, cq;
        for (int j = 0; j < n; ++j) {
          cp[j] = p[j];
          cq[j] = q[j];
        }
        Complex v = s.evaluate(cp.data(), cq.data());
        REQUIRE(std::abs(v.imag()) <= 1e-12 * (1 + std::abs(v.real())));
      }
    }
  }
}

TEST_CASE("prune behaviour") {
  PoissonSeries f = cos_series(2, -2, 1e-3) + cos_series(2, -4, 1e-25);
  std::vector<ActionBall> dom{{{0.8, 0, 0}, 0.05, 2}};
  REQUIRE(f.pruned(0, dom).entry_count() == 2);  // zero threshold keeps all
  PoissonSeries g = f.pruned(1e-20, dom);
  REQUIRE(g.entry_count() == 1);
  REQUIRE(!g.coeff(FourierIndex(2, -2)).empty());

  // singular-on-domain terms are never pruned
  PoissonSeries s(2);
  ActionRational c = inv_2p_minus_2();
  c *= Complex(1e-30, 0);
  s.accumulate(FourierIndex(2, -2), c);
  std::vector<ActionBall> touching{{{1.0, 0, 0}, 0.1, 2}};
  REQUIRE(s.pruned(1e-20, touching).entry_count() == 1);

  // eps-degree cap is a structural filter
  PoissonSeries d = PoissonSeries::cosine(FourierIndex(2, -2),
                                          ActionRational::constant(1.0, {5, 0}), 2);
  REQUIRE(d.pruned(0, dom, 5).empty());
  REQUIRE(d.pruned(0, dom, 6).entry_count() == 1);
}

TEST_CASE("debug dump is deterministic and ordered") {
  PoissonSeries f = cos_series(2, -2, 0.5) + cos_series(1, 0, 0.25);
  std::ostringstream a, b;
  f.dump(a);
  f.dump(b);
  REQUIRE(a.str() == b.str());
  REQUIRE(a.str().find("k=(") == 0);
  REQUIRE(a.str().find("deg=(") != std::string::npos);
}

TEST_CASE("bracket with the integrable part handles positive powers") {
  // {cos q1, p1^2/2} = -p1 sin q1
  IntegrableHamiltonian h;
  h.n = 2;
  h.quadratic = {1, 0, 0};
  h.linear = {0, 0, 0};
  PoissonSeries f = cos_series(1, 0, 1.0);
  PoissonSeries br = bracket_with_integrable(f, h);
  REQUIRE(eval(br, 0.7, M_PI / 2) == Catch::Approx(-0.7));
  REQUIRE(eval(br, -1.3, M_PI / 6) == Catch::Approx(1.3 * std::sin(M_PI / 6)));
}
