#include <catch2/catch_amalgamated.hpp>

#include "resonest/action_rational.hpp"

using namespace resonest;

namespace {

ActionRational one_over(double b, double c1, int d, int n = 2) {
  CoefficientTerm t;
  t.amp = 1.0;
  AffineFactor f;
  f.b = b;
  f.c = {c1, 0, 0};
  f.d = d;
  t.factors.push_back(f);
  return ActionRational::from_terms({t}, n);
}

Complex at(const ActionRational& c, double p1, double p2 = 0) {
  std::array<Complex, 3> p{p1, p2, 0};
  return c.eval(p.data(), 2);
}

}  // namespace

TEST_CASE("constant folding and canonical scaling") {
  // (4)^-2 folds into the amplitude
  CoefficientTerm t;
  t.amp = 8.0;
  AffineFactor f;
  f.b = 4;
  f.c = {0, 0, 0};
  f.d = 2;
  t.factors.push_back(f);
  ActionRational c = ActionRational::from_terms({t}, 2);
  REQUIRE(c.terms().size() == 1);
  REQUIRE(c.terms()[0].factors.empty());
  REQUIRE(c.terms()[0].amp.real() == Catch::Approx(0.5));

  // (2p-2)^-1 and 0.5*(p-1)^-1 are the same object after canonicalization
  ActionRational a = one_over(-2, 2, 1);
  ActionRational b = one_over(-1, 1, 1);
  b *= Complex(-0.5, 0);
  REQUIRE((a + b).empty());
}

TEST_CASE("merging adds amplitudes of structurally equal terms") {
  ActionRational a = one_over(-2, 2, 1);
  ActionRational b = one_over(-2, 2, 1);
  ActionRational s = a + b;
  REQUIRE(s.terms().size() == 1);
  REQUIRE(std::abs(at(s, 1.5) - Complex(2.0, 0)) < 1e-15);
}

TEST_CASE("product concatenates factors with exponent addition") {
  ActionRational a = one_over(-2, 2, 1);
  ActionRational p = a.mul(a, 2);
  REQUIRE(p.terms().size() == 1);
  REQUIRE(p.terms()[0].factors.size() == 1);
  REQUIRE(p.terms()[0].factors[0].d == 2);
  REQUIRE(std::abs(at(p, 1.5) - Complex(1.0, 0)) < 1e-15);
}

TEST_CASE("mul_affine cancels a matching denominator exactly") {
  ActionRational a = one_over(-2, 2, 1);
  ActionRational back = a.mul_affine(-2, {2, 0, 0}, 2);
  REQUIRE(back.terms().size() == 1);
  REQUIRE(back.terms()[0].factors.empty());
  REQUIRE(back.terms()[0].amp.real() == Catch::Approx(1.0));
}

TEST_CASE("derivative of an affine power") {
  // d/dp1 (2p1-2)^-1 = -2 (2p1-2)^-2
  ActionRational a = one_over(-2, 2, 1);
  ActionRational d = a.deriv(0, 2);
  double expect = -2.0 / (0.6 * 0.6);  // at p1 = 1.3
  REQUIRE(at(d, 1.3).real() == Catch::Approx(expect).epsilon(1e-14));
  // action derivative of a constant is zero
  REQUIRE(ActionRational::constant(3.0).deriv(0, 2).empty());
}

TEST_CASE("derivative against finite differences") {
  CoefficientTerm t;
  t.amp = Complex(0.7, -0.3);
  AffineFactor f1{-2, {2, 0, 0}, 2};
  AffineFactor f2{5, {1, 1, 0}, 1};
  t.factors = {f1, f2};
  ActionRational c = ActionRational::from_terms({t}, 2);
  ActionRational d0 = c.deriv(0, 2);
  const double h = 1e-6, p1 = 1.4, p2 = 0.3;
  Complex fd = (at(c, p1 + h, p2) - at(c, p1 - h, p2)) / (2 * h);
  REQUIRE(std::abs(d0.eval(std::array<Complex, 3>{p1, p2, 0}.data(), 2) - fd) < 1e-7);
}

TEST_CASE("singular evaluation raises") {
  ActionRational a = one_over(-2, 2, 1);
  std::array<Complex, 3> p{1.0, 0, 0};
  REQUIRE_THROWS_AS(a.eval(p.data(), 2), SingularEvaluation);
}

TEST_CASE("sup bound over a ball") {
  ActionRational a = one_over(-2, 2, 1);
  ActionBall ball{{1.5, 0, 0}, 0.2, 2};
  // min |2p-2| on [1.3,1.7] is 0.6
  double b = a.sup_bound({ball});
  REQUIRE(b == Catch::Approx(1.0 / 0.6));
  ActionBall touching{{1.05, 0, 0}, 0.2, 2};
  REQUIRE(std::isinf(a.sup_bound({touching})));
}

TEST_CASE("eps degrees add in products and gate terms") {
  ActionRational a = ActionRational::constant(2.0, {1, 0});
  ActionRational b = ActionRational::constant(3.0, {1, 1});
  ActionRational p = a.mul(b, 2);
  REQUIRE(p.terms()[0].eps[0] == 2);
  REQUIRE(p.terms()[0].eps[1] == 1);
  REQUIRE(a.mul(b, 2, 3).empty());  // cap at total degree 3 skips 2+1+... >= 3
}
