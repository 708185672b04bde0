#include <catch2/catch_amalgamated.hpp>

#include "resonest/models.hpp"

using namespace resonest;

namespace {

double cosine_amp(const PoissonSeries& r, const FourierIndex& k) {
  ActionRational c = r.coeff(k);
  if (c.empty()) return 0;
  Complex a = 0;
  for (const auto& t : c.terms()) a += t.amp;
  return 2 * a.real();  // cosine amplitude from the exponential entry
}

}  // namespace

TEST_CASE("spin-orbit at zero eccentricity is a single harmonic") {
  auto [h, r] = spin_orbit_hamiltonian(1e-3, 0.0);
  REQUIRE(r.entry_count() == 1);
  REQUIRE(cosine_amp(r, FourierIndex(2, -2)) == Catch::Approx(-0.5e-3));
  REQUIRE(h.quadratic[0] == 1.0);
  REQUIRE(h.linear[1] == 1.0);
}

TEST_CASE("spin-orbit eccentricity polynomials") {
  const double eps = 2.5e-4, e = 0.17;
  auto [h, r] = spin_orbit_hamiltonian(eps, e);
  (void)h;
  REQUIRE(r.entry_count() == 10);
  const double e2 = e * e, e3 = e2 * e, e4 = e2 * e2, e5 = e4 * e;
  REQUIRE(cosine_amp(r, FourierIndex(2, -1)) ==
          Catch::Approx(eps * (e / 4 - e3 / 32 + 5 * e5 / 768)));
  REQUIRE(cosine_amp(r, FourierIndex(2, -7)) == Catch::Approx(-eps * 228347.0 / 7680 * e5));
  REQUIRE(cosine_amp(r, FourierIndex(2, -2)) ==
          Catch::Approx(eps * (-0.5 + 5 * e2 / 4 - 13 * e4 / 32)));
  REQUIRE(cosine_amp(r, FourierIndex(2, 3)) == Catch::Approx(-eps * 81 * e5 / 2560));
  REQUIRE(r.max_order() == 9);  // the (2,-7) harmonic
  REQUIRE_THROWS_AS(spin_orbit_hamiltonian(1e-3, 1.0), std::invalid_argument);
}

TEST_CASE("spin-spin structure and coefficients") {
  ModelParams par = ModelParams::with_defaults(3e-5, 1e-4, 0.2);
  auto [h, r] = spin_spin_hamiltonian(par);
  REQUIRE(h.quadratic[0] == Catch::Approx(2.0));
  REQUIRE(h.quadratic[1] == Catch::Approx(2.0));
  const double g1 = par.eps1 * par.Ic1 / par.M1;
  const double g2 = par.eps2 * par.Ic2 / par.M2;
  REQUIRE(h.energy_offset == Catch::Approx(-par.m * 5.0 / 112 * (g1 * g1 + g2 * g2)));

  const double e = par.e, e2 = e * e, e4 = e2 * e2;
  // mixed harmonic at e-order 0: -(m/a^5) g1 g2 / 8 for cos(2q1-2q2)
  double mixed0 = par.m * g1 * g2;
  REQUIRE(cosine_amp(r, FourierIndex(2, -2, 0)) ==
          Catch::Approx(mixed0 * (-1. / 8 - 5 * e2 / 8 - 105 * e4 / 64)));
  // quartic family coefficient of cos(4q1-6q3)
  REQUIRE(cosine_amp(r, FourierIndex(4, 0, -6)) ==
          Catch::Approx(par.m * g1 * g1 * (2675 * e4 / 32 - 425 * e2 / 32)));
  // body-2 single-spin coefficient mirrors the spin-orbit polynomial
  REQUIRE(cosine_amp(r, FourierIndex(0, 2, -2)) ==
          Catch::Approx(par.m * g2 * (-0.5 + 5 * e2 / 4 - 13 * e4 / 32)));
  REQUIRE(r.max_order() == 13);  // (2,2,-9) and (4,0,-9)

  // formal degrees tag the families
  for (const auto& t : r.coeff(FourierIndex(2, -2, 0)).terms()) {
    REQUIRE(int(t.eps[0]) == 1);
    REQUIRE(int(t.eps[1]) == 1);
  }
  for (const auto& t : r.coeff(FourierIndex(4, 0, -6)).terms()) REQUIRE(int(t.eps[0]) == 2);
}

TEST_CASE("spin-spin with eps2 = 0 drops body-2 and mixed families") {
  ModelParams par = ModelParams::with_defaults(1e-5, 0.0, 0.1);
  auto [h, r] = spin_spin_hamiltonian(par);
  (void)h;
  for (const auto& [k, c] : r.entries()) {
    REQUIRE(k.k[1] == 0);  // no q2 dependence anywhere
    for (const auto& t : c.terms()) REQUIRE(int(t.eps[1]) == 0);
  }
}

TEST_CASE("spin-spin reduces to spin-orbit for body 1 up to the unit rescaling") {
  // With M1 -> 0 the prefactor (m/a^3) g1 -> Ic1 eps1, and dividing the
  // Hamiltonian by Ic1 (p -> Ic1 P) gives the spin-orbit model with
  // eps = eps1 M2.
  ModelParams par;
  par.eps1 = 2e-4;
  par.eps2 = 0;
  par.e = 0.13;
  par.Ic1 = 0.6;
  par.Ic2 = 0.4;
  par.M1 = 1e-9;
  par.M2 = 1 - 1e-9;
  par.m = par.M1 * par.M2;
  auto [hs, rs] = spin_spin_hamiltonian(par);
  (void)hs;
  auto [ho, ro] = spin_orbit_hamiltonian(par.eps1 * par.M2, par.e);
  (void)ho;
  for (const auto& [k, c] : ro.entries()) {
    FourierIndex k3(k.k[0], 0, k.k[1]);
    double got = cosine_amp(rs, k3) / par.Ic1;
    REQUIRE(got == Catch::Approx(cosine_amp(ro, k)).epsilon(1e-6));
  }
}

TEST_CASE("eps scaling of the perturbation is linear") {
  const double e = 0.1;
  std::array<double, 3> p{0.8, 0, 0}, q{0.3, 0, 0.7};
  auto rvalue = [&](double eps) {
    auto [h, r] = spin_orbit_hamiltonian(eps, e);
    (void)h;
    return r.evaluate_real(p, q);
  };
  REQUIRE(rvalue(1e-4) / rvalue(5e-5) == Catch::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("coupling constant factorial formula") {
  REQUIRE(coupling_constant(0, 0, 0, 0) == Catch::Approx(1.0));
  REQUIRE(coupling_constant(1, 0, 0, 0) == Catch::Approx(-0.5));
  REQUIRE(coupling_constant(1, 0, 1, 0) == Catch::Approx(3.0 / (2 * std::sqrt(6.0))));
  REQUIRE_THROWS_AS(coupling_constant(1, 0, 2, 0), std::invalid_argument);
}

TEST_CASE("n=1 potential reconstructed from the expansion constants") {
  // Closed-form ellipsoid moments for the degree-2 interior coefficients:
  //   Z00 = 1, Z20 = (2c^2-a^2-b^2)/(10 R^2), Z22 = 3(a^2-b^2)/(10 sqrt(6) R^2).
  // The l1+l2 = 1 slice of the potential then carries the constant and the
  // cos(2q-2f) pieces in the ratio (2c^2-a^2-b^2) : -3(a^2-b^2), the
  // structure of the quadrupole spin-orbit potential.
  const double ax = 1.3, bx = 1.1, cx = 1.22, R1 = 1.0;
  const double z00 = 1.0;
  const double z20 = (2 * cx * cx - ax * ax - bx * bx) / (10 * R1 * R1);
  const double z22 = 3 * (ax * ax - bx * bx) / (10 * std::sqrt(6.0) * R1 * R1);
  // constant term: C(1,0,0,0) Z20 Z00 ; cosine term: 2 C(1,0,1,0) Z22 Z00
  const double const_term = coupling_constant(1, 0, 0, 0) * z20 * z00;
  const double cos_term = 2 * coupling_constant(1, 0, 1, 0) * z22 * z00;
  const double expect_ratio =
      -3 * (ax * ax - bx * bx) / (2 * cx * cx - ax * ax - bx * bx);
  REQUIRE(cos_term / const_term == Catch::Approx(expect_ratio).epsilon(1e-12));
  // the quadrupole bracket scale: the constant piece is (2c^2-a^2-b^2)/20
  // times the -m/r^3 prefactor carried outside
  REQUIRE(const_term == Catch::Approx(-(2 * cx * cx - ax * ax - bx * bx) / 20.0));
}
