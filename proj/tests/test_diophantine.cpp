#include <catch2/catch_amalgamated.hpp>

#include "resonest/diophantine.hpp"
#include "resonest/models.hpp"

using namespace resonest;

TEST_CASE("1D sequence values") {
  auto r11 = SpinOrbitResonance::of(1, 1);
  FrequencyVector f = seq_1d(r11, 1.6, 2, SequenceSide::below);
  REQUIRE(f.omega[0] == Catch::Approx(0.3888543820).epsilon(1e-9));
  REQUIRE(f.omega[1] == 1.0);

  auto r32 = SpinOrbitResonance::of(3, 2);
  REQUIRE(seq_1d(r32, 0.6, 2, SequenceSide::below).omega[0] ==
          Catch::Approx(1.2708203932).epsilon(1e-9));
  REQUIRE(seq_1d(r32, 0.6, 2, SequenceSide::above).omega[0] ==
          Catch::Approx(1.5 + (1.5 - 1.2708203932)).epsilon(1e-9));

  REQUIRE_THROWS_AS(seq_1d(r11, 1.6, 0, SequenceSide::below), std::invalid_argument);
}

TEST_CASE("1D sequences are monotone toward the center and never reach it") {
  auto r11 = SpinOrbitResonance::of(1, 1);
  double prev = -1;
  for (int z = 2; z <= 400; ++z) {
    double w = seq_1d(r11, 1.6, z, SequenceSide::below).omega[0];
    REQUIRE(w > prev);
    REQUIRE(w < 1.0);
    prev = w;
  }
  REQUIRE(prev == Catch::Approx(1.0).margin(5e-3));
}

TEST_CASE("certificate integers for the 1:1, s = 8/5, z = 2 member") {
  auto r11 = SpinOrbitResonance::of(1, 1);
  LiouvilleCertificate c = liouville_certificate(r11, 8, 5, 2);
  REQUIRE(c.A2 == 100);
  double g = seq_1d(r11, 1.6, 2, SequenceSide::below).omega[0];
  REQUIRE(c.root == Catch::Approx(g).epsilon(1e-14));
  double q = (double(c.A2) * g + double(c.A1)) * g + double(c.A0);
  REQUIRE(std::abs(q) < 1e-9);  // root of the integer quadratic
  REQUIRE(c.C_bound > 0);
}

TEST_CASE("certificate sweep stays positive and exact") {
  auto r11 = SpinOrbitResonance::of(1, 1);
  auto r32 = SpinOrbitResonance::of(3, 2);
  for (int z = 2; z <= 100; ++z) {
    for (auto side : {SequenceSide::below, SequenceSide::above}) {
      LiouvilleCertificate c1 = liouville_certificate(r11, 8, 5, z, side);
      LiouvilleCertificate c2 = liouville_certificate(r32, 3, 5, z, side);
      REQUIRE(c1.C_bound > 0);
      REQUIRE(c2.C_bound > 0);
      double w1 = seq_1d(r11, 1.6, z, side).omega[0];
      double w2 = seq_1d(r32, 0.6, z, side).omega[0];
      REQUIRE(c1.root == Catch::Approx(w1).epsilon(1e-12));
      REQUIRE(c2.root == Catch::Approx(w2).epsilon(1e-12));
    }
  }
}

TEST_CASE("strong Diophantine lattice check") {
  const double gamma = golden_ratio_frac();
  auto [minprod, pass] = check_strong_diophantine(gamma, 0.38, 1000);
  REQUIRE(minprod >= 0.38);  // golden ratio clears the classical floor
  REQUIRE(pass);
  auto [mp2, pass2] = check_strong_diophantine(0.5, 1e-12, 1000);
  REQUIRE(mp2 == 0.0);
  REQUIRE_FALSE(pass2);
}

TEST_CASE("every sequence member passes its own certificate") {
  auto r11 = SpinOrbitResonance::of(1, 1);
  auto r32 = SpinOrbitResonance::of(3, 2);
  for (int z = 2; z <= 100; ++z) {
    {
      LiouvilleCertificate c = liouville_certificate(r11, 8, 5, z);
      double w = seq_1d(r11, 1.6, z, SequenceSide::below).omega[0];
      auto [mp, ok] = check_strong_diophantine(w, c.C_bound, 1000);
      INFO("1:1 z=" << z << " min=" << mp << " C=" << c.C_bound);
      REQUIRE(ok);
    }
    {
      LiouvilleCertificate c = liouville_certificate(r32, 3, 5, z);
      double w = seq_1d(r32, 0.6, z, SequenceSide::below).omega[0];
      auto [mp, ok] = check_strong_diophantine(w, c.C_bound, 1000);
      INFO("3:2 z=" << z << " min=" << mp << " C=" << c.C_bound);
      REQUIRE(ok);
    }
  }
}

TEST_CASE("PV number") {
  double a = pv_alpha();
  REQUIRE(std::abs(a * a * a + a * a - 1.0) < 1e-14);
  REQUIRE(a == Catch::Approx(0.7548776662).epsilon(1e-9));
  REQUIRE(std::abs(1.0 / a - 1.324716) < 3e-6);  // the printed rounding
}

TEST_CASE("2D Diophantine vectors") {
  ResonancePair pair{SpinOrbitResonance::of(1, 1), SpinOrbitResonance::of(3, 2)};
  const double a = pv_alpha();
  FrequencyVector f = seq_2d(pair, {1, 0, 0, 1}, 10);
  REQUIRE(f.omega[0] == Catch::Approx(1.0 + a / 10).epsilon(1e-12));
  REQUIRE(f.omega[1] == Catch::Approx(1.5 + a * a / 10).epsilon(1e-12));
  REQUIRE(f.omega[2] == 1.0);
  REQUIRE(lattice_min(f.omega, 100) > 0);

  FrequencyVector big = seq_2d(pair, {1, 0, 0, 1}, 1000000);
  REQUIRE(big.omega[0] == Catch::Approx(1.0).margin(1e-5));
  REQUIRE(big.omega[1] == Catch::Approx(1.5).margin(1e-5));

  REQUIRE_THROWS_AS(seq_2d(pair, {1, 2, 2, 4}, 10), std::invalid_argument);
  REQUIRE_THROWS_AS(seq_2d(pair, {1, 0, 0, 1}, 0), std::invalid_argument);
}

TEST_CASE("frequency inversion") {
  auto [h, r] = spin_orbit_hamiltonian(1e-4, 0.1);
  (void)r;
  FrequencyVector tgt;
  tgt.omega = {0.84, 1.0};
  auto p = invert_frequency(h, tgt, {0.84, 0, 0});
  REQUIRE(p[0] == Catch::Approx(0.84));  // Z = 0: one Newton step, p1 = omega1

  // with a rational correction, cross-check against a bisection oracle
  IntegrableHamiltonian hz = h;
  CoefficientTerm t;
  t.amp = 1e-3;
  t.factors.push_back(AffineFactor{-2, {2, 0, 0}, 1});
  hz.set_correction(ActionRational::from_terms({t}, 2));
  auto p2 = invert_frequency(hz, tgt, {0.84, 0, 0}, 1e-13);
  auto omega_of = [&](double p1) { return hz.omega({p1, 0, 0})[0]; };
  double lo = 0.5, hi = 0.95;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (omega_of(mid) < 0.84 ? lo : hi) = mid;
  }
  REQUIRE(p2[0] == Catch::Approx(0.5 * (lo + hi)).epsilon(1e-10));

  // a target pinned on the correction singularity diverges
  FrequencyVector bad;
  bad.omega = {1.0, 1.0};
  REQUIRE_THROWS_AS(invert_frequency(hz, bad, {1.0, 0, 0}), InversionFailure);
}
