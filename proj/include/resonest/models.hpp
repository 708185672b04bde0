#ifndef RESONEST_MODELS_HPP
#define RESONEST_MODELS_HPP

#include <cmath>
#include <utility>

#include "resonest/hamiltonian.hpp"

namespace resonest {

/// Physical parameters in normalized units: total mass 1, G = a^3, total
/// polar moment of inertia 1.
struct ModelParams {
  double eps1 = 1e-4, eps2 = 0;
  double e = 0.1;
  double Ic1 = 0.5, Ic2 = 0.5;
  double M1 = 0.5, M2 = 0.5;
  double a = 1.0;
  double m = 0.25;  // G M1 M2 = a^3 M1 M2

  static ModelParams with_defaults(double eps1, double eps2, double e) {
    ModelParams p;
    p.eps1 = eps1;
    p.eps2 = eps2;
    p.e = e;
    p.m = p.M1 * p.M2 * p.a * p.a * p.a;
    return p;
  }

  void validate() const {
    if (e < 0 || e >= 1) throw std::invalid_argument("eccentricity must be in [0,1)");
    if (eps1 < 0 || eps2 < 0) throw std::invalid_argument("oblateness must be nonnegative");
    if (std::abs(Ic1 + Ic2 - 1.0) > 1e-12)
      throw std::invalid_argument("moments of inertia must sum to 1");
    if (std::abs(M1 + M2 - 1.0) > 1e-12) throw std::invalid_argument("masses must sum to 1");
  }
};

namespace detail {

struct Harmonic {
  int k1, k3;
  double poly[6];  // eccentricity polynomial, coefficient of e^i
};

// Eccentricity expansions through degree 5: single-spin family (the spin-orbit
// perturbation divided by eps), with harmonics 2q_k + k3 q_t.
inline const Harmonic* single_spin_family(int& count) {
  static const Harmonic tab[] = {
      {2, -2, {-1. / 2, 0, 5. / 4, 0, -13. / 32, 0}},
      {2, -4, {0, 0, -17. / 4, 0, 115. / 12, 0}},
      {2, 1, {0, 0, 0, -1. / 96, 0, -11. / 1536}},
      {2, -1, {0, 1. / 4, 0, -1. / 32, 0, 5. / 768}},
      {2, -3, {0, -7. / 4, 0, 123. / 32, 0, -489. / 256}},
      {2, -5, {0, 0, 0, -845. / 96, 0, 32525. / 1536}},
      {2, 2, {0, 0, 0, 0, -1. / 48, 0}},
      {2, -6, {0, 0, 0, 0, -533. / 32, 0}},
      {2, 3, {0, 0, 0, 0, 0, -81. / 2560}},
      {2, -7, {0, 0, 0, 0, 0, -228347. / 7680}},
  };
  count = int(sizeof tab / sizeof tab[0]);
  return tab;
}

// Quartic self-coupling family: harmonics 4q_k + k3 q_t, one per body, with
// prefactor (m/a^5)(Ic_k eps_k / M_k)^2.
inline const Harmonic* quartic_family(int& count) {
  static const Harmonic tab[] = {
      {4, -9, {0, 0, 0, 0, 0, -1045005. / 4096}},
      {4, 1, {0, 0, 0, 0, 0, -5. / 36864}},
      {4, -8, {0, 0, 0, 0, -123575. / 1152, 0}},
      {4, -7, {0, 0, 0, -93775. / 2304, 0, 8822975. / 36864}},
      {4, -6, {0, 0, -425. / 32, 0, 2675. / 32, 0}},
      {4, -5, {0, -325. / 96, 0, 6375. / 256, 0, -948125. / 18432}},
      {4, -4, {-25. / 48, 0, 275. / 48, 0, -4975. / 384, 0}},
      {4, -3, {0, 25. / 32, 0, -625. / 256, 0, 3275. / 2048}},
      {4, -2, {0, 0, -25. / 96, 0, 25. / 144, 0}},
      {4, -1, {0, 0, 0, 25. / 2304, 0, 175. / 36864}},
  };
  count = int(sizeof tab / sizeof tab[0]);
  return tab;
}

struct MixedHarmonic {
  int k1, k2, k3;
  double poly[6];
};

// Spin-spin interaction family: harmonics 2q_1 ± 2q_2 + k3 q_t with prefactor
// (m/a^5)(Ic1 eps1 / M1)(Ic2 eps2 / M2).
inline const MixedHarmonic* mixed_family(int& count) {
  static const MixedHarmonic tab[] = {
      {2, 2, -9, {0, 0, 0, 0, 0, -1463007. / 2048}},
      {2, 2, 1, {0, 0, 0, 0, 0, -7. / 18432}},
      {2, -2, -5, {0, 0, 0, 0, 0, -19669. / 6144}},
      {2, -2, 5, {0, 0, 0, 0, 0, -19669. / 6144}},
      {2, 2, -8, {0, 0, 0, 0, -173005. / 576, 0}},
      {2, -2, 0, {-1. / 8, 0, -5. / 8, 0, -105. / 64, 0}},
      {2, -2, -4, {0, 0, 0, 0, -745. / 384, 0}},
      {2, -2, 4, {0, 0, 0, 0, -745. / 384, 0}},
      {2, 2, -7, {0, 0, 0, -131285. / 1152, 0, 12352165. / 18432}},
      {2, 2, -6, {0, 0, -595. / 16, 0, 3745. / 16, 0}},
      {2, 2, -5, {0, -455. / 48, 0, 8925. / 128, 0, -1327375. / 9216}},
      {2, 2, -4, {-35. / 24, 0, 385. / 24, 0, -6965. / 192, 0}},
      {2, -2, -3, {0, 0, 0, -145. / 128, 0, -4715. / 2048}},
      {2, -2, 3, {0, 0, 0, -145. / 128, 0, -4715. / 2048}},
      {2, 2, -3, {0, 35. / 16, 0, -875. / 128, 0, 4585. / 1024}},
      {2, -2, -2, {0, 0, -5. / 8, 0, -155. / 96, 0}},
      {2, -2, 2, {0, 0, -5. / 8, 0, -155. / 96, 0}},
      {2, -2, -1, {0, -5. / 16, 0, -135. / 128, 0, -7285. / 3072}},
      {2, -2, 1, {0, -5. / 16, 0, -135. / 128, 0, -7285. / 3072}},
      {2, 2, -1, {0, 0, 0, 35. / 1152, 0, 245. / 18432}},
      {2, 2, -2, {0, 0, -35. / 48, 0, 35. / 72, 0}},
  };
  count = int(sizeof tab / sizeof tab[0]);
  return tab;
}

inline double poly_eval(const double* c, double e) {
  double v = 0;
  for (int i = 5; i >= 0; --i) v = v * e + c[i];
  return v;
}

}  // namespace detail

/// Spin-orbit model on the extended phase space (p1, p3; q1, q3):
/// N = p1^2/2 + p3, R the degree-5 eccentricity expansion scaled by eps.
inline std::pair<IntegrableHamiltonian, PoissonSeries> spin_orbit_hamiltonian(double eps,
                                                                              double e) {
  if (e < 0 || e >= 1) throw std::invalid_argument("eccentricity must be in [0,1)");
  IntegrableHamiltonian h;
  h.n = 2;
  h.quadratic = {1, 0, 0};
  h.linear = {0, 1, 0};

  PoissonSeries r(2);
  int count;
  const auto* tab = detail::single_spin_family(count);
  for (int i = 0; i < count; ++i) {
    double amp = eps * detail::poly_eval(tab[i].poly, e);
    if (amp == 0) continue;
    r = r + PoissonSeries::cosine(FourierIndex(tab[i].k1, tab[i].k3), amp, 2, {1, 0});
  }
  return {h, r};
}

/// Spin-spin-orbit model on (p1, p2, p3; q1, q2, q3):
/// N = p1^2/(2 Ic1) + p2^2/(2 Ic2) + p3; constant potential pieces go to the
/// energy offset, the three harmonic families to R with their formal degrees.
inline std::pair<IntegrableHamiltonian, PoissonSeries> spin_spin_hamiltonian(
    const ModelParams& par) {
  par.validate();
  IntegrableHamiltonian h;
  h.n = 3;
  h.quadratic = {1 / par.Ic1, 1 / par.Ic2, 0};
  h.linear = {0, 0, 1};

  const double a3 = par.a * par.a * par.a;
  const double a5 = a3 * par.a * par.a;
  const double g1 = par.eps1 * par.Ic1 / par.M1;
  const double g2 = par.eps2 * par.Ic2 / par.M2;
  h.energy_offset = -par.m * 5.0 / 112.0 * (g1 * g1 + g2 * g2);

  PoissonSeries r(3);
  int count;
  const auto* single = detail::single_spin_family(count);
  for (int body = 0; body < 2; ++body) {
    const double pre = par.m / a3 * (body == 0 ? g1 : g2);
    if (pre == 0) continue;
    const std::array<std::uint8_t, 2> deg =
        body == 0 ? std::array<std::uint8_t, 2>{1, 0} : std::array<std::uint8_t, 2>{0, 1};
    for (int i = 0; i < count; ++i) {
      double amp = pre * detail::poly_eval(single[i].poly, par.e);
      if (amp == 0) continue;
      FourierIndex k = body == 0 ? FourierIndex(single[i].k1, 0, single[i].k3)
                                 : FourierIndex(0, single[i].k1, single[i].k3);
      r = r + PoissonSeries::cosine(k, amp, 3, deg);
    }
  }
  const auto* quart = detail::quartic_family(count);
  for (int body = 0; body < 2; ++body) {
    const double g = body == 0 ? g1 : g2;
    const double pre = par.m / a5 * g * g;
    if (pre == 0) continue;
    const std::array<std::uint8_t, 2> deg =
        body == 0 ? std::array<std::uint8_t, 2>{2, 0} : std::array<std::uint8_t, 2>{0, 2};
    for (int i = 0; i < count; ++i) {
      double amp = pre * detail::poly_eval(quart[i].poly, par.e);
      if (amp == 0) continue;
      FourierIndex k = body == 0 ? FourierIndex(quart[i].k1, 0, quart[i].k3)
                                 : FourierIndex(0, quart[i].k1, quart[i].k3);
      r = r + PoissonSeries::cosine(k, amp, 3, deg);
    }
  }
  const double mixed_pre = par.m / a5 * g1 * g2;
  if (mixed_pre != 0) {
    const auto* mixed = detail::mixed_family(count);
    for (int i = 0; i < count; ++i) {
      double amp = mixed_pre * detail::poly_eval(mixed[i].poly, par.e);
      if (amp == 0) continue;
      r = r + PoissonSeries::cosine(FourierIndex(mixed[i].k1, mixed[i].k2, mixed[i].k3), amp, 3,
                                    {1, 1});
    }
  }
  return {h, r};
}

/// Expansion constant of the two-body potential: the factorial formula,
/// evaluated with exact integer products.
inline double coupling_constant(int l1, int l2, int m1, int m2) {
  if (std::abs(m1) > l1 || std::abs(m2) > l2)
    throw std::invalid_argument("coupling_constant: |m| must not exceed l");
  auto fact = [](int v) {
    __int128 f = 1;
    for (int i = 2; i <= v; ++i) f *= i;
    return f;
  };
  const int L = l1 + l2, M = m1 + m2;
  const __int128 num = fact(2 * (L - M)) * fact(2 * (L + M));
  const __int128 den = fact(L - M) * fact(L + M);
  const double ratio = double(num) / double(den);
  const double sign = ((L - M) % 2 == 0) ? 1.0 : -1.0;
  const double root = std::sqrt(double(fact(2 * l1 - 2 * m1)) * double(fact(2 * l2 - 2 * m2)) *
                                double(fact(2 * l1 + 2 * m1)) * double(fact(2 * l2 + 2 * m2)));
  return ratio * sign * std::pow(4.0, -L) / root;
}

}  // namespace resonest

#endif
