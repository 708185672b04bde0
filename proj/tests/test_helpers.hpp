#ifndef RESONEST_TEST_HELPERS_HPP
#define RESONEST_TEST_HELPERS_HPP

#include <random>

#include "resonest/poisson.hpp"

namespace resonest::testing {

/// Small random hermitian series with rational coefficients whose denominator
/// zero sets stay far from the test domain |p_j| <= 2.
inline PoissonSeries random_series(std::mt19937_64& rng, int n_angles, int max_entries = 4,
                                   bool with_factors = true) {
  std::uniform_int_distribution<int> kdist(-2, 2);
  std::uniform_real_distribution<double> adist(-1.0, 1.0);
  std::uniform_int_distribution<int> nfac(0, with_factors ? 2 : 0);
  std::uniform_int_distribution<int> bpick(0, 3);
  std::uniform_int_distribution<int> cpick(0, n_angles - 1);
  static const double bpool[4] = {5.0, -6.0, 7.0, -8.0};

  PoissonSeries s(n_angles);
  for (int e = 0; e < max_entries; ++e) {
    FourierIndex k;
    k.n = n_angles;
    for (int j = 0; j < n_angles; ++j) k.k[j] = kdist(rng);
    CoefficientTerm t;
    t.amp = Complex(adist(rng), k.is_zero() ? 0.0 : adist(rng));
    int nf = nfac(rng);
    for (int i = 0; i < nf; ++i) {
      AffineFactor f;
      f.b = bpool[bpick(rng)];
      f.c[cpick(rng)] = 1.0;
      f.d = 1 + (bpick(rng) % 2);
      t.factors.push_back(f);
    }
    ActionRational c = ActionRational::from_terms({t}, n_angles);
    if (k.is_zero() || k.is_canonical())
      s.accumulate(k, c);
    else
      s.accumulate(k.negated(), c.conjugated());
  }
  return s;
}

inline std::array<double, 3> random_point(std::mt19937_64& rng, int n, double span = 1.5) {
  std::uniform_real_distribution<double> d(-span, span);
  std::array<double, 3> p{0, 0, 0};
  for (int j = 0; j < n; ++j) p[j] = d(rng);
  return p;
}

/// Central finite-difference Poisson bracket of two series evaluations.
inline double fd_bracket(const PoissonSeries& f, const PoissonSeries& g,
                         const std::array<double, 3>& p, const std::array<double, 3>& q,
                         double h = 1e-6) {
  const int n = f.n_angles();
  auto evalf = [&](const std::array<double, 3>& pp, const std::array<double, 3>& qq,
                   const PoissonSeries& s) { return s.evaluate_real(pp, qq); };
  double sum = 0;
  for (int j = 0; j < n; ++j) {
    auto pp = p, pm = p, qp = q, qm = q;
    pp[j] += h;
    pm[j] -= h;
    qp[j] += h;
    qm[j] -= h;
    double fq = (evalf(p, qp, f) - evalf(p, qm, f)) / (2 * h);
    double fp = (evalf(pp, q, f) - evalf(pm, q, f)) / (2 * h);
    double gq = (evalf(p, qp, g) - evalf(p, qm, g)) / (2 * h);
    double gp = (evalf(pp, q, g) - evalf(pm, q, g)) / (2 * h);
    sum += fq * gp - fp * gq;
  }
  return sum;
}

}  // namespace resonest::testing

#endif
