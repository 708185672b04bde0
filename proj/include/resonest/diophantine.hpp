#ifndef RESONEST_DIOPHANTINE_HPP
#define RESONEST_DIOPHANTINE_HPP

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "resonest/hamiltonian.hpp"

namespace resonest {

struct InversionFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Spin-orbit resonance of type k2:k1 (the body makes k1 rotations per k2
/// revolutions); as a resonance order this is (k1, -k2), center omega1 = k2/k1.
struct SpinOrbitResonance {
  int k2 = 1, k1 = 1;

  static SpinOrbitResonance of(int k2, int k1) {
    if (k1 == 0 || k2 == 0) throw std::invalid_argument("resonance integers must be nonzero");
    int g = std::gcd(std::abs(k1), std::abs(k2));
    if (k1 < 0) {
      k1 = -k1;
      k2 = -k2;
    }
    return SpinOrbitResonance{k2 / g, k1 / g};
  }

  double center() const { return double(k2) / double(k1); }
  std::string label() const { return std::to_string(k2) + ":" + std::to_string(k1); }
};

/// Intersection of two spin-orbit resonances (k31:k1)_{S1}, (k32:k2)_{S2}.
struct ResonancePair {
  SpinOrbitResonance first, second;
  std::string label() const { return first.label() + "," + second.label(); }
};

enum class SequenceSide { below, above };

/// A frequency vector with its construction provenance.
struct FrequencyVector {
  std::vector<double> omega;  // last component exactly 1
  std::string label;
  int z = 0;
  SequenceSide side = SequenceSide::below;
  double s = 0;
  std::array<double, 4> atilde{0, 0, 0, 0};
  int ray = -1;
};

inline double golden_ratio_frac() { return (std::sqrt(5.0) - 1.0) / 2.0; }

/// 1D Diophantine sequence member: center ∓ s/(z+γ); side below approaches
/// from below with the Γ branch, above with Δ.
inline FrequencyVector seq_1d(const SpinOrbitResonance& res, double s, int z,
                              SequenceSide side) {
  if (z == 0) throw std::invalid_argument("seq_1d: z must be nonzero");
  if (s <= 0) throw std::invalid_argument("seq_1d: s must be positive");
  const double offset = s / (double(z) + golden_ratio_frac());
  FrequencyVector f;
  f.omega = {res.center() + (side == SequenceSide::below ? -offset : offset), 1.0};
  f.label = res.label();
  f.z = z;
  f.side = side;
  f.s = s;
  return f;
}

/// Integer quadratic certificate A2 x^2 + A1 x + A0 = 0 with the sequence
/// member as a root, plus an effective Liouville constant valid for all
/// nonzero integer pairs: |k1 Γ + k2| >= C/|k1|.
struct LiouvilleCertificate {
  std::int64_t A2 = 0, A1 = 0, A0 = 0;
  double C_bound = 0;
  double root = 0;
  double conjugate_root = 0;
};

namespace detail {

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r))
    throw std::overflow_error("liouville_certificate: integer overflow");
  return r;
}

inline bool is_perfect_square(__int128 v) {
  if (v < 0) return false;
  auto r = (__int128)llroundl(sqrtl((long double)v));
  for (__int128 c = r > 2 ? r - 2 : 0; c <= r + 2; ++c)
    if (c * c == v) return true;
  return false;
}

}  // namespace detail

inline LiouvilleCertificate liouville_certificate(const SpinOrbitResonance& res, int d, int w,
                                                  int z, SequenceSide side = SequenceSide::below) {
  if (d == 0 || w == 0 || z == 0)
    throw std::invalid_argument("liouville_certificate: integers must be nonzero");
  // Resonance order pair (k1, -k2): the sequence center is -(-k2)/k1.
  const std::int64_t k1 = res.k1;
  const std::int64_t k2_order = -res.k2;
  const std::int64_t zz = z;
  const std::int64_t u = zz * zz - zz - 1;
  const std::int64_t sd = (side == SequenceSide::below) ? d : -d;

  using detail::checked_mul;
  const std::int64_t I1 = checked_mul(2 * u, -k2_order) * w + (1 - 2 * zz) * checked_mul(k1, sd);
  const std::int64_t I2 = checked_mul(k1, sd);
  const std::int64_t I3 = checked_mul(checked_mul(2 * u, k1), w);

  LiouvilleCertificate c;
  c.A2 = checked_mul(I3, I3);
  c.A1 = checked_mul(-2, checked_mul(I1, I3));
  c.A0 = checked_mul(I1, I1) - checked_mul(5, checked_mul(I2, I2));

  const __int128 disc = (__int128)c.A1 * c.A1 - 4 * (__int128)c.A2 * c.A0;
  if (detail::is_perfect_square(disc))
    throw std::domain_error("liouville_certificate: quadratic degenerates to a rational");

  c.root = (double(I1) + double(I2) * std::sqrt(5.0)) / double(I3);
  c.conjugate_root = (double(I1) - double(I2) * std::sqrt(5.0)) / double(I3);
  // |Q(k2/k1)| k1^2 >= 1 and |x - root'| <= 1 + |root| + |root'| on |x-root|<=1.
  c.C_bound =
      1.0 / (std::abs(double(c.A2)) * (1.0 + std::abs(c.root) + std::abs(c.conjugate_root)));
  return c;
}

/// Minimum of |k1 w + k2|·|k1| over 1 <= |k1| <= k_cap with k2 the nearest
/// integer; pass iff the minimum clears C.
inline std::pair<double, bool> check_strong_diophantine(double omega1, double C, int k_cap) {
  if (k_cap < 1) throw std::invalid_argument("check_strong_diophantine: k_cap must be >= 1");
  double best = std::numeric_limits<double>::infinity();
  for (int k1 = 1; k1 <= k_cap; ++k1) {
    const double x = double(k1) * omega1;
    const double frac = std::abs(x - std::round(x));
    best = std::min(best, frac * double(k1));
  }
  return {best, best >= C};
}

/// Real root of a^3 + a^2 - 1 = 0; its reciprocal is the smallest degree-3
/// Pisot-Vijayaraghavan number.
inline double pv_alpha() {
  static const double alpha = [] {
    double lo = 0.5, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
      double mid = 0.5 * (lo + hi);
      double v = mid * mid * mid + mid * mid - 1.0;
      (v < 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }();
  return alpha;
}

/// 3D Diophantine vector toward an intersection of spin-orbit resonances:
/// centers (k31/k1, k32/k2) offset by z-scaled rational combinations of the
/// PV root powers.
inline FrequencyVector seq_2d(const ResonancePair& res, const std::array<double, 4>& atilde,
                              int z, std::pair<int, int> signs = {+1, +1}) {
  if (z <= 0) throw std::invalid_argument("seq_2d: z must be a positive integer");
  const double det = atilde[0] * atilde[3] - atilde[1] * atilde[2];
  if (det == 0) throw std::invalid_argument("seq_2d: singular coefficient matrix");
  const double a = pv_alpha(), a2 = a * a;
  FrequencyVector f;
  f.omega = {res.first.center() + signs.first * (atilde[0] * a + atilde[1] * a2) / double(z),
             res.second.center() + signs.second * (atilde[2] * a + atilde[3] * a2) / double(z),
             1.0};
  f.label = res.label();
  f.z = z;
  f.atilde = atilde;
  return f;
}

/// Minimum of |k·omega| over nonzero ||k||_1 <= k_cap (lattice scan oracle).
inline double lattice_min(const std::vector<double>& omega, int k_cap) {
  const int n = int(omega.size());
  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](double partial, int budget) {
    // last component is chosen as the nearest integer within budget
    double t = -partial;
    for (double cand : {std::floor(t), std::ceil(t)}) {
      if (std::abs(cand) > budget) cand = cand < 0 ? -budget : budget;
      double v = std::abs(partial + cand * omega[std::size_t(n - 1)]);
      best = std::min(best, v);
    }
  };
  if (n == 2) {
    for (int k1 = 1; k1 <= k_cap; ++k1) consider(k1 * omega[0], k_cap - k1);
    best = std::min(best, std::abs(omega[1]));  // (0, ±1)
  } else {
    for (int k1 = 0; k1 <= k_cap; ++k1)
      for (int k2 = (k1 == 0 ? 0 : -(k_cap - k1)); k2 <= k_cap - k1; ++k2) {
        if (k1 == 0 && k2 == 0) continue;
        consider(k1 * omega[0] + k2 * omega[1], k_cap - k1 - std::abs(k2));
      }
    best = std::min(best, std::abs(omega[2]));
  }
  return best;
}

/// Newton inversion of the frequency map ∇(N+Z)(p) = omega_target on the real
/// actions (the trivial last component is dropped).  Divergence or a singular
/// path is reported as the resonant-rejection failure.
inline std::array<double, 3> invert_frequency(const IntegrableHamiltonian& h,
                                              const FrequencyVector& target,
                                              std::array<double, 3> guess, double tol = 1e-12) {
  const int nf = h.n - 1;  // free actions
  for (int it = 0; it < 50; ++it) {
    std::vector<double> w;
    try {
      w = h.omega(guess);
    } catch (const SingularEvaluation&) {
      throw InversionFailure("frequency inversion hit a singular correction");
    }
    double res = 0;
    std::array<double, 3> g{0, 0, 0};
    for (int j = 0; j < nf; ++j) {
      g[j] = w[std::size_t(j)] - target.omega[std::size_t(j)];
      res = std::max(res, std::abs(g[j]));
    }
    if (res < tol) return guess;
    // Jacobian = Hessian block of N + Z
    double J[2][2] = {{0, 0}, {0, 0}};
    try {
      for (int i = 0; i < nf; ++i)
        for (int j = 0; j < nf; ++j) {
          ActionRational hij = h.hessian_entry(i, j);
          J[i][j] = hij.empty() ? 0.0 : hij.eval_real(guess, h.n).real();
        }
    } catch (const SingularEvaluation&) {
      throw InversionFailure("frequency inversion hit a singular Hessian");
    }
    if (nf == 1) {
      if (J[0][0] == 0) throw InversionFailure("frequency inversion: singular Jacobian");
      guess[0] -= g[0] / J[0][0];
    } else {
      const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
      if (det == 0) throw InversionFailure("frequency inversion: singular Jacobian");
      guess[0] -= (J[1][1] * g[0] - J[0][1] * g[1]) / det;
      guess[1] -= (-J[1][0] * g[0] + J[0][0] * g[1]) / det;
    }
    if (!std::isfinite(guess[0]) || !std::isfinite(guess[1]))
      throw InversionFailure("frequency inversion diverged");
  }
  throw InversionFailure("frequency inversion: no convergence in 50 iterations");
}

}  // namespace resonest

#endif
