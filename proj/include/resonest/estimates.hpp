#ifndef RESONEST_ESTIMATES_HPP
#define RESONEST_ESTIMATES_HPP

#include <optional>
#include <string>

#include "resonest/diophantine.hpp"
#include "resonest/normalize.hpp"
#include "resonest/normbound.hpp"

namespace resonest {

/// Smallest |k·omega| over nonzero integer vectors with ||k||_1 <= K.  The
/// last frequency component is 1, so the last index entry is scanned as the
/// nearest integer within the remaining 1-norm budget.
inline double alpha_max(const std::vector<double>& omega, double K) {
  if (K < 1) throw std::invalid_argument("alpha_max: K must be >= 1");
  return lattice_min(omega, int(std::floor(K)));
}

/// r, calE and T of the confinement statement for given parameters, with the
/// applicability verdict E <= calE attached.
struct TheoremBounds {
  double r = 0;
  double calE = 0;
  double T = 0;
  bool applicable = false;
};

inline TheoremBounds theorem_bounds(double alpha, double M, double E, double K, double ell,
                                    double s0, double r_analytic) {
  TheoremBounds b;
  b.r = std::min(r_analytic, alpha / (M * K) * (1.0 - 1.0 / ell));
  b.calE = alpha * b.r / (128.0 * ell * K);
  b.T = E > 0 ? s0 * b.r / (5.0 * E) * std::exp(K * s0 / 6.0)
              : std::numeric_limits<double>::infinity();
  b.applicable = E <= b.calE;
  return b;
}

/// The ell maximizing calE(ell) = (1/ell)(alpha/K) min(r_d, rho(1-1/ell)),
/// rho = alpha/(M K): closed form, 2 when the analyticity radius is not the
/// binding constraint, else the smallest ell saturating the min.
inline double optimize_ell(double alpha, double K, double M, double r_d) {
  if (alpha <= 0 || K <= 0 || M <= 0 || r_d <= 0)
    throw std::invalid_argument("optimize_ell: arguments must be positive");
  const double rho = alpha / (M * K);
  if (r_d >= rho / 2) return 2.0;
  return rho / (rho - r_d);
}

struct S0Result {
  double s0 = 0;
  double T = 0;
  double E = 0;
  double s_max = 0;
  bool ok = false;
};

/// Root E(s0) = calE by bisection (s_max capped at 10), then maximization of
/// T(s0) = s0 r e^{K s0/6} / (5 E(s0)) on (0, s_max] by golden sections over
/// a bracket partition.
inline S0Result optimize_s0(const NormProfile& prof, double calE, double r, double K) {
  S0Result out;
  const double E0 = prof.value_at(0.0);
  if (E0 <= 0) {  // degenerate integrable case
    out.s0 = 10.0;
    out.s_max = 10.0;
    out.E = 0;
    out.T = std::numeric_limits<double>::infinity();
    out.ok = true;
    return out;
  }
  if (E0 >= calE) return out;  // fail-norm
  const double s_cap = 10.0;
  double s_max = s_cap;
  if (prof.value_at(s_cap) > calE) {
    double lo = 0, hi = s_cap;
    for (int i = 0; i < 200; ++i) {
      double mid = 0.5 * (lo + hi);
      (prof.value_at(mid) <= calE ? lo : hi) = mid;
      if (hi - lo < 1e-10 * std::max(1.0, lo)) break;
    }
    s_max = lo;
  }
  if (s_max <= 0) return out;

  auto T_of = [&](double s0) { return s0 * r * std::exp(K * s0 / 6.0) / (5.0 * prof.value_at(s0)); };
  double best_s = s_max, best_T = T_of(s_max);
  const double marks[4] = {1e-6, 1.0 / 3.0, 2.0 / 3.0, 1.0};
  for (int i = 0; i < 3; ++i) {
    double lo = marks[i] * s_max, hi = marks[i + 1] * s_max;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = T_of(x1), f2 = T_of(x2);
    for (int it = 0; it < 60; ++it) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + g * (hi - lo);
        f2 = T_of(x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - g * (hi - lo);
        f1 = T_of(x1);
      }
    }
    double xs = f1 > f2 ? x1 : x2, fs = std::max(f1, f2);
    if (fs > best_T) {
      best_T = fs;
      best_s = xs;
    }
  }
  out.s0 = best_s;
  out.T = best_T;
  out.E = prof.value_at(best_s);
  out.s_max = s_max;
  out.ok = true;
  return out;
}

enum class ScanStatus { success, fail_norm, fail_resonant, fail_inversion };

inline std::string to_string(ScanStatus s) {
  switch (s) {
    case ScanStatus::success: return "success";
    case ScanStatus::fail_norm: return "fail-norm";
    case ScanStatus::fail_resonant: return "fail-resonant";
    case ScanStatus::fail_inversion: return "fail-inversion";
  }
  return "?";
}

/// Outcome of one scan point: chosen parameters, derived bounds and status.
struct StabilityRecord {
  int z = 0;
  int ray = -1;
  std::vector<double> omega;
  std::array<double, 3> p0{0, 0, 0};
  ScanStatus status = ScanStatus::fail_norm;
  int J = 0;
  double K = 0, s0 = 0, ell = 0;
  double alpha = 0, M = 0, E = 0, calE = 0;
  double r = 0, r_back = 0, T = 0;
  std::string notes;
};

/// Control constants of the K-search loop, with the published defaults.
struct OptimizerControls {
  double dK_initial = 10.0;
  double dK_control = 0.1;
  int N_control = 20;
  double c_control = 1.0 / 3.0;
  double K_control = 1e5;
  double T_control = std::numeric_limits<double>::infinity();
  double tol = 1e-8;
  double safety = 0.99;
  SupOptions sup;
};

/// The K-search loop: per-K inner optimization (nonresonance gap, closed-form
/// ell, s0 root-and-maximize), the two-level non-improvement bookkeeping, and
/// backtracking K while shrinking dK.
inline StabilityRecord optimize_full(const HamiltonianSplit& split,
                                     const std::array<double, 3>& p0, double r0_input,
                                     const OptimizerControls& ctl) {
  StabilityRecord rec;
  rec.p0 = p0;
  rec.J = split.step;
  const IntegrableHamiltonian& h = split.h;

  std::vector<double> omega = h.omega(p0);
  rec.omega = omega;

  const double r_sing = split.singularity_distance(p0);
  const double r_s = ctl.safety * r_sing;
  const double r_d = std::min(r_s, r0_input);
  if (!(r_d > 0)) {
    rec.status = ScanStatus::fail_resonant;
    rec.notes = "initial-point-on-singularity";
    return rec;
  }

  double M;
  NormProfile prof;
  try {
    M = hessian_norm_bound(h, p0, r_d, SupMode::real_ball);
    prof = norm_profile(split.remainder, p0, r_d, ctl.sup);
  } catch (const SingularEvaluation&) {
    rec.status = ScanStatus::fail_resonant;
    rec.notes = "singular-norm-domain";
    return rec;
  }
  rec.M = M;
  if (prof.fallback_used) rec.notes += "hessian-fallback;";

  if (prof.total_sup() <= 0) {
    rec.status = ScanStatus::success;
    rec.E = 0;
    rec.r = r_d;
    rec.r_back = r_d;
    rec.T = std::numeric_limits<double>::infinity();
    rec.notes += "degenerate-integrable;";
    return rec;
  }

  const double K_min = std::max(1, split.remainder.max_order());
  bool any_norm_fail = false, any_resonant = false;

  auto inner = [&](double K) -> std::optional<StabilityRecord> {
    double alpha = alpha_max(omega, K);
    if (alpha <= ctl.tol) {
      any_resonant = true;
      return std::nullopt;
    }
    double ell = optimize_ell(alpha, K, M, r_d);
    double r = std::min(r_d, alpha / (M * K) * (1.0 - 1.0 / ell));
    double calE = alpha * r / (128.0 * ell * K);
    S0Result s = optimize_s0(prof, calE, r, K);
    if (!s.ok) {
      any_norm_fail = true;
      return std::nullopt;
    }
    StabilityRecord cand = rec;
    cand.K = K;
    cand.s0 = s.s0;
    cand.ell = ell;
    cand.alpha = alpha;
    cand.E = s.E;
    cand.calE = calE;
    cand.r = r;
    cand.T = s.T;
    cand.status = ScanStatus::success;
    return cand;
  };

  double T_max = 0, T1 = 0, T2 = 0;
  double K = K_min, dK = ctl.dK_initial;
  int iterations = 0;
  std::optional<StabilityRecord> best;
  while (dK > ctl.dK_control && K < ctl.K_control && iterations < ctl.N_control &&
         T_max < ctl.T_control) {
    K += dK;
    auto cand = inner(K);
    double T = cand ? cand->T : 0.0;
    if (cand && T > T_max) {
      T_max = T;
      best = cand;
    }
    if (T > T1) {
      T2 = T1;
      T1 = T;
    } else {
      T1 = T2;
      K = std::max(K - 2 * dK, double(K_min));
      dK *= ctl.c_control;
    }
    ++iterations;
  }

  if (!best) {
    rec.status =
        any_norm_fail ? ScanStatus::fail_norm
                      : (any_resonant ? ScanStatus::fail_resonant : ScanStatus::fail_norm);
    return rec;
  }
  best->notes = rec.notes;
  best->r_back = best->r;  // refined by the caller once flows are applied
  return *best;
}

/// Pendulum half-width of the resonance zone of harmonic k, measured in the
/// action plane perpendicular to the resonance line.  p_hint selects the
/// point on the line (exact for the 1D model, nearest-to-hint otherwise).
struct ResonanceLine {
  FourierIndex k;
  std::array<double, 3> p_star{0, 0, 0};
  double halfwidth = 0;
  double amplitude = 0;  // cosine amplitude at the resonant action
  int order_class = 0;   // 0 main, j > 0 first appears after step j
};

inline ResonanceLine resonance_halfwidth(const IntegrableHamiltonian& h, const PoissonSeries& r,
                                         const FourierIndex& k,
                                         const std::array<double, 3>& p_hint) {
  if (k.k[0] == 0 && (h.n < 3 || k.k[1] == 0))
    throw std::invalid_argument("resonance_halfwidth: index has no action component");
  ResonanceLine line;
  line.k = k;
  // point on {k·omega_N(p) = 0} nearest to the hint
  AffineFactor form = h.divisor_form(k);
  double num = form.eval_real(p_hint.data(), h.n);
  double g2 = 0;
  for (int j = 0; j < h.n; ++j) g2 += form.c[j] * form.c[j];
  if (g2 == 0) throw std::invalid_argument("resonance_halfwidth: flat divisor");
  std::array<double, 3> ps = p_hint;
  for (int j = 0; j < h.n; ++j) ps[j] -= num * form.c[j] / g2;
  line.p_star = ps;

  ActionRational c = r.coeff(k);
  if (c.empty()) return line;
  double amp;
  try {
    amp = 2.0 * std::abs(c.eval_real(ps, h.n));
  } catch (const SingularEvaluation&) {
    // the harmonic's own divisor factors blow up on the line: step aside
    std::array<double, 3> q = ps;
    double delta = 1e-3;
    for (int j = 0; j < h.n; ++j) q[j] += delta * form.c[j] / std::sqrt(g2);
    amp = 2.0 * std::abs(c.eval_real(q, h.n));
  }
  line.amplitude = amp;
  double curv = 0, norm2 = 0;
  for (int j = 0; j < h.n; ++j) {
    curv += k.k[j] * k.k[j] * h.quadratic[j];
    double nj = double(k.k[j]) * h.quadratic[j];
    norm2 += nj * nj;
  }
  if (curv <= 0 || norm2 <= 0) return line;
  line.halfwidth = 2.0 * std::sqrt(amp * curv) / std::sqrt(norm2);
  return line;
}

}  // namespace resonest

#endif
