#ifndef RESONEST_NORMALIZE_HPP
#define RESONEST_NORMALIZE_HPP

#include <string>
#include <vector>

#include "resonest/hamiltonian.hpp"

namespace resonest {

struct NearResonanceRejection : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Truncation controls for Lie-series accumulation and pruning.  The pruning
/// floor of a transform is max(mag_threshold, rel_threshold * leading term
/// magnitude of its input): the absolute constant alone would keep a dozen
/// decades of sub-roundoff summands whose count grows combinatorially.
struct LieControls {
  double mag_threshold = 1e-20;
  double rel_threshold = 1e-9;
  int max_order = 12;
  int max_fourier_order = 48;
  int eps_cap = 0;                 // 0 disables the formal-degree filter
  std::vector<ActionBall> domain;  // working balls for pruning sups
};

struct GeneratingFunction {
  PoissonSeries chi;
  explicit GeneratingFunction(int n_angles = 2) : chi(n_angles) {}
};

namespace detail {

inline double series_measure(const PoissonSeries& f, const LieControls& c) {
  if (c.domain.empty()) {
    double s = 0;
    for (const auto& [k, coef] : f.entries())
      for (const auto& t : coef.terms()) s += std::abs(t.amp);
    return s;
  }
  return f.magnitude_measure(c.domain);
}

inline PoissonSeries pruned(const PoissonSeries& f, const LieControls& c) {
  PoissonSeries g = c.max_fourier_order > 0 ? f.order_at_most(c.max_fourier_order) : f;
  return g.pruned(c.mag_threshold, c.domain, c.eps_cap);
}

inline MulGuard guard_of(const LieControls& c) {
  MulGuard g;
  g.skip = c.mag_threshold;
  g.balls = &c.domain;
  return g;
}

/// Largest finite per-term magnitude bound of a series over the working
/// domain: the scale anchoring the relative pruning floor.
inline double leading_magnitude(const PoissonSeries& f, const LieControls& c) {
  MulGuard g = guard_of(c);
  double lead = 0;
  for (const auto& [k, coef] : f.entries())
    for (const auto& t : coef.terms()) {
      double b = g.term_bound(t);
      if (std::isfinite(b)) lead = std::max(lead, b);
    }
  return lead;
}

/// Controls with the pruning floor anchored to the input's leading scale.
inline LieControls anchored(const LieControls& c, const PoissonSeries& input) {
  LieControls a = c;
  if (c.rel_threshold > 0) {
    double lead = leading_magnitude(input, c);
    if (lead > 0) a.mag_threshold = std::max(c.mag_threshold, c.rel_threshold * lead);
  }
  return a;
}

}  // namespace detail

/// χ_k = R_k / (i k·ω_N) for every oscillating, non-module entry; the fixed
/// quadratic normal form keeps every divisor an affine form in the actions.
inline GeneratingFunction solve_homological(const IntegrableHamiltonian& h,
                                            const PoissonSeries& r_nonres) {
  GeneratingFunction gen(r_nonres.n_angles());
  for (const auto& [k, c] : r_nonres.entries()) {
    if (k.is_zero())
      throw std::domain_error("solve_homological: remainder carries a mean part");
    if (h.divisor_identically_zero(k))
      throw std::domain_error("solve_homological: identically resonant index; route it to the module");
    AffineFactor form = h.divisor_form(k);
    bool flat = true;
    for (int j = 0; j < h.n; ++j)
      if (form.c[j] != 0) flat = false;
    ActionRational cc = c;
    if (flat) {
      cc *= Complex(0, -1.0 / form.b);
    } else {
      std::vector<CoefficientTerm> terms = cc.terms();
      for (auto& t : terms) {
        t.amp *= Complex(0, -1);
        t.factors.push_back(form);
      }
      cc = ActionRational::from_terms(std::move(terms), h.n);
    }
    gen.chi.accumulate(k, cc);
  }
  return gen;
}

/// Residual {N+Z, χ} + R_nonres of the homological identity; exactly zero
/// after simplification when Z = 0.
inline PoissonSeries homological_residual(const IntegrableHamiltonian& h,
                                          const GeneratingFunction& gen,
                                          const PoissonSeries& r_nonres) {
  IntegrableHamiltonian nf = h;
  nf.set_correction(ActionRational());  // the equation uses the fixed N only
  return bracket_with_integrable(gen.chi, nf) * Complex(-1, 0) + r_nonres;
}

enum class LieDirection { forward, inverse };

struct LieResult {
  PoissonSeries series;
  std::vector<double> order_measures;
  bool divergence_warning = false;
  LieResult() : series(2) {}
};

/// exp(±L_χ) f = Σ_j (±1)^j L_χ^j f / j!, truncated by magnitude and order.
inline LieResult lie_apply(const PoissonSeries& f, const GeneratingFunction& gen,
                           LieDirection dir, const LieControls& c0) {
  LieResult out;
  out.series = f;
  const LieControls c = detail::anchored(c0, f);
  const MulGuard guard = detail::guard_of(c);
  PoissonSeries power = f;  // L^j f
  double fact = 1;
  int rising = 0;
  double prev = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= c.max_order; ++j) {
    power = detail::pruned(power.bracket(gen.chi, c.eps_cap, c.max_fourier_order, &guard), c);
    if (power.empty()) break;
    fact *= j;
    double w = (dir == LieDirection::inverse && (j % 2)) ? -1.0 / fact : 1.0 / fact;
    PoissonSeries contrib = detail::pruned(power * Complex(w, 0), c);
    out.series = out.series + contrib;
    double m = detail::series_measure(contrib, c);
    out.order_measures.push_back(m);
    rising = (m >= prev) ? rising + 1 : 0;
    if (rising >= 3) {
      out.divergence_warning = true;
      break;
    }
    prev = m;
    if (m < c.mag_threshold) break;
  }
  out.series = detail::pruned(out.series, c);
  return out;
}

/// exp(±L_χ) applied to an action-only function.
inline LieResult lie_apply(const ActionRational& z, const GeneratingFunction& gen,
                           LieDirection dir, const LieControls& c, int n_angles) {
  PoissonSeries zs(n_angles);
  FourierIndex zero;
  zero.n = n_angles;
  zs.accumulate(zero, z);
  return lie_apply(zs, gen, dir, c);
}

struct StepResult {
  HamiltonianSplit split;
  GeneratingFunction chi;
  std::vector<double> order_measures;
  bool divergence_warning = false;
  StepResult() : split(2), chi(2) {}
};

/// One normalization step: solve for χ from the nonresonant part, accumulate
/// R' = Σ_{j>=1} [ j/(j+1)! L^j R_nr + 1/j! (L^j Z + L^j R_Λ) ], absorb its
/// mean into Z and return the new split.  The fixed N is reused throughout.
inline StepResult normalize_step(const HamiltonianSplit& split, const LieControls& c0) {
  const int n = split.remainder.n_angles();
  StepResult out;
  out.split = split;
  out.chi = GeneratingFunction(n);

  const LieControls c = detail::anchored(c0, split.remainder);
  PoissonSeries r = split.remainder.oscillating_part();
  PoissonSeries r_mod = r.module_part(split.module, true);
  PoissonSeries r_nr = r.module_part(split.module, false).oscillating_part();
  if (r_nr.empty()) {
    out.split.step += 1;
    return out;
  }
  out.chi = solve_homological(split.h, r_nr);

  FourierIndex zero;
  zero.n = n;
  PoissonSeries fz(n);
  if (!split.h.zcorr.empty()) fz.accumulate(zero, split.h.zcorr);

  const MulGuard guard = detail::guard_of(c);
  PoissonSeries fr = r_nr, fl = r_mod;
  PoissonSeries rprime(n);
  double fact = 1;  // j!
  int rising = 0;
  double prev = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= c.max_order; ++j) {
    fact *= j;
    fr = detail::pruned(fr.bracket(out.chi.chi, c.eps_cap, c.max_fourier_order, &guard), c);
    if (!fz.empty()) fz = detail::pruned(fz.bracket(out.chi.chi, c.eps_cap, c.max_fourier_order, &guard), c);
    if (!fl.empty()) fl = detail::pruned(fl.bracket(out.chi.chi, c.eps_cap, c.max_fourier_order, &guard), c);
    const double w_r = double(j) / (fact * (j + 1));  // j/(j+1)!
    const double w_z = 1.0 / fact;
    PoissonSeries contrib = fr * Complex(w_r, 0);
    if (!fz.empty()) contrib = contrib + fz * Complex(w_z, 0);
    if (!fl.empty()) contrib = contrib + fl * Complex(w_z, 0);
    contrib = detail::pruned(contrib, c);
    if (contrib.empty() && fr.empty() && fz.empty() && fl.empty()) break;
    rprime = rprime + contrib;
    double m = detail::series_measure(contrib, c);
    out.order_measures.push_back(m);
    rising = (m >= prev) ? rising + 1 : 0;
    if (rising >= 3) {
      out.divergence_warning = true;
      break;
    }
    prev = m;
    if (m < c.mag_threshold) break;
  }

  ActionRational mean = rprime.mean_coefficient();
  out.split.h.add_correction(mean);
  out.split.remainder = detail::pruned(r_mod + rprime.oscillating_part(), c);
  out.split.step += 1;
  return out;
}

struct NormalizeLog {
  std::vector<double> remainder_measures;  // per step, after the step
  std::vector<std::size_t> entry_counts;
  std::vector<std::size_t> term_counts;
  std::vector<std::vector<FourierIndex>> supports;  // remainder support per step
  std::vector<std::string> warnings;
  bool stopped_early = false;
};

/// J successive steps with the same normal form in every homological
/// equation.  A step that increases the remainder measure is rolled back and
/// iteration stops with the optimal-order warning.
inline std::pair<HamiltonianSplit, std::vector<GeneratingFunction>> normalize_many(
    const HamiltonianSplit& split0, int J, const LieControls& c, NormalizeLog* log = nullptr) {
  if (J < 0) throw std::invalid_argument("normalize_many: J must be nonnegative");
  HamiltonianSplit cur = split0;
  std::vector<GeneratingFunction> chis;
  double prev_measure = detail::series_measure(cur.remainder, c);
  for (int s = 0; s < J; ++s) {
    StepResult res = normalize_step(cur, c);
    double m = detail::series_measure(res.split.remainder, c);
    if (log && res.divergence_warning)
      log->warnings.push_back("lie-divergence-warning@step" + std::to_string(s + 1));
    if (m > prev_measure && !cur.remainder.empty()) {
      if (log) {
        log->warnings.push_back("optimal-order-stop@step" + std::to_string(s + 1));
        log->stopped_early = true;
      }
      break;
    }
    cur = std::move(res.split);
    chis.push_back(std::move(res.chi));
    prev_measure = m;
    if (log) {
      log->remainder_measures.push_back(m);
      log->entry_counts.push_back(cur.remainder.entry_count());
      log->term_counts.push_back(cur.remainder.term_count());
    }
  }
  return {std::move(cur), std::move(chis)};
}

/// Time-1 coordinate flow of a generating function: the Lie series of each
/// coordinate, stored as correction series evaluated pointwise.
struct CoordinateFlow {
  int n = 2;
  std::vector<PoissonSeries> dp, dq;

  static CoordinateFlow build(const GeneratingFunction& gen, int sign, const LieControls& c) {
    const int n = gen.chi.n_angles();
    CoordinateFlow flow;
    flow.n = n;
    for (int j = 0; j < n; ++j) {
      // L^1 p_j = {p_j, χ} = -∂χ/∂q_j ;  L^1 q_j = {q_j, χ} = ∂χ/∂p_j
      flow.dp.push_back(flow.lie_tail(gen.chi.deriv_angle(j) * Complex(-1, 0), gen, sign, c));
      flow.dq.push_back(flow.lie_tail(gen.chi.deriv_action(j), gen, sign, c));
    }
    return flow;
  }

  /// Applies the flow at a real point; returns the action-shift size.
  double apply(std::array<double, 3>& p, std::array<double, 3>& q) const {
    std::array<double, 3> np = p, nq = q;
    double dev = 0;
    for (int j = 0; j < n; ++j) {
      double dpj = dp[std::size_t(j)].evaluate_real(p, q);
      double dqj = dq[std::size_t(j)].evaluate_real(p, q);
      np[j] += dpj;
      nq[j] += dqj;
      dev += dpj * dpj;
    }
    p = np;
    q = nq;
    return std::sqrt(dev);
  }

 private:
  PoissonSeries lie_tail(const PoissonSeries& seed, const GeneratingFunction& gen, int sign,
                         const LieControls& c0) const {
    // Σ_{m>=1} sign^m L^m x / m!  with L^m x = L^{m-1}(seed applied to L x)
    const LieControls c = detail::anchored(c0, seed);
    const MulGuard guard = detail::guard_of(c);
    PoissonSeries total = seed * Complex(sign, 0);
    PoissonSeries power = seed;
    double fact = 1;
    for (int m = 2; m <= c.max_order; ++m) {
      power = detail::pruned(power.bracket(gen.chi, c.eps_cap, c.max_fourier_order, &guard), c);
      if (power.empty()) break;
      fact *= m;
      double w = (sign < 0 && (m % 2)) ? -1.0 / fact : 1.0 / fact;
      total = total + power * Complex(w, 0);
      if (detail::series_measure(power, c) / fact < c.mag_threshold) break;
    }
    return detail::pruned(total, c);
  }
};

/// Back-transformation to original coordinates: the time-1 flows of the
/// generating functions applied in reverse construction order.  A shift
/// larger than identity_cap rejects the point as effectively resonant.
inline std::pair<std::array<double, 3>, std::array<double, 3>> back_transform(
    std::array<double, 3> p, std::array<double, 3> q,
    const std::vector<CoordinateFlow>& flows_reversed, double identity_cap) {
  for (const auto& flow : flows_reversed) {
    double dev = flow.apply(p, q);
    if (identity_cap > 0 && dev > identity_cap)
      throw NearResonanceRejection("back-transformation is not near-identity");
  }
  return {p, q};
}

inline std::vector<CoordinateFlow> build_back_flows(const std::vector<GeneratingFunction>& chis,
                                                    const LieControls& c) {
  std::vector<CoordinateFlow> flows;
  for (auto it = chis.rbegin(); it != chis.rend(); ++it)
    flows.push_back(CoordinateFlow::build(*it, +1, c));
  return flows;
}

inline std::vector<CoordinateFlow> build_forward_flows(
    const std::vector<GeneratingFunction>& chis, const LieControls& c) {
  std::vector<CoordinateFlow> flows;
  for (const auto& g : chis) flows.push_back(CoordinateFlow::build(g, -1, c));
  return flows;
}

}  // namespace resonest

#endif
