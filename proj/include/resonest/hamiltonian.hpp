#ifndef RESONEST_HAMILTONIAN_HPP
#define RESONEST_HAMILTONIAN_HPP

#include <vector>

#include "resonest/poisson.hpp"

namespace resonest {

/// Integrable part N(p) + Z(p): a fixed quadratic-plus-linear normal form and
/// a rational correction accumulated by the normalization steps.
struct IntegrableHamiltonian {
  int n = 2;
  std::array<double, 3> quadratic{0, 0, 0};  // coefficients of p_j^2/2
  std::array<double, 3> linear{0, 0, 0};     // coefficients of p_j
  ActionRational zcorr;                      // Z(p), zero at step 0
  double energy_offset = 0;                  // angle-independent potential part

  std::array<ActionRational, 3> zgrad;  // cached dZ/dp_j

  void set_correction(ActionRational z) {
    zcorr = std::move(z);
    for (int j = 0; j < n; ++j) zgrad[j] = zcorr.deriv(j, n);
  }

  void add_correction(const ActionRational& dz) {
    ActionRational z = zcorr;
    z += dz;
    set_correction(std::move(z));
  }

  double normal_form_value(const std::array<double, 3>& p) const {
    double s = 0;
    for (int j = 0; j < n; ++j) s += 0.5 * quadratic[j] * p[j] * p[j] + linear[j] * p[j];
    return s;
  }

  double value(const std::array<double, 3>& p) const {
    double s = normal_form_value(p) + energy_offset;
    if (!zcorr.empty()) s += zcorr.eval_real(p, n).real();
    return s;
  }

  /// Frequency map ω(p) = ∇(N + Z); the last component is 1 in normalized
  /// units for the extended models built here.
  std::vector<double> omega(const std::array<double, 3>& p) const {
    std::vector<double> w(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
      w[std::size_t(j)] = quadratic[j] * p[j] + linear[j];
      if (!zgrad[j].empty()) w[std::size_t(j)] += zgrad[j].eval_real(p, n).real();
    }
    return w;
  }

  /// Hessian entry of N + Z.
  ActionRational hessian_entry(int i, int j) const {
    ActionRational h;
    if (i == j && quadratic[i] != 0) h += ActionRational::constant(Complex(quadratic[i], 0));
    if (!zgrad[i].empty()) {
      ActionRational z2 = zgrad[i].deriv(j, n);
      h += z2;
    }
    return h;
  }

  /// The affine form k·ω_N(p) of the fixed normal form (Z excluded): the
  /// divisor used by the homological equation; keeps denominators affine.
  AffineFactor divisor_form(const FourierIndex& k) const {
    AffineFactor f;
    f.d = 1;
    f.b = 0;
    for (int j = 0; j < n; ++j) {
      f.b += double(k.k[j]) * linear[j];
      f.c[j] = double(k.k[j]) * quadratic[j];
    }
    return f;
  }

  bool divisor_identically_zero(const FourierIndex& k) const {
    AffineFactor f = divisor_form(k);
    if (f.b != 0) return false;
    for (int j = 0; j < n; ++j)
      if (f.c[j] != 0) return false;
    return true;
  }
};

/// Hamiltonian split N + Z + R with a (possibly empty) resonant module.
struct HamiltonianSplit {
  IntegrableHamiltonian h;
  PoissonSeries remainder;
  std::vector<FourierIndex> module;  // resonant module Λ
  int step = 0;

  explicit HamiltonianSplit(int n_angles = 2) : remainder(n_angles) {}

  double total_value(const std::array<double, 3>& p, const std::array<double, 3>& q) const {
    return h.value(p) + remainder.evaluate_real(p, q);
  }

  /// Distance from p0 to the nearest denominator zero set of Z or R.
  double singularity_distance(const std::array<double, 3>& p0) const {
    std::set<AffineFactor> forms;
    h.zcorr.collect_factors(forms);
    remainder.collect_factors(forms);
    double d = std::numeric_limits<double>::infinity();
    for (const auto& f : forms) d = std::min(d, f.zero_distance(p0, h.n));
    return d;
  }
};

/// {f, N+Z}: multiplies entry k by i·(k·ω_N)(p) (exact cancellation against a
/// matching denominator factor) and adds the Z contribution via the generic
/// bracket.  May produce positive affine powers when no factor cancels.
inline PoissonSeries bracket_with_integrable(const PoissonSeries& f,
                                             const IntegrableHamiltonian& h) {
  PoissonSeries out(f.n_angles());
  for (const auto& [k, c] : f.entries()) {
    if (k.is_zero()) continue;
    AffineFactor form = h.divisor_form(k);
    bool flat = true;
    for (int j = 0; j < h.n; ++j)
      if (form.c[j] != 0) flat = false;
    ActionRational cc;
    if (flat) {
      cc = c;
      cc *= Complex(0, form.b);
    } else {
      cc = c.mul_affine(form.b, form.c, h.n);
      cc *= Complex(0, 1);
    }
    out.accumulate(k, cc);
  }
  if (!h.zcorr.empty()) {
    PoissonSeries zs(f.n_angles());
    FourierIndex zero;
    zero.n = f.n_angles();
    zs.accumulate(zero, h.zcorr);
    out = out + f.bracket(zs);
  }
  return out;
}

}  // namespace resonest

#endif
