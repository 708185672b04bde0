#ifndef RESONEST_NORMBOUND_HPP
#define RESONEST_NORMBOUND_HPP

#include <cmath>
#include <functional>
#include <map>

#include "resonest/hamiltonian.hpp"

namespace resonest {

/// How the supremum of a coefficient over the action ball is taken.
///   complex_ball: over the complex extension, reduced to the real boundary
///     via the stationary-imaginary-part argument, with a sampled fallback
///     when the curvature check fails.
///   real_ball: over the real ball only (used for the Hessian bound).
enum class SupMode { complex_ball, real_ball };

struct SupOptions {
  SupMode mode = SupMode::complex_ball;
  int circle_samples = 720;
  int refine_iters = 48;
};

struct SupResult {
  double value = 0;
  bool fallback_used = false;
  bool check_failed = false;
};

namespace detail {

inline double golden_max(const std::function<double(double)>& f, double lo, double hi,
                         int iters) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    }
  }
  return std::max(f1, f2);
}

/// Curvature condition of the boundary reduction: at a real point the squared
/// modulus must not grow into the imaginary directions.  Valid for the
/// real-amplitude denominator class; anything else reports failure so the
/// caller falls back to sampling.
inline bool imaginary_max_check(const ActionRational& c, const std::array<double, 3>& a, int n) {
  for (const auto& t : c.terms()) {
    if (!t.in_denominator_class()) return false;
    if (std::abs(t.amp.imag()) > 1e-12 * (std::abs(t.amp.real()) + 1e-300)) return false;
  }
  std::array<Complex, 3> cp;
  for (int j = 0; j < n; ++j) cp[j] = a[j];
  double total = 0;
  std::vector<double> vals(c.terms().size());
  for (std::size_t j = 0; j < c.terms().size(); ++j) {
    vals[j] = c.terms()[j].eval(cp.data(), n).real();
    total += vals[j];
  }
  for (int h = 0; h < n; ++h) {
    bool axis_used = false;
    double s = 0;
    for (std::size_t j = 0; j < c.terms().size(); ++j) {
      const auto& t = c.terms()[j];
      double g = 0;
      for (const auto& f : t.factors) {
        if (f.c[h] == 0) continue;
        axis_used = true;
        double fv = f.eval_real(a.data(), n);
        g += 2.0 * f.d * f.c[h] * f.c[h] / (fv * fv);
      }
      s += vals[j] * g;
    }
    if (axis_used && total * s <= 0) return false;
  }
  return true;
}

}  // namespace detail

/// sup of |c(p)| over the ball of radius r0 about p0, per the boundary
/// reduction: one action axis compares the two real endpoints, two axes scan
/// the real circle; the curvature check guards the reduction and triggers a
/// complex-boundary sampling fallback.
inline SupResult coefficient_sup(const ActionRational& c, const std::array<double, 3>& p0,
                                 double r0, int n_actions, const SupOptions& opts = {}) {
  SupResult out;
  if (c.empty()) return out;
  if (r0 < 0) throw std::invalid_argument("coefficient_sup: negative radius");
  for (const auto& t : c.terms())
    for (const auto& f : t.factors)
      if (f.d > 0 && f.zero_distance(p0, n_actions) <= r0)
        throw SingularEvaluation("coefficient_sup: ball touches a denominator zero set");

  auto abs_at_real = [&](const std::array<double, 3>& a) {
    std::array<Complex, 3> cp;
    for (int j = 0; j < n_actions; ++j) cp[j] = a[j];
    return std::abs(c.eval(cp.data(), n_actions));
  };

  std::vector<int> axes = c.active_axes(n_actions);
  if (axes.empty() || r0 == 0) {
    out.value = abs_at_real(p0);
    return out;
  }

  if (axes.size() == 1) {
    const int j = axes[0];
    if (opts.mode == SupMode::real_ball) {
      auto g = [&](double t) {
        std::array<double, 3> a = p0;
        a[j] += t;
        return abs_at_real(a);
      };
      double best = std::max(g(-r0), g(r0));
      const int ns = 33;
      for (int i = 0; i <= ns; ++i) best = std::max(best, g(-r0 + 2 * r0 * i / ns));
      out.value = std::max(best, detail::golden_max(g, -r0, r0, opts.refine_iters));
      return out;
    }
    std::array<double, 3> lo = p0, hi = p0;
    lo[j] -= r0;
    hi[j] += r0;
    double vlo = abs_at_real(lo), vhi = abs_at_real(hi);
    const std::array<double, 3>& arg = vlo > vhi ? lo : hi;
    if (detail::imaginary_max_check(c, arg, n_actions)) {
      out.value = std::max(vlo, vhi);
      return out;
    }
    out.check_failed = true;
    out.fallback_used = true;
    // complex circle in the (a_j, b_j) plane
    auto g = [&](double th) {
      std::array<Complex, 3> cp;
      for (int i = 0; i < n_actions; ++i) cp[i] = p0[i];
      cp[j] = Complex(p0[j] + r0 * std::cos(th), r0 * std::sin(th));
      return std::abs(c.eval(cp.data(), n_actions));
    };
    double best = 0;
    int ibest = 0;
    for (int i = 0; i < opts.circle_samples; ++i) {
      double v = g(2 * M_PI * i / opts.circle_samples);
      if (v > best) {
        best = v;
        ibest = i;
      }
    }
    double step = 2 * M_PI / opts.circle_samples;
    out.value = std::max(best, detail::golden_max(g, (ibest - 1) * step, (ibest + 1) * step,
                                                  opts.refine_iters));
    return out;
  }

  // two active axes
  const int j0 = axes[0], j1 = axes[1];
  auto at_angle = [&](double th) {
    std::array<double, 3> a = p0;
    a[j0] += r0 * std::cos(th);
    a[j1] += r0 * std::sin(th);
    return a;
  };
  auto g = [&](double th) { return abs_at_real(at_angle(th)); };

  auto circle_max = [&](double radius) {
    auto gr = [&](double th) {
      std::array<double, 3> a = p0;
      a[j0] += radius * std::cos(th);
      a[j1] += radius * std::sin(th);
      return abs_at_real(a);
    };
    double best = 0;
    int ibest = 0;
    for (int i = 0; i < opts.circle_samples; ++i) {
      double v = gr(2 * M_PI * i / opts.circle_samples);
      if (v > best) {
        best = v;
        ibest = i;
      }
    }
    double step = 2 * M_PI / opts.circle_samples;
    return std::make_pair(
        std::max(best, detail::golden_max(gr, (ibest - 1) * step, (ibest + 1) * step,
                                          opts.refine_iters)),
        ibest * step);
  };

  if (opts.mode == SupMode::real_ball) {
    double best = abs_at_real(p0);
    for (int ir = 1; ir <= 8; ++ir) best = std::max(best, circle_max(r0 * ir / 8.0).first);
    out.value = best;
    return out;
  }

  auto [best, th_best] = circle_max(r0);
  if (detail::imaginary_max_check(c, at_angle(th_best), n_actions)) {
    out.value = best;
    return out;
  }
  out.check_failed = true;
  out.fallback_used = true;
  // boundary sphere of the complex ball: a = p0 + ρ cosψ u(θ), b = ρ sinψ u(φ)
  double vmax = best;
  const int nth = 48, nph = 48, nps = 13;
  for (int ips = 0; ips < nps; ++ips) {
    double ps = 0.5 * M_PI * ips / (nps - 1);
    double ca = r0 * std::cos(ps), cb = r0 * std::sin(ps);
    for (int ith = 0; ith < nth; ++ith) {
      double th = 2 * M_PI * ith / nth;
      for (int iph = 0; iph < (ips == 0 ? 1 : nph); ++iph) {
        double ph = 2 * M_PI * iph / nph;
        std::array<Complex, 3> cp;
        for (int i = 0; i < n_actions; ++i) cp[i] = p0[i];
        cp[j0] = Complex(p0[j0] + ca * std::cos(th), cb * std::cos(ph));
        cp[j1] = Complex(p0[j1] + ca * std::sin(th), cb * std::sin(ph));
        vmax = std::max(vmax, std::abs(c.eval(cp.data(), n_actions)));
      }
    }
  }
  out.value = vmax;
  return out;
}

/// Per-1-norm-class sums of coefficient suprema: the s0-independent part of
/// the weighted norm, so E(s0) is a cheap exponential sum afterwards.
struct NormProfile {
  std::map<int, double> class_sums;
  bool fallback_used = false;

  double value_at(double s0) const {
    double s = 0;
    for (const auto& [m, v] : class_sums) s += v * std::exp(m * s0);
    return s;
  }
  double total_sup() const { return value_at(0.0); }
};

inline NormProfile norm_profile(const PoissonSeries& r, const std::array<double, 3>& p0,
                                double r0, const SupOptions& opts = {}) {
  NormProfile prof;
  for (const auto& [k, c] : r.entries()) {
    SupResult s = coefficient_sup(c, p0, r0, r.n_actions(), opts);
    prof.fallback_used = prof.fallback_used || s.fallback_used;
    prof.class_sums[k.order()] += (k.is_zero() ? 1.0 : 2.0) * s.value;
  }
  return prof;
}

/// ||R||_{r0,s0} via the 1-norm class grouping.
inline double weighted_norm(const PoissonSeries& r, const std::array<double, 3>& p0, double r0,
                            double s0, const SupOptions& opts = {}) {
  return norm_profile(r, p0, r0, opts).value_at(s0);
}

/// Upper bound for sup over the ball of the spectral norm of the Hessian of
/// N + Z; the pure normal form gives the exact kinetic diagonal.
inline double hessian_norm_bound(const IntegrableHamiltonian& h, const std::array<double, 3>& p0,
                                 double r0, SupMode mode = SupMode::real_ball) {
  SupOptions opts;
  opts.mode = mode;
  double best_row = 0;
  for (int i = 0; i < h.n; ++i) {
    double row = 0;
    for (int j = 0; j < h.n; ++j) {
      ActionRational e = h.hessian_entry(i, j);
      if (e.empty()) continue;
      row += coefficient_sup(e, p0, r0, h.n, opts).value;
    }
    best_row = std::max(best_row, row);
  }
  return best_row;
}

}  // namespace resonest

#endif
