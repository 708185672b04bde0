#ifndef RESONEST_ACTION_RATIONAL_HPP
#define RESONEST_ACTION_RATIONAL_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <set>
#include <stdexcept>
#include <vector>

namespace resonest {

using Complex = std::complex<double>;

/// Thrown when a coefficient is evaluated on (or bounded over) a domain that
/// meets one of its affine zero sets.
struct SingularEvaluation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Closed real ball in action space.
struct ActionBall {
  std::array<double, 3> center{0, 0, 0};
  double radius = 0;
  int n = 2;
};

namespace detail {

inline double ipow(double x, int e) {
  double r = 1;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

inline Complex cipow(Complex x, int e) {
  Complex r = 1;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

}  // namespace detail

/// One factor (B + C·p)^(-D).  D >= 1 is the usual denominator power; the
/// homological-identity helpers may produce D < 0 (a positive affine power),
/// which every structural operation handles uniformly.  Factors are kept in a
/// canonical scaling with the first nonzero C component equal to one, so that
/// structurally equal factors compare bitwise equal.
struct AffineFactor {
  double b = 0;
  std::array<double, 3> c{0, 0, 0};
  int d = 1;

  friend bool operator==(const AffineFactor& x, const AffineFactor& y) {
    return x.b == y.b && x.c == y.c && x.d == y.d;
  }
  friend bool operator<(const AffineFactor& x, const AffineFactor& y) {
    if (x.c != y.c) return x.c < y.c;
    if (x.b != y.b) return x.b < y.b;
    return x.d < y.d;
  }
  /// Same zero set and gradient, any power.
  bool same_form(const AffineFactor& y) const { return b == y.b && c == y.c; }

  Complex eval(const Complex* p, int n) const {
    Complex v = b;
    for (int j = 0; j < n; ++j) v += c[j] * p[j];
    return v;
  }
  double eval_real(const double* p, int n) const {
    double v = b;
    for (int j = 0; j < n; ++j) v += c[j] * p[j];
    return v;
  }
  double grad_norm(int n) const {
    double s = 0;
    for (int j = 0; j < n; ++j) s += c[j] * c[j];
    return std::sqrt(s);
  }
  /// Euclidean distance from p0 to the zero set {B + C·p = 0}; +inf if C = 0.
  double zero_distance(const std::array<double, 3>& p0, int n) const {
    double g = grad_norm(n);
    if (g == 0) return std::numeric_limits<double>::infinity();
    return std::abs(eval_real(p0.data(), n)) / g;
  }
};

/// One term A · Π (B + C·p)^(-D) with a formal (eps1, eps2) degree.
struct CoefficientTerm {
  Complex amp{0, 0};
  std::vector<AffineFactor> factors;  // canonically scaled, sorted, merged
  std::array<std::uint8_t, 2> eps{0, 0};

  int eps_total() const { return int(eps[0]) + int(eps[1]); }

  Complex eval(const Complex* p, int n) const {
    Complex v = amp;
    for (const auto& f : factors) {
      Complex base = f.eval(p, n);
      if (base == Complex(0, 0))
        throw SingularEvaluation("coefficient term evaluated at a denominator zero");
      if (f.d > 0)
        v /= detail::cipow(base, f.d);
      else
        v *= detail::cipow(base, -f.d);
    }
    return v;
  }

  /// Upper bound for sup |term| over a real action ball: exact when all the
  /// denominator gradients are collinear (the product is log-convex along
  /// that line, so the segment endpoints dominate), a product of per-factor
  /// maxima otherwise.  Returns +inf when a denominator zero set meets the
  /// ball.
  double sup_bound(const ActionBall& ball) const {
    if (factors.empty()) return std::abs(amp);
    int axis = -1;
    bool one_axis = true, denom_only = true;
    for (const auto& f : factors) {
      if (f.d < 1) denom_only = false;
      int fa = -1;
      for (int j = 0; j < ball.n && one_axis; ++j) {
        if (f.c[j] == 0) continue;
        if (fa >= 0) one_axis = false;
        fa = j;
      }
      if (axis >= 0 && fa >= 0 && fa != axis) one_axis = false;
      if (fa >= 0) axis = fa;
    }
    if (one_axis && denom_only && axis >= 0) {
      double vlo = std::abs(amp), vhi = std::abs(amp);
      for (const auto& f : factors) {
        double mid = f.eval_real(ball.center.data(), ball.n);
        double spread = ball.radius * std::abs(f.c[axis]);
        double lo = mid - spread, hi = mid + spread;
        if ((lo <= 0) != (hi <= 0) || lo == 0 || hi == 0)
          return std::numeric_limits<double>::infinity();
        vlo /= detail::ipow(std::abs(lo), f.d);
        vhi /= detail::ipow(std::abs(hi), f.d);
      }
      return std::max(vlo, vhi);
    }
    double v = std::abs(amp);
    for (const auto& f : factors) {
      double mid = std::abs(f.eval_real(ball.center.data(), ball.n));
      double spread = ball.radius * f.grad_norm(ball.n);
      if (f.d > 0) {
        double lo = mid - spread;
        if (lo <= 0) return std::numeric_limits<double>::infinity();
        v /= detail::ipow(lo, f.d);
      } else {
        v *= detail::ipow(mid + spread, -f.d);
      }
    }
    return v;
  }

  bool in_denominator_class() const {
    for (const auto& f : factors)
      if (f.d < 1) return false;
    return true;
  }
};

namespace detail {

/// Canonicalize a raw factor against an amplitude: constant factors fold into
/// the amplitude, others are rescaled so the first nonzero gradient entry is 1.
inline bool canonicalize_factor(AffineFactor& f, Complex& amp, int n) {
  int lead = -1;
  for (int j = 0; j < n; ++j)
    if (f.c[j] != 0) {
      lead = j;
      break;
    }
  if (lead < 0) {
    if (f.b == 0) throw SingularEvaluation("identically zero denominator factor");
    if (f.d > 0)
      amp /= ipow(f.b, f.d);
    else
      amp *= ipow(f.b, -f.d);
    return false;  // folded away
  }
  double s = f.c[lead];
  if (s != 1.0) {
    f.b /= s;
    for (int j = 0; j < n; ++j) f.c[j] /= s;
    f.c[lead] = 1.0;
    if (f.d > 0)
      amp /= ipow(s, f.d);
    else
      amp *= ipow(s, -f.d);
  }
  return true;
}

inline bool term_key_less(const CoefficientTerm& x, const CoefficientTerm& y) {
  if (x.eps != y.eps) return x.eps < y.eps;
  if (x.factors.size() != y.factors.size()) return x.factors.size() < y.factors.size();
  for (std::size_t i = 0; i < x.factors.size(); ++i) {
    if (!(x.factors[i] == y.factors[i])) return x.factors[i] < y.factors[i];
  }
  return false;
}

inline bool term_key_equal(const CoefficientTerm& x, const CoefficientTerm& y) {
  return x.eps == y.eps && x.factors == y.factors;
}

}  // namespace detail

/// Product-skip guard: term pairs whose multiplied sup bounds cannot reach
/// `skip` are dropped before any arithmetic.  Bounds multiply exactly per
/// ball, so this never drops a product that could survive pruning at a
/// threshold 1000x larger.
struct MulGuard {
  double skip = 0;
  const std::vector<ActionBall>* balls = nullptr;

  double term_bound(const CoefficientTerm& t) const {
    if (!balls || balls->empty()) return std::abs(t.amp);
    double b = 0;
    for (const auto& ball : *balls) {
      b = std::max(b, t.sup_bound(ball));
      if (!std::isfinite(b)) return b;
    }
    return b;
  }
};

/// A coefficient in the closed class: finite sum of terms A·Π(B+C·p)^(-D).
/// Terms are kept merged on a canonical factor-list key, so structurally equal
/// terms always combine and exact cancellations drop out.
class ActionRational {
 public:
  ActionRational() = default;

  static ActionRational constant(Complex a, std::array<std::uint8_t, 2> eps = {0, 0}) {
    ActionRational r;
    if (a != Complex(0, 0)) {
      CoefficientTerm t;
      t.amp = a;
      t.eps = eps;
      r.terms_.push_back(std::move(t));
    }
    return r;
  }

  /// Builds from raw terms, canonicalizing factors and merging.
  static ActionRational from_terms(std::vector<CoefficientTerm> raw, int n_actions) {
    ActionRational r;
    r.terms_ = std::move(raw);
    r.normalize(n_actions);
    return r;
  }

  const std::vector<CoefficientTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  void add_term(CoefficientTerm t, int n_actions) {
    terms_.push_back(std::move(t));
    normalize(n_actions);
  }

  ActionRational& operator+=(const ActionRational& o) {
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    merge_only();
    return *this;
  }

  friend ActionRational operator+(ActionRational a, const ActionRational& b) {
    a += b;
    return a;
  }

  ActionRational& operator*=(Complex s) {
    if (s == Complex(0, 0)) {
      terms_.clear();
      return *this;
    }
    for (auto& t : terms_) t.amp *= s;
    return *this;
  }

  ActionRational conjugated() const {
    ActionRational r = *this;
    for (auto& t : r.terms_) t.amp = std::conj(t.amp);
    return r;
  }

  /// Product; term pairs whose combined formal degree reaches eps_cap (> 0)
  /// are skipped before any arithmetic.
  ActionRational mul(const ActionRational& o, int n_actions, int eps_cap = 0) const {
    std::vector<CoefficientTerm> out;
    out.reserve(terms_.size() * o.terms_.size());
    for (const auto& x : terms_)
      for (const auto& y : o.terms_) {
        if (eps_cap > 0 && x.eps_total() + y.eps_total() >= eps_cap) continue;
        CoefficientTerm t;
        t.amp = x.amp * y.amp;
        t.eps = {std::uint8_t(std::min(255, int(x.eps[0]) + int(y.eps[0]))),
                 std::uint8_t(std::min(255, int(x.eps[1]) + int(y.eps[1])))};
        t.factors.reserve(x.factors.size() + y.factors.size());
        t.factors.insert(t.factors.end(), x.factors.begin(), x.factors.end());
        t.factors.insert(t.factors.end(), y.factors.begin(), y.factors.end());
        out.push_back(std::move(t));
      }
    ActionRational r;
    r.terms_ = std::move(out);
    r.normalize(n_actions);
    return r;
  }

  /// Multiply by the bare affine form (B + C·p).  An existing matching
  /// denominator factor cancels exactly through the merge step.
  ActionRational mul_affine(double b, std::array<double, 3> c, int n_actions) const {
    ActionRational r = *this;
    for (auto& t : r.terms_) {
      AffineFactor f;
      f.b = b;
      f.c = c;
      f.d = -1;
      t.factors.push_back(f);
    }
    r.normalize(n_actions);
    return r;
  }

  /// d/dp_j by the product rule; the class is closed under it.
  ActionRational deriv(int j, int n_actions) const {
    std::vector<CoefficientTerm> out;
    for (const auto& t : terms_) {
      for (std::size_t i = 0; i < t.factors.size(); ++i) {
        const auto& f = t.factors[i];
        if (f.c[j] == 0) continue;
        CoefficientTerm d = t;
        d.amp *= Complex(-double(f.d) * f.c[j], 0);
        d.factors[i].d = f.d + 1;
        if (d.factors[i].d == 0) d.factors.erase(d.factors.begin() + long(i));
        out.push_back(std::move(d));
      }
    }
    ActionRational r;
    r.terms_ = std::move(out);
    r.normalize(n_actions);
    return r;
  }

  Complex eval(const Complex* p, int n) const {
    Complex s = 0;
    for (const auto& t : terms_) s += t.eval(p, n);
    return s;
  }
  Complex eval_real(const std::array<double, 3>& p, int n) const {
    std::array<Complex, 3> cp;
    for (int j = 0; j < n; ++j) cp[j] = p[j];
    return eval(cp.data(), n);
  }
  /// Value of the hermitian-mirror coefficient (conjugate amplitudes).
  Complex eval_conj(const Complex* p, int n) const {
    Complex s = 0;
    for (const auto& t : terms_) {
      CoefficientTerm u = t;
      u.amp = std::conj(u.amp);
      s += u.eval(p, n);
    }
    return s;
  }

  double max_abs_amp() const {
    double m = 0;
    for (const auto& t : terms_) m = std::max(m, std::abs(t.amp));
    return m;
  }

  /// Largest per-term sup bound over any of the balls (+inf if singular).
  double sup_bound(const std::vector<ActionBall>& balls) const {
    double s = 0;
    for (const auto& t : terms_) {
      double tb = 0;
      for (const auto& ball : balls) tb = std::max(tb, t.sup_bound(ball));
      s += tb;
    }
    return s;
  }

  bool in_denominator_class() const {
    for (const auto& t : terms_)
      if (!t.in_denominator_class()) return false;
    return true;
  }

  void collect_factors(std::set<AffineFactor>& out) const {
    for (const auto& t : terms_)
      for (auto f : t.factors) {
        f.d = 1;  // forms only
        out.insert(f);
      }
  }

  /// Action axes that actually appear in some denominator gradient.
  std::vector<int> active_axes(int n_actions) const {
    std::array<bool, 3> seen{false, false, false};
    for (const auto& t : terms_)
      for (const auto& f : t.factors)
        for (int j = 0; j < n_actions; ++j)
          if (f.c[j] != 0) seen[j] = true;
    std::vector<int> axes;
    for (int j = 0; j < n_actions; ++j)
      if (seen[j]) axes.push_back(j);
    return axes;
  }

  void normalize(int n_actions) {
    for (auto& t : terms_) {
      std::vector<AffineFactor> kept;
      kept.reserve(t.factors.size());
      for (auto& f : t.factors)
        if (detail::canonicalize_factor(f, t.amp, n_actions)) kept.push_back(f);
      std::sort(kept.begin(), kept.end());
      // merge factors with the same form by adding powers
      std::vector<AffineFactor> merged;
      for (auto& f : kept) {
        if (!merged.empty() && merged.back().same_form(f)) {
          merged.back().d += f.d;
          if (merged.back().d == 0) merged.pop_back();
        } else {
          merged.push_back(f);
        }
      }
      t.factors = std::move(merged);
    }
    merge_only();
  }

 private:
  void merge_only() {
    std::sort(terms_.begin(), terms_.end(), detail::term_key_less);
    std::vector<CoefficientTerm> merged;
    merged.reserve(terms_.size());
    for (auto& t : terms_) {
      if (!merged.empty() && detail::term_key_equal(merged.back(), t))
        merged.back().amp += t.amp;
      else
        merged.push_back(std::move(t));
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [](const CoefficientTerm& t) {
                                  return std::abs(t.amp.real()) < 1e-300 &&
                                         std::abs(t.amp.imag()) < 1e-300;
                                }),
                 merged.end());
    terms_ = std::move(merged);
  }

  std::vector<CoefficientTerm> terms_;
};

}  // namespace resonest

#endif
