#ifndef RESONEST_POISSON_HPP
#define RESONEST_POISSON_HPP

#include <cstdio>
#include <functional>
#include <map>
#include <ostream>
#include <string>

#include "resonest/action_rational.hpp"
#include "resonest/fourier.hpp"

namespace resonest {

/// Trigonometric series Σ_k c_k(p) e^{i k·q} with coefficients in the closed
/// rational class.  Only the canonical half of each hermitian pair {k, -k} is
/// stored (plus the k = 0 entry), so the series is real on real arguments by
/// construction; the mirror coefficient is the conjugate-amplitude copy.
/// Values are immutable in spirit: every operation returns a fresh series.
class PoissonSeries {
 public:
  using EntryMap = std::map<FourierIndex, ActionRational>;

  explicit PoissonSeries(int n_angles = 2) : n_(n_angles) {}

  int n_angles() const { return n_; }
  int n_actions() const { return n_; }
  const EntryMap& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t entry_count() const { return entries_.size(); }

  std::size_t term_count() const {
    std::size_t s = 0;
    for (const auto& [k, c] : entries_) s += c.terms().size();
    return s;
  }

  /// Coefficient at an arbitrary index (resolving the hermitian mirror).
  ActionRational coeff(const FourierIndex& k) const {
    if (k.is_zero() || k.is_canonical()) {
      auto it = entries_.find(k);
      return it == entries_.end() ? ActionRational() : it->second;
    }
    auto it = entries_.find(k.negated());
    return it == entries_.end() ? ActionRational() : it->second.conjugated();
  }

  /// Adds c·e^{ik·q} plus its hermitian mirror.
  void accumulate(const FourierIndex& k, const ActionRational& c) {
    if (c.empty()) return;
    if (k.n != n_) throw std::invalid_argument("PoissonSeries: index dimension mismatch");
    if (k.is_zero() || k.is_canonical())
      insert(k, c);
    else
      insert(k.negated(), c.conjugated());
  }

  /// cos(k·q) with a (real) rational coefficient: c(p)·cos(k·q).
  static PoissonSeries cosine(const FourierIndex& k, ActionRational c, int n_angles) {
    PoissonSeries s(n_angles);
    if (k.is_zero()) {
      s.accumulate(k, c);
      return s;
    }
    c *= Complex(0.5, 0);
    s.accumulate(k, c);
    return s;
  }

  static PoissonSeries cosine(const FourierIndex& k, double amp, int n_angles,
                              std::array<std::uint8_t, 2> eps = {0, 0}) {
    return cosine(k, ActionRational::constant(Complex(amp, 0), eps), n_angles);
  }

  friend PoissonSeries operator+(const PoissonSeries& f, const PoissonSeries& g) {
    if (f.n_ != g.n_) throw std::invalid_argument("PoissonSeries: dimension mismatch");
    PoissonSeries r = f;
    for (const auto& [k, c] : g.entries_) r.insert(k, c);
    return r;
  }

  friend PoissonSeries operator-(const PoissonSeries& f, const PoissonSeries& g) {
    return f + (g * Complex(-1, 0));
  }

  PoissonSeries operator*(Complex s) const {
    PoissonSeries r(n_);
    if (s == Complex(0, 0)) return r;
    for (const auto& [k, c] : entries_) {
      ActionRational cc = c;
      cc *= s;
      r.entries_.emplace(k, std::move(cc));
    }
    return r;
  }

  /// Fourier convolution.  eps_cap > 0 drops term products of that total
  /// formal degree or higher before multiplying; order_cap > 0 drops result
  /// harmonics above that 1-norm; a guard drops products whose bounds cannot
  /// reach its skip threshold.
  PoissonSeries mul(const PoissonSeries& g, int eps_cap = 0, int order_cap = 0,
                    const MulGuard* guard = nullptr) const {
    if (n_ != g.n_) throw std::invalid_argument("PoissonSeries: dimension mismatch");
    // Per-term bounds, sorted descending, so the pair loop can stop at the
    // first product that cannot reach the skip threshold.
    const bool guarded = guard && guard->skip > 0;
    auto sorted_bounds = [&](const ActionRational& c) {
      std::vector<std::pair<double, std::uint32_t>> v;
      v.reserve(c.terms().size());
      for (std::uint32_t i = 0; i < c.terms().size(); ++i)
        v.emplace_back(guard->term_bound(c.terms()[i]), i);
      std::sort(v.begin(), v.end(),
                [](const auto& a, const auto& b) { return a.first > b.first; });
      return v;
    };
    std::map<FourierIndex, std::vector<std::pair<double, std::uint32_t>>> gbounds;
    if (guarded)
      for (const auto& [kg, cg] : g.entries_) gbounds.emplace(kg, sorted_bounds(cg));
    std::map<FourierIndex, std::vector<CoefficientTerm>> acc;
    for (const auto& [kf, cf] : entries_) {
      const bool fzero = kf.is_zero();
      std::vector<std::pair<double, std::uint32_t>> fb;
      if (guarded) fb = sorted_bounds(cf);
      for (const auto& [kg, cg] : g.entries_) {
        const bool gzero = kg.is_zero();
        const auto* gb = guarded ? &gbounds.find(kg)->second : nullptr;
        for (int sf = 0; sf < (fzero ? 1 : 2); ++sf) {
          for (int sg = 0; sg < (gzero ? 1 : 2); ++sg) {
            FourierIndex k = kf;
            for (int j = 0; j < n_; ++j)
              k.k[j] = (sf ? -kf.k[j] : kf.k[j]) + (sg ? -kg.k[j] : kg.k[j]);
            if (!(k.is_zero() || k.is_canonical())) continue;
            if (order_cap > 0 && k.order() > order_cap) continue;
            auto& bucket = acc[k];
            const std::size_t nx = cf.terms().size(), ny = cg.terms().size();
            for (std::size_t jx = 0; jx < nx; ++jx) {
              const std::uint32_t ix = guarded ? fb[jx].second : std::uint32_t(jx);
              const double bx = guarded ? fb[jx].first : 0;
              const auto& x = cf.terms()[ix];
              for (std::size_t jy = 0; jy < ny; ++jy) {
                if (guarded) {
                  const double prod = bx * (*gb)[jy].first;
                  if (!(prod >= guard->skip) && std::isfinite(prod)) break;
                }
                const std::uint32_t iy = guarded ? (*gb)[jy].second : std::uint32_t(jy);
                const auto& y = cg.terms()[iy];
                if (eps_cap > 0 && x.eps_total() + y.eps_total() >= eps_cap) continue;
                CoefficientTerm t;
                Complex ax = sf ? std::conj(x.amp) : x.amp;
                Complex ay = sg ? std::conj(y.amp) : y.amp;
                t.amp = ax * ay;
                t.eps = {std::uint8_t(std::min(255, int(x.eps[0]) + int(y.eps[0]))),
                         std::uint8_t(std::min(255, int(x.eps[1]) + int(y.eps[1])))};
                t.factors.reserve(x.factors.size() + y.factors.size());
                t.factors.insert(t.factors.end(), x.factors.begin(), x.factors.end());
                t.factors.insert(t.factors.end(), y.factors.begin(), y.factors.end());
                // the pair filter is loose when the factors peak at opposite
                // ends of the domain; the product's own bound is cheap
                if (guarded && guard->term_bound(t) < guard->skip) continue;
                bucket.push_back(std::move(t));
              }
              if (guarded && ny > 0) {
                const double prod0 = bx * (*gb)[0].first;
                if (!(prod0 >= guard->skip) && std::isfinite(prod0)) break;
              }
            }
            if (bucket.size() > 8192) {  // amortized merge keeps residency low
              ActionRational merged = ActionRational::from_terms(std::move(bucket), n_);
              bucket = merged.terms();
            }
          }
        }
      }
    }
    PoissonSeries r(n_);
    for (auto& [k, raw] : acc) {
      ActionRational c = ActionRational::from_terms(std::move(raw), n_);
      if (!c.empty()) r.entries_.emplace(k, std::move(c));
    }
    return r;
  }

  /// d/dq_j: multiplies each entry by i k_j.
  PoissonSeries deriv_angle(int j) const {
    PoissonSeries r(n_);
    for (const auto& [k, c] : entries_) {
      if (k.k[j] == 0) continue;
      ActionRational cc = c;
      cc *= Complex(0, double(k.k[j]));
      r.entries_.emplace(k, std::move(cc));
    }
    return r;
  }

  /// d/dp_j on the coefficients.
  PoissonSeries deriv_action(int j) const {
    PoissonSeries r(n_);
    for (const auto& [k, c] : entries_) {
      ActionRational d = c.deriv(j, n_);
      if (!d.empty()) r.entries_.emplace(k, std::move(d));
    }
    return r;
  }

  /// Poisson bracket {f,g} = Σ_j (∂f/∂q_j ∂g/∂p_j − ∂f/∂p_j ∂g/∂q_j).
  PoissonSeries bracket(const PoissonSeries& g, int eps_cap = 0, int order_cap = 0,
                        const MulGuard* guard = nullptr) const {
    if (n_ != g.n_) throw std::invalid_argument("PoissonSeries: dimension mismatch");
    PoissonSeries r(n_);
    for (int j = 0; j < n_; ++j) {
      PoissonSeries fq = deriv_angle(j);
      PoissonSeries gq = g.deriv_angle(j);
      if (!fq.empty()) {
        PoissonSeries gp = g.deriv_action(j);
        if (!gp.empty()) r = r + fq.mul(gp, eps_cap, order_cap, guard);
      }
      if (!gq.empty()) {
        PoissonSeries fp = deriv_action(j);
        if (!fp.empty()) r = r + fp.mul(gq, eps_cap, order_cap, guard) * Complex(-1, 0);
      }
    }
    return r;
  }

  /// Keeps exactly the entries whose index satisfies the predicate.  The
  /// predicate must be symmetric under k -> -k (it is applied to the stored
  /// canonical representative).
  PoissonSeries project(const std::function<bool(const FourierIndex&)>& pred) const {
    PoissonSeries r(n_);
    for (const auto& [k, c] : entries_)
      if (pred(k)) r.entries_.emplace(k, c);
    return r;
  }

  PoissonSeries mean_part() const {
    return project([](const FourierIndex& k) { return k.is_zero(); });
  }
  PoissonSeries oscillating_part() const {
    return project([](const FourierIndex& k) { return !k.is_zero(); });
  }
  PoissonSeries order_at_most(int cap) const {
    return project([cap](const FourierIndex& k) { return k.order() <= cap; });
  }
  PoissonSeries module_part(const std::vector<FourierIndex>& module, bool inside) const {
    return project([&module, inside](const FourierIndex& k) {
      for (const auto& m : module)
        if (m == k || m == k.negated()) return inside;
      return !inside;
    });
  }

  ActionRational mean_coefficient() const {
    FourierIndex zero;
    zero.n = n_;
    auto it = entries_.find(zero);
    return it == entries_.end() ? ActionRational() : it->second;
  }

  /// Σ_k c_k(p) e^{i k·q} at (possibly complex) arguments.
  Complex evaluate(const Complex* p, const Complex* q) const {
    Complex s = 0;
    for (const auto& [k, c] : entries_) {
      if (k.is_zero()) {
        s += c.eval(p, n_);
        continue;
      }
      Complex kq = 0;
      for (int j = 0; j < n_; ++j) kq += double(k.k[j]) * q[j];
      const Complex ph = std::exp(Complex(0, 1) * kq);
      s += c.eval(p, n_) * ph + c.eval_conj(p, n_) / ph;
    }
    return s;
  }

  double evaluate_real(const std::array<double, 3>& p, const std::array<double, 3>& q) const {
    std::array<Complex, 3> cp, cq;
    for (int j = 0; j < n_; ++j) {
      cp[j] = p[j];
      cq[j] = q[j];
    }
    return evaluate(cp.data(), cq.data()).real();
  }

  /// Removes coefficient terms whose sup bound over every ball of the domain
  /// is below mag_threshold, and all terms of total formal degree >= eps_cap
  /// (when eps_cap > 0).  Terms whose denominators meet the domain are never
  /// removed (their sup is infinite).
  PoissonSeries pruned(double mag_threshold, const std::vector<ActionBall>& domain,
                       int eps_cap = 0) const {
    PoissonSeries r(n_);
    for (const auto& [k, c] : entries_) {
      std::vector<CoefficientTerm> kept;
      for (const auto& t : c.terms()) {
        if (eps_cap > 0 && t.eps_total() >= eps_cap) continue;
        if (mag_threshold > 0 && !domain.empty()) {
          double b = 0;
          for (const auto& ball : domain) {
            b = std::max(b, t.sup_bound(ball));
            if (b >= mag_threshold) break;
          }
          if (b < mag_threshold) continue;
        }
        kept.push_back(t);
      }
      if (!kept.empty()) r.entries_.emplace(k, ActionRational::from_terms(std::move(kept), n_));
    }
    return r;
  }

  /// Finite part of Σ sup bounds; singular-on-domain terms are skipped, so
  /// this is a convergence monitor, not a norm.
  double magnitude_measure(const std::vector<ActionBall>& domain) const {
    double s = 0;
    for (const auto& [k, c] : entries_)
      for (const auto& t : c.terms()) {
        double b = std::numeric_limits<double>::infinity();
        for (const auto& ball : domain) b = std::min(b, t.sup_bound(ball));
        double w = k.is_zero() ? 1.0 : 2.0;
        if (std::isfinite(b)) s += w * b;
      }
    return s;
  }

  int max_order() const {
    int m = 0;
    for (const auto& [k, c] : entries_) m = std::max(m, k.order());
    return m;
  }

  void collect_factors(std::set<AffineFactor>& out) const {
    for (const auto& [k, c] : entries_) c.collect_factors(out);
  }

  /// Deterministic debug dump: one line per Fourier index (mirrors expanded),
  /// `k=(..) : A·Π(B+C·p)^-D [deg=(a,b)] + ...`.
  void dump(std::ostream& os) const {
    std::map<FourierIndex, ActionRational> full;
    for (const auto& [k, c] : entries_) {
      full.emplace(k, c);
      if (!k.is_zero()) full.emplace(k.negated(), c.conjugated());
    }
    char buf[64];
    for (const auto& [k, c] : full) {
      os << "k=" << k << " :";
      bool first = true;
      for (const auto& t : c.terms()) {
        os << (first ? " " : " + ");
        first = false;
        std::snprintf(buf, sizeof buf, "(%.17g%+.17gi)", t.amp.real(), t.amp.imag());
        os << buf;
        for (const auto& f : t.factors) {
          os << "*(";
          std::snprintf(buf, sizeof buf, "%.17g", f.b);
          os << buf;
          for (int j = 0; j < n_; ++j) {
            if (f.c[j] == 0) continue;
            std::snprintf(buf, sizeof buf, "%+.17g", f.c[j]);
            os << buf << "*p" << (j + 1);
          }
          os << ")^" << -f.d;
        }
        os << " [deg=(" << int(t.eps[0]) << ',' << int(t.eps[1]) << ")]";
      }
      if (first) os << " 0";
      os << '\n';
    }
  }

 private:
  void insert(const FourierIndex& k, const ActionRational& c) {
    auto [it, fresh] = entries_.emplace(k, c);
    if (!fresh) {
      it->second += c;
      if (it->second.empty()) entries_.erase(it);
    }
  }

  int n_;
  EntryMap entries_;
};

inline PoissonSeries add(const PoissonSeries& f, const PoissonSeries& g) { return f + g; }

}  // namespace resonest

#endif
