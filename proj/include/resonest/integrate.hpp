#ifndef RESONEST_INTEGRATE_HPP
#define RESONEST_INTEGRATE_HPP

#include <vector>

#include "resonest/hamiltonian.hpp"

namespace resonest {

/// Canonical equations of a Hamiltonian whose perturbation has constant
/// coefficients (the original, un-normalized models).
class ConstantCoefficientFlow {
 public:
  ConstantCoefficientFlow(const IntegrableHamiltonian& h, const PoissonSeries& r) : h_(h) {
    for (const auto& [k, c] : r.entries()) {
      Complex a = 0;
      for (const auto& t : c.terms()) {
        if (!t.factors.empty())
          throw std::invalid_argument("ConstantCoefficientFlow: coefficients must be constant");
        a += t.amp;
      }
      if (k.is_zero())
        offset_ += a.real();
      else
        modes_.push_back({k, a});
    }
  }

  int n() const { return h_.n; }

  /// y = (p_1..p_n, q_1..q_n)
  void operator()(const double* y, double* dy) const {
    const int n = h_.n;
    for (int j = 0; j < n; ++j) {
      dy[n + j] = h_.quadratic[j] * y[j] + h_.linear[j];  // dq/dt
      dy[j] = 0;
    }
    for (const auto& m : modes_) {
      double kq = 0;
      for (int j = 0; j < n; ++j) kq += m.k.k[j] * y[n + j];
      const Complex ph = m.amp * Complex(std::cos(kq), std::sin(kq));
      for (int j = 0; j < n; ++j) {
        if (m.k.k[j] == 0) continue;
        // dp_j/dt = -dR/dq_j = -2 Re(i k_j a e^{ikq}) = 2 k_j Im(a e^{ikq})
        dy[j] += 2.0 * m.k.k[j] * ph.imag();
      }
    }
  }

  double energy(const double* y) const {
    const int n = h_.n;
    double s = h_.energy_offset + offset_;
    for (int j = 0; j < n; ++j)
      s += 0.5 * h_.quadratic[j] * y[j] * y[j] + h_.linear[j] * y[j];
    for (const auto& m : modes_) {
      double kq = 0;
      for (int j = 0; j < n; ++j) kq += m.k.k[j] * y[n + j];
      s += 2.0 * (m.amp * Complex(std::cos(kq), std::sin(kq))).real();
    }
    return s;
  }

 private:
  struct Mode {
    FourierIndex k;
    Complex amp;
  };
  IntegrableHamiltonian h_;
  double offset_ = 0;
  std::vector<Mode> modes_;
};

struct IntegrationReport {
  double max_deviation = 0;
  bool within_bound = false;
  double energy_drift = 0;
  bool reliable = true;
  double t_reached = 0;
};

/// Dormand-Prince 5(4) with adaptive steps; tracks the largest action
/// excursion from the initial actions and the relative energy drift.
inline IntegrationReport verify_integration(const ConstantCoefficientFlow& flow,
                                            std::array<double, 3> p0, std::array<double, 3> q0,
                                            double r_bound, double t_end, double rtol = 1e-10,
                                            double drift_cap = 1e-6) {
  static const double c2 = 1. / 5, c3 = 3. / 10, c4 = 4. / 5, c5 = 8. / 9;
  static const double a21 = 1. / 5;
  static const double a31 = 3. / 40, a32 = 9. / 40;
  static const double a41 = 44. / 45, a42 = -56. / 15, a43 = 32. / 9;
  static const double a51 = 19372. / 6561, a52 = -25360. / 2187, a53 = 64448. / 6561,
                      a54 = -212. / 729;
  static const double a61 = 9017. / 3168, a62 = -355. / 33, a63 = 46732. / 5247, a64 = 49. / 176,
                      a65 = -5103. / 18656;
  static const double b1 = 35. / 384, b3 = 500. / 1113, b4 = 125. / 192, b5 = -2187. / 6784,
                      b6 = 11. / 84;
  static const double e1 = 71. / 57600, e3 = -71. / 16695, e4 = 71. / 1920, e5 = -17253. / 339200,
                      e6 = 22. / 525, e7 = -1. / 40;

  const int n = flow.n();
  const int dim = 2 * n;
  std::vector<double> y(dim), k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim),
      tmp(dim);
  for (int j = 0; j < n; ++j) {
    y[j] = p0[j];
    y[n + j] = q0[j];
  }
  const double atol = 1e-12;
  const double E0 = flow.energy(y.data());
  const double Escale = std::max(1.0, std::abs(E0));

  IntegrationReport rep;
  double t = 0, h = 1e-3;
  flow(y.data(), k1.data());
  long steps = 0;
  const long max_steps = 400000000L;
  while (t < t_end && steps < max_steps) {
    ++steps;
    if (t + h > t_end) h = t_end - t;
    auto stage = [&](std::vector<double>& out, std::initializer_list<std::pair<const std::vector<double>*, double>> terms) {
      for (int i = 0; i < dim; ++i) {
        double s = y[i];
        for (const auto& [v, w] : terms) s += h * w * (*v)[i];
        out[i] = s;
      }
    };
    stage(tmp, {{&k1, a21}});
    flow(tmp.data(), k2.data());
    stage(tmp, {{&k1, a31}, {&k2, a32}});
    flow(tmp.data(), k3.data());
    stage(tmp, {{&k1, a41}, {&k2, a42}, {&k3, a43}});
    flow(tmp.data(), k4.data());
    stage(tmp, {{&k1, a51}, {&k2, a52}, {&k3, a53}, {&k4, a54}});
    flow(tmp.data(), k5.data());
    stage(tmp, {{&k1, a61}, {&k2, a62}, {&k3, a63}, {&k4, a64}, {&k5, a65}});
    flow(tmp.data(), k6.data());
    stage(tmp, {{&k1, b1}, {&k3, b3}, {&k4, b4}, {&k5, b5}, {&k6, b6}});
    flow(tmp.data(), k7.data());

    double err = 0;
    for (int i = 0; i < dim; ++i) {
      double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                       e7 * k7[i]);
      double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(tmp[i]));
      err = std::max(err, std::abs(ei) / sc);
    }
    if (err <= 1.0) {
      t += h;
      y.swap(tmp);
      k1.swap(k7);  // FSAL
      double dev2 = 0;
      for (int j = 0; j < n; ++j) dev2 += (y[j] - p0[j]) * (y[j] - p0[j]);
      rep.max_deviation = std::max(rep.max_deviation, std::sqrt(dev2));
      if ((steps & 1023) == 0) {
        double drift = std::abs(flow.energy(y.data()) - E0) / Escale;
        rep.energy_drift = std::max(rep.energy_drift, drift);
      }
      (void)c2; (void)c3; (void)c4; (void)c5;
    }
    double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
    h *= std::min(5.0, std::max(0.2, fac));
  }
  rep.energy_drift = std::max(rep.energy_drift, std::abs(flow.energy(y.data()) - E0) / Escale);
  rep.reliable = rep.energy_drift < drift_cap && t >= t_end;
  rep.within_bound = rep.max_deviation <= r_bound;
  rep.t_reached = t;
  return rep;
}

}  // namespace resonest

#endif
