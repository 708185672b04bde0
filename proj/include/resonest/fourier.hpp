#ifndef RESONEST_FOURIER_HPP
#define RESONEST_FOURIER_HPP

#include <array>
#include <cstdlib>
#include <ostream>
#include <stdexcept>

namespace resonest {

/// Integer Fourier index of a trigonometric series in up to three angles.
/// The last slot always indexes the time angle of the extended phase space.
struct FourierIndex {
  std::array<int, 3> k{0, 0, 0};
  int n = 2;

  FourierIndex() = default;
  FourierIndex(int k1, int k2) : k{k1, k2, 0}, n(2) {}
  FourierIndex(int k1, int k2, int k3) : k{k1, k2, k3}, n(3) {}

  /// 1-norm |k_1|+...+|k_n|, the order used for K-truncation.
  int order() const {
    int s = 0;
    for (int j = 0; j < n; ++j) s += std::abs(k[j]);
    return s;
  }

  bool is_zero() const {
    for (int j = 0; j < n; ++j)
      if (k[j] != 0) return false;
    return true;
  }

  FourierIndex negated() const {
    FourierIndex m = *this;
    for (int j = 0; j < n; ++j) m.k[j] = -k[j];
    return m;
  }

  /// Canonical representative of the pair {k, -k}: first nonzero entry positive.
  bool is_canonical() const {
    for (int j = 0; j < n; ++j) {
      if (k[j] > 0) return true;
      if (k[j] < 0) return false;
    }
    return false;  // zero index is handled separately
  }

  friend bool operator==(const FourierIndex& a, const FourierIndex& b) {
    if (a.n != b.n) return false;
    for (int j = 0; j < a.n; ++j)
      if (a.k[j] != b.k[j]) return false;
    return true;
  }
  friend bool operator<(const FourierIndex& a, const FourierIndex& b) {
    if (a.n != b.n) return a.n < b.n;
    for (int j = 0; j < a.n; ++j)
      if (a.k[j] != b.k[j]) return a.k[j] < b.k[j];
    return false;
  }

  friend FourierIndex operator+(const FourierIndex& a, const FourierIndex& b) {
    if (a.n != b.n) throw std::invalid_argument("FourierIndex: dimension mismatch");
    FourierIndex r = a;
    for (int j = 0; j < a.n; ++j) r.k[j] = a.k[j] + b.k[j];
    return r;
  }

  friend std::ostream& operator<<(std::ostream& os, const FourierIndex& x) {
    os << '(';
    for (int j = 0; j < x.n; ++j) os << x.k[j] << (j + 1 < x.n ? "," : "");
    return os << ')';
  }
};

}  // namespace resonest

#endif
