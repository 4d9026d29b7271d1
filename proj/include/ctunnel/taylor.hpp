#pragma once

// Truncated Taylor series arithmetic ("jets"). A Taylor<T> of order K holds
// the coefficients c_0..c_K of f(x0 + t) = sum c_k t^k. Binary operations
// truncate to the smaller order of their operands.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace ctunnel {

template <typename T>
class Taylor {
 public:
  Taylor() : c_(1, T(0)) {}
  explicit Taylor(int order, T value = T(0)) : c_(static_cast<std::size_t>(order) + 1, T(0)) {
    c_[0] = value;
  }
  explicit Taylor(std::vector<T> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) c_.push_back(T(0));
  }

  /// The independent variable x0 + t.
  static Taylor variable(T x0, int order) {
    Taylor v(order, x0);
    if (order >= 1) v.c_[1] = T(1);
    return v;
  }

  template <typename U>
  static Taylor from(const Taylor<U>& other) {
    std::vector<T> c(other.coeffs().begin(), other.coeffs().end());
    return Taylor(std::move(c));
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<T>& coeffs() const { return c_; }
  T& operator[](int k) { return c_[static_cast<std::size_t>(k)]; }
  const T& operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }
  T value() const { return c_[0]; }

  /// k-th derivative at the expansion point.
  T derivative_at(int k) const {
    if (k > order()) return T(0);
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return c_[static_cast<std::size_t>(k)] * f;
  }

  Taylor truncated(int order) const {
    std::vector<T> c(c_.begin(), c_.begin() + std::min<std::ptrdiff_t>(order + 1, c_.size()));
    return Taylor(std::move(c));
  }

  /// d/dt; order drops by one (order-0 input yields the zero constant).
  Taylor derivative() const {
    if (order() == 0) return Taylor(0);
    std::vector<T> c(c_.size() - 1);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = c_[k + 1] * static_cast<double>(k + 1);
    return Taylor(std::move(c));
  }

  /// Antiderivative with the given value at t = 0; order rises by one.
  Taylor antiderivative(T constant = T(0)) const {
    std::vector<T> c(c_.size() + 1);
    c[0] = constant;
    for (std::size_t k = 0; k < c_.size(); ++k) c[k + 1] = c_[k] / static_cast<double>(k + 1);
    return Taylor(std::move(c));
  }

  /// Divide by t^m; the dropped leading coefficients are assumed to vanish.
  Taylor shift_down(int m) const {
    if (m > order()) throw std::domain_error("Taylor::shift_down beyond order");
    return Taylor(std::vector<T>(c_.begin() + m, c_.end()));
  }

  /// Multiply by t^m keeping the order fixed.
  Taylor shift_up(int m) const {
    std::vector<T> c(c_.size(), T(0));
    for (std::size_t k = static_cast<std::size_t>(m); k < c.size(); ++k) c[k] = c_[k - m];
    return Taylor(std::move(c));
  }

  /// Horner evaluation of the polynomial at displacement t.
  template <typename S>
  auto eval(S t) const {
    using R = decltype(T() * S());
    R acc = R(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * t + *it;
    return acc;
  }

  Taylor operator-() const {
    Taylor r(*this);
    for (auto& v : r.c_) v = -v;
    return r;
  }

  Taylor& operator+=(const Taylor& o) {
    resize_to(std::min(order(), o.order()));
    for (int k = 0; k <= order(); ++k) c_[k] += o.c_[k];
    return *this;
  }
  Taylor& operator-=(const Taylor& o) {
    resize_to(std::min(order(), o.order()));
    for (int k = 0; k <= order(); ++k) c_[k] -= o.c_[k];
    return *this;
  }
  Taylor& operator*=(const Taylor& o) { return *this = *this * o; }
  Taylor& operator/=(const Taylor& o) { return *this = *this / o; }

  Taylor& operator+=(T s) {
    c_[0] += s;
    return *this;
  }
  Taylor& operator-=(T s) {
    c_[0] -= s;
    return *this;
  }
  Taylor& operator*=(T s) {
    for (auto& v : c_) v *= s;
    return *this;
  }
  Taylor& operator/=(T s) {
    for (auto& v : c_) v /= s;
    return *this;
  }

  friend Taylor operator*(const Taylor& a, const Taylor& b) {
    const int K = std::min(a.order(), b.order());
    Taylor r(K);
    for (int k = 0; k <= K; ++k) {
      T acc = T(0);
      for (int i = 0; i <= k; ++i) acc += a.c_[i] * b.c_[k - i];
      r.c_[k] = acc;
    }
    return r;
  }

  friend Taylor operator/(const Taylor& a, const Taylor& b) {
    const int K = std::min(a.order(), b.order());
    if (b.c_[0] == T(0)) throw std::domain_error("Taylor division by a series vanishing at t=0");
    Taylor q(K);
    for (int k = 0; k <= K; ++k) {
      T acc = a.c_[k];
      for (int i = 1; i <= k; ++i) acc -= b.c_[i] * q.c_[k - i];
      q.c_[k] = acc / b.c_[0];
    }
    return q;
  }

 private:
  void resize_to(int order) { c_.resize(static_cast<std::size_t>(order) + 1); }

  std::vector<T> c_;
};

template <typename T>
Taylor<T> operator+(Taylor<T> a, const Taylor<T>& b) { return a += b; }
template <typename T>
Taylor<T> operator-(Taylor<T> a, const Taylor<T>& b) { return a -= b; }
template <typename T>
Taylor<T> operator+(Taylor<T> a, T s) { return a += s; }
template <typename T>
Taylor<T> operator+(T s, Taylor<T> a) { return a += s; }
template <typename T>
Taylor<T> operator-(Taylor<T> a, T s) { return a -= s; }
template <typename T>
Taylor<T> operator-(T s, const Taylor<T>& a) { return (-a) += s; }
template <typename T>
Taylor<T> operator*(Taylor<T> a, T s) { return a *= s; }
template <typename T>
Taylor<T> operator*(T s, Taylor<T> a) { return a *= s; }
template <typename T>
Taylor<T> operator/(Taylor<T> a, T s) { return a /= s; }
template <typename T>
Taylor<T> operator/(T s, const Taylor<T>& a) { return Taylor<T>(a.order(), s) / a; }

// Real jets with double literals when T is complex.
template <typename T>
  requires(!std::is_same_v<T, double>)
Taylor<T> operator*(Taylor<T> a, double s) { return a *= T(s); }
template <typename T>
  requires(!std::is_same_v<T, double>)
Taylor<T> operator*(double s, Taylor<T> a) { return a *= T(s); }

template <typename T>
Taylor<T> exp(const Taylor<T>& a) {
  const int K = a.order();
  Taylor<T> e(K);
  e[0] = std::exp(a[0]);
  for (int k = 1; k <= K; ++k) {
    T acc = T(0);
    for (int i = 1; i <= k; ++i) acc += static_cast<double>(i) * a[i] * e[k - i];
    e[k] = acc / static_cast<double>(k);
  }
  return e;
}

template <typename T>
Taylor<T> log(const Taylor<T>& a) {
  const int K = a.order();
  if (a[0] == T(0)) throw std::domain_error("Taylor log of a series vanishing at t=0");
  Taylor<T> l(K);
  l[0] = std::log(a[0]);
  for (int k = 1; k <= K; ++k) {
    T acc = a[k];
    for (int i = 1; i < k; ++i) acc -= static_cast<double>(i) / k * l[i] * a[k - i];
    l[k] = acc / a[0];
  }
  return l;
}

template <typename T>
Taylor<T> sqrt(const Taylor<T>& a) {
  const int K = a.order();
  if (a[0] == T(0) && K > 0) throw std::domain_error("Taylor sqrt of a series vanishing at t=0");
  Taylor<T> r(K);
  r[0] = std::sqrt(a[0]);
  for (int k = 1; k <= K; ++k) {
    T acc = a[k];
    for (int i = 1; i < k; ++i) acc -= r[i] * r[k - i];
    r[k] = acc / (2.0 * r[0]);
  }
  return r;
}

template <typename T>
Taylor<T> pow(const Taylor<T>& a, int n) {
  if (n < 0) return T(1) / pow(a, -n);
  Taylor<T> result(a.order(), T(1));
  Taylor<T> base = a;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n) base = base * base;
  }
  return result;
}

template <typename T>
Taylor<T> pow(const Taylor<T>& a, double p) {
  const double r = std::round(p);
  if (r == p && std::abs(p) < 64) return pow(a, static_cast<int>(r));
  return exp(log(a) * T(p));
}

}  // namespace ctunnel
