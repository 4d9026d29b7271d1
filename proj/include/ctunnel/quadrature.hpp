#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature, QUADPACK qag style:
// the subinterval with the largest error estimate is bisected until the
// summed estimate meets max(abs_tol, rel_tol * |I|).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <queue>
#include <vector>

#include "ctunnel/errors.hpp"

namespace ctunnel::quad {

namespace detail {
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename T>
double magnitude(const T& v) {
  return std::abs(v);
}
}  // namespace detail

template <typename T>
struct Result {
  T value{};
  double error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

struct Options {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_intervals = 4000;
};

/// One 15-point Kronrod panel with its embedded 7-point Gauss estimate.
template <typename F>
auto gk15(F&& f, double a, double b) {
  using T = std::decay_t<decltype(f(a))>;
  const double c = 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  const T fc = f(c);
  T kron = fc * detail::kWgk[7];
  T gauss = fc * detail::kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = r * detail::kXgk[j];
    const T sum = f(c - dx) + f(c + dx);
    kron += sum * detail::kWgk[j];
    if (j % 2 == 1) gauss += sum * detail::kWg[j / 2];
  }
  kron *= r;
  gauss *= r;
  return std::pair<T, double>{kron, detail::magnitude(kron - gauss)};
}

/// Integrate f over [a, b] splitting first at the given interior breakpoints.
template <typename F>
auto integrate(F&& f, double a, double b, const std::vector<double>& breakpoints = {},
               Options opt = {}) {
  using T = std::decay_t<decltype(f(a))>;
  Result<T> res;
  if (a == b) {
    res.converged = true;
    return res;
  }
  const double sign = b < a ? -1.0 : 1.0;
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);

  struct Panel {
    double a, b;
    T value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
  };
  std::priority_queue<Panel> heap;

  std::vector<double> cuts{lo};
  for (double p : breakpoints)
    if (p > lo && p < hi) cuts.push_back(p);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());

  T total{};
  double err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    auto [v, e] = gk15(f, cuts[i], cuts[i + 1]);
    heap.push({cuts[i], cuts[i + 1], v, e});
    total += v;
    err += e;
    res.evaluations += 15;
  }

  int intervals = static_cast<int>(heap.size());
  while (err > std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(total))) {
    if (intervals >= opt.max_intervals) break;
    Panel p = heap.top();
    heap.pop();
    const double m = 0.5 * (p.a + p.b);
    if (!(m > p.a && m < p.b)) {
      heap.push(p);
      break;
    }
    auto [v1, e1] = gk15(f, p.a, m);
    auto [v2, e2] = gk15(f, m, p.b);
    res.evaluations += 30;
    total += v1 + v2 - p.value;
    err += e1 + e2 - p.error;
    heap.push({p.a, m, v1, e1});
    heap.push({m, p.b, v2, e2});
    ++intervals;
  }
  // Re-sum from the panels to shed accumulated update round-off.
  total = T{};
  err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  res.value = total * sign;
  res.error = err;
  res.converged = err <= std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(total)) * 1.0000001;
  return res;
}

/// integrate() that throws NumericFailure when the tolerance is not met.
template <typename F>
auto integrate_or_throw(F&& f, double a, double b, const std::vector<double>& breakpoints = {},
                        Options opt = {}) {
  auto r = integrate(std::forward<F>(f), a, b, breakpoints, opt);
  if (!r.converged)
    throw NumericFailure("adaptive quadrature did not reach tolerance on [" + std::to_string(a) +
                         ", " + std::to_string(b) + "], error estimate " +
                         std::to_string(r.error));
  return r.value;
}

}  // namespace ctunnel::quad
