#include "ctunnel/wkb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/numeric/odeint.hpp>

#include "ctunnel/action.hpp"
#include "ctunnel/errors.hpp"
#include "ctunnel/quadrature.hpp"
#include "ctunnel/specsolve.hpp"

namespace ctunnel {

namespace {

using CJet = Taylor<cplx>;
using State = std::vector<cplx>;

CJet complexify(const Jet& j) { return CJet::from(j); }

}  // namespace

std::vector<cplx> WkbExpansion::amplitude_sum() const {
  std::vector<cplx> A(grid.size(), cplx(0.0));
  double hp = 1.0;
  for (const auto& a : amplitudes) {
    for (std::size_t i = 0; i < A.size(); ++i) A[i] += hp * a[i];
    hp *= h;
  }
  return A;
}

cplx WkbExpansion::mu_wkb() const {
  cplx m = 0.0;
  double hp = h;
  for (const cplx& c : mu_coeffs) {
    m += c * hp;
    hp *= h;
  }
  return m;
}

// Power series of every WKB ingredient in t = x - x_c.
struct WkbSolver::Series {
  Jet s, F, I;
  std::vector<CJet> a;
};

WkbSolver::WkbSolver(Profile V, double alpha, int n, int J, WkbOptions opt)
    : V_(std::move(V)), alpha_(alpha), xc_(V_.center()), a_(0.0), n_(n), J_(J), opt_(opt) {
  require(n >= 1, "WKB level n must be at least 1");
  require(J >= 1 && J <= 8, "WKB order J must lie in 1..8");
  require(std::abs(alpha) < std::numbers::pi, "alpha must lie in (-pi, pi)");
  require(opt.series_order >= 2 * n + 4, "series order too small for the requested level");

  auto series = std::make_shared<Series>();
  const int K = opt.series_order + 2 * (J - 1) + 2;
  const Jet v = V_.jet(xc_, K + 2);
  if (!(v[2] > 0))
    throw NumericDomainError("the well at x = " + std::to_string(xc_) + " is degenerate");

  // s = t sqrt(V / t^2), taking the branch that is positive right of the well.
  const Jet r = sqrt(v.shift_down(2));
  std::vector<double> sc(static_cast<std::size_t>(r.order()) + 2, 0.0);
  for (int k = 0; k <= r.order(); ++k) sc[k + 1] = r[k];
  series->s = Jet(sc);
  a_ = r[0];

  const Jet sp = series->s.derivative();
  const Jet q = (sp - a_).shift_down(1) / (2.0 * r);
  series->I = q.antiderivative();
  series->F = series->s.antiderivative();
  const Jet a0 = pow(series->s / a_, n - 1) * exp(-(2.0 * n - 1.0) * series->I);
  series->a.push_back(complexify(a0));

  const cplx rot = std::polar(1.0, -0.5 * alpha);
  mu_.push_back((2.0 * n - 1.0) * a_ * std::conj(rot));
  const Jet& s = series->s;
  const CJet B = rot * series->a[0];

  for (int k = 2; k <= J; ++k) {
    CJet R = series->a[k - 2].derivative().derivative();
    for (int j = 2; j <= k - 1; ++j) R += mu_[j - 1] * series->a[k - j];
    R *= rot;
    const int ordA = R.order();
    if (ordA < n)
      throw NumericFailure("WKB series order exhausted at level k = " + std::to_string(k));
    CJet A(ordA);
    cplx mu_k = 0.0;
    for (int m = 0; m <= ordA; ++m) {
      cplx Km = 0.0;
      for (int i = 2; i <= m + 1 && i <= s.order(); ++i) Km += 2.0 * s[i] * (m - i + 1.0) * A[m - i + 1];
      for (int i = 1; i <= m && i + 1 <= s.order(); ++i) Km += (i + 1.0) * s[i + 1] * A[m - i];
      if (m == n - 1) {
        // Solvability: the coefficient of A_{n-1} vanishes, which fixes mu_k.
        mu_k = (Km - R[m]) / B[m];
        A[m] = 0.0;
      } else {
        A[m] = (R[m] + mu_k * B[m] - Km) / (2.0 * a_ * (m - n + 1.0));
      }
    }
    mu_.push_back(mu_k);
    series->a.push_back(A);
  }
  series_ = series;
}

double WkbSolver::log_integral(double x) const {
  const double t = x - xc_;
  const double d = opt_.patch_radius;
  if (std::abs(t) <= d) return series_->I.eval(t);
  const double edge = t > 0 ? d : -d;
  const double sg = t > 0 ? 1.0 : -1.0;
  auto q = [this, sg](double y) {
    const Jet v = V_.jet(y, 1);
    if (!(v[0] > 0)) throw NumericDomainError("V vanishes away from the well at x = " + std::to_string(y));
    const double sq = std::sqrt(v[0]);
    return (sg * v[1] / (2.0 * sq) - a_) / (2.0 * sg * sq);
  };
  return series_->I.eval(edge) + quad::integrate_or_throw(q, xc_ + edge, x);
}

double WkbSolver::leading(double x) const {
  const double t = x - xc_;
  if (std::abs(t) <= opt_.patch_radius) return series_->a[0].eval(t).real();
  const double s = (t > 0 ? 1.0 : -1.0) * std::sqrt(V_(x));
  return std::pow(s / a_, n_ - 1) * std::exp(-(2.0 * n_ - 1.0) * log_integral(x));
}

WkbExpansion WkbSolver::expand(double h, std::span<const double> grid) const {
  require(h > 0, "WKB expansion needs h > 0");
  require(std::is_sorted(grid.begin(), grid.end()), "WKB grid must be sorted");
  const std::size_t N = grid.size();
  WkbExpansion e;
  e.n = n_;
  e.J = J_;
  e.alpha = alpha_;
  e.h = h;
  e.grid.assign(grid.begin(), grid.end());
  e.mu_coeffs = mu_;
  e.phase.assign(N, 0.0);
  e.amplitudes.assign(J_, std::vector<cplx>(N, 0.0));
  const cplx half = std::polar(1.0, 0.5 * alpha_);
  const cplx rot = std::conj(half);
  const double d = opt_.patch_radius;

  // Series inside the patch.
  for (std::size_t i = 0; i < N; ++i) {
    const double t = grid[i] - xc_;
    if (std::abs(t) > d) continue;
    e.phase[i] = half * series_->F.eval(t);
    for (int j = 0; j < J_; ++j) e.amplitudes[j][i] = series_->a[j].eval(t);
  }

  // Outside: y = [F, I, a_1/a_0, ..., a_{J-1}/a_0].
  const int P = 2 * J_ + 2;
  auto system = [&](const State& y, State& dy, double x) {
    const Jet v = V_.jet(x, P);
    if (!(v[0] > 0)) throw NumericDomainError("V vanishes away from the well at x = " + std::to_string(x));
    const double sg = x > xc_ ? 1.0 : -1.0;
    const Jet s = sg * sqrt(v);
    const Jet sp = s.derivative();
    const Jet q = (sp - a_) / (2.0 * s);
    dy.assign(y.size(), 0.0);
    dy[0] = s[0];
    dy[1] = q[0];
    if (J_ == 1) return;
    const double a0 = std::pow(s[0] / a_, n_ - 1) * std::exp(-(2.0 * n_ - 1.0) * y[1].real());
    const Jet ell = (n_ - 1.0) * (sp / s) - (2.0 * n_ - 1.0) * q;
    const Jet a0j = a0 * exp(ell.antiderivative());
    const CJet den = complexify(2.0 * s * a0j);
    std::vector<CJet> ac{complexify(a0j)};
    for (int j = 1; j < J_; ++j) {
      CJet R = ac[j - 1].derivative().derivative();
      for (int i = 2; i <= j; ++i) R += mu_[i - 1] * ac[j + 1 - i];
      R += mu_[j] * ac[0];
      R *= rot;
      const CJet vp = R / den;
      dy[1 + j] = vp[0];
      if (j + 1 < J_) ac.push_back(ac[0] * vp.antiderivative(y[1 + j]));
    }
  };

  auto run_side = [&](double edge_t, std::vector<std::size_t> idx) {
    if (idx.empty()) return;
    State y(static_cast<std::size_t>(J_) + 1, 0.0);
    y[0] = series_->F.eval(edge_t);
    y[1] = series_->I.eval(edge_t);
    const cplx a0e = series_->a[0].eval(edge_t);
    for (int j = 1; j < J_; ++j) y[1 + j] = series_->a[j].eval(edge_t) / a0e;
    std::vector<double> times{xc_ + edge_t};
    for (std::size_t i : idx) times.push_back(grid[i]);
    std::size_t hit = 0;
    auto observe = [&](const State& st, double) {
      if (hit > 0) {
        const std::size_t i = idx[hit - 1];
        const double x = grid[i];
        const double s = (x > xc_ ? 1.0 : -1.0) * std::sqrt(V_(x));
        const double a0 = std::pow(s / a_, n_ - 1) * std::exp(-(2.0 * n_ - 1.0) * st[1].real());
        e.phase[i] = half * st[0].real();
        e.amplitudes[0][i] = a0;
        for (int j = 1; j < J_; ++j) e.amplitudes[j][i] = a0 * st[1 + j];
      }
      ++hit;
    };
    namespace ode = boost::numeric::odeint;
    const double dt = (edge_t > 0 ? 1.0 : -1.0) * 1e-3;
    ode::integrate_times(
        ode::make_controlled(opt_.ode_abs_tol, opt_.ode_rel_tol, ode::runge_kutta_dopri5<State>()),
        system, y, times.begin(), times.end(), dt, observe);
  };

  std::vector<std::size_t> right, left;
  for (std::size_t i = 0; i < N; ++i) {
    const double t = grid[i] - xc_;
    if (t > d) right.push_back(i);
  }
  for (std::size_t i = N; i-- > 0;) {
    const double t = grid[i] - xc_;
    if (t < -d) left.push_back(i);
  }
  run_side(d, right);
  run_side(-d, left);

  const std::vector<cplx> A = e.amplitude_sum();
  e.quasimode.resize(N);
  for (std::size_t i = 0; i < N; ++i) e.quasimode[i] = std::exp(-e.phase[i] / h) * A[i];
  return e;
}

cplx phase(const Profile& V, double alpha, double x) {
  const double c = V.center();
  return std::polar(agmon_action(V, std::min(c, x), std::max(c, x)), 0.5 * alpha);
}

cplx phase(const SealedPotential& sealed, double alpha, double x) {
  return phase(sealed.profile(), alpha, x);
}

namespace {
int capped_order(const SealedPotential& sealed, int J) {
  if (sealed.base().kind() == PotentialKind::Custom)
    require(J <= 4, "WKB order J is capped at 4 for custom potentials");
  return J;
}
}  // namespace

cplx transport_leading(const SealedPotential& sealed, double alpha, int n, double x) {
  return WkbSolver(sealed.profile(), alpha, n, 1).leading(x);
}

std::vector<cplx> wkb_eigenvalue(const Profile& V, double alpha, int n, int J) {
  return WkbSolver(V, alpha, n, J).mu();
}

std::vector<cplx> wkb_eigenvalue(const SealedPotential& sealed, double alpha, int n, int J) {
  return wkb_eigenvalue(sealed.profile(), alpha, n, capped_order(sealed, J));
}

WkbExpansion wkb_quasimode(const Profile& V, double alpha, double h, int n, int J,
                           std::span<const double> grid) {
  return WkbSolver(V, alpha, n, J).expand(h, grid);
}

WkbExpansion wkb_quasimode(const SealedPotential& sealed, double alpha, double h, int n, int J,
                           std::span<const double> grid) {
  return wkb_quasimode(sealed.profile(), alpha, h, n, capped_order(sealed, J), grid);
}

double weighted_residual(WkbExpansion& e, const Profile& V, double K_lo, double K_hi) {
  const std::size_t N = e.grid.size();
  require(N >= 5, "weighted_residual: grid too short");
  const double dx = (e.grid.back() - e.grid.front()) / static_cast<double>(N - 1);
  for (std::size_t i = 1; i < N; ++i)
    require(std::abs(e.grid[i] - e.grid[i - 1] - dx) <= 1e-8 * dx,
            "weighted_residual: expansion grid must be uniform");
  const double h = e.h;
  const double c = h * h / (12.0 * dx * dx);
  const cplx rot = std::polar(1.0, e.alpha);
  const cplx mu = e.mu_wkb();
  const std::vector<cplx> A = e.amplitude_sum();

  double sup = 0.0;
  for (std::size_t i = 2; i + 2 < N; ++i) {
    if (e.grid[i] < K_lo || e.grid[i] > K_hi) continue;
    cplx acc = 0.0;
    for (int k = -2; k <= 2; ++k) {
      const std::size_t j = i + k;
      acc += kFd4Stencil[k + 2] * std::exp((e.phase[i] - e.phase[j]) / h) * A[j];
    }
    const cplx r = c * acc + (rot * V(e.grid[i]) - mu) * A[i];
    sup = std::max(sup, std::abs(r));
  }
  e.weighted_residual = sup;
  return sup;
}

double weighted_residual(WkbExpansion& e, const SealedPotential& sealed, double K_lo,
                         double K_hi) {
  return weighted_residual(e, sealed.profile(), K_lo, K_hi);
}

WkbNorms wkb_norms(const Profile& V, double alpha, double h) {
  const double a = V.frequency();
  const double c = std::cos(0.5 * alpha);
  require(a > 0 && c > 0, "wkb_norms: need a nondegenerate well and |alpha| < pi");
  // Gaussian mass e^{-a c t^2 / h} is below e^{-40} past this half-width.
  const double span = V.x_right() - V.x_left();
  const double L = std::min(std::sqrt(40.0 * h / (a * c)),
                            span > 0 ? 0.9 * span : std::numeric_limits<double>::infinity());
  const double dx = L / 4000.0;
  const std::vector<double> grid = uniform_grid(V.center() - L, V.center() + L, dx);
  const WkbExpansion e = WkbSolver(V, alpha, 1, 1).expand(h, grid);

  WkbNorms r;
  double n2 = 0.0;
  cplx sp = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double w = (i == 0 || i + 1 == grid.size()) ? 0.5 * dx : dx;
    n2 += w * std::norm(e.quasimode[i]);
    sp += w * e.quasimode[i] * e.quasimode[i];
  }
  r.norm = std::sqrt(n2);
  r.selfpair = sp;
  r.norm_prediction = std::pow(h * std::numbers::pi / (c * a), 0.25);
  r.selfpair_prediction = std::sqrt(h * std::numbers::pi / a) * std::polar(1.0, -0.25 * alpha);
  return r;
}

WkbNorms wkb_norms(const SealedPotential& sealed, double alpha, double h) {
  return wkb_norms(sealed.profile(), alpha, h);
}

std::vector<double> uniform_grid(double lo, double hi, double dx) {
  require(hi > lo && dx > 0, "uniform_grid: need hi > lo and dx > 0");
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / dx - 1e-9));
  std::vector<double> g(n + 1);
  for (std::size_t i = 0; i <= n; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / n;
  return g;
}

}  // namespace ctunnel
