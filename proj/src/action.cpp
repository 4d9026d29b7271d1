#include "ctunnel/action.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ctunnel/errors.hpp"

namespace ctunnel {

namespace {

// Round-off in V near a double zero can dip a few ulps below zero.
double checked_sqrt(double v, double x) {
  if (v < -1e-13) {
    throw NumericDomainError("potential is negative (" + std::to_string(v) + ") at x = " +
                             std::to_string(x));
  }
  return v > 0 ? std::sqrt(v) : 0.0;
}

void require_alpha(double alpha) {
  require(std::abs(alpha) < std::numbers::pi, "alpha must lie in (-pi, pi)");
}

}  // namespace

double agmon_action(const Profile& V, double a, double b, quad::Options opt) {
  require(a <= b, "agmon_action: a must not exceed b");
  if (a == b) return 0.0;
  auto f = [&V](double s) { return checked_sqrt(V(s), s); };
  return quad::integrate_or_throw(f, a, b, {V.x_left(), V.center(), V.x_right()}, opt);
}

double agmon_action(const PotentialSpec& spec, double a, double b, quad::Options opt) {
  return agmon_action(spec.profile(), a, b, opt);
}

std::complex<double> complex_action(const PotentialSpec& spec, double alpha) {
  require_alpha(alpha);
  const double S = agmon_action(spec, spec.x_left(), spec.x_right());
  return std::polar(S, 0.5 * alpha);
}

ComplexAction truncated_actions(const SealedPotential& sealed, double alpha, double gamma,
                                double A_cut) {
  require_alpha(alpha);
  const PotentialSpec& base = sealed.base();
  const double xl = base.x_left(), xr = base.x_right();
  require(gamma >= 0, "truncated_actions: gamma must be non-negative");
  require(sealed.eta() < xr - xl, "truncated_actions: eta must be below x_r - x_l");

  ComplexAction r;
  r.alpha = alpha;
  r.S = agmon_action(base, xl, xr);
  r.S_alpha = std::polar(r.S, 0.5 * alpha);
  const double c = std::cos(0.5 * alpha);
  r.S_eta = c * agmon_action(base, xl, xr - sealed.eta());

  // The side actions use V_{l,A} around the kept well.
  const double A = A_cut > 0 ? A_cut : 2.0 * xr;
  const Profile& V = sealed.profile();
  auto f = [&V, A](double s) {
    const double p = plateau(s, A);
    return p == 0.0 ? 0.0 : checked_sqrt(V(s) * p, s);
  };
  const double keep = sealed.kept_well();
  r.S_minus_gamma = gamma > 0 ? c * quad::integrate_or_throw(f, keep - gamma, keep) : 0.0;
  r.S_plus_gamma = gamma > 0 ? c * quad::integrate_or_throw(f, keep, keep + gamma) : 0.0;
  return r;
}

AgmonWeight::AgmonWeight(const SealedPotential& sealed, double alpha, double epsilon,
                         double A_cut)
    : V_(sealed.profile()),
      well_(sealed.kept_well()),
      scale_(0.0),
      epsilon_(epsilon),
      A_cut_(A_cut > 0 ? A_cut : 2.0 * sealed.base().x_right()) {
  require_alpha(alpha);
  require(epsilon > 0 && epsilon < 1, "agmon_weight: epsilon must lie in (0, 1)");
  require(A_cut_ >= std::max(std::abs(V_.x_left()), std::abs(V_.x_right())),
          "agmon_weight: [x_l, x_r] must lie inside [-A_cut, A_cut]");
  scale_ = std::sqrt(1.0 - epsilon) * std::cos(0.5 * alpha);
}

double AgmonWeight::integrand(double s) const {
  const double p = plateau(s, A_cut_);
  if (p == 0.0) return 0.0;
  return checked_sqrt(V_(s) * p, s);
}

double AgmonWeight::operator()(double x) const {
  const double lo = std::min(x, well_), hi = std::max(x, well_);
  if (lo == hi) return 0.0;
  auto f = [this](double s) { return integrand(s); };
  const std::vector<double> cuts{V_.x_left(), V_.x_right(), -2 * A_cut_, -A_cut_, A_cut_,
                                 2 * A_cut_};
  return scale_ * quad::integrate_or_throw(f, lo, hi, cuts);
}

std::vector<double> AgmonWeight::samples(std::span<const double> grid) const {
  std::vector<double> out(grid.size(), 0.0);
  if (grid.empty()) return out;
  auto f = [this](double s) { return integrand(s); };
  const std::vector<double> cuts{V_.x_left(), V_.x_right(), -A_cut_, A_cut_};
  // First grid index at or right of the well.
  const auto mid = std::lower_bound(grid.begin(), grid.end(), well_);
  const std::size_t k = static_cast<std::size_t>(mid - grid.begin());

  double acc = 0.0, prev = well_;
  for (std::size_t i = k; i < grid.size(); ++i) {
    acc += quad::integrate_or_throw(f, prev, grid[i], cuts);
    prev = grid[i];
    out[i] = scale_ * acc;
  }
  acc = 0.0;
  prev = well_;
  for (std::size_t i = k; i-- > 0;) {
    acc += quad::integrate_or_throw(f, grid[i], prev, cuts);
    prev = grid[i];
    out[i] = scale_ * acc;
  }
  return out;
}

double agmon_weight(const SealedPotential& sealed, double alpha, double epsilon, double A_cut,
                    double x) {
  return AgmonWeight(sealed, alpha, epsilon, A_cut)(x);
}

}  // namespace ctunnel
