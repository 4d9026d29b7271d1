#include "ctunnel/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ctunnel/errors.hpp"
#include "ctunnel/expression.hpp"

namespace ctunnel {

std::string to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::Quartic:
      return "quartic";
    case PotentialKind::Figure:
      return "figure";
    case PotentialKind::Custom:
      return "custom";
  }
  return "custom";
}

namespace {

template <typename T>
T quartic_formula(const T& x) {
  T u = 1.0 - x * x;
  return u * u;
}

template <typename T>
T figure_formula(const T& x) {
  T u = 1.0 - x * x;
  T x2 = x * x;
  return 4.0 * (u * u) / (2.0 + x2 * x2);
}

double coarse_v_inf(const JetFunction& fn, double x_well) {
  const double lo = 2.0 * std::max(std::abs(x_well), 0.5);
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 64; ++i) {
    const double x = lo + i * lo / 64.0;
    m = std::min({m, fn(Jet(0, x)).value(), fn(Jet(0, -x)).value()});
  }
  return m;
}

}  // namespace

PotentialSpec::PotentialSpec(PotentialKind kind, JetFunction fn, double x_well,
                             std::optional<double> vpp, std::optional<double> v_inf,
                             std::string description)
    : kind_(kind),
      x_left_(-std::abs(x_well)),
      x_right_(std::abs(x_well)),
      v0_(fn(Jet(0, 0.0)).value()),
      vpp_(vpp ? *vpp : fn(Jet::variable(-std::abs(x_well), 2)).derivative_at(2)),
      v_inf_(v_inf ? *v_inf : coarse_v_inf(fn, x_well)),
      description_(std::move(description)),
      profile_(fn, -std::abs(x_well), std::abs(x_well), -std::abs(x_well),
               vpp_ > 0 ? std::sqrt(0.5 * vpp_) : 0.0) {}

PotentialSpec PotentialSpec::quartic() {
  return PotentialSpec(PotentialKind::Quartic, [](const Jet& x) { return quartic_formula(x); },
                       1.0, 8.0, 1.0, "(1-x^2)^2");
}

PotentialSpec PotentialSpec::figure() {
  return PotentialSpec(PotentialKind::Figure, [](const Jet& x) { return figure_formula(x); }, 1.0,
                       32.0 / 3.0, 1.0, "4(1-x^2)^2/(2+x^4)");
}

PotentialSpec PotentialSpec::custom(const std::string& expr, double x_well,
                                    std::optional<double> vpp, std::optional<double> v_inf) {
  Expression e = Expression::parse(expr);
  return PotentialSpec(PotentialKind::Custom, [e](const Jet& x) { return e(x); }, x_well, vpp,
                       v_inf, expr);
}

PotentialSpec PotentialSpec::from_function(JetFunction fn, double x_well,
                                           std::optional<double> vpp,
                                           std::optional<double> v_inf, std::string description) {
  return PotentialSpec(PotentialKind::Custom, std::move(fn), x_well, vpp, v_inf,
                       std::move(description));
}

double PotentialSpec::eval(double x, int order) const {
  require(order >= 0 && order <= 3, "eval_potential: order must be in 0..3");
  return profile_.derivative(x, order);
}

double PotentialSpec::frequency() const {
  require(vpp_ > 0, "potential has a degenerate minimum (V'' <= 0)");
  return std::sqrt(0.5 * vpp_);
}

double eval_potential(const PotentialSpec& spec, double x, int order) {
  return spec.eval(x, order);
}

DiagnosticsReport validate(const PotentialSpec& spec, std::span<const double> grid,
                           const ValidationOptions& opt) {
  DiagnosticsReport r;
  if (grid.empty()) {
    r.failures.push_back("empty grid");
    return r;
  }
  const double xl = spec.x_left();
  const double xr = spec.x_right();
  const double x_far = opt.x_far > 0 ? opt.x_far : 2.0 * std::max(xr, 0.5);

  double vmax = 0.0;
  r.min_off_well = std::numeric_limits<double>::infinity();
  r.v_inf_estimate = std::numeric_limits<double>::infinity();
  for (double x : grid) {
    const double v = spec(x);
    vmax = std::max(vmax, std::abs(v));
    r.evenness_defect = std::max(r.evenness_defect, std::abs(v - spec(-x)));
    const bool at_well = std::abs(x - xl) < 1e-12 || std::abs(x - xr) < 1e-12;
    if (!at_well) {
      r.min_off_well = std::min(r.min_off_well, v);
      if (!(v > 0)) ++r.nonpositive_points;
    }
    if (std::abs(x) >= x_far) r.v_inf_estimate = std::min(r.v_inf_estimate, v);
  }
  if (!std::isfinite(r.v_inf_estimate))
    r.v_inf_estimate = std::min(spec(x_far), spec(-x_far));

  const Jet w = spec.profile().jet(xl, 2);
  r.well_value = w.derivative_at(0);
  r.well_slope = w.derivative_at(1);
  r.vpp_measured = w.derivative_at(2);
  r.vpp_declared = spec.vpp();
  r.distinct_minima = xl < 0 && xr > 0 && xr - xl > 1e-12;
  r.nondegenerate =
      r.vpp_declared > 0 && r.vpp_measured > 0 &&
      std::abs(r.vpp_declared - r.vpp_measured) <= opt.vpp_rel_tol * std::max(1.0, r.vpp_measured);

  if (r.evenness_defect > opt.evenness_tol * std::max(1.0, vmax))
    r.failures.push_back("potential is not even (defect " + std::to_string(r.evenness_defect) + ")");
  if (r.nonpositive_points > 0)
    r.failures.push_back(std::to_string(r.nonpositive_points) +
                         " grid points away from the wells have V <= 0");
  if (std::abs(r.well_value) > opt.well_tol || std::abs(r.well_slope) > opt.well_tol)
    r.failures.push_back("x_left is not a zero and critical point of V");
  if (!r.distinct_minima) r.failures.push_back("minima are not distinct");
  if (!r.nondegenerate) r.failures.push_back("minimum is degenerate or V'' mismatches the declared value");
  if (!(spec.v_inf() > 0) || r.v_inf_estimate < spec.v_inf())
    r.failures.push_back("V falls below v_inf far from the wells");
  r.passed = r.failures.empty();
  return r;
}

// --------------------------------------------------------------------------
// Sealing

SealedPotential::SealedPotential(PotentialSpec base, SealSide side, double eta, double amplitude)
    : base_(std::move(base)),
      side_(side),
      eta_(eta),
      amplitude_(amplitude),
      profile_(
          [b = base_.profile(), side, eta, amplitude](const Jet& x) {
            const double xs = side == SealSide::Right ? b.x_right() : b.x_left();
            Jet v = b(x);
            const Jet t = (x - xs) / eta;
            if (std::abs(t.value()) < 1.0) v += amplitude * exp(-1.0 / (1.0 - t * t));
            return v;
          },
          base_.x_left(), base_.x_right(),
          side == SealSide::Right ? base_.x_left() : base_.x_right(),
          base_.profile().frequency()) {
  require(amplitude > 0, "seal: amplitude must be positive");
  require(eta > 0 && eta < base_.x_right(), "seal: eta must satisfy 0 < eta < x_r");
}

double SealedPotential::kept_well() const {
  return side_ == SealSide::Right ? base_.x_left() : base_.x_right();
}

double SealedPotential::sealed_well() const {
  return side_ == SealSide::Right ? base_.x_right() : base_.x_left();
}

Jet SealedPotential::sigma(const Jet& x) const {
  const Jet t = (x - sealed_well()) / eta_;
  if (std::abs(t.value()) >= 1.0) return Jet(x.order());
  return amplitude_ * exp(-1.0 / (1.0 - t * t));
}

double SealedPotential::sigma(double x) const { return sigma(Jet(0, x)).value(); }

SealedPotential seal(const PotentialSpec& spec, SealSide side, double eta, double amplitude) {
  return SealedPotential(spec, side, eta, amplitude);
}

SealedPotential seal(const PotentialSpec& spec, SealSide side) {
  const double eta = (spec.x_right() - spec.x_left()) / 8.0;
  return SealedPotential(spec, side, eta, std::max(1.0, spec.v0()));
}

// --------------------------------------------------------------------------

Profile QuadraticModel::profile() const {
  const double c = center, k = 0.5 * vpp;
  return Profile([c, k](const Jet& x) { return k * ((x - c) * (x - c)); }, c, c, c, a);
}

QuadraticModel quadratic_model(const PotentialSpec& spec) {
  require(spec.vpp() > 0, "quadratic_model: V''(x_l) must be positive");
  return QuadraticModel{spec.x_left(), std::sqrt(0.5 * spec.vpp()), spec.vpp()};
}

double plateau(double x, double A) {
  const double ax = std::abs(x);
  if (ax <= A) return 1.0;
  if (ax >= 2.0 * A) return 0.0;
  const auto f = [](double t) { return t > 0 ? std::exp(-1.0 / t) : 0.0; };
  const double t = (2.0 * A - ax) / A;  // 1 at |x| = A, 0 at |x| = 2A
  return f(t) / (f(t) + f(1.0 - t));
}

}  // namespace ctunnel
