#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ctunnel/taylor.hpp"

namespace ctunnel {

using Jet = Taylor<double>;
using JetFunction = std::function<Jet(const Jet&)>;

/// A real potential evaluable on jets, plus the well geometry the solvers need.
///
/// `center` is the well the downstream single-well machinery (WKB, quadratic
/// model) expands around; `frequency` is sqrt(V''(center)/2).
class Profile {
 public:
  Profile(JetFunction fn, double x_left, double x_right, double center, double frequency)
      : fn_(std::make_shared<JetFunction>(std::move(fn))),
        x_left_(x_left),
        x_right_(x_right),
        center_(center),
        frequency_(frequency) {}

  double operator()(double x) const { return (*fn_)(Jet(0, x)).value(); }
  Jet operator()(const Jet& x) const { return (*fn_)(x); }
  /// Taylor coefficients of V(x0 + t) up to the given order.
  Jet jet(double x0, int order) const { return (*fn_)(Jet::variable(x0, order)); }
  double derivative(double x, int order) const { return jet(x, order).derivative_at(order); }

  double x_left() const { return x_left_; }
  double x_right() const { return x_right_; }
  double center() const { return center_; }
  double frequency() const { return frequency_; }

 private:
  std::shared_ptr<const JetFunction> fn_;
  double x_left_, x_right_, center_, frequency_;
};

enum class PotentialKind { Quartic, Figure, Custom };

std::string to_string(PotentialKind kind);

/// Symmetric double well V >= 0 vanishing at x_left = -x_right.
class PotentialSpec {
 public:
  /// V(x) = (1 - x^2)^2.
  static PotentialSpec quartic();
  /// V(x) = 4 (1 - x^2)^2 / (2 + x^4).
  static PotentialSpec figure();
  /// Parsed closed-form expression in x; minima declared at +-x_well.
  /// When `vpp` is omitted it is measured from the expression.
  static PotentialSpec custom(const std::string& expr, double x_well,
                              std::optional<double> vpp = std::nullopt,
                              std::optional<double> v_inf = std::nullopt);
  /// Arbitrary jet function (used for programmatic potentials).
  static PotentialSpec from_function(JetFunction fn, double x_well,
                                     std::optional<double> vpp = std::nullopt,
                                     std::optional<double> v_inf = std::nullopt,
                                     std::string description = "custom");

  PotentialKind kind() const { return kind_; }
  double x_left() const { return x_left_; }
  double x_right() const { return x_right_; }
  double v0() const { return v0_; }
  double vpp() const { return vpp_; }
  double v_inf() const { return v_inf_; }
  const std::string& description() const { return description_; }

  double operator()(double x) const { return profile_(x); }
  /// V^{(order)}(x) for order in 0..3.
  double eval(double x, int order) const;
  /// Frequency a = sqrt(V''(x_left)/2).
  double frequency() const;
  const Profile& profile() const { return profile_; }

 private:
  PotentialSpec(PotentialKind kind, JetFunction fn, double x_well, std::optional<double> vpp,
                std::optional<double> v_inf, std::string description);

  PotentialKind kind_;
  double x_left_, x_right_, v0_, vpp_, v_inf_;
  std::string description_;
  Profile profile_;
};

double eval_potential(const PotentialSpec& spec, double x, int order);

struct ValidationOptions {
  double evenness_tol = 1e-12;  ///< relative to max |V| on the grid
  double well_tol = 1e-9;       ///< |V(x_l)| and |V'(x_l)| tolerance
  double vpp_rel_tol = 1e-6;    ///< declared vs measured V''(x_l)
  double x_far = 0.0;           ///< 0 selects 2 * x_right
};

struct DiagnosticsReport {
  double evenness_defect = 0.0;
  double min_off_well = 0.0;  ///< smallest V at grid points away from the wells
  int nonpositive_points = 0;
  double well_value = 0.0;
  double well_slope = 0.0;
  double vpp_measured = 0.0;
  double vpp_declared = 0.0;
  bool distinct_minima = false;
  bool nondegenerate = false;
  double v_inf_estimate = 0.0;
  bool passed = false;
  std::vector<std::string> failures;
};

/// Report-only check of the double-well hypotheses on a sorted grid.
DiagnosticsReport validate(const PotentialSpec& spec, std::span<const double> grid,
                           const ValidationOptions& opt = {});

/// Which side carries the sealing bump. `Right` closes the right well and
/// leaves the left-well operator; `Left` is its mirror image.
enum class SealSide { Right, Left };

class SealedPotential {
 public:
  SealedPotential(PotentialSpec base, SealSide side, double eta, double amplitude);

  const PotentialSpec& base() const { return base_; }
  SealSide side() const { return side_; }
  double eta() const { return eta_; }
  double amplitude() const { return amplitude_; }
  /// Minimum that survives the sealing.
  double kept_well() const;
  double sealed_well() const;

  double sigma(double x) const;
  Jet sigma(const Jet& x) const;
  double operator()(double x) const { return profile_(x); }
  const Profile& profile() const { return profile_; }

 private:
  PotentialSpec base_;
  SealSide side_;
  double eta_, amplitude_;
  Profile profile_;
};

/// Adds amplitude * exp(-1/(1 - t^2)), t = (x - x_sealed)/eta, on |t| < 1.
SealedPotential seal(const PotentialSpec& spec, SealSide side, double eta, double amplitude);
/// eta = (x_r - x_l)/8 and amplitude = max(1, V(0)).
SealedPotential seal(const PotentialSpec& spec, SealSide side);

struct QuadraticModel {
  double center = 0.0;
  double a = 0.0;  ///< sqrt(V''(center)/2)
  double vpp = 0.0;

  double operator()(double x) const { return 0.5 * vpp * (x - center) * (x - center); }
  Profile profile() const;
};

QuadraticModel quadratic_model(const PotentialSpec& spec);

/// Smooth plateau equal to 1 on [-A, A] and 0 outside [-2A, 2A].
double plateau(double x, double A);

}  // namespace ctunnel
