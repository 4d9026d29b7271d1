#pragma once

#include <complex>
#include <span>
#include <vector>

#include "ctunnel/potential.hpp"
#include "ctunnel/quadrature.hpp"

namespace ctunnel {

/// Integral of sqrt(V) over [a, b]. Throws NumericDomainError where V < 0.
double agmon_action(const Profile& V, double a, double b, quad::Options opt = {});
double agmon_action(const PotentialSpec& spec, double a, double b, quad::Options opt = {});

/// e^{i alpha/2} times the Agmon distance between the two wells.
std::complex<double> complex_action(const PotentialSpec& spec, double alpha);

struct ComplexAction {
  double alpha = 0.0;
  double S = 0.0;
  std::complex<double> S_alpha;
  double S_eta = 0.0;
  double S_minus_gamma = 0.0;
  double S_plus_gamma = 0.0;
};

/// Fills every action attached to the sealed well at the given gamma.
/// `A_cut <= 0` selects 2 x_r.
ComplexAction truncated_actions(const SealedPotential& sealed, double alpha, double gamma,
                                double A_cut = 0.0);

/// Phi_eps(x) = sqrt(1 - eps) |int_{x_l}^x cos(alpha/2) sqrt(V_{l,A})|, with
/// V_{l,A} the sealed potential damped by a plateau of radius A_cut.
class AgmonWeight {
 public:
  AgmonWeight(const SealedPotential& sealed, double alpha, double epsilon, double A_cut = 0.0);

  double epsilon() const { return epsilon_; }
  double A_cut() const { return A_cut_; }
  double operator()(double x) const;
  /// Values on a sorted grid, accumulated panel by panel from the kept well.
  std::vector<double> samples(std::span<const double> grid) const;

 private:
  double integrand(double s) const;

  Profile V_;
  double well_, scale_, epsilon_, A_cut_;
};

double agmon_weight(const SealedPotential& sealed, double alpha, double epsilon, double A_cut,
                    double x);

}  // namespace ctunnel
