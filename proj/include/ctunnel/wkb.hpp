#pragma once

// WKB quasimodes e^{-phi/h} (a_0 + a_1 h + ...) for the well at
// Profile::center(). Near the well the transport hierarchy is solved as
// power series in t = x - x_c; outside that patch the amplitudes are
// carried by an adaptive ODE integration of the same hierarchy.

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "ctunnel/potential.hpp"

namespace ctunnel {

using cplx = std::complex<double>;

struct WkbOptions {
  double patch_radius = 0.1;
  int series_order = 24;
  double ode_rel_tol = 1e-12;
  double ode_abs_tol = 1e-13;
};

struct WkbExpansion {
  int n = 1;
  int J = 1;
  double alpha = 0.0;
  double h = 0.0;
  std::vector<double> grid;
  std::vector<cplx> phase;                     ///< phi(x)
  std::vector<std::vector<cplx>> amplitudes;   ///< amplitudes[j][i] = a_{n,j}(x_i)
  std::vector<cplx> mu_coeffs;                 ///< mu_{n,1..J}
  std::vector<cplx> quasimode;                 ///< e^{-phi/h} sum_j a_j h^j
  double weighted_residual = -1.0;             ///< negative until evaluated

  /// sum_j a_j(x_i) h^j
  std::vector<cplx> amplitude_sum() const;
  /// sum_{j=1..J} mu_j h^j
  cplx mu_wkb() const;
};

class WkbSolver {
 public:
  WkbSolver(Profile V, double alpha, int n, int J, WkbOptions opt = {});

  const std::vector<cplx>& mu() const { return mu_; }
  double center() const { return xc_; }
  double frequency() const { return a_; }
  double alpha() const { return alpha_; }
  int level() const { return n_; }
  int order() const { return J_; }

  /// Phase, amplitudes a_0..a_{J-1} and their assembly on a sorted grid.
  WkbExpansion expand(double h, std::span<const double> grid) const;

  /// int_{x_c}^x (s' - a) / (2 s) with s = sgn(x - x_c) sqrt(V).
  double log_integral(double x) const;
  /// a_{n,0}(x) from the closed form.
  double leading(double x) const;

 private:
  struct Series;
  Profile V_;
  double alpha_, xc_, a_;
  int n_, J_;
  WkbOptions opt_;
  std::shared_ptr<const Series> series_;
  std::vector<cplx> mu_;
};

/// phi(x) = e^{i alpha/2} |int_{x_l}^x sqrt(V_l)| by quadrature.
cplx phase(const SealedPotential& sealed, double alpha, double x);
cplx phase(const Profile& V, double alpha, double x);

cplx transport_leading(const SealedPotential& sealed, double alpha, int n, double x);

std::vector<cplx> wkb_eigenvalue(const SealedPotential& sealed, double alpha, int n, int J);
std::vector<cplx> wkb_eigenvalue(const Profile& V, double alpha, int n, int J);

WkbExpansion wkb_quasimode(const SealedPotential& sealed, double alpha, double h, int n, int J,
                           std::span<const double> grid);
WkbExpansion wkb_quasimode(const Profile& V, double alpha, double h, int n, int J,
                           std::span<const double> grid);

/// sup over grid points in [K_lo, K_hi] of |e^{phi/h} (L - mu_wkb) psi_wkb|,
/// with L applied by the fourth-order stencil on the (uniform) expansion grid.
/// Also stored in `exp.weighted_residual`.
double weighted_residual(WkbExpansion& exp, const Profile& V, double K_lo, double K_hi);
double weighted_residual(WkbExpansion& exp, const SealedPotential& sealed, double K_lo,
                         double K_hi);

struct WkbNorms {
  double norm = 0.0;
  cplx selfpair;  ///< int psi^2 (bilinear)
  double norm_prediction = 0.0;
  cplx selfpair_prediction;
};

/// Ground quasimode norms by grid quadrature against their Gaussian limits.
WkbNorms wkb_norms(const SealedPotential& sealed, double alpha, double h);
WkbNorms wkb_norms(const Profile& V, double alpha, double h);

std::vector<double> uniform_grid(double lo, double hi, double dx);

}  // namespace ctunnel
