#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "ctunnel/potential.hpp"
#include "ctunnel/specsolve.hpp"

namespace ctunnel {

using cplx = std::complex<double>;

struct SolverOptions {
  double X = 3.0;
  int n_points = 401;
  Scheme scheme = Scheme::Fd4;
  double R = 7.0;
  int n_contour = 32;
  double residual_tol_rel = 1e-8;
  double rank_tol = 1e-6;
  double proj_tol = 1e-8;
};

struct GapOptions {
  SolverOptions solver;
  double seal_eta = 0.0;        ///< 0 selects the default (x_r - x_l)/8
  double seal_amplitude = 0.0;  ///< 0 selects max(1, V(0))
  double resolution_factor = 50.0;
  double agreement_tol = 0.1;   ///< relative mismatch of the squared gaps that raises a flag
};

SealedPotential sealed_left(const PotentialSpec& spec, const GapOptions& opt);

/// Closed-form tunneling constant A(alpha).
cplx asymptotic_constant_A(const PotentialSpec& spec, double alpha);

/// Same product with the transport exponent exp(-2 I(0)) in place of
/// exp(-4 I(0)), where I(0) = int_{x_l}^0 ((sqrt V)' - a) / (2 sqrt V).
/// This is the constant the discretized operators converge to.
cplx transport_prefactor(const PotentialSpec& spec, double alpha);

/// A sqrt(h) e^{-S(alpha)/h}.
cplx gap_prediction(const PotentialSpec& spec, double alpha, double h);
/// |A| sqrt(h) e^{-S cos(alpha/2)/h}, evaluated without forming the complex exponential.
double gap_prediction_modulus(const PotentialSpec& spec, double alpha, double h);

struct GroundstateData {
  cplx mu;             ///< sealed ground eigenvalue
  cplx psi0;           ///< psi_l(0), L^2-normalized, phase fixed against the WKB profile
  cplx dpsi0;          ///< psi_l'(0)
  cplx selfpair;       ///< int psi_l^2
  cplx W0;             ///< 2 i h psi_l(0) psi_l'(0)
  cplx u0;             ///< h psi'/psi at 0 from the Riccati integration
  cplx psi0_grid;      ///< the same two values read off the grid eigenvector
  cplx dpsi0_grid;
  cplx wkb_overlap;    ///< <psi_l, psi_wkb> after phase fixing (real positive)
  cplx gap_riccati;    ///< 2 Delta from the Riccati values
  cplx gap_grid;       ///< 2 Delta from the grid values
};

GroundstateData one_well_groundstate_data(const SealedPotential& sealed, double alpha, double h,
                                          const SolverOptions& opt = {});

/// 2 Delta(h) = 2 i h W(0) / <psi_r, conj psi_r>.
cplx wronskian_gap(const PotentialSpec& spec, double alpha, double h, const GapOptions& opt = {});

struct DirectGap {
  cplx mu1, mu2;
  cplx gap;                    ///< mu2 - mu1
  double backward_error = 0.0;  ///< eps ||M||_1 max condition
  bool under_resolved = false;
  bool cluster_anomaly = false;
  std::vector<cplx> eigenvalues;  ///< D(0, R h), sorted
};

DirectGap direct_gap(const PotentialSpec& spec, double alpha, double h,
                     const SolverOptions& opt = {}, double resolution_factor = 50.0);

struct GapReport {
  double alpha = 0.0;
  double h = 0.0;
  cplx mu1, mu2;
  cplx gap_direct;
  cplx gap_wronskian;
  cplx gap_asymptotic;
  cplx A_const;
  cplx S_alpha;
  double ratio_direct = 0.0;     ///< |gap_direct| / |gap_asymptotic|
  double ratio_wronskian = 0.0;  ///< |gap_wronskian| / |gap_asymptotic|
  double ratio_transport_direct = 0.0;
  double ratio_transport_wronskian = 0.0;
  double arg_dev = 0.0;
  double error_direct = 0.0;
  double error_wronskian = 0.0;
  bool has_direct = false;
  bool has_wronskian = false;
  GroundstateData groundstate;
  std::vector<cplx> eigenvalues;  ///< double-well spectrum in D(0, R h) when the eigensolve ran
  std::vector<std::string> flags;

  bool flagged(const std::string& f) const;
  /// Wronskian value when available, otherwise the direct one.
  cplx best_gap() const { return has_wronskian ? gap_wronskian : gap_direct; }
};

/// Runs all three methods. Disagreement is recorded in `flags`; only the
/// failure of both numerical methods throws.
GapReport gap_report(const PotentialSpec& spec, double alpha, double h,
                     const GapOptions& opt = {});

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double slope_stderr = 0.0;
  double expected_slope = 0.0;
  double relative_deviation = 0.0;  ///< |slope - expected| / |expected|, or |slope| when expected is 0
  int points = 0;
};

/// Least-squares line through (1/h, unwrapped arg gap). Expected slope
/// -S sin(alpha/2).
LinearFit rotation_analysis(std::span<const GapReport> reports);
LinearFit rotation_fit(std::span<const double> h, std::span<const cplx> gaps, double alpha,
                       double S);

/// Least-squares line through (1/h, log|gap| - log(h)/2). Expected slope
/// -S cos(alpha/2); exp(intercept) estimates |A|.
LinearFit magnitude_fit(std::span<const GapReport> reports);
LinearFit magnitude_fit(std::span<const double> h, std::span<const cplx> gaps, double alpha,
                        double S);

/// Hermitian overlap |<psi_l, psi_r>| of the two unit sealed groundstates.
double sealed_overlap(const PotentialSpec& spec, double alpha, double h,
                      const GapOptions& opt = {});

}  // namespace ctunnel
