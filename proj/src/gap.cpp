#include "ctunnel/gap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <boost/numeric/odeint.hpp>

#include "ctunnel/action.hpp"
#include "ctunnel/errors.hpp"
#include "ctunnel/wkb.hpp"

namespace ctunnel {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const cplx kNaNc{kNaN, kNaN};

double transport_log_integral(const PotentialSpec& spec) {
  return WkbSolver(spec.profile(), 0.0, 1, 1).log_integral(0.0);
}

cplx prefactor(const PotentialSpec& spec, double alpha, double exponent_scale) {
  const double a = spec.frequency();
  const double mag = 4.0 * std::sqrt(spec.v0() / std::numbers::pi) * std::sqrt(a) *
                     std::exp(-exponent_scale * transport_log_integral(spec));
  return std::polar(mag, 0.75 * alpha);
}

// Value and first derivative at x of the degree-4 interpolant through the
// five nodes nearest x on a uniform grid.
std::pair<cplx, cplx> interpolate5(const Eigen::VectorXd& grid, const Eigen::VectorXcd& f,
                                   double x) {
  const int n = static_cast<int>(grid.size());
  const double dx = grid[1] - grid[0];
  int k = static_cast<int>(std::lround((x - grid[0]) / dx));
  k = std::clamp(k, 2, n - 3);
  cplx val = 0.0, der = 0.0;
  for (int j = k - 2; j <= k + 2; ++j) {
    double w = 1.0;
    double dw = 0.0;
    for (int m = k - 2; m <= k + 2; ++m) {
      if (m == j) continue;
      const double denom = grid[j] - grid[m];
      dw = dw * (x - grid[m]) / denom + w / denom;
      w *= (x - grid[m]) / denom;
    }
    val += w * f[j];
    der += dw * f[j];
  }
  return {val, der};
}

struct RiccatiResult {
  cplx u0;
  cplx log_ratio;  // log psi(0) - log psi(x_c)
};

// h u' = e^{i alpha} V - mu - u^2 with u = h psi'/psi, started on the
// decaying branch at the far end of the kept well's right side and
// integrated inward, where that branch is attracting.
RiccatiResult riccati_to_center(const Profile& V, double alpha, double h, cplx mu, double X,
                                double xc) {
  namespace ode = boost::numeric::odeint;
  using State = std::vector<cplx>;
  const cplx rot = std::polar(1.0, alpha);
  auto rhs = [&](const State& y, State& dy, double x) {
    dy[0] = (rot * V(x) - mu - y[0] * y[0]) / h;
    dy[1] = y[0] / h;
  };
  State y{-std::sqrt(rot * V(X) - mu), 0.0};
  auto stepper = ode::make_controlled(1e-13, 1e-11, ode::runge_kutta_dopri5<State>());
  const double dt0 = -0.01 * h;
  ode::integrate_adaptive(stepper, rhs, y, X, 0.0, dt0);
  const cplx u0 = y[0];
  const cplx L0 = y[1];
  if (xc < 0.0) ode::integrate_adaptive(stepper, rhs, y, 0.0, xc, dt0);
  if (!std::isfinite(std::abs(y[0])) || !std::isfinite(std::abs(y[1])))
    throw NumericFailure("Riccati integration diverged");
  return {u0, L0 - y[1]};
}

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y,
                        double expected) {
  const std::size_t n = x.size();
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LinearFit fit;
  fit.points = static_cast<int>(n);
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    ss += r * r;
  }
  fit.slope_stderr = n > 2 ? std::sqrt(ss / (n - 2) / sxx) : 0.0;
  fit.expected_slope = expected;
  fit.relative_deviation = expected != 0.0 ? std::abs(fit.slope - expected) / std::abs(expected)
                                           : std::abs(fit.slope);
  return fit;
}

}  // namespace

SealedPotential sealed_left(const PotentialSpec& spec, const GapOptions& opt) {
  const double eta = opt.seal_eta > 0 ? opt.seal_eta : (spec.x_right() - spec.x_left()) / 8.0;
  const double amp = opt.seal_amplitude > 0 ? opt.seal_amplitude : std::max(1.0, spec.v0());
  return seal(spec, SealSide::Right, eta, amp);
}

cplx asymptotic_constant_A(const PotentialSpec& spec, double alpha) {
  return prefactor(spec, alpha, 4.0);
}

cplx transport_prefactor(const PotentialSpec& spec, double alpha) {
  return prefactor(spec, alpha, 2.0);
}

cplx gap_prediction(const PotentialSpec& spec, double alpha, double h) {
  require(h > 0, "gap_prediction: h must be positive");
  const cplx S = complex_action(spec, alpha);
  return asymptotic_constant_A(spec, alpha) * std::sqrt(h) * std::exp(-S / h);
}

double gap_prediction_modulus(const PotentialSpec& spec, double alpha, double h) {
  require(h > 0, "gap_prediction_modulus: h must be positive");
  const double S = std::abs(complex_action(spec, alpha));
  return std::abs(asymptotic_constant_A(spec, alpha)) * std::sqrt(h) *
         std::exp(-S * std::cos(0.5 * alpha) / h);
}

GroundstateData one_well_groundstate_data(const SealedPotential& sealed, double alpha, double h,
                                          const SolverOptions& opt) {
  require(std::abs(alpha) < std::numbers::pi, "groundstate: alpha must lie in (-pi, pi)");
  require(h > 0, "groundstate: h must be positive");
  const Profile& V = sealed.profile();
  const double xc = V.center();
  const double a = V.frequency();

  const DiscreteOperator op = assemble(V, alpha, h, opt.X, opt.n_points, opt.scheme,
                                       PotentialTag::LeftSealed, opt.scheme != Scheme::Fd4);
  const std::vector<cplx> mus = wkb_eigenvalue(sealed, alpha, 1, 3);
  cplx guess = 0.0;
  for (std::size_t j = 0; j < mus.size(); ++j) guess += mus[j] * std::pow(h, double(j + 1));
  Eigenpair ep = eigenpair_near(op, guess);
  Eigen::VectorXcd psi = ep.vector;

  // Fix the global phase against the leading WKB profile near the well.
  const double c = std::cos(0.5 * alpha);
  const double half = std::min(std::sqrt(40.0 * h / (a * c)), 0.9 * (0.0 - xc));
  std::vector<double> window;
  std::vector<int> index;
  for (int i = 0; i < op.n_points; ++i) {
    if (std::abs(op.grid[i] - xc) <= half) {
      window.push_back(op.grid[i]);
      index.push_back(i);
    }
  }
  const WkbExpansion wkb = WkbSolver(V, alpha, 1, 1).expand(h, window);
  Eigen::VectorXcd q = Eigen::VectorXcd::Zero(op.n_points);
  for (std::size_t k = 0; k < index.size(); ++k) q[index[k]] = wkb.quasimode[k];
  const double qn = std::sqrt(hermitian_pairing(q, q, op.weights).real());
  q /= qn;
  const cplx overlap = hermitian_pairing(psi, q, op.weights);
  if (std::abs(overlap) < 0.5)
    throw NormalizationError("groundstate overlap with its WKB profile is " +
                             std::to_string(std::abs(overlap)));
  psi *= overlap / std::abs(overlap);

  GroundstateData d;
  d.mu = ep.value;
  d.wkb_overlap = hermitian_pairing(psi, q, op.weights);
  d.selfpair = bilinear_pairing(psi, psi, op.weights);

  auto [p0, dp0] = interpolate5(op.grid, psi, 0.0);
  d.psi0_grid = p0;
  d.dpsi0_grid = dp0;

  const cplx psic = interpolate5(op.grid, psi, xc).first;
  const RiccatiResult r = riccati_to_center(V, alpha, h, ep.value, opt.X, xc);
  d.u0 = r.u0;
  d.psi0 = psic * std::exp(r.log_ratio);
  d.dpsi0 = r.u0 * d.psi0 / h;
  d.W0 = cplx(0.0, 2.0 * h) * d.psi0 * d.dpsi0;

  const cplx two_ih(0.0, 2.0 * h);
  d.gap_riccati = two_ih * d.W0 / d.selfpair;
  d.gap_grid = two_ih * (two_ih * d.psi0_grid * d.dpsi0_grid) / d.selfpair;
  return d;
}

cplx wronskian_gap(const PotentialSpec& spec, double alpha, double h, const GapOptions& opt) {
  return one_well_groundstate_data(sealed_left(spec, opt), alpha, h, opt.solver).gap_riccati;
}

DirectGap direct_gap(const PotentialSpec& spec, double alpha, double h, const SolverOptions& opt,
                     double resolution_factor) {
  const DiscreteOperator op =
      assemble(spec.profile(), alpha, h, opt.X, opt.n_points, opt.scheme, PotentialTag::Double);
  SpectrumOptions sopt;
  sopt.residual_tol_rel = opt.residual_tol_rel;
  const SpectrumResult s = low_lying_spectrum(op, opt.R, sopt);
  if (s.eigenvalues.size() < 2)
    throw NumericFailure("fewer than two eigenvalues in D(0, R h)");
  DirectGap d;
  d.eigenvalues = s.eigenvalues;
  d.mu1 = s.eigenvalues[0];
  d.mu2 = s.eigenvalues[1];
  d.gap = d.mu2 - d.mu1;
  const double kappa = std::max(s.condition[0], s.condition[1]);
  d.backward_error = std::numeric_limits<double>::epsilon() * s.matrix_norm * kappa;
  d.under_resolved = std::abs(d.gap) < resolution_factor * d.backward_error;
  d.cluster_anomaly = cluster_eigenvalues(s, h, spec.frequency()).anomaly;
  return d;
}

bool GapReport::flagged(const std::string& f) const {
  return std::find(flags.begin(), flags.end(), f) != flags.end();
}

GapReport gap_report(const PotentialSpec& spec, double alpha, double h, const GapOptions& opt) {
  GapReport r;
  r.alpha = alpha;
  r.h = h;
  r.A_const = asymptotic_constant_A(spec, alpha);
  r.S_alpha = complex_action(spec, alpha);
  r.gap_asymptotic = gap_prediction(spec, alpha, h);
  const double pred = std::abs(r.gap_asymptotic);
  const double pred_transport = pred * std::abs(transport_prefactor(spec, alpha) / r.A_const);
  r.mu1 = r.mu2 = r.gap_direct = r.gap_wronskian = kNaNc;
  r.ratio_direct = r.ratio_wronskian = kNaN;
  r.ratio_transport_direct = r.ratio_transport_wronskian = kNaN;
  r.arg_dev = kNaN;
  r.error_direct = r.error_wronskian = kNaN;
  std::string failure;

  try {
    const DirectGap d = direct_gap(spec, alpha, h, opt.solver, opt.resolution_factor);
    r.mu1 = d.mu1;
    r.mu2 = d.mu2;
    r.gap_direct = d.gap;
    r.error_direct = d.backward_error;
    r.eigenvalues = d.eigenvalues;
    if (d.cluster_anomaly) r.flags.push_back("cluster_anomaly");
    if (d.under_resolved) {
      r.flags.push_back("under_resolved");
    } else {
      r.has_direct = true;
      r.ratio_direct = std::abs(d.gap) / pred;
      r.ratio_transport_direct = std::abs(d.gap) / pred_transport;
    }
  } catch (const NumericFailure& e) {
    r.flags.push_back("direct_failed");
    failure = e.what();
  }

  try {
    r.groundstate = one_well_groundstate_data(sealed_left(spec, opt), alpha, h, opt.solver);
    r.gap_wronskian = r.groundstate.gap_riccati;
    r.error_wronskian = std::abs(r.groundstate.gap_riccati - r.groundstate.gap_grid);
    r.has_wronskian = std::isfinite(std::abs(r.gap_wronskian));
    if (r.has_wronskian) {
      r.ratio_wronskian = std::abs(r.gap_wronskian) / pred;
      r.ratio_transport_wronskian = std::abs(r.gap_wronskian) / pred_transport;
    } else {
      r.flags.push_back("wronskian_failed");
    }
  } catch (const NormalizationError& e) {
    r.flags.push_back("normalization_failed");
    failure += std::string(failure.empty() ? "" : "; ") + e.what();
  } catch (const NumericFailure& e) {
    r.flags.push_back("wronskian_failed");
    failure += std::string(failure.empty() ? "" : "; ") + e.what();
  }

  if (!r.has_direct && !r.has_wronskian && !r.flagged("under_resolved"))
    throw NumericFailure("gap_report: no numerical gap at h = " + std::to_string(h) + ": " +
                         failure);

  if (r.has_direct && r.has_wronskian) {
    const cplx q = (r.gap_wronskian * r.gap_wronskian) / (r.gap_direct * r.gap_direct);
    const double combined = 2.0 * (r.error_direct / std::abs(r.gap_direct) +
                                   r.error_wronskian / std::abs(r.gap_wronskian));
    if (std::abs(q - 1.0) > std::max(opt.agreement_tol, combined))
      r.flags.push_back("methods_disagree");
  }
  const cplx g = r.has_direct ? r.gap_direct : r.gap_wronskian;
  if (std::isfinite(std::abs(g))) {
    // Principal log of the asymptotic value stays finite however small it is.
    const double arg_pred = 0.75 * alpha - r.S_alpha.imag() / h;
    r.arg_dev = std::remainder(std::arg(g) - arg_pred, 2.0 * std::numbers::pi);
    if (r.arg_dev <= -std::numbers::pi) r.arg_dev += 2.0 * std::numbers::pi;
  }
  return r;
}

LinearFit rotation_fit(std::span<const double> h, std::span<const cplx> gaps, double alpha,
                       double S) {
  require(h.size() == gaps.size(), "rotation_fit: size mismatch");
  require(h.size() >= 5, "rotation_fit: need at least five points");
  std::vector<std::size_t> order(h.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return h[i] > h[j]; });

  const double rate = S * std::sin(0.5 * std::abs(alpha));
  std::vector<double> x, y;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t i = order[k];
    require(h[i] > 0 && std::isfinite(std::abs(gaps[i])), "rotation_fit: invalid sample");
    const double inv = 1.0 / h[i];
    double phase = std::arg(gaps[i]);
    if (!x.empty()) {
      if ((inv - x.back()) * rate > std::numbers::pi)
        throw AliasingError("rotation_fit: 1/h step " + std::to_string(inv - x.back()) +
                            " exceeds pi / (S sin(alpha/2))");
      phase = y.back() + std::remainder(phase - y.back(), 2.0 * std::numbers::pi);
    }
    x.push_back(inv);
    y.push_back(phase);
  }
  return least_squares(x, y, -S * std::sin(0.5 * alpha));
}

LinearFit rotation_analysis(std::span<const GapReport> reports) {
  require(reports.size() >= 5, "rotation_analysis: need at least five reports");
  std::vector<double> h;
  std::vector<cplx> g;
  for (const GapReport& r : reports) {
    require(r.alpha == reports[0].alpha, "rotation_analysis: reports mix several alphas");
    if (!r.has_wronskian && !r.has_direct) continue;
    h.push_back(r.h);
    g.push_back(r.best_gap());
  }
  return rotation_fit(h, g, reports[0].alpha, std::abs(reports[0].S_alpha));
}

LinearFit magnitude_fit(std::span<const double> h, std::span<const cplx> gaps, double alpha,
                        double S) {
  require(h.size() == gaps.size() && h.size() >= 2, "magnitude_fit: need two or more points");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < h.size(); ++i) {
    x.push_back(1.0 / h[i]);
    y.push_back(std::log(std::abs(gaps[i])) - 0.5 * std::log(h[i]));
  }
  return least_squares(x, y, -S * std::cos(0.5 * alpha));
}

LinearFit magnitude_fit(std::span<const GapReport> reports) {
  require(!reports.empty(), "magnitude_fit: no reports");
  std::vector<double> h;
  std::vector<cplx> g;
  for (const GapReport& r : reports) {
    if (!r.has_wronskian && !r.has_direct) continue;
    h.push_back(r.h);
    g.push_back(r.best_gap());
  }
  return magnitude_fit(h, g, reports[0].alpha, std::abs(reports[0].S_alpha));
}

double sealed_overlap(const PotentialSpec& spec, double alpha, double h, const GapOptions& opt) {
  const SealedPotential sealed = sealed_left(spec, opt);
  const SolverOptions& so = opt.solver;
  const DiscreteOperator op = assemble(sealed.profile(), alpha, h, so.X, so.n_points, so.scheme,
                                       PotentialTag::LeftSealed, so.scheme != Scheme::Fd4);
  const std::vector<cplx> mus = wkb_eigenvalue(sealed, alpha, 1, 3);
  cplx guess = 0.0;
  for (std::size_t j = 0; j < mus.size(); ++j) guess += mus[j] * std::pow(h, double(j + 1));
  const Eigenpair ep = eigenpair_near(op, guess);
  return std::abs(hermitian_pairing(ep.vector, reflect(ep.vector), op.weights));
}

}  // namespace ctunnel
