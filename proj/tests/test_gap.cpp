#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "doctest.h"

#include "ctunnel/action.hpp"
#include "ctunnel/errors.hpp"
#include "ctunnel/gap.hpp"

using namespace ctunnel;
using doctest::Approx;

namespace {
const double kPi = std::numbers::pi;

// Tunneling exponent int_{x_l}^0 ((sqrt V)' - a)/sqrt V by tanh-sinh, which
// never samples the removable endpoint.
template <typename F, typename DF>
double exponent_integral(F sqrtV, DF dsqrtV, double a, double xl) {
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate([&](double s) { return (dsqrtV(s) - a) / sqrtV(s); }, xl, 0.0);
}
}  // namespace

TEST_CASE("tunneling constant of the quartic") {
  const PotentialSpec q = PotentialSpec::quartic();
  const double I = exponent_integral([](double s) { return 1 - s * s; },
                                     [](double s) { return -2 * s; }, 2.0, -1.0);
  CHECK(I == Approx(-2 * std::log(2.0)).epsilon(1e-12));
  const double closed = 64 * std::sqrt(2.0) / std::sqrt(kPi);
  const double from_oracle = 4 * std::sqrt(1 / kPi) * std::pow(8.0 / 2, 0.25) * std::exp(-2 * I);
  CHECK(from_oracle == Approx(closed).epsilon(1e-12));
  CHECK(std::abs(asymptotic_constant_A(q, 0.0)) == Approx(closed).epsilon(1e-9));
  for (double alpha : {0.5, kPi / 2, -2.0})
    CHECK(std::arg(asymptotic_constant_A(q, alpha)) == Approx(0.75 * alpha).epsilon(1e-12));
  // The transport exponent carries half the tunneling exponent.
  CHECK(std::abs(transport_prefactor(q, 0.0)) == Approx(closed / 4).epsilon(1e-9));
}

TEST_CASE("tunneling constant of the figure potential") {
  const PotentialSpec f = PotentialSpec::figure();
  const double a = std::sqrt(16.0 / 3.0);
  auto sv = [](double s) { return 2 * (1 - s * s) / std::sqrt(2 + s * s * s * s); };
  auto dsv = [](double s) {
    const double r = std::sqrt(2 + s * s * s * s);
    return (-4 * s * r - 2 * (1 - s * s) * 2 * s * s * s / r) / (2 + s * s * s * s);
  };
  const double I = exponent_integral(sv, dsv, a, -1.0);
  const double oracle = 4 * std::sqrt(2.0 / kPi) * std::sqrt(a) * std::exp(-2 * I);
  CHECK(std::abs(asymptotic_constant_A(f, 0.0)) == Approx(oracle).epsilon(1e-8));
}

TEST_CASE("gap prediction") {
  const PotentialSpec q = PotentialSpec::quartic();
  // Long-double arithmetic on the closed forms.
  const long double A = 64.0L * std::sqrt(2.0L) / std::sqrt(3.14159265358979323846L);
  const long double p = A * std::sqrt(0.1L) * std::exp(-40.0L / 3.0L);
  CHECK(std::abs(gap_prediction(q, 0.0, 0.1)) == Approx(double(p)).epsilon(1e-10));
  CHECK(double(p) == Approx(2.6157e-5).epsilon(1e-4));
  for (double h : {0.2, 0.1, 0.05}) {
    const double ratio = gap_prediction_modulus(q, kPi / 2, h) / gap_prediction_modulus(q, 0, h);
    CHECK(ratio == Approx(std::exp(4.0 / 3.0 * (1 - std::cos(kPi / 4)) / h)).epsilon(1e-10));
    CHECK(ratio > 1.0);
    const cplx g = gap_prediction(q, kPi / 2, h);
    CHECK(std::abs(g) == Approx(gap_prediction_modulus(q, kPi / 2, h)).epsilon(1e-10));
    const double arg = 0.75 * kPi / 2 - 4.0 / 3.0 * std::sin(kPi / 4) / h;
    CHECK(std::abs(std::remainder(std::arg(g) - arg, 2 * kPi)) < 1e-9);
  }
}

TEST_CASE("Wronskian and direct gaps agree in the overlap window") {
  const PotentialSpec q = PotentialSpec::quartic();
  const GapReport r = gap_report(q, 0.0, 0.1);
  REQUIRE(r.has_direct);
  REQUIRE(r.has_wronskian);
  CHECK(std::abs(r.gap_wronskian.imag()) < 1e-12 * std::abs(r.gap_wronskian));
  CHECK(r.gap_direct.real() > 0.0);
  CHECK(r.gap_wronskian.real() == Approx(r.gap_direct.real()).epsilon(0.05));
  CHECK(r.flags.empty());
  CHECK(r.ratio_transport_direct > 0.8);
  CHECK(r.ratio_transport_direct < 1.25);
  CHECK(r.ratio_transport_wronskian > 0.8);
  CHECK(r.ratio_transport_wronskian < 1.25);
  CHECK(r.ratio_direct == Approx(r.ratio_transport_direct / 4).epsilon(1e-9));

  const GapReport s = gap_report(q, kPi / 2, 0.08);
  REQUIRE(s.has_direct);
  REQUIRE(s.has_wronskian);
  const cplx sq = s.gap_wronskian * s.gap_wronskian / (s.gap_direct * s.gap_direct);
  CHECK(std::abs(sq - 1.0) < 0.1);
}

TEST_CASE("groundstate data") {
  const PotentialSpec q = PotentialSpec::quartic();
  const double h = 0.04;
  for (double alpha : {0.0, kPi / 2}) {
    const GroundstateData d = one_well_groundstate_data(sealed_left(q, {}), alpha, h);
    CHECK(std::abs(d.W0 - cplx(0, 2 * h) * d.psi0 * d.dpsi0) < 1e-14 * std::abs(d.W0));
    const cplx limit = std::polar(std::sqrt(std::cos(alpha / 2)), -alpha / 4);
    CHECK(std::abs(d.selfpair - limit) < 0.03);
    CHECK(std::abs(d.wkb_overlap.imag()) < 1e-12);
    CHECK(d.wkb_overlap.real() > 0.9);
    CHECK(std::abs(d.gap_grid - d.gap_riccati) < 0.01 * std::abs(d.gap_riccati));
    // Rescaled |W(0)| against 2 sqrt(V0) (a cos(alpha/2) / pi)^{1/2} e^{-2 I(0)}.
    const double w0 = 2 * std::sqrt(std::cos(alpha / 2) * 2 / kPi) * 4;
    const double S = 4.0 / 3.0 * std::cos(alpha / 2);
    CHECK(std::abs(d.W0) * std::sqrt(h) * std::exp(S / h) == Approx(w0).epsilon(0.1));
  }
}

TEST_CASE("phase bookkeeping of the Wronskian gap") {
  const PotentialSpec q = PotentialSpec::quartic();
  const double alpha = kPi / 2;
  for (double h : {0.08, 0.05}) {
    const cplx g = wronskian_gap(q, alpha, h);
    const double pred = 0.75 * alpha - 4.0 / 3.0 * std::sin(alpha / 2) / h;
    CHECK(std::abs(std::remainder(std::arg(g) - pred, 2 * kPi)) < 0.1);
  }
}

TEST_CASE("direct gap") {
  const PotentialSpec q = PotentialSpec::quartic();
  const DirectGap d = direct_gap(q, 0.0, 0.12);
  CHECK(d.gap.real() > 0.0);
  CHECK(std::abs(d.gap.imag()) <= 10 * d.backward_error);
  CHECK_FALSE(d.under_resolved);
  const DirectGap a0 = direct_gap(q, 0.0, 0.1);
  const DirectGap a2 = direct_gap(q, kPi / 2, 0.1);
  CHECK(std::abs(a2.gap) > std::abs(a0.gap));
  for (double h : {0.1, 0.07}) {
    const DirectGap g = direct_gap(q, kPi / 3, h);
    const cplx mean = 0.5 * (g.mu1 + g.mu2);
    CHECK(std::abs(mean / std::polar(2 * h, kPi / 6) - 1.0) <= 1.0 * h);
  }
}

TEST_CASE("reports outside the resolvable window") {
  const PotentialSpec q = PotentialSpec::quartic();
  const GapReport deep = gap_report(q, 0.0, 0.04);
  CHECK(deep.flagged("under_resolved"));
  CHECK_FALSE(deep.has_direct);
  REQUIRE(deep.has_wronskian);
  CHECK(deep.ratio_transport_wronskian > 0.85);
  CHECK(deep.ratio_transport_wronskian < 1.15);

  const GapReport big = gap_report(q, 0.0, 0.5);
  CHECK(big.h == 0.5);
  CHECK(std::isfinite(std::abs(big.gap_asymptotic)));
  CHECK((big.has_direct || big.has_wronskian || !big.flags.empty()));
}

TEST_CASE("rotation fit") {
  const double S = 4.0 / 3.0;
  SUBCASE("exact samples") {
    std::vector<double> h;
    std::vector<cplx> g;
    const double alpha = kPi / 2;
    for (int k = 6; k <= 25; ++k) {
      h.push_back(1.0 / k);
      g.push_back(std::polar(1e-3, 0.4 - S * std::sin(alpha / 2) * k));
    }
    const LinearFit f = rotation_fit(h, g, alpha, S);
    CHECK(f.slope == Approx(-S * std::sin(alpha / 2)).epsilon(1e-12));
    CHECK(f.relative_deviation < 1e-10);
  }
  SUBCASE("real gaps give zero slope") {
    std::vector<double> h{0.2, 0.15, 0.12, 0.1, 0.08, 0.06};
    std::vector<cplx> g(h.size(), cplx(1e-5, 0.0));
    const LinearFit f = rotation_fit(h, g, 0.0, S);
    CHECK(std::abs(f.slope) < 1e-12);
  }
  SUBCASE("aliasing guard") {
    std::vector<double> h{1.0 / 4, 1.0 / 8, 1.0 / 12, 1.0 / 16, 1.0 / 20};
    std::vector<cplx> g(h.size(), cplx(1.0, 0.0));
    CHECK_THROWS_AS(rotation_fit(h, g, kPi / 2, S), AliasingError);
  }
  SUBCASE("too few points") {
    std::vector<double> h{0.1, 0.09};
    std::vector<cplx> g(2, 1.0);
    CHECK_THROWS_AS(rotation_fit(h, g, 1.0, S), ContractViolation);
  }
}

TEST_CASE("magnitude fit recovers rate and prefactor from exact samples") {
  std::vector<double> h;
  std::vector<cplx> g;
  const double alpha = kPi / 3, S = 4.0 / 3.0;
  for (double x : {0.15, 0.12, 0.1, 0.08, 0.06, 0.05}) {
    h.push_back(x);
    g.push_back(7.0 * std::sqrt(x) * std::exp(-S * std::polar(1.0, alpha / 2) / x));
  }
  const LinearFit f = magnitude_fit(h, g, alpha, S);
  CHECK(f.slope == Approx(-S * std::cos(alpha / 2)).epsilon(1e-12));
  CHECK(std::exp(f.intercept) == Approx(7.0).epsilon(1e-10));
}
