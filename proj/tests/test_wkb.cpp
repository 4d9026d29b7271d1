#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"

#include "ctunnel/errors.hpp"
#include "ctunnel/specsolve.hpp"
#include "ctunnel/wkb.hpp"

using namespace ctunnel;
using doctest::Approx;

namespace {
const double kPi = std::numbers::pi;

cplx sum_series(const std::vector<cplx>& mu, double h) {
  cplx s = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j) s += mu[j] * std::pow(h, double(j + 1));
  return s;
}
}  // namespace

TEST_CASE("harmonic model has an exact first term") {
  const QuadraticModel m = quadratic_model(PotentialSpec::quartic());
  for (double alpha : {0.0, 1.0}) {
    for (int n : {1, 2, 3}) {
      const std::vector<cplx> mu = wkb_eigenvalue(m.profile(), alpha, n, 4);
      CHECK(std::abs(mu[0] - std::polar((2.0 * n - 1) * m.a, alpha / 2)) < 1e-12);
      for (std::size_t j = 1; j < mu.size(); ++j) CHECK(std::abs(mu[j]) < 1e-10);
    }
  }
}

TEST_CASE("quartic eigenvalue coefficients follow the dilation rule") {
  // Rescaling t -> e^{-i alpha/4} t maps the rotated problem onto the real one,
  // so mu_j(alpha) = e^{i alpha (2 - j)/2} mu_j(0).
  const SealedPotential s = seal(PotentialSpec::quartic(), SealSide::Right);
  const std::vector<cplx> real = wkb_eigenvalue(s, 0.0, 1, 4);
  CHECK(real[0].real() == Approx(2.0));
  for (const cplx& c : real) CHECK(std::abs(c.imag()) < 1e-12);
  for (double alpha : {kPi / 3, kPi / 2, -2.0}) {
    const std::vector<cplx> rot = wkb_eigenvalue(s, alpha, 1, 4);
    for (int j = 1; j <= 4; ++j)
      CHECK(std::abs(rot[j - 1] - std::polar(1.0, alpha * (2 - j) / 2) * real[j - 1]) <
            1e-9 * std::max(1.0, std::abs(real[j - 1])));
  }
}

TEST_CASE("WKB eigenvalue series against the discretized sealed operator") {
  const SealedPotential s = seal(PotentialSpec::quartic(), SealSide::Right);
  const double alpha = kPi / 3;
  const std::vector<cplx> mu = wkb_eigenvalue(s, alpha, 1, 3);
  double prev = 0.0;
  for (double h : {0.1, 0.05}) {
    const DiscreteOperator op = assemble(s.profile(), alpha, h, 3.0, 801, Scheme::Fd4,
                                         PotentialTag::LeftSealed, false);
    const cplx num = eigenpair_near(op, sum_series(mu, h)).value;
    const double err = std::abs(num - sum_series(mu, h));
    CHECK(err < 20 * std::pow(h, 4));
    if (prev > 0) CHECK(std::log(prev / err) / std::log(2.0) > 3.5);
    prev = err;
  }
}

TEST_CASE("leading amplitude and phase of the quartic well") {
  const SealedPotential s = seal(PotentialSpec::quartic(), SealSide::Right);
  // a_{1,0}(x) = (2/(1-x)) for -1 < x < 1 away from the seal.
  for (double x : {-0.9, -0.5, 0.0, 0.3}) {
    const cplx a0 = transport_leading(s, 0.0, 1, x);
    CHECK(a0.real() == Approx(2.0 / (1.0 - x)).epsilon(1e-8));
  }
  const cplx p = phase(s, kPi / 2, 0.0);
  CHECK(std::abs(p - std::polar(2.0 / 3.0, kPi / 4)) < 1e-10);
  CHECK(std::abs(phase(s, 0.3, -1.0)) < 1e-14);
}

TEST_CASE("custom potentials are capped at J = 4") {
  const PotentialSpec c = PotentialSpec::custom("(1 - x^2)^2", 1.0);
  const SealedPotential s = seal(c, SealSide::Right);
  CHECK(wkb_eigenvalue(s, 0.0, 1, 4).size() == 4);
  CHECK_THROWS_AS(wkb_eigenvalue(s, 0.0, 1, 5), ContractViolation);
}

TEST_CASE("weighted residual decays like h^{J+1}") {
  const SealedPotential s = seal(PotentialSpec::quartic(), SealSide::Right);
  const double alpha = kPi / 3;
  const std::vector<double> grid = uniform_grid(-1.9, 0.6, 0.0025);
  for (int J : {1, 2}) {
    std::vector<double> r;
    for (double h : {0.1, 0.05, 0.025}) {
      WkbExpansion e = wkb_quasimode(s, alpha, h, 1, J, grid);
      r.push_back(weighted_residual(e, s, -1.8, 0.5));
      CHECK(e.weighted_residual == r.back());
    }
    const double slope = std::log(r.front() / r.back()) / std::log(4.0);
    CHECK(slope >= J + 1 - 0.2);
  }
}

TEST_CASE("quasimode normalization constants") {
  const SealedPotential s = seal(PotentialSpec::quartic(), SealSide::Right);
  for (double alpha : {0.0, kPi / 2}) {
    const WkbNorms n = wkb_norms(s, alpha, 0.005);
    CHECK(n.norm == Approx(n.norm_prediction).epsilon(0.05));
    CHECK(std::abs(n.selfpair - n.selfpair_prediction) < 0.05 * std::abs(n.selfpair_prediction));
    // Closed forms: (pi h / (a cos))^{1/4} and sqrt(pi h / a) e^{-i alpha/4}.
    CHECK(n.norm_prediction == Approx(std::pow(kPi * 0.005 / (2 * std::cos(alpha / 2)), 0.25)));
    CHECK(std::arg(n.selfpair_prediction) == Approx(-alpha / 4));
  }
}

TEST_CASE("expansion bookkeeping") {
  const SealedPotential s = seal(PotentialSpec::quartic(), SealSide::Right);
  const std::vector<double> grid = uniform_grid(-1.5, -0.5, 0.01);
  const WkbExpansion e = wkb_quasimode(s, 0.4, 0.05, 2, 3, grid);
  CHECK(e.amplitudes.size() == 3);
  CHECK(e.mu_coeffs.size() == 3);
  CHECK(e.quasimode.size() == grid.size());
  CHECK(e.weighted_residual < 0.0);
  const std::vector<cplx> sum = e.amplitude_sum();
  for (std::size_t i = 0; i < grid.size(); i += 17)
    CHECK(std::abs(e.quasimode[i] - std::exp(-e.phase[i] / 0.05) * sum[i]) <
          1e-12 * std::abs(e.quasimode[i]) + 1e-300);
}
