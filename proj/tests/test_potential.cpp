#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"

#include "ctunnel/errors.hpp"
#include "ctunnel/expression.hpp"
#include "ctunnel/potential.hpp"

using namespace ctunnel;
using doctest::Approx;

namespace {
std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  return g;
}
}  // namespace

TEST_CASE("quartic builtin values and derivatives") {
  const PotentialSpec q = PotentialSpec::quartic();
  CHECK(q.x_left() == -1.0);
  CHECK(q.x_right() == 1.0);
  CHECK(q.v0() == Approx(1.0));
  CHECK(q.vpp() == Approx(8.0));
  CHECK(q.frequency() == Approx(2.0));
  for (double x : {-1.7, -0.3, 0.0, 0.4, 2.2}) {
    const double v = (1 - x * x) * (1 - x * x);
    CHECK(q(x) == Approx(v).epsilon(1e-14));
    CHECK(q.eval(x, 1) == Approx(-4 * x * (1 - x * x)).epsilon(1e-13));
    CHECK(q.eval(x, 2) == Approx(12 * x * x - 4).epsilon(1e-13));
    CHECK(q.eval(x, 3) == Approx(24 * x).epsilon(1e-13));
  }
}

TEST_CASE("figure builtin has V''(x_l) = 32/3") {
  const PotentialSpec f = PotentialSpec::figure();
  // Central difference as an independent check of the jet derivative.
  const double d = 1e-4;
  const double fd = (f(-1 + d) - 2 * f(-1) + f(-1 - d)) / (d * d);
  CHECK(f.vpp() == Approx(32.0 / 3.0).epsilon(1e-12));
  CHECK(fd == Approx(32.0 / 3.0).epsilon(1e-6));
  CHECK(f.v0() == Approx(2.0));
}

TEST_CASE("custom expression matches the builtin quartic") {
  const PotentialSpec c = PotentialSpec::custom("(1 - x^2)^2", 1.0);
  const PotentialSpec q = PotentialSpec::quartic();
  for (double x : grid(-2.5, 2.5, 41)) CHECK(c(x) == Approx(q(x)).epsilon(1e-14));
  CHECK(c.vpp() == Approx(8.0).epsilon(1e-10));
  const DiagnosticsReport d = validate(c, grid(-2, 2, 401));
  CHECK(d.passed);
}

TEST_CASE("expression parser") {
  CHECK(Expression::parse("pi/2")(0.0) == Approx(std::numbers::pi / 2));
  CHECK(Expression::parse("exp(-x^2) * sqrt(4)")(1.0) == Approx(2 * std::exp(-1.0)));
  CHECK(Expression::parse("-x^2")(3.0) == Approx(-9.0));
  CHECK_THROWS_AS(Expression::parse("(1 - x"), ConfigError);
  CHECK_THROWS_AS(Expression::parse("sin(x)"), ConfigError);
  CHECK_THROWS_AS(Expression::parse("2 $ x"), ConfigError);
}

TEST_CASE("validation reports broken hypotheses without throwing") {
  SUBCASE("odd perturbation") {
    const PotentialSpec s = PotentialSpec::custom("(1 - x^2)^2 + 0.1*x^3*(1-x^2)^2", 1.0);
    const DiagnosticsReport d = validate(s, grid(-2, 2, 401));
    CHECK_FALSE(d.passed);
    CHECK(d.evenness_defect > 1e-3);
  }
  SUBCASE("wrong declared curvature") {
    const PotentialSpec s = PotentialSpec::custom("(1 - x^2)^2", 1.0, 7.0);
    const DiagnosticsReport d = validate(s, grid(-2, 2, 401));
    CHECK_FALSE(d.passed);
    CHECK(d.vpp_measured == Approx(8.0).epsilon(1e-8));
  }
  SUBCASE("well not at the declared point") {
    const PotentialSpec s = PotentialSpec::custom("(1 - x^2)^2", 0.9, 8.0);
    CHECK_FALSE(validate(s, grid(-2, 2, 401)).passed);
  }
}

TEST_CASE("sealing bump") {
  const PotentialSpec q = PotentialSpec::quartic();
  const SealedPotential s = seal(q, SealSide::Right);
  CHECK(s.eta() == Approx(0.25));
  CHECK(s.amplitude() == Approx(1.0));
  CHECK(s.kept_well() == -1.0);
  CHECK(s.sealed_well() == 1.0);
  // Bump profile amplitude * exp(-1/(1-t^2)) peaks at t = 0 with value e^{-1}.
  CHECK(s.sigma(1.0) == Approx(std::exp(-1.0)));
  CHECK(s.sigma(1.0 + 0.125) == Approx(std::exp(-1.0 / (1.0 - 0.25))));
  CHECK(s.sigma(1.3) == 0.0);
  CHECK(s.sigma(0.7) == 0.0);
  CHECK(s(-1.0) == Approx(0.0));
  CHECK(s(1.0) == Approx(std::exp(-1.0)));
  for (double x : grid(-3, 3, 121))
    CHECK(s(x) >= q(x));

  const SealedPotential m = seal(q, SealSide::Left, 0.2, 3.0);
  CHECK(m.kept_well() == 1.0);
  CHECK(m(-1.0) == Approx(3.0 * std::exp(-1.0)));
  CHECK(m(0.5) == Approx(s(-0.5)).epsilon(1e-14));

  CHECK_THROWS_AS(seal(q, SealSide::Right, 0.0, 1.0), ContractViolation);
  CHECK_THROWS_AS(seal(q, SealSide::Right, 0.2, -1.0), ContractViolation);
}

TEST_CASE("sealed profile keeps the frequency of the surviving well") {
  const SealedPotential s = seal(PotentialSpec::figure(), SealSide::Right);
  CHECK(s.profile().center() == -1.0);
  CHECK(s.profile().frequency() == Approx(std::sqrt(16.0 / 3.0)));
  CHECK(s.profile().derivative(-1.0, 2) == Approx(32.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("quadratic model and plateau") {
  const QuadraticModel m = quadratic_model(PotentialSpec::quartic());
  CHECK(m.center == -1.0);
  CHECK(m.a == Approx(2.0));
  CHECK(m(-0.5) == Approx(4.0 * 0.25));
  CHECK(m.profile()(0.0) == Approx(4.0));
  CHECK(plateau(0.3, 1.0) == Approx(1.0));
  CHECK(plateau(-1.0, 1.0) == Approx(1.0));
  CHECK(plateau(2.5, 1.0) == Approx(0.0));
  const double mid = plateau(1.5, 1.0);
  CHECK(mid > 0.0);
  CHECK(mid < 1.0);
  CHECK(mid == Approx(0.5));
}
