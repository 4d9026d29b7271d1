// Acceptance run: one PASS/FAIL line per criterion, exit status 1 when any fails.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "ctunnel/action.hpp"
#include "ctunnel/config.hpp"
#include "ctunnel/errors.hpp"
#include "ctunnel/gap.hpp"
#include "ctunnel/specsolve.hpp"
#include "ctunnel/sweep.hpp"
#include "ctunnel/wkb.hpp"

using namespace ctunnel;
namespace fs = std::filesystem;

namespace {

const double kPi = std::numbers::pi;
const double kS = 4.0 / 3.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) mx += std::log(x[i]) / n, my += std::log(y[i]) / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
  }
  return sxy / sxx;
}

std::vector<double> geometric(double hi, double lo, int n) {
  std::vector<double> h(n);
  for (int i = 0; i < n; ++i) h[i] = hi * std::pow(lo / hi, double(i) / (n - 1));
  return h;
}

const PotentialSpec& quartic() {
  static const PotentialSpec q = PotentialSpec::quartic();
  return q;
}

const SealedPotential& sealed() {
  static const SealedPotential s = seal(quartic(), SealSide::Right);
  return s;
}

// Gap reports on the criterion-2 window, shared by criteria 2, 3 and 5.
const std::vector<double>& window_h() {
  static const std::vector<double> h = geometric(0.15, 0.05, 9);
  return h;
}

const std::vector<GapReport>& window_reports(double alpha) {
  static std::vector<GapReport> r0, r2;
  std::vector<GapReport>& r = alpha == 0.0 ? r0 : r2;
  if (r.empty())
    for (double h : window_h()) r.push_back(gap_report(quartic(), alpha, h));
  return r;
}

Outcome harmonic_limit() {
  Outcome o{true, ""};
  for (double alpha : {0.0, kPi / 3}) {
    std::vector<double> hs{0.04, 0.02, 0.01}, err;
    for (double h : hs) {
      const DiscreteOperator op = assemble(sealed().profile(), alpha, h, 2.5, 2001, Scheme::Fd4,
                                           PotentialTag::LeftSealed, false);
      const cplx nu = std::polar(2 * h, alpha / 2);
      err.push_back(std::abs(eigenpair_near(op, nu).value - nu));
    }
    const double slope = loglog_slope(hs, err);
    o.pass = o.pass && slope >= 1.8;
    o.detail += fmt("alpha=%.4f slope=%.4f; ", alpha, slope);
  }
  return o;
}

Outcome selfadjoint_gap_law() {
  const auto& r = window_reports(0.0);
  const LinearFit f = magnitude_fit(r);
  const double target = 64 * std::sqrt(2.0) / std::sqrt(kPi);
  const GapReport& last = r.back();
  const double pref = std::abs(last.gap_wronskian) * std::exp(kS / last.h) / std::sqrt(last.h);
  const bool slope_ok = std::abs(f.slope + kS) <= 0.02 * kS;
  const bool pref_ok = pref >= 0.85 * target && pref <= 1.15 * target;
  return {slope_ok && pref_ok,
          fmt("slope=%.5f (target -4/3, dev %.2f%%); prefactor at h=%.3f is %.4f = %.4f x "
              "64sqrt2/sqrtpi [%s]",
              f.slope, 100 * f.relative_deviation, last.h, pref, pref / target,
              pref_ok ? "ok" : "outside [0.85,1.15]")};
}

Outcome nonselfadjoint_magnitude_law() {
  const auto& r2 = window_reports(kPi / 2);
  const auto& r0 = window_reports(0.0);
  const LinearFit f = magnitude_fit(r2);
  const double target = -kS * std::cos(kPi / 4);
  bool bigger = true;
  for (std::size_t i = 0; i < r2.size(); ++i)
    bigger = bigger && std::abs(r2[i].best_gap()) > std::abs(r0[i].best_gap());
  const bool ok = std::abs(f.slope - target) <= 0.02 * std::abs(target) && bigger;
  return {ok, fmt("rate=%.5f target=%.5f dev=%.2f%%; |gap(pi/2)|>|gap(0)| at all %zu h: %s",
                  f.slope, target, 100 * f.relative_deviation, r2.size(),
                  bigger ? "yes" : "no")};
}

Outcome rotation_law() {
  const RunConfig cfg = load_config(fs::path(CTUNNEL_CONFIG_DIR) / "quartic_rotation.toml");
  std::vector<GapReport> r;
  for (double h : cfg.h_grid) r.push_back(gap_report(quartic(), cfg.alphas[0], h));
  try {
    const LinearFit f = rotation_analysis(r);
    const double target = kS * std::sin(kPi / 4);
    const double dev = std::abs(std::abs(f.slope) - target) / target;
    return {dev <= 0.05, fmt("|c1|=%.5f target=%.5f dev=%.2f%% over %d points, aliasing guard "
                             "passed", std::abs(f.slope), target, 100 * dev, f.points)};
  } catch (const AliasingError& e) {
    return {false, std::string("aliasing guard raised: ") + e.what()};
  }
}

Outcome cross_method() {
  Outcome o{true, ""};
  int compared = 0;
  double worst = 0, worst_small = 0;
  for (double alpha : {0.0, kPi / 6, kPi / 3, kPi / 2, 2.5}) {
    for (double h : {0.2, 0.15, 0.12, 0.1, 0.08}) {
      const GapReport r = gap_report(quartic(), alpha, h);
      if (!r.has_direct || !r.has_wronskian) continue;
      const double d = std::abs(r.gap_wronskian * r.gap_wronskian /
                                    (r.gap_direct * r.gap_direct) - 1.0);
      worst = std::max(worst, d);
      if (std::abs(r.gap_direct) < 0.1 * h) worst_small = std::max(worst_small, d);
      ++compared;
      if (d > 0.1) {
        o.pass = false;
        o.detail += fmt("alpha=%.3f h=%.3f |q-1|=%.3g; ", alpha, h, d);
      }
    }
  }
  o.pass = o.pass && compared > 0;
  o.detail += fmt("%d resolvable points, worst |gw^2/gd^2 - 1| = %.3g (%.3g where |gap| < 0.1h)",
                  compared, worst, worst_small);
  return o;
}

Outcome projector_ranks() {
  Outcome o{true, ""};
  const double h = 0.1;
  for (double alpha : {0.0, kPi / 3}) {
    const cplx c = std::polar(2 * h, alpha / 2);
    const RieszProjector one = riesz_projector(
        assemble(sealed().profile(), alpha, h, 3.0, 401, Scheme::Fd4, PotentialTag::LeftSealed),
        c, h);
    const RieszProjector two = riesz_projector(assemble(quartic().profile(), alpha, h, 3.0, 401),
                                               c, h);
    const bool ok = one.numeric_rank == 1 && two.numeric_rank == 2 &&
                    one.idempotency_defect <= 1e-6 && two.idempotency_defect <= 1e-6;
    o.pass = o.pass && ok;
    o.detail += fmt("alpha=%.4f ranks %d/%d defects %.1e/%.1e; ", alpha, one.numeric_rank,
                    two.numeric_rank, one.idempotency_defect, two.idempotency_defect);
  }
  return o;
}

Outcome duet_structure() {
  Outcome o{true, ""};
  for (double alpha : {0.0, kPi / 3}) {
    for (double h : {0.1, 0.07, 0.05}) {
      const SpectrumResult s = low_lying_spectrum(assemble(quartic().profile(), alpha, h, 3.0, 401),
                                                  7.0);
      const ClusterReport c = cluster_eigenvalues(s, h, quartic().frequency());
      bool ok = c.clusters.size() == 2 && !c.anomaly;
      for (const auto& cl : c.clusters) ok = ok && cl.size() == 2;
      ok = ok && c.min_separation >= 3 * h;
      o.pass = o.pass && ok;
      o.detail += fmt("a=%.2f h=%.2f: %zu clusters, sep/h=%.2f; ", alpha, h, c.clusters.size(),
                      c.min_separation / h);
    }
  }
  return o;
}

Outcome quasi_orthogonality() {
  Outcome o{true, ""};
  for (double alpha : {0.0, kPi / 2}) {
    for (double h : {0.1, 0.07}) {
      const double ov = sealed_overlap(quartic(), alpha, h);
      const double bound = std::exp(-(kS * std::cos(alpha / 2) - 0.15) / h);
      o.pass = o.pass && ov <= bound;
      o.detail += fmt("a=%.2f h=%.2f overlap=%.3e bound=%.3e (x%.1f); ", alpha, h, ov, bound,
                      ov / bound);
    }
  }
  return o;
}

Outcome wkb_residual_order() {
  Outcome o{true, ""};
  const std::vector<double> grid = uniform_grid(-1.9, 0.6, 0.0025);
  for (double alpha : {0.0, kPi / 3}) {
    for (int J : {1, 2}) {
      std::vector<double> hs{0.1, 0.05, 0.025}, res;
      for (double h : hs) {
        WkbExpansion e = wkb_quasimode(sealed(), alpha, h, 1, J, grid);
        res.push_back(weighted_residual(e, sealed(), -1.8, 0.5));
      }
      const double slope = loglog_slope(hs, res);
      o.pass = o.pass && slope >= J + 1 - 0.2;
      o.detail += fmt("a=%.2f J=%d slope=%.3f; ", alpha, J, slope);
    }
  }
  return o;
}

Outcome wkb_normalization() {
  Outcome o{true, ""};
  for (double alpha : {0.0, kPi / 2}) {
    const WkbNorms n = wkb_norms(sealed(), alpha, 0.005);
    const double dn = std::abs(n.norm / n.norm_prediction - 1);
    const double dp = std::abs(n.selfpair / n.selfpair_prediction - 1.0);
    o.pass = o.pass && dn <= 0.05 && dp <= 0.05;
    o.detail += fmt("a=%.2f norm dev %.3f%%, selfpair dev %.3f%%; ", alpha, 100 * dn, 100 * dp);
  }
  return o;
}

Outcome agmon_uniformity() {
  Outcome o{true, ""};
  for (double alpha : {0.0, kPi / 3}) {
    std::vector<double> w;
    for (double h : {0.1, 0.05}) {
      const DiscreteOperator op = assemble(sealed().profile(), alpha, h, 3.0, 401, Scheme::Fd4,
                                           PotentialTag::LeftSealed, false);
      const Eigenpair ep = eigenpair_near(op, std::polar(2 * h, alpha / 2));
      const AgmonWeight phi(sealed(), alpha, 0.2);
      const std::vector<double> g(op.grid.data(), op.grid.data() + op.grid.size());
      w.push_back(localization_check(ep.vector, op.weights, phi.samples(g), h).weighted);
    }
    const double ratio = std::max(w[0], w[1]) / std::min(w[0], w[1]);
    o.pass = o.pass && ratio <= 3.0;
    o.detail += fmt("a=%.2f weighted sup %.3g -> %.3g (x%.2f); ", alpha, w[0], w[1], ratio);
  }
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome determinism() {
  Outcome o{true, ""};
  const fs::path root = fs::temp_directory_path() / "ctunnel_acceptance";
  fs::remove_all(root);
  for (const char* name : {"quartic_alpha0", "quartic_rotation"}) {
    const RunConfig cfg = load_config(fs::path(CTUNNEL_CONFIG_DIR) / (std::string(name) + ".toml"));
    SweepOptions a, b;
    a.out_dir = root / name / "a";
    b.out_dir = root / name / "b";
    run_sweep(cfg, a);
    run_sweep(cfg, b);
    const bool same = slurp(a.out_dir / "gap.csv") == slurp(b.out_dir / "gap.csv") &&
                      slurp(a.out_dir / "spectrum.csv") == slurp(b.out_dir / "spectrum.csv");
    o.pass = o.pass && same;
    o.detail += fmt("%s: %s; ", name, same ? "byte-identical" : "DIFFERENT");
  }
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"harmonic limit", harmonic_limit},
      {"selfadjoint gap law", selfadjoint_gap_law},
      {"non-selfadjoint magnitude law", nonselfadjoint_magnitude_law},
      {"rotation law", rotation_law},
      {"cross-method agreement", cross_method},
      {"projector ranks", projector_ranks},
      {"duet structure and separation", duet_structure},
      {"quasi-orthogonality", quasi_orthogonality},
      {"WKB residual order", wkb_residual_order},
      {"WKB normalization constants", wkb_normalization},
      {"Agmon localization uniformity", agmon_uniformity},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("%s %2zu %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                o.detail.c_str(), dt);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
