#include "ctunnel/sweep.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "ctunnel/action.hpp"
#include "ctunnel/errors.hpp"
#include "ctunnel/svg.hpp"
#include "ctunnel/wkb.hpp"

namespace ctunnel {

namespace fs = std::filesystem;

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

const char* color(std::size_t k) { return kPalette[k % std::size(kPalette)]; }

svg::Series make_series(std::string label, const char* col, svg::Style style) {
  svg::Series s;
  s.label = std::move(label);
  s.color = col;
  s.style = style;
  return s;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw NumericFailure("cannot write " + path.string());
  out << text;
  if (!out) throw NumericFailure("write failed for " + path.string());
}

fs::path prepare_output(const RunConfig& cfg, const SweepOptions& opt) {
  fs::path dir = opt.out_dir.empty() ? fs::path(cfg.outputs.directory) : opt.out_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw NumericFailure("cannot create output directory " + dir.string());
  const fs::path probe = dir / ".ctunnel_probe";
  {
    std::ofstream out(probe);
    if (!out) throw NumericFailure("output directory " + dir.string() + " is not writable");
  }
  fs::remove(probe, ec);
  return dir;
}

PotentialSpec checked_potential(const RunConfig& cfg) {
  PotentialSpec spec = make_potential(cfg);
  const double reach = 2.0 * spec.x_right();
  std::vector<double> grid(801);
  for (int i = 0; i < 801; ++i) grid[i] = -reach + 2.0 * reach * i / 800.0;
  const DiagnosticsReport d = validate(spec, grid);
  if (!d.passed) {
    std::string msg = "potential fails validation:";
    for (const auto& f : d.failures) msg += " " + f + ";";
    throw ConfigError(msg);
  }
  return spec;
}

double wrap(double a) {
  double r = std::remainder(a, 2.0 * std::numbers::pi);
  if (r <= -std::numbers::pi) r += 2.0 * std::numbers::pi;
  return r;
}

std::string join_flags(const SweepRow& row) {
  std::vector<std::string> f = row.report.flags;
  if (row.failed) f.insert(f.begin(), "failed");
  std::string s;
  for (std::size_t i = 0; i < f.size(); ++i) s += (i ? ";" : "") + f[i];
  return s;
}

// Runs task(i) for i in [0, n) on `jobs` threads.
template <typename F>
void parallel_for(std::size_t n, int jobs, F&& task) {
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) task(i);
    });
  for (auto& t : pool) t.join();
}

std::vector<double> well_window(const Profile& V, double alpha, double h, int n) {
  const double xc = V.center();
  const double c = std::cos(0.5 * alpha);
  const double half = std::min(std::sqrt(40.0 * (2 * n - 1) * h / (V.frequency() * c)),
                               0.9 * std::abs(xc));
  return uniform_grid(xc - half, xc + half, half / 400.0);
}

void dump_wkb(const fs::path& dir, const RunConfig& cfg, const PotentialSpec& spec) {
  const SealedPotential sealed = sealed_left(spec, gap_options(cfg));
  for (std::size_t ia = 0; ia < cfg.alphas.size(); ++ia) {
    for (int n = 1; n <= cfg.wkb.n_max; ++n) {
      const WkbSolver solver(sealed.profile(), cfg.alphas[ia], n, cfg.wkb.J);
      for (std::size_t ih = 0; ih < cfg.h_grid.size(); ++ih) {
        const std::vector<double> grid = well_window(sealed.profile(), cfg.alphas[ia],
                                                     cfg.h_grid[ih], n);
        const WkbExpansion e = solver.expand(cfg.h_grid[ih], grid);
        const std::vector<cplx> amp = e.amplitude_sum();
        std::string s = "x,re_phase,im_phase,re_amplitude,im_amplitude,re_psi,im_psi\n";
        for (std::size_t i = 0; i < grid.size(); ++i)
          s += fmt17(grid[i]) + "," + fmt17(e.phase[i].real()) + "," + fmt17(e.phase[i].imag()) +
               "," + fmt17(amp[i].real()) + "," + fmt17(amp[i].imag()) + "," +
               fmt17(e.quasimode[i].real()) + "," + fmt17(e.quasimode[i].imag()) + "\n";
        char name[64];
        std::snprintf(name, sizeof name, "wkb_a%zu_h%zu_n%d.csv", ia, ih, n);
        write_file(dir / name, s);
      }
    }
  }
}

void write_plots(const fs::path& dir, const RunConfig& cfg, const PotentialSpec& spec,
                 const SweepResult& res) {
  const std::size_t nh = cfg.h_grid.size();

  svg::Plot mag;
  mag.title = "Tunneling gap magnitude";
  mag.xlabel = "1/h";
  mag.ylabel = "log |gap|";
  svg::Plot rot;
  rot.title = "Rotation of the eigenvalue pair";
  rot.xlabel = "1/h";
  rot.ylabel = "unwrapped arg(gap)";

  for (std::size_t ia = 0; ia < cfg.alphas.size(); ++ia) {
    const double alpha = cfg.alphas[ia];
    char tag[48];
    std::snprintf(tag, sizeof tag, "alpha=%.4g", alpha);
    svg::Series w = make_series(std::string(tag) + " wronskian", color(2 * ia), svg::Style::Markers);
    svg::Series d = make_series(std::string(tag) + " direct", color(2 * ia + 1), svg::Style::Markers);
    svg::Series p = make_series(std::string(tag) + " asymptote", color(2 * ia), svg::Style::Line);
    std::vector<GapReport> reports;
    for (std::size_t ih = 0; ih < nh; ++ih) {
      const SweepRow& row = res.rows[ia * nh + ih];
      const double x = 1.0 / cfg.h_grid[ih];
      p.x.push_back(x);
      p.y.push_back(std::log(gap_prediction_modulus(spec, alpha, cfg.h_grid[ih])));
      if (row.failed) continue;
      if (row.report.has_wronskian) {
        w.x.push_back(x);
        w.y.push_back(std::log(std::abs(row.report.gap_wronskian)));
      }
      if (row.report.has_direct) {
        d.x.push_back(x);
        d.y.push_back(std::log(std::abs(row.report.gap_direct)));
      }
      reports.push_back(row.report);
    }
    mag.series.push_back(w);
    mag.series.push_back(d);
    mag.series.push_back(p);
    if (reports.size() >= 2) {
      const LinearFit f = magnitude_fit(reports);
      char note[160];
      std::snprintf(note, sizeof note, "%s: fitted rate %.5f, expected %.5f", tag, f.slope,
                    f.expected_slope);
      mag.notes.push_back(note);
    }

    if (alpha == 0.0 || reports.size() < 5) continue;
    try {
      const LinearFit f = rotation_analysis(reports);
      svg::Series pts = make_series(std::string(tag) + " arg", color(2 * ia), svg::Style::Markers);
      svg::Series line = make_series(std::string(tag) + " fit", color(2 * ia + 1), svg::Style::Line);
      // Replay the unwrapping so the markers sit on the fitted branch.
      std::vector<std::pair<double, double>> xy;
      for (const GapReport& r : reports) xy.emplace_back(1.0 / r.h, std::arg(r.best_gap()));
      std::sort(xy.begin(), xy.end());
      for (std::size_t k = 0; k < xy.size(); ++k) {
        double y = xy[k].second;
        if (k) y = pts.y.back() + std::remainder(y - pts.y.back(), 2.0 * std::numbers::pi);
        pts.x.push_back(xy[k].first);
        pts.y.push_back(y);
      }
      line.x = {xy.front().first, xy.back().first};
      line.y = {f.intercept + f.slope * xy.front().first, f.intercept + f.slope * xy.back().first};
      rot.series.push_back(pts);
      rot.series.push_back(line);
      char note[160];
      std::snprintf(note, sizeof note, "%s: fitted slope %.5f, expected %.5f", tag, f.slope,
                    f.expected_slope);
      rot.notes.push_back(note);
    } catch (const NumericFailure& e) {
      rot.notes.push_back(std::string(tag) + ": " + e.what());
    }
  }
  if (rot.series.empty() && rot.notes.empty())
    rot.notes.push_back("no nonzero alpha with five or more gaps");

  write_file(dir / "gap_magnitude.svg", svg::render(mag));
  write_file(dir / "gap_phase.svg", svg::render(rot));

  const double a = spec.frequency();
  for (std::size_t ia = 0; ia < cfg.alphas.size(); ++ia) {
    const SweepRow& row = res.rows[ia * nh];
    const double h = cfg.h_grid[0];
    svg::Plot cloud;
    char title[96];
    std::snprintf(title, sizeof title, "Double-well spectrum, alpha=%.4g, h=%.4g", cfg.alphas[ia],
                  h);
    cloud.title = title;
    cloud.xlabel = "Re mu";
    cloud.ylabel = "Im mu";
    cloud.equal_aspect = true;
    svg::Series ev = make_series("eigenvalues", color(0), svg::Style::Markers);
    for (const cplx& z : row.report.eigenvalues) {
      ev.x.push_back(z.real());
      ev.y.push_back(z.imag());
    }
    svg::Series disks = make_series("D(nu_n, h^1.5)", color(1), svg::Style::Circles);
    for (int n = 1; (2 * n - 1) * a < cfg.solver.R; ++n) {
      const cplx nu = std::polar((2 * n - 1) * a * h, 0.5 * cfg.alphas[ia]);
      disks.x.push_back(nu.real());
      disks.y.push_back(nu.imag());
      disks.r.push_back(std::pow(h, 1.5));
    }
    cloud.series = {ev, disks};
    write_file(dir / ("spectrum_a" + std::to_string(ia) + ".svg"), svg::render(cloud));
  }
}

}  // namespace

std::string fmt17(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v == 0.0 ? 0.0 : v);
  return buf;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_gap_csv(const SweepResult& result) {
  std::string s = std::string(kGapCsvHeader) + "\n";
  for (const SweepRow& row : result.rows) {
    const GapReport& r = row.report;
    const double abs_pred = std::abs(r.A_const) * std::sqrt(r.h) *
                            std::exp(-r.S_alpha.real() / r.h);
    const double arg_pred = wrap(std::arg(r.A_const) - r.S_alpha.imag() / r.h);
    const double vals[] = {r.alpha,
                           r.h,
                           r.mu1.real(),
                           r.mu1.imag(),
                           r.mu2.real(),
                           r.mu2.imag(),
                           r.gap_direct.real(),
                           r.gap_direct.imag(),
                           r.gap_wronskian.real(),
                           r.gap_wronskian.imag(),
                           abs_pred,
                           arg_pred,
                           r.ratio_direct,
                           r.ratio_wronskian,
                           r.arg_dev};
    for (double v : vals) s += fmt17(v) + ",";
    s += join_flags(row) + "\n";
  }
  return s;
}

std::string format_spectrum_csv(const SweepResult& result) {
  std::string s = "alpha,h,index,re_mu,im_mu\n";
  for (const SweepRow& row : result.rows) {
    const auto& ev = row.report.eigenvalues;
    for (std::size_t k = 0; k < ev.size(); ++k)
      s += fmt17(row.report.alpha) + "," + fmt17(row.report.h) + "," + std::to_string(k + 1) +
           "," + fmt17(ev[k].real()) + "," + fmt17(ev[k].imag()) + "\n";
  }
  return s;
}

SweepResult run_sweep(const RunConfig& cfg, const SweepOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  const PotentialSpec spec = checked_potential(cfg);
  const fs::path dir = prepare_output(cfg, opt);
  const GapOptions gopt = gap_options(cfg);
  std::ostream* log = opt.log;

  SweepResult res;
  res.config_hash = fnv1a_hex(cfg.source);

  res.convergence.resize(cfg.alphas.size());
  parallel_for(cfg.alphas.size(), opt.jobs, [&](std::size_t ia) {
    AlphaConvergence& c = res.convergence[ia];
    c.alpha = cfg.alphas[ia];
    try {
      c.report = convergence_check(spec.profile(), c.alpha, cfg.h_grid.front(), cfg.ladder,
                                   cfg.solver.scheme, PotentialTag::Double);
    } catch (const std::exception& e) {
      c.failed = true;
      c.error = e.what();
    }
  });
  if (log)
    for (const auto& c : res.convergence) {
      if (c.failed)
        *log << "convergence alpha=" << c.alpha << ": FAILED " << c.error << "\n";
      else
        *log << "convergence alpha=" << c.alpha << ": error estimate " << c.report.error_estimate
             << "\n";
    }

  const std::size_t nh = cfg.h_grid.size();
  res.rows.resize(cfg.alphas.size() * nh);
  std::mutex log_mutex;
  parallel_for(res.rows.size(), opt.jobs, [&](std::size_t k) {
    SweepRow& row = res.rows[k];
    const double alpha = cfg.alphas[k / nh];
    const double h = cfg.h_grid[k % nh];
    try {
      row.report = gap_report(spec, alpha, h, gopt);
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
      GapReport& r = row.report;
      r.alpha = alpha;
      r.h = h;
      const double nan = std::numeric_limits<double>::quiet_NaN();
      r.mu1 = r.mu2 = r.gap_direct = r.gap_wronskian = cplx(nan, nan);
      r.ratio_direct = r.ratio_wronskian = r.arg_dev = nan;
      r.A_const = asymptotic_constant_A(spec, alpha);
      r.S_alpha = complex_action(spec, alpha);
      r.gap_asymptotic = gap_prediction(spec, alpha, h);
    }
    if (log) {
      std::lock_guard lock(log_mutex);
      *log << "done alpha=" << alpha << " h=" << h << (row.failed ? " (failed)" : "") << "\n";
    }
  });

  for (const SweepRow& row : res.rows) {
    if (row.failed) ++res.failed_rows;
    if (log && opt.verbose) {
      const GroundstateData& g = row.report.groundstate;
      *log << "alpha=" << row.report.alpha << " h=" << row.report.h << " psi0=" << g.psi0
           << " dpsi0=" << g.dpsi0 << " selfpair=" << g.selfpair << " W0=" << g.W0
           << " mu=" << g.mu;
      if (row.failed) *log << " error: " << row.error;
      *log << "\n";
    }
  }

  write_file(dir / "gap.csv", format_gap_csv(res));
  write_file(dir / "spectrum.csv", format_spectrum_csv(res));
  if (opt.dump_wkb || cfg.wkb.dump) dump_wkb(dir, cfg, spec);
  write_plots(dir, cfg, spec, res);

  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  nlohmann::ordered_json prov;
  prov["tool"] = "ctunnel";
  prov["version"] = kVersion;
  prov["config_name"] = cfg.name;
  prov["config_hash_fnv1a64"] = res.config_hash;
  prov["rows"] = res.rows.size();
  prov["failed_rows"] = res.failed_rows;
  prov["jobs"] = opt.jobs;
  prov["wall_seconds"] = res.wall_seconds;
  auto& conv = prov["convergence"];
  conv = nlohmann::ordered_json::array();
  for (const auto& c : res.convergence)
    conv.push_back({{"alpha", c.alpha},
                    {"failed", c.failed},
                    {"error_estimate", c.failed ? -1.0 : c.report.error_estimate},
                    {"message", c.error}});
  write_file(dir / "provenance.json", prov.dump(2) + "\n");
  return res;
}

void run_wkb(const RunConfig& cfg, const SweepOptions& opt) {
  const PotentialSpec spec = checked_potential(cfg);
  const fs::path dir = prepare_output(cfg, opt);
  const SealedPotential sealed = sealed_left(spec, gap_options(cfg));
  const Profile& V = sealed.profile();
  const double xc = V.center(), w = std::abs(xc);

  std::string coeffs = "alpha,n,j,re_mu,im_mu\n";
  std::string table = "alpha,h,n,re_mu_wkb,im_mu_wkb,weighted_residual\n";
  for (double alpha : cfg.alphas) {
    for (int n = 1; n <= cfg.wkb.n_max; ++n) {
      const WkbSolver solver(V, alpha, n, cfg.wkb.J);
      for (std::size_t j = 0; j < solver.mu().size(); ++j)
        coeffs += fmt17(alpha) + "," + std::to_string(n) + "," + std::to_string(j + 1) + "," +
                  fmt17(solver.mu()[j].real()) + "," + fmt17(solver.mu()[j].imag()) + "\n";
      const std::vector<double> grid = uniform_grid(xc - 0.9 * w, xc + 1.6 * w, 0.0025 * w);
      for (double h : cfg.h_grid) {
        WkbExpansion e = solver.expand(h, grid);
        const double res = weighted_residual(e, V, xc - 0.8 * w, xc + 1.5 * w);
        const cplx mu = e.mu_wkb();
        table += fmt17(alpha) + "," + fmt17(h) + "," + std::to_string(n) + "," +
                 fmt17(mu.real()) + "," + fmt17(mu.imag()) + "," + fmt17(res) + "\n";
        if (opt.log && opt.verbose)
          *opt.log << "wkb alpha=" << alpha << " h=" << h << " n=" << n << " mu=" << mu
                   << " residual=" << res << "\n";
      }
    }
  }
  write_file(dir / "wkb_coefficients.csv", coeffs);
  write_file(dir / "wkb.csv", table);
  if (opt.dump_wkb || cfg.wkb.dump) dump_wkb(dir, cfg, spec);
}

}  // namespace ctunnel
