// Command-line front end: ctunnel {run|validate|wkb} <config>.
//
// Exit codes: 0 success, 2 configuration or validation error, 3 numeric
// failure (including an output directory that cannot be written).

#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"

#include "ctunnel/config.hpp"
#include "ctunnel/errors.hpp"
#include "ctunnel/sweep.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfig = 2;
constexpr int kNumeric = 3;

int validate_only(const ctunnel::RunConfig& cfg) {
  const ctunnel::PotentialSpec spec = ctunnel::make_potential(cfg);
  const double reach = 2.0 * spec.x_right();
  std::vector<double> grid(801);
  for (int i = 0; i < 801; ++i) grid[i] = -reach + 2.0 * reach * i / 800.0;
  const ctunnel::DiagnosticsReport d = ctunnel::validate(spec, grid);
  std::cout << "potential: " << spec.description() << "\n"
            << "  evenness defect   " << d.evenness_defect << "\n"
            << "  min V off wells   " << d.min_off_well << "\n"
            << "  V''(x_l) measured " << d.vpp_measured << " declared " << d.vpp_declared << "\n"
            << "  V at infinity     " << d.v_inf_estimate << "\n"
            << "alphas: " << cfg.alphas.size() << ", h values: " << cfg.h_grid.size() << "\n";
  for (const auto& f : d.failures) std::cout << "  FAIL " << f << "\n";
  std::cout << (d.passed ? "config OK\n" : "config INVALID\n");
  return d.passed ? kOk : kConfig;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectra and tunneling gaps of -h^2 d^2/dx^2 + e^{i alpha} V"};
  app.require_subcommand(1);

  std::string config_path;
  bool verbose = false;
  bool dump_wkb = false;
  int jobs = 1;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "run configuration (TOML)")->required();
    sub->add_flag("-v,--verbose", verbose, "print intermediate quantities");
    sub->add_flag("--dump-wkb", dump_wkb, "write WKB profiles as wkb_*.csv");
    sub->add_option("-j,--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  };
  CLI::App* run = app.add_subcommand("run", "full sweep: spectra, gaps, plots");
  CLI::App* val = app.add_subcommand("validate", "parse the config and check the potential");
  CLI::App* wkb = app.add_subcommand("wkb", "WKB-only pipeline");
  add_common(run);
  add_common(val);
  add_common(wkb);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    const ctunnel::RunConfig cfg = ctunnel::load_config(config_path);
    if (val->parsed()) return validate_only(cfg);

    ctunnel::SweepOptions opt;
    opt.jobs = jobs;
    opt.verbose = verbose;
    opt.dump_wkb = dump_wkb;
    opt.log = &std::cerr;
    if (const char* env = std::getenv("CTUNNEL_OUT"); env && *env) opt.out_dir = env;

    if (wkb->parsed()) {
      ctunnel::run_wkb(cfg, opt);
      return kOk;
    }
    const ctunnel::SweepResult res = ctunnel::run_sweep(cfg, opt);
    std::cerr << "rows: " << res.rows.size() << ", failed: " << res.failed_rows
              << ", wall time " << res.wall_seconds << " s\n";
    for (const auto& c : res.convergence)
      if (c.failed) return kNumeric;
    return res.failed_rows == static_cast<int>(res.rows.size()) ? kNumeric : kOk;
  } catch (const ctunnel::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const ctunnel::ContractViolation& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const ctunnel::NumericFailure& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumeric;
  }
}
