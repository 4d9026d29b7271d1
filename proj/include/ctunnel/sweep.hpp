#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ctunnel/config.hpp"
#include "ctunnel/gap.hpp"
#include "ctunnel/specsolve.hpp"

namespace ctunnel {

inline constexpr const char* kVersion = "0.1.0";

inline constexpr const char* kGapCsvHeader =
    "alpha,h,re_mu1,im_mu1,re_mu2,im_mu2,re_gap_direct,im_gap_direct,re_gap_wronskian,"
    "im_gap_wronskian,abs_gap_pred,arg_gap_pred,ratio_direct,ratio_wronskian,arg_dev,flags";

struct SweepRow {
  GapReport report;
  bool failed = false;
  std::string error;
};

struct AlphaConvergence {
  double alpha = 0.0;
  ConvergenceReport report;
  bool failed = false;
  std::string error;
};

struct SweepResult {
  std::vector<SweepRow> rows;  ///< alpha-major, h in config order
  std::vector<AlphaConvergence> convergence;
  std::string config_hash;
  double wall_seconds = 0.0;
  int failed_rows = 0;
};

struct SweepOptions {
  int jobs = 1;
  bool verbose = false;
  bool dump_wkb = false;
  std::filesystem::path out_dir;  ///< empty selects the config's outputs.directory
  std::ostream* log = nullptr;    ///< progress and verbose output
};

/// 64-bit FNV-1a of the text, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

/// Sweep over alphas x h_grid, writing gap.csv, spectrum.csv, plots and
/// provenance.json into the output directory. Throws NumericFailure when the
/// output directory cannot be written.
SweepResult run_sweep(const RunConfig& cfg, const SweepOptions& opt = {});

/// WKB-only pipeline: eigenvalue coefficients, quasimode residuals and dumps.
void run_wkb(const RunConfig& cfg, const SweepOptions& opt = {});

std::string format_gap_csv(const SweepResult& result);
std::string format_spectrum_csv(const SweepResult& result);

/// Fixed 17-significant-digit scientific notation; "nan" for non-finite values.
std::string fmt17(double v);

}  // namespace ctunnel
