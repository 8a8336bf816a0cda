#pragma once

#include <string>
#include <vector>

#include "carnotflow/config.hpp"
#include "carnotflow/oracles.hpp"

namespace carnotflow {

struct SolveArtifacts {
  std::vector<std::string> layer_files;
  std::string profile_file;   // empty when the tracker is off
  std::string manifest_file;
  double wall_seconds = 0.0;
  std::uint64_t box_breaches = 0;
  int excluded_rays = 0;
  double final_radius = std::numeric_limits<double>::quiet_NaN();
  SolveResult result;
};

// End-to-end solve: layers at the configured stride, optional radial profile,
// and a manifest. out_dir overrides the config's output directory when set.
SolveArtifacts run_solve(const RunConfig& cfg, int threads,
                         const std::string& out_dir = "");

struct SweepRow {
  double value = 0.0;
  double t_final = 0.0;
  double oracle_error = std::numeric_limits<double>::quiet_NaN();
  double successive_diff = std::numeric_limits<double>::quiet_NaN();
};

// Re-solves with the parameter overridden per value; emits sweep.csv in the
// output directory. parameter is "epsilon" or "h".
std::vector<SweepRow> run_sweep(const RunConfig& cfg, const std::string& parameter,
                                const std::vector<double>& values, int threads,
                                const std::string& out_dir = "");

// Interior sup-norm error against the exact PIL solution over the horizontal
// band r2_lo <= p1^2 + p2^2 <= r2_hi, skipping nodes within boundary_margin
// of any box face (the truncation shell's influence zone).
double pil_interior_error(const ValueLayer& layer, double r2_lo, double r2_hi,
                          double boundary_margin = 0.0);

}  // namespace carnotflow
