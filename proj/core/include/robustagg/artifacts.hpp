#pragma once

#include "robustagg/solver.hpp"

#include <string>
#include <vector>

namespace robustagg {

/// report.json: headline value, final multipliers, diagnostics.
void write_report_json(const std::string& path, const SolveReport& report, std::uint64_t seed);

/// trajectory.csv: iteration,objective,running_mean,lambda,aux,lr
void write_trajectory_csv(const std::string& path, const SolveReport& report,
                          long running_window = 200);

/// samples.csv: y_0..y_{d-1},weight
void write_samples_csv(const std::string& path, const WeightedCloud& cloud);

struct SweepRow {
  double rho = 0.0;
  std::string status = "ok";
  double value = 0.0;
  double stderr_estimate = 0.0;
  double lambda = 0.0;
  double aux = 0.0;
  double gap = 0.0;
  double dc_estimate = 0.0;
  double ks_max = 0.0;
};

/// sweep.csv: rho,status,value,stderr,lambda,aux,gap,dc_estimate,ks_max
void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);

}  // namespace robustagg
