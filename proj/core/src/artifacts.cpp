#include "robustagg/artifacts.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <iomanip>

namespace robustagg {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  require(out.good(), "cannot write " + path);
  out << std::setprecision(17);
  return out;
}

}  // namespace

void write_report_json(const std::string& path, const SolveReport& report, std::uint64_t seed) {
  nlohmann::json j;
  j["status"] = report.status;
  j["dual_value"] = report.dual_value;
  j["dual_value_stderr"] = report.dual_value_stderr;
  j["trace_value"] = report.trace_value;
  j["lambda"] = report.lambda;
  j["aux"] = report.aux;
  j["primal_estimate"] = report.primal_estimate;
  j["penalization_gap"] = report.penalization_gap;
  j["dc_estimate"] = report.dc_estimate;
  j["marginal_ks"] = report.marginal_ks;
  j["effective_sample_size"] = report.effective_sample_size;
  j["low_ess_warning"] = report.low_ess_warning;
  j["iterations"] = report.iterations;
  j["wall_seconds"] = report.wall_seconds;
  j["seed"] = seed;
  if (!report.message.empty()) j["message"] = report.message;
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

void write_trajectory_csv(const std::string& path, const SolveReport& report,
                          long running_window) {
  auto out = open_out(path);
  out << "iteration,objective,running_mean,lambda,aux,lr\n";
  double acc = 0.0;
  std::size_t w = static_cast<std::size_t>(std::max(1L, running_window));
  for (std::size_t i = 0; i < report.trajectory.size(); ++i) {
    const auto& p = report.trajectory[i];
    acc += p.objective;
    if (i >= w) acc -= report.trajectory[i - w].objective;
    double mean = acc / static_cast<double>(std::min(i + 1, w));
    out << p.iteration << ',' << p.objective << ',' << mean << ',' << p.lambda << ',' << p.aux
        << ',' << p.lr << '\n';
  }
}

void write_samples_csv(const std::string& path, const WeightedCloud& cloud) {
  auto out = open_out(path);
  for (Eigen::Index c = 0; c < cloud.y.cols(); ++c) out << 'y' << c << ',';
  out << "weight\n";
  for (Eigen::Index i = 0; i < cloud.y.rows(); ++i) {
    for (Eigen::Index c = 0; c < cloud.y.cols(); ++c) out << cloud.y(i, c) << ',';
    out << cloud.weights[static_cast<std::size_t>(i)] << '\n';
  }
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
  auto out = open_out(path);
  out << "rho,status,value,stderr,lambda,aux,gap,dc_estimate,ks_max\n";
  for (const auto& r : rows) {
    out << r.rho << ',' << r.status << ',' << r.value << ',' << r.stderr_estimate << ','
        << r.lambda << ',' << r.aux << ',' << r.gap << ',' << r.dc_estimate << ',' << r.ks_max
        << '\n';
  }
}

}  // namespace robustagg
