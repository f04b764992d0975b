// Command-line frontend: config-driven solves, rho sweeps, LP cross-checks,
// worst-case sampling and diagnostics. Exit codes: 0 ok, 1 usage/config,
// 2 numerical failure, 3 unsupported instance.

#include "robustagg/artifacts.hpp"
#include "robustagg/checkpoint.hpp"
#include "robustagg/oracles.hpp"
#include "robustagg/run_config.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace robustagg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitUnsupported = 3;

void print_error(const std::string& type, const std::string& message) {
  json j;
  j["error"] = {{"type", type}, {"message", message}};
  std::cerr << j.dump() << std::endl;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  require(out.good(), "cannot write " + path.string());
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

struct SolveArtifacts {
  SolveReport report;
  DualPotentials potentials;
};

SolveArtifacts run_solve(const RunConfig& rc, const fs::path& out_dir,
                         const DualPotentials* warm_start) {
  fs::create_directories(out_dir);
  write_text(out_dir / "resolved_config.json", rc.resolved_json);
  auto [pot, report] = train(rc.problem, rc.solve, warm_start);
  write_report_json((out_dir / "report.json").string(), report, rc.solve.seed);
  write_trajectory_csv((out_dir / "trajectory.csv").string(), report);
  Checkpoint ck{pot, rc.resolved_json, rc.solve.seed};
  save_checkpoint((out_dir / "checkpoint.json").string(), ck);
  return {std::move(report), std::move(pot)};
}

std::vector<double> parse_grid(const std::string& text) {
  // "start:end:step" inclusive of the endpoint up to tolerance
  double start = 0.0, end = 0.0, step = 0.0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &start, &end, &step) != 3 || step <= 0.0)
    throw config_error("grid must be 'start:end:step' with positive step, got '" + text + "'");
  std::vector<double> out;
  for (double v = start; v <= end + 1e-12; v += step) out.push_back(std::min(v, end));
  require(!out.empty(), "empty grid");
  return out;
}

RunConfig config_with_rho(const RunConfig& base, double rho, std::uint64_t seed,
                          const std::string& out_dir) {
  json j = json::parse(base.resolved_json);
  if (j.at("ambiguity").at("type") != "ball")
    throw config_error("sweep requires a ball ambiguity set (rho grid)");
  j["ambiguity"]["rho"] = rho;
  j["seed"] = seed;
  j["output_dir"] = out_dir;
  return parse_run_config_string(j.dump());
}

int cmd_solve(const std::string& config_path, const std::string& output_override) {
  RunConfig rc = parse_run_config_file(config_path);
  fs::path out_dir = output_override.empty() ? fs::path(rc.output_dir) : fs::path(output_override);
  auto art = run_solve(rc, out_dir, nullptr);
  std::string tau_note =
      art.report.aux.count("tau") ? ", tau " + std::to_string(art.report.aux.at("tau")) : "";
  std::printf("dual value %.6g +- %.2g   (lambda %.4g%s, status %s)\n", art.report.dual_value,
              art.report.dual_value_stderr, art.report.lambda, tau_note.c_str(),
              art.report.status.c_str());
  if (art.report.status != "ok") {
    print_error("numerical", art.report.message);
    return kExitNumerical;
  }
  return kExitOk;
}

SweepRow row_from_report(double rho, const SolveReport& r) {
  SweepRow row;
  row.rho = rho;
  row.status = r.status;
  row.value = r.dual_value;
  row.stderr_estimate = r.dual_value_stderr;
  row.lambda = r.lambda;
  row.aux = r.aux.count("tau") ? r.aux.at("tau") : 0.0;
  row.gap = r.penalization_gap;
  row.dc_estimate = r.dc_estimate;
  for (double k : r.marginal_ks) row.ks_max = std::max(row.ks_max, k);
  return row;
}

int cmd_sweep(const std::string& config_path, const std::string& grid_text, int jobs,
              bool no_warm_start, const std::string& output_override) {
  RunConfig base = parse_run_config_file(config_path);
  fs::path out_root =
      output_override.empty() ? fs::path(base.output_dir) : fs::path(output_override);
  fs::create_directories(out_root);
  std::vector<double> grid = parse_grid(grid_text);
  std::vector<SweepRow> rows(grid.size());

  auto point_dir = [&](std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "point_%03zu", i);
    return out_root / buf;
  };

  if (jobs <= 1) {
    std::optional<DualPotentials> warm;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      RunConfig rc = config_with_rho(base, grid[i], base.solve.seed + i, point_dir(i).string());
      try {
        auto art = run_solve(rc, point_dir(i), (!no_warm_start && warm) ? &*warm : nullptr);
        rows[i] = row_from_report(grid[i], art.report);
        if (art.report.status == "ok")
          warm = std::move(art.potentials);
        else
          warm.reset();
      } catch (const std::exception& e) {
        rows[i] = SweepRow{grid[i], std::string("error: ") + e.what()};
        warm.reset();
      }
      std::printf("rho %.4g -> %s %.6g\n", grid[i], rows[i].status.c_str(), rows[i].value);
      std::fflush(stdout);
    }
  } else {
    // Independent grid points in parallel child processes with distinct
    // derived seeds; warm starting does not apply across processes.
    std::vector<pid_t> pids(grid.size(), -1);
    std::size_t next = 0;
    int running = 0;
    auto launch = [&](std::size_t i) {
      RunConfig rc = config_with_rho(base, grid[i], base.solve.seed + i, point_dir(i).string());
      fs::create_directories(point_dir(i));
      write_text(point_dir(i) / "config.json", rc.resolved_json);
      pid_t pid = fork();
      if (pid == 0) {
        std::string cfg = (point_dir(i) / "config.json").string();
        execl("/proc/self/exe", "robustagg", "solve", "--config", cfg.c_str(), (char*)nullptr);
        _exit(127);
      }
      pids[i] = pid;
      ++running;
    };
    while (next < grid.size() || running > 0) {
      while (next < grid.size() && running < jobs) launch(next++);
      if (running == 0) break;
      int status = 0;
      if (wait(&status) < 0) break;
      --running;
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
      fs::path rp = point_dir(i) / "report.json";
      if (!fs::exists(rp)) {
        rows[i] = SweepRow{grid[i], "error: no report"};
        continue;
      }
      std::ifstream in(rp);
      json j;
      in >> j;
      SolveReport r;
      r.status = j.value("status", "error");
      r.dual_value = j.value("dual_value", 0.0);
      r.dual_value_stderr = j.value("dual_value_stderr", 0.0);
      r.lambda = j.value("lambda", 0.0);
      r.aux = j.value("aux", AuxMap{});
      r.penalization_gap = j.value("penalization_gap", 0.0);
      r.dc_estimate = j.value("dc_estimate", 0.0);
      r.marginal_ks = j.value("marginal_ks", std::vector<double>{});
      rows[i] = row_from_report(grid[i], r);
    }
  }

  write_sweep_csv((out_root / "sweep.csv").string(), rows);
  std::size_t ok = 0;
  for (const auto& r : rows) ok += r.status == "ok" ? 1u : 0u;
  std::printf("sweep: %zu/%zu points ok -> %s\n", ok, rows.size(),
              (out_root / "sweep.csv").c_str());
  return 5 * ok >= 4 * rows.size() ? kExitOk : kExitNumerical;
}

int cmd_lp(const std::string& instance_path, bool primal, const std::string& export_path) {
  auto inst = parse_instance_file(instance_path);
  lp::LpProblem p = primal ? lp::build_primal_lp(inst) : lp::build_dual_lp(inst);
  if (!export_path.empty()) write_text(export_path, p.export_listing());
  auto sol = lp::solve_lp(p);
  if (sol.status != lp::LpStatus::Optimal) {
    print_error("numerical", "LP did not reach a certified optimum");
    return kExitNumerical;
  }
  double value = primal ? -sol.value : sol.value;
  std::printf("%s LP value %.9g   (iterations %ld, residuals %.2g/%.2g)\n",
              primal ? "primal" : "dual", value, sol.iterations, sol.primal_residual,
              sol.dual_residual);
  return kExitOk;
}

ProblemSpec problem_from_checkpoint(const Checkpoint& ck) {
  require(!ck.resolved_config_json.empty(),
          "checkpoint carries no configuration; cannot rebuild the problem");
  RunConfig rc = parse_run_config_string(ck.resolved_config_json);
  return rc.problem;
}

int cmd_sample(const std::string& checkpoint_path, std::size_t n, const std::string& method,
               const std::string& out_path, std::uint64_t seed) {
  Checkpoint ck = load_checkpoint(checkpoint_path);
  ProblemSpec spec = problem_from_checkpoint(ck);
  WorstCaseMethod m;
  if (method == "importance")
    m = WorstCaseMethod::Importance;
  else if (method == "rejection")
    m = WorstCaseMethod::Rejection;
  else
    throw config_error("method must be 'importance' or 'rejection'");
  RandomSource rng(seed ? seed : ck.seed + 17);
  WeightedCloud cloud = sample_worstcase(ck.potentials, spec, n, m, rng);
  write_samples_csv(out_path, cloud);
  std::printf("%zu samples -> %s   (ess %.0f, acceptance %.3g)\n", n, out_path.c_str(), cloud.ess,
              cloud.acceptance_rate);
  return kExitOk;
}

int cmd_diagnose(const std::string& checkpoint_path, const std::string& out_path) {
  Checkpoint ck = load_checkpoint(checkpoint_path);
  ProblemSpec spec = problem_from_checkpoint(ck);
  RunConfig rc = parse_run_config_string(ck.resolved_config_json);
  RandomSource root(ck.seed);
  DualValueEstimate est = evaluate_dual_value(ck.potentials, spec, rc.solve.n_eval, root);
  Diagnostics diag = compute_diagnostics(ck.potentials, spec, est.value, rc.solve, root);
  json j;
  j["dual_value"] = est.value;
  j["dual_value_stderr"] = est.stderr_estimate;
  j["primal_estimate"] = diag.primal_estimate;
  j["penalization_gap"] = diag.penalization_gap;
  j["dc_estimate"] = diag.dc_estimate;
  j["marginal_ks"] = diag.marginal_ks;
  j["effective_sample_size"] = diag.effective_sample_size;
  j["low_ess_warning"] = diag.low_ess_warning;
  std::string text = j.dump(2);
  if (!out_path.empty())
    write_text(out_path, text);
  else
    std::printf("%s\n", text.c_str());
  return kExitOk;
}

int cmd_oracle(const std::string& name, double rho, double alpha, std::size_t n,
               std::size_t grid_n, int max_iters, std::uint64_t seed,
               const std::string& config_path) {
  auto need_ref = [&]() {
    require(!config_path.empty(), "this oracle needs --config for the reference measure");
    RunConfig rc = parse_run_config_file(config_path);
    return rc.problem.reference;
  };
  oracles::OracleResult res;
  if (name == "example1") {
    res = oracles::example1_value(rho);
  } else if (name == "example2-upper") {
    res = oracles::example2_upper(alpha, rho);
  } else if (name == "example2-lower") {
    res = oracles::example2_lower(alpha, rho);
  } else if (name == "avar-mc") {
    RandomSource rng(seed ? seed : 1);
    res = oracles::avar_monte_carlo(need_ref(), alpha, n, rng);
  } else if (name == "comonotone-avar") {
    res = oracles::comonotone_avar_sum(need_ref(), alpha, n);
  } else if (name == "ra-lower") {
    res = oracles::rearrangement_lower_bound(need_ref(), alpha, grid_n, max_iters);
  } else if (name == "variance-reference") {
    res = oracles::variance_reference(need_ref());
  } else {
    throw config_error("unknown oracle '" + name +
                       "'; available: example1, example2-upper, example2-lower, avar-mc, "
                       "comonotone-avar, ra-lower, variance-reference");
  }
  if (res.kind == oracles::OracleResult::Kind::MonteCarlo)
    std::printf("%.9g +- %.3g\n", res.value, res.stderr_estimate);
  else
    std::printf("%.9g\n", res.value);
  if (!res.converged) std::fprintf(stderr, "warning: estimate did not fully converge\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust bounds on integrals and risk measures under fixed marginals and a "
               "transport-distance ambiguity set"};
  app.require_subcommand(1);

  std::string config_path, output_dir, grid_text, instance_path, export_path, checkpoint_path;
  std::string method = "importance", out_path = "samples.csv", oracle_name, diag_out;
  std::size_t n_samples = 2000, oracle_n = 100000, grid_n = 2048;
  int jobs = 1, max_iters = 100;
  bool no_warm_start = false, primal = false;
  double rho = 0.0, alpha = 0.95;
  std::uint64_t seed = 0;

  auto* solve = app.add_subcommand("solve", "train the dual potentials for one configuration");
  solve->add_option("--config", config_path, "run configuration (json)")->required();
  solve->add_option("--output-dir", output_dir, "override the config's output_dir");

  auto* sweep = app.add_subcommand("sweep", "solve across a grid of ball radii");
  sweep->add_option("--config", config_path, "run configuration (json)")->required();
  sweep->add_option("--rho-grid", grid_text, "grid start:end:step")->required();
  sweep->add_option("--jobs", jobs, "parallel points (processes); disables warm starts");
  sweep->add_flag("--no-warm-start", no_warm_start, "fresh potentials at every grid point");
  sweep->add_option("--output-dir", output_dir, "override the config's output_dir");

  auto* lp_cmd = app.add_subcommand("lp", "solve the grid reformulation of an instance file");
  lp_cmd->add_option("--instance", instance_path, "instance (json)")->required();
  lp_cmd->add_flag("--primal", primal, "solve the coupling LP instead of the dual LP");
  lp_cmd->add_option("--export", export_path, "write a plain-text row/column listing");

  auto* sample = app.add_subcommand("sample", "draw from the recovered worst-case measure");
  sample->add_option("--checkpoint", checkpoint_path, "checkpoint (json)")->required();
  sample->add_option("-n,--n", n_samples, "number of samples");
  sample->add_option("--method", method, "importance | rejection");
  sample->add_option("--out", out_path, "output csv");
  sample->add_option("--seed", seed, "sampling seed (default: derived from the checkpoint)");

  auto* diagnose = app.add_subcommand("diagnose", "re-evaluate value, gap, ks and d_c");
  diagnose->add_option("--checkpoint", checkpoint_path, "checkpoint (json)")->required();
  diagnose->add_option("--out", diag_out, "write json here instead of stdout");

  auto* oracle = app.add_subcommand("oracle", "closed-form and baseline reference values");
  oracle->add_option("name", oracle_name, "oracle name")->required();
  oracle->add_option("--rho", rho, "ball radius");
  oracle->add_option("--alpha", alpha, "AVaR level");
  oracle->add_option("-n,--n", oracle_n, "sample/grid size");
  oracle->add_option("--grid-n", grid_n, "rearrangement grid size");
  oracle->add_option("--max-iters", max_iters, "rearrangement pass limit");
  oracle->add_option("--seed", seed, "Monte Carlo seed");
  oracle->add_option("--config", config_path, "config supplying the reference measure");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (solve->parsed()) return cmd_solve(config_path, output_dir);
    if (sweep->parsed()) return cmd_sweep(config_path, grid_text, jobs, no_warm_start, output_dir);
    if (lp_cmd->parsed()) return cmd_lp(instance_path, primal, export_path);
    if (sample->parsed()) return cmd_sample(checkpoint_path, n_samples, method, out_path, seed);
    if (diagnose->parsed()) return cmd_diagnose(checkpoint_path, diag_out);
    if (oracle->parsed())
      return cmd_oracle(oracle_name, rho, alpha, oracle_n, grid_n, max_iters, seed, config_path);
  } catch (const unsupported_instance& e) {
    print_error("unsupported", e.what());
    return kExitUnsupported;
  } catch (const numerical_error& e) {
    print_error("numerical", e.what());
    return kExitNumerical;
  } catch (const config_error& e) {
    print_error("config", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    print_error("config", e.what());
    return kExitConfig;
  }
  return kExitConfig;
}
