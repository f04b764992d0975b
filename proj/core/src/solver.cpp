#include "robustagg/solver.hpp"

#include "robustagg/stats.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <functional>
#include <thread>

namespace robustagg {

namespace {

constexpr int kSampleChunks = 4;
constexpr std::uint64_t kTagInit = 0xA0;
constexpr std::uint64_t kTagPilot = 0xB0;
constexpr std::uint64_t kTagEval = 0xC0;
constexpr std::uint64_t kTagDiag = 0xD0;
constexpr std::uint64_t kTagIter = 0x100000;

ObjectiveSpec internal_objective(const ProblemSpec& spec) {
  if (spec.objective.sense() == ObjectiveSpec::Sense::Inf)
    return ObjectiveSpec::negated(spec.objective).with_sense(ObjectiveSpec::Sense::Sup);
  return spec.objective;
}

void run_jobs(std::vector<std::function<void()>>& jobs, int threads) {
  if (threads <= 1 || jobs.size() <= 1) {
    for (auto& j : jobs) j();
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      jobs[i]();
    }
  };
  std::vector<std::thread> pool;
  int t = std::min<int>(threads, static_cast<int>(jobs.size()));
  pool.reserve(static_cast<std::size_t>(t));
  for (int i = 0; i < t; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

// Extract the block-coordinate columns of a row-major sample into a
// column-batch matrix region.
void fill_block_columns(Matrix& dst, Eigen::Index col_offset, const Matrix& rows,
                        const std::vector<int>& coords) {
  for (Eigen::Index j = 0; j < rows.rows(); ++j)
    for (std::size_t k = 0; k < coords.size(); ++k)
      dst(static_cast<Eigen::Index>(k), col_offset + j) =
          rows(j, coords[k]);
}

struct TermAccumulator {
  double sum = 0.0;
  double sumsq = 0.0;
  std::size_t n = 0;

  void add(double v) {
    sum += v;
    sumsq += v * v;
    ++n;
  }
  double mean() const { return sum / static_cast<double>(n); }
  double variance_of_mean() const {
    double m = mean();
    double var = sumsq / static_cast<double>(n) - m * m;
    return std::max(0.0, var) / static_cast<double>(n);
  }
};

// Worst-case densities beta'(residual) over a theta batch at frozen
// potentials; also returns the residuals when requested.
Vector batch_densities(const DualPotentials& pot, const ProblemSpec& spec,
                       const ObjectiveSpec& objective, const ThetaBatch& theta,
                       Vector* residuals_out = nullptr) {
  const auto B = theta.x.rows();
  const auto d = theta.x.cols();
  Matrix gx(d, B);
  for (Eigen::Index j = 0; j < B; ++j) gx.col(j) = theta.x.row(j).transpose();
  Vector g_out = pot.g.forward(gx);

  Vector h_sum = Vector::Zero(B);
  const auto& blocks = spec.reference.blocks();
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& coords = blocks[b].coordinates();
    Matrix hy(static_cast<Eigen::Index>(coords.size()), B);
    fill_block_columns(hy, 0, theta.y, coords);
    h_sum += pot.h_blocks[b].forward(hy);
  }

  Vector dens(B);
  if (residuals_out) residuals_out->resize(B);
  for (Eigen::Index j = 0; j < B; ++j) {
    double f = objective.value(theta.y.row(j).transpose(), pot.aux);
    double c = spec.cost.value(theta.x.row(j).transpose(), theta.y.row(j).transpose());
    double res = f - h_sum(j) - pot.lambda * c - g_out(j);
    if (residuals_out) (*residuals_out)(j) = res;
    dens(j) = spec.penalty.beta_prime(res);
  }
  return dens;
}

double pilot_sum_quantile(const ReferenceMeasure& ref, double alpha, RandomSource rng) {
  const std::size_t n = 100000;
  Matrix draws = ref.sample(n, rng);
  std::vector<double> sums(n);
  for (std::size_t i = 0; i < n; ++i) sums[i] = draws.row(static_cast<Eigen::Index>(i)).sum();
  std::sort(sums.begin(), sums.end());
  return quantile_type7(sums, alpha);
}

}  // namespace

void ProblemSpec::validate() const {
  const int d = reference.dim();
  if (cost.kind() == CostSpec::Kind::ScaledL1)
    require(cost.weights().size() == d, "cost weights must match the dimension");
  if (!sampling.epsilon.size()) {
    // resolved lazily
  } else {
    require(sampling.epsilon.size() == d, "theta epsilon must match the dimension");
  }
  if (objective.kind() == ObjectiveSpec::Kind::MaxAffine)
    for (const auto& p : objective.pieces())
      require(p.a.size() == d, "objective piece dimension mismatch");
}

void SolveConfig::validate() const {
  require(n_warm >= 1 && n_fine >= 0, "train: iteration counts must be positive");
  require(batch >= 1, "train: batch must be positive");
  require(lr > 0.0 && lambda_lr > 0.0, "train: learning rates must be positive");
  require(lambda_period >= 1 && aux_period >= 1, "train: update periods must be positive");
}

DualPotentials DualPotentials::init(const ProblemSpec& spec, const RandomSource& root) {
  DualPotentials pot;
  const int d = spec.reference.dim();
  auto g_rng = root.substream(kTagInit, 0);
  pot.g = Mlp::he_init({d, default_hidden_dim(d), 3}, g_rng);
  const auto& blocks = spec.reference.blocks();
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    auto h_rng = root.substream(kTagInit, 1 + b);
    int bd = blocks[b].dim();
    pot.h_blocks.push_back(Mlp::he_init({bd, default_hidden_dim(bd), 3}, h_rng));
  }
  return pot;
}

int resolve_threads(int requested) {
  int cap = kSampleChunks;
  if (const char* env = std::getenv("ROBUSTAGG_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) cap = std::min(cap, v);
  }
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  int t = requested > 0 ? requested : hw;
  return std::clamp(t, 1, cap);
}

Batch draw_batch(const ProblemSpec& spec, std::size_t batch, const RandomSource& root,
                 std::uint64_t iteration, int threads) {
  const auto B = static_cast<Eigen::Index>(batch);
  const auto d = spec.reference.dim();
  Batch out;
  out.x_ref.resize(B, d);
  out.theta.x.resize(B, d);
  out.theta.y.resize(B, d);
  const auto& blocks = spec.reference.blocks();
  out.y_blocks.resize(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b)
    out.y_blocks[b].resize(B, blocks[b].dim());

  const auto chunk_len = (batch + kSampleChunks - 1) / kSampleChunks;
  std::vector<std::function<void()>> jobs;
  for (int chunk = 0; chunk < kSampleChunks; ++chunk) {
    std::size_t lo = static_cast<std::size_t>(chunk) * chunk_len;
    if (lo >= batch) break;
    std::size_t len = std::min(chunk_len, batch - lo);
    auto row = static_cast<Eigen::Index>(lo);
    auto n = static_cast<Eigen::Index>(len);

    jobs.emplace_back([&, chunk, row, n] {
      auto rng = root.substream(kTagIter + iteration, (1u << 4) | static_cast<unsigned>(chunk));
      out.x_ref.middleRows(row, n) = spec.reference.sample(static_cast<std::size_t>(n), rng);
    });
    jobs.emplace_back([&, chunk, row, n] {
      auto rng = root.substream(kTagIter + iteration, (2u << 4) | static_cast<unsigned>(chunk));
      ThetaBatch tb = sample_theta(spec.sampling, spec.reference, static_cast<std::size_t>(n), rng);
      out.theta.x.middleRows(row, n) = tb.x;
      out.theta.y.middleRows(row, n) = tb.y;
    });
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      jobs.emplace_back([&, chunk, row, n, b] {
        auto rng =
            root.substream(kTagIter + iteration, ((3u + b) << 4) | static_cast<unsigned>(chunk));
        Vector v(blocks[b].dim());
        for (Eigen::Index i = 0; i < n; ++i) {
          blocks[b].sample_into(v, rng);
          out.y_blocks[b].row(row + i) = v.transpose();
        }
      });
    }
  }
  run_jobs(jobs, threads);
  return out;
}

ObjectiveEval objective_batch(const DualPotentials& pot, const ProblemSpec& spec,
                              const Batch& batch, MlpGrad* g_grad, std::vector<MlpGrad>* h_grads,
                              SolveWorkspace& ws) {
  const ObjectiveSpec objective = internal_objective(spec);
  const auto B = batch.theta.x.rows();
  const auto d = batch.theta.x.cols();
  const auto& blocks = spec.reference.blocks();
  if (batch.x_ref.rows() != B) throw std::logic_error("objective_batch: batch size mismatch");
  if (pot.h_blocks.size() != blocks.size())
    throw std::logic_error("objective_batch: one h network per block required");
  const double inv_b = 1.0 / static_cast<double>(B);

  // g over [x_ref | theta.x] in one column batch
  ws.g_inputs.resize(d, 2 * B);
  for (Eigen::Index j = 0; j < B; ++j) {
    ws.g_inputs.col(j) = batch.x_ref.row(j).transpose();
    ws.g_inputs.col(B + j) = batch.theta.x.row(j).transpose();
  }
  Vector g_out = forward_batch(pot.g, ws.g_inputs, ws.g_ws);

  // h_b over [marginal draws | theta.y block] per block
  ws.h_inputs.resize(blocks.size());
  if (ws.h_ws.size() != blocks.size()) ws.h_ws.resize(blocks.size());
  Vector h_theta_sum = Vector::Zero(B);
  std::vector<Vector> h_out(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& coords = blocks[b].coordinates();
    auto bd = static_cast<Eigen::Index>(coords.size());
    ws.h_inputs[b].resize(bd, 2 * B);
    for (Eigen::Index j = 0; j < B; ++j)
      ws.h_inputs[b].col(j) = batch.y_blocks[b].row(j).transpose();
    fill_block_columns(ws.h_inputs[b], B, batch.theta.y, coords);
    h_out[b] = forward_batch(pot.h_blocks[b], ws.h_inputs[b], ws.h_ws[b]);
    h_theta_sum += h_out[b].tail(B);
  }

  // residuals and hinge terms over theta
  double pen_mean = 0.0;
  double lambda_grad_pen = 0.0;
  double aux_grad = 0.0;
  Vector pen_prime(B);
  const bool lambda_free = !spec.ambiguity.lambda_fixed();
  const bool uses_aux = objective.uses_aux();
  for (Eigen::Index j = 0; j < B; ++j) {
    double f = objective.value(batch.theta.y.row(j).transpose(), pot.aux);
    double c = spec.cost.value(batch.theta.x.row(j).transpose(), batch.theta.y.row(j).transpose());
    double res = f - h_theta_sum(j) - pot.lambda * c - g_out(B + j);
    pen_mean += spec.penalty.beta(res) * inv_b;
    double bp = spec.penalty.beta_prime(res);
    pen_prime(j) = bp;
    if (lambda_free) lambda_grad_pen += bp * c * inv_b;
    if (uses_aux)
      aux_grad += bp * objective.aux_partial(batch.theta.y.row(j).transpose(), pot.aux) * inv_b;
  }

  ObjectiveEval eval;
  double phi_star = spec.ambiguity.phi_star(spec.ambiguity.lambda_fixed() ? 1.0 : pot.lambda);
  eval.loss = phi_star + g_out.head(B).mean() + pen_mean;
  for (std::size_t b = 0; b < blocks.size(); ++b) eval.loss += h_out[b].head(B).mean();
  eval.lambda_grad =
      lambda_free ? spec.ambiguity.phi_star_derivative(pot.lambda) - lambda_grad_pen : 0.0;
  eval.aux_grad = aux_grad;

  if (g_grad) {
    Vector og(2 * B);
    og.head(B).setConstant(inv_b);
    og.tail(B) = -inv_b * pen_prime;
    backward(pot.g, ws.g_ws, og, *g_grad);
    for (std::size_t b = 0; b < blocks.size(); ++b)
      backward(pot.h_blocks[b], ws.h_ws[b], og, (*h_grads)[b]);
  }
  return eval;
}

double objective_batch_value(const DualPotentials& pot, const ProblemSpec& spec,
                             const Batch& batch) {
  SolveWorkspace ws;
  return objective_batch(pot, spec, batch, nullptr, nullptr, ws).loss;
}

double worstcase_density(const DualPotentials& pot, const ProblemSpec& spec,
                         const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y) {
  ThetaBatch one;
  one.x = x.transpose();
  one.y = y.transpose();
  return batch_densities(pot, spec, internal_objective(spec), one)(0);
}

WeightedCloud sample_worstcase(const DualPotentials& pot, const ProblemSpec& spec, std::size_t n,
                               WorstCaseMethod method, RandomSource& rng) {
  const ObjectiveSpec objective = internal_objective(spec);
  const std::size_t draw_chunk = 8192;

  if (method == WorstCaseMethod::Importance) {
    WeightedCloud cloud;
    cloud.y.resize(static_cast<Eigen::Index>(n), spec.reference.dim());
    cloud.weights.resize(n);
    std::size_t done = 0;
    double wsum = 0.0, wsq = 0.0;
    while (done < n) {
      std::size_t take = std::min(draw_chunk, n - done);
      ThetaBatch tb = sample_theta(spec.sampling, spec.reference, take, rng);
      Vector dens = batch_densities(pot, spec, objective, tb);
      for (std::size_t i = 0; i < take; ++i) {
        cloud.y.row(static_cast<Eigen::Index>(done + i)) = tb.y.row(static_cast<Eigen::Index>(i));
        double w = dens(static_cast<Eigen::Index>(i));
        cloud.weights[done + i] = w;
        wsum += w;
        wsq += w * w;
      }
      done += take;
    }
    require(wsum > 0.0, "sample_worstcase: all importance weights vanished");
    cloud.ess = wsum * wsum / std::max(wsq, 1e-300);
    cloud.acceptance_rate = 1.0;
    return cloud;
  }

  // Rejection with a pilot envelope; breaches re-pilot with a doubled factor.
  const std::size_t pilot_n = 100000;
  double max_dens = 0.0;
  {
    auto pilot_rng = rng.substream(0x7e57, 1);
    std::size_t left = pilot_n;
    while (left > 0) {
      std::size_t take = std::min(draw_chunk, left);
      ThetaBatch tb = sample_theta(spec.sampling, spec.reference, take, pilot_rng);
      max_dens = std::max(max_dens, batch_densities(pot, spec, objective, tb).maxCoeff());
      left -= take;
    }
  }
  require(max_dens > 0.0, "sample_worstcase: pilot found a vanishing density");

  double envelope = 1.5 * max_dens;
  for (int attempt = 0; attempt < 4; ++attempt) {
    WeightedCloud cloud;
    cloud.y.resize(static_cast<Eigen::Index>(n), spec.reference.dim());
    cloud.weights.assign(n, 1.0);
    std::size_t accepted = 0, drawn = 0;
    bool breached = false;
    const std::size_t max_draws = 4000 * std::max<std::size_t>(n, 1);
    while (accepted < n && drawn < max_draws) {
      std::size_t take = draw_chunk;
      ThetaBatch tb = sample_theta(spec.sampling, spec.reference, take, rng);
      Vector dens = batch_densities(pot, spec, objective, tb);
      drawn += take;
      for (std::size_t i = 0; i < take && accepted < n; ++i) {
        double d = dens(static_cast<Eigen::Index>(i));
        if (d > envelope) {
          breached = true;
          break;
        }
        if (rng.uniform() * envelope < d)
          cloud.y.row(static_cast<Eigen::Index>(accepted++)) =
              tb.y.row(static_cast<Eigen::Index>(i));
      }
      if (breached) break;
    }
    if (breached) {
      envelope *= 2.0;
      continue;
    }
    if (accepted < n)
      throw numerical_error("sample_worstcase: rejection acceptance rate too low");
    cloud.ess = static_cast<double>(n);
    cloud.acceptance_rate = static_cast<double>(n) / static_cast<double>(drawn);
    return cloud;
  }
  throw numerical_error(
      "sample_worstcase: density keeps breaching the rejection envelope; re-pilot with a larger "
      "factor");
}

double estimate_primal_value(const WeightedCloud& cloud, const ObjectiveSpec& objective,
                             const AuxMap& aux) {
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < cloud.y.rows(); ++i) {
    double w = cloud.weights[static_cast<std::size_t>(i)];
    num += w * objective.value(cloud.y.row(i).transpose(), aux);
    den += w;
  }
  require(den > 0.0, "estimate_primal_value: zero total weight");
  return num / den;
}

std::pair<DualPotentials, SolveReport> train(const ProblemSpec& spec, const SolveConfig& cfg,
                                             const DualPotentials* warm_start) {
  spec.validate();
  cfg.validate();
  const auto t_start = std::chrono::steady_clock::now();

  ProblemSpec internal = spec;
  internal.objective = internal_objective(spec);
  const double flip = spec.objective.sense() == ObjectiveSpec::Sense::Inf ? -1.0 : 1.0;
  if (!spec.ambiguity.lambda_fixed())
    require(cfg.lambda_warmup <= cfg.n_warm, "train: lambda warmup must not exceed N0");
  if (internal.objective.uses_aux())
    require(cfg.aux_warmup <= cfg.n_warm, "train: aux warmup must not exceed N0");
  if (internal.sampling.kind == SamplingMeasureSpec::Kind::Third)
    internal.sampling.epsilon = resolve_epsilon(internal.sampling, internal.reference);

  RandomSource root(cfg.seed);
  const int threads = resolve_threads(cfg.threads);

  DualPotentials pot;
  if (warm_start) {
    pot = *warm_start;
    require(pot.g.shape().input_dim == internal.reference.dim(),
            "warm start: network dimensions do not match the problem");
    require(pot.h_blocks.size() == internal.reference.blocks().size(),
            "warm start: block count mismatch");
  } else {
    pot = DualPotentials::init(internal, root);
    pot.lambda = cfg.lambda_init;
  }
  if (spec.ambiguity.lambda_fixed()) pot.lambda = 1.0;

  const bool uses_aux = internal.objective.uses_aux();
  double aux_lr = cfg.aux_lr;
  if (uses_aux) {
    if (!warm_start || pot.aux.find("tau") == pot.aux.end()) {
      double tau0 = cfg.aux_init
                        ? *cfg.aux_init
                        : pilot_sum_quantile(internal.reference, internal.objective.avar_alpha(),
                                             root.substream(kTagPilot));
      pot.aux["tau"] = tau0;
    }
    if (aux_lr <= 0.0) aux_lr = 0.1 * std::max(1.0, std::fabs(pot.aux["tau"]));
  }
  const int aux_direction = internal.objective.aux_direction();

  AdamState adam_g(pot.g);
  std::vector<AdamState> adam_h;
  for (const auto& h : pot.h_blocks) adam_h.emplace_back(h);
  MlpGrad g_grad = pot.g.zero_grad();
  std::vector<MlpGrad> h_grads;
  for (const auto& h : pot.h_blocks) h_grads.push_back(h.zero_grad());

  const LrSchedule net_sched{cfg.lr, cfg.n_warm, 0.98, 50};
  const LrSchedule lambda_sched{cfg.lambda_lr, cfg.n_warm, 0.98, 50};
  const LrSchedule aux_sched{aux_lr, cfg.n_warm, 0.98, 50};

  SolveWorkspace ws;
  SolveReport report;
  const long total_iters = cfg.n_warm + cfg.n_fine;
  report.trajectory.reserve(static_cast<std::size_t>(total_iters));

  double lambda_acc = 0.0;
  long lambda_count = 0;
  double aux_acc = 0.0;
  long aux_count = 0;
  std::deque<double> recent_abs;
  const bool lambda_free = !spec.ambiguity.lambda_fixed();

  for (long t = 1; t <= total_iters; ++t) {
    Batch batch = draw_batch(internal, cfg.batch, root, static_cast<std::uint64_t>(t), threads);
    g_grad.set_zero();
    for (auto& hg : h_grads) hg.set_zero();
    ObjectiveEval eval = objective_batch(pot, internal, batch, &g_grad, &h_grads, ws);

    if (!std::isfinite(eval.loss)) {
      report.status = "diverged";
      report.message =
          "non-finite objective at iteration " + std::to_string(t) +
          "; potentials hold the last finite state. Consider a larger batch size.";
      break;
    }

    // Divergence guard: objective exploding relative to its recent median.
    if (recent_abs.size() == 1000) {
      std::vector<double> tmp(recent_abs.begin(), recent_abs.end());
      auto mid = tmp.begin() + 500;
      std::nth_element(tmp.begin(), mid, tmp.end());
      double med = *mid;
      if (std::fabs(eval.loss) > 10.0 * std::max(med, 1e-8)) {
        report.status = "diverged";
        report.message = "objective exceeded 10x its running median at iteration " +
                         std::to_string(t) + "; consider a larger batch size.";
        break;
      }
      recent_abs.pop_front();
    }
    recent_abs.push_back(std::fabs(eval.loss));

    const double lr = net_sched.rate(t);
    try {
      adam_g.step(pot.g, g_grad, lr);
      for (std::size_t b = 0; b < pot.h_blocks.size(); ++b)
        adam_h[b].step(pot.h_blocks[b], h_grads[b], lr);
    } catch (const numerical_error& e) {
      report.status = "diverged";
      report.message = std::string(e.what()) + "; consider a larger batch size.";
      break;
    }

    if (lambda_free && t > cfg.lambda_warmup) {
      lambda_acc += eval.lambda_grad;
      if (++lambda_count == cfg.lambda_period) {
        pot.lambda -= lambda_sched.rate(t) * lambda_acc / static_cast<double>(cfg.lambda_period);
        pot.lambda = std::max(0.0, pot.lambda);
        lambda_acc = 0.0;
        lambda_count = 0;
      }
    }
    if (uses_aux && t > cfg.aux_warmup) {
      aux_acc += eval.aux_grad;
      if (++aux_count == cfg.aux_period) {
        double step = aux_sched.rate(t) * aux_acc / static_cast<double>(cfg.aux_period);
        pot.aux["tau"] -= static_cast<double>(aux_direction) * step;
        aux_acc = 0.0;
        aux_count = 0;
      }
    }

    report.trajectory.push_back({t, flip * eval.loss, pot.lambda,
                                 uses_aux ? pot.aux.at("tau") : 0.0, lr});
  }
  report.iterations = static_cast<long>(report.trajectory.size());

  // Trace value: average objective over the final window.
  if (!report.trajectory.empty()) {
    auto window = std::min<std::size_t>(static_cast<std::size_t>(cfg.tail_window),
                                        report.trajectory.size());
    double s = 0.0;
    for (std::size_t i = report.trajectory.size() - window; i < report.trajectory.size(); ++i)
      s += report.trajectory[i].objective;
    report.trace_value = s / static_cast<double>(window);
  }
  report.lambda = pot.lambda;
  report.aux = pot.aux;

  if (report.status != "ok") {
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return {std::move(pot), std::move(report)};
  }

  // Headline value: fresh-sample re-evaluation at frozen potentials.
  DualValueEstimate est = evaluate_dual_value(pot, spec, cfg.n_eval, root);
  report.dual_value = est.value;
  report.dual_value_stderr = est.stderr_estimate;

  if (cfg.diagnostics) {
    Diagnostics diag = compute_diagnostics(pot, spec, report.dual_value, cfg, root);
    report.primal_estimate = diag.primal_estimate;
    report.penalization_gap = diag.penalization_gap;
    report.dc_estimate = diag.dc_estimate;
    report.marginal_ks = diag.marginal_ks;
    report.effective_sample_size = diag.effective_sample_size;
    report.low_ess_warning = diag.low_ess_warning;
  }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return {std::move(pot), std::move(report)};
}

DualValueEstimate evaluate_dual_value(const DualPotentials& pot, const ProblemSpec& spec,
                                      std::size_t n, const RandomSource& root) {
  ProblemSpec internal = spec;
  internal.objective = internal_objective(spec);
  if (internal.sampling.kind == SamplingMeasureSpec::Kind::Third)
    internal.sampling.epsilon = resolve_epsilon(internal.sampling, internal.reference);
  const double flip = spec.objective.sense() == ObjectiveSpec::Sense::Inf ? -1.0 : 1.0;

  const std::size_t chunk = 8192;
  TermAccumulator g_term, pen_term;
  std::vector<TermAccumulator> h_terms(pot.h_blocks.size());
  auto rng_g = root.substream(kTagEval, 1);
  auto rng_h = root.substream(kTagEval, 2);
  auto rng_t = root.substream(kTagEval, 3);
  const auto& blocks = internal.reference.blocks();
  std::size_t left = n;
  while (left > 0) {
    std::size_t take = std::min(chunk, left);
    auto b_n = static_cast<Eigen::Index>(take);
    Matrix xs = internal.reference.sample(take, rng_g);
    Matrix gx(internal.reference.dim(), b_n);
    for (Eigen::Index j = 0; j < b_n; ++j) gx.col(j) = xs.row(j).transpose();
    Vector gv = pot.g.forward(gx);
    for (Eigen::Index j = 0; j < b_n; ++j) g_term.add(gv(j));

    for (std::size_t b = 0; b < blocks.size(); ++b) {
      Matrix hb(blocks[b].dim(), b_n);
      Vector v(blocks[b].dim());
      for (Eigen::Index j = 0; j < b_n; ++j) {
        blocks[b].sample_into(v, rng_h);
        hb.col(j) = v;
      }
      Vector hv = pot.h_blocks[b].forward(hb);
      for (Eigen::Index j = 0; j < b_n; ++j) h_terms[b].add(hv(j));
    }

    ThetaBatch tb = sample_theta(internal.sampling, internal.reference, take, rng_t);
    Vector res;
    batch_densities(pot, internal, internal.objective, tb, &res);
    for (Eigen::Index j = 0; j < b_n; ++j) pen_term.add(internal.penalty.beta(res(j)));
    left -= take;
  }
  double value = spec.ambiguity.phi_star(spec.ambiguity.lambda_fixed() ? 1.0 : pot.lambda);
  double var = 0.0;
  value += g_term.mean() + pen_term.mean();
  var += g_term.variance_of_mean() + pen_term.variance_of_mean();
  for (auto& ht : h_terms) {
    value += ht.mean();
    var += ht.variance_of_mean();
  }
  return {flip * value, std::sqrt(var)};
}

Diagnostics compute_diagnostics(const DualPotentials& pot, const ProblemSpec& spec,
                                double dual_value, const SolveConfig& cfg,
                                const RandomSource& root) {
  ProblemSpec internal = spec;
  internal.objective = internal_objective(spec);
  if (internal.sampling.kind == SamplingMeasureSpec::Kind::Third)
    internal.sampling.epsilon = resolve_epsilon(internal.sampling, internal.reference);
  const double flip = spec.objective.sense() == ObjectiveSpec::Sense::Inf ? -1.0 : 1.0;

  Diagnostics diag;
  auto rng_d = root.substream(kTagDiag, 1);
  WeightedCloud cloud =
      sample_worstcase(pot, internal, cfg.n_diag, WorstCaseMethod::Importance, rng_d);
  double primal_int = estimate_primal_value(cloud, internal.objective, pot.aux);
  diag.primal_estimate = flip * primal_int;
  diag.penalization_gap = flip * dual_value - primal_int;
  diag.effective_sample_size = cloud.ess;
  diag.low_ess_warning = cloud.ess < 50.0;

  // Per-coordinate feasibility: KS of the reweighted y-cloud against the
  // marginal cdfs.
  auto rng_ks = root.substream(kTagDiag, 2);
  auto idx = resample_indices(cloud.weights, cfg.ks_samples, rng_ks);
  const int d = internal.reference.dim();
  diag.marginal_ks.assign(static_cast<std::size_t>(d), 0.0);
  for (int c = 0; c < d; ++c) {
    std::vector<double> col(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
      col[i] = cloud.y(static_cast<Eigen::Index>(idx[i]), c);
    diag.marginal_ks[static_cast<std::size_t>(c)] =
        ks_statistic(col, [&](double v) { return internal.reference.coordinate_cdf(c, v); });
  }

  // Transport distance between a fresh reference cloud and the recovered
  // worst case, by exact assignment.
  auto rng_dc = root.substream(kTagDiag, 3);
  Matrix ref_cloud = internal.reference.sample(cfg.n_dc, rng_dc);
  auto idx_dc = resample_indices(cloud.weights, cfg.n_dc, rng_dc);
  Matrix star_cloud(static_cast<Eigen::Index>(cfg.n_dc), d);
  for (std::size_t i = 0; i < cfg.n_dc; ++i)
    star_cloud.row(static_cast<Eigen::Index>(i)) =
        cloud.y.row(static_cast<Eigen::Index>(idx_dc[i]));
  diag.dc_estimate = estimate_dc(ref_cloud, star_cloud, internal.cost);
  return diag;
}

}  // namespace robustagg
