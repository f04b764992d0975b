#pragma once

#include "robustagg/adam.hpp"
#include "robustagg/assignment.hpp"
#include "robustagg/mlp.hpp"
#include "robustagg/objectives.hpp"
#include "robustagg/reference_measure.hpp"
#include "robustagg/sampling_measure.hpp"

#include <optional>
#include <string>
#include <vector>

namespace robustagg {

/// One robust evaluation problem: reference measure, integrand, transport
/// cost, ambiguity penalization, hinge parameter and sampling measure.
struct ProblemSpec {
  ReferenceMeasure reference;
  ObjectiveSpec objective = ObjectiveSpec::max_coordinates();
  CostSpec cost = CostSpec::l1();
  AmbiguitySpec ambiguity = AmbiguitySpec::ball(0.0);
  PenaltySpec penalty{1280.0};
  SamplingMeasureSpec sampling = SamplingMeasureSpec::half();

  void validate() const;
};

/// The dual decision variables: multiplier lambda, auxiliary scalars (tau for
/// AVaR-type objectives), one marginal network per block, and the slack
/// network g over the full dimension.
struct DualPotentials {
  double lambda = 1.0;
  AuxMap aux;
  Mlp g{MlpShape{}};
  std::vector<Mlp> h_blocks;

  static DualPotentials init(const ProblemSpec& spec, const RandomSource& root);
};

struct SolveConfig {
  long n_warm = 15000;  // iterations at the base learning rate
  long n_fine = 5000;   // iterations under the 0.98-per-50 decay
  std::size_t batch = 128;
  double lr = 1e-4;
  double lambda_lr = 0.1;
  long lambda_period = 200;
  long lambda_warmup = 2500;
  double lambda_init = 1.0;
  long aux_period = 1500;
  long aux_warmup = 10000;
  /// Negative means auto: 0.1 * max(1, |aux_init|), keeping the update scale
  /// meaningful for problems living on large magnitudes.
  double aux_lr = -1.0;
  std::optional<double> aux_init;  // empty: pilot quantile of the sum
  std::uint64_t seed = 1;
  long tail_window = 2000;
  std::size_t n_eval = 1000000;  // fresh draws for the headline value
  std::size_t n_diag = 100000;   // importance draws for diagnostics
  std::size_t n_dc = 1024;       // cloud size for the assignment diagnostic
  std::size_t ks_samples = 2000;
  int threads = 0;  // sampling threads; 0 = env/hardware default
  bool diagnostics = true;

  void validate() const;
};

struct TrajectoryPoint {
  long iteration;
  double objective;
  double lambda;
  double aux;
  double lr;
};

struct SolveReport {
  std::string status = "ok";  // "ok" or "diverged"
  double dual_value = 0.0;    // fresh-sample re-evaluation at frozen potentials
  double dual_value_stderr = 0.0;
  double trace_value = 0.0;   // average objective over the final window
  double lambda = 0.0;
  AuxMap aux;
  double primal_estimate = 0.0;
  double penalization_gap = 0.0;  // internal sup-form dual minus primal
  double dc_estimate = 0.0;
  std::vector<double> marginal_ks;
  double effective_sample_size = 0.0;
  bool low_ess_warning = false;
  double rejection_acceptance = 0.0;
  double wall_seconds = 0.0;
  long iterations = 0;
  std::vector<TrajectoryPoint> trajectory;
  std::string message;
};

/// One iteration's samples: x ~ mu-bar, per-block marginal draws, and theta
/// pairs, all of size B.
struct Batch {
  Matrix x_ref;                  // B x d
  std::vector<Matrix> y_blocks;  // per block: B x dim_b
  ThetaBatch theta;              // B pairs
};

/// Deterministic batch layout: a fixed number of substreams per purpose so
/// results do not depend on the number of sampling threads.
Batch draw_batch(const ProblemSpec& spec, std::size_t batch, const RandomSource& root,
                 std::uint64_t iteration, int threads);

struct ObjectiveEval {
  double loss = 0.0;
  double lambda_grad = 0.0;
  double aux_grad = 0.0;
};

/// Scratch space reused across iterations.
struct SolveWorkspace {
  MlpWorkspace g_ws;
  std::vector<MlpWorkspace> h_ws;
  Matrix g_inputs;
  std::vector<Matrix> h_inputs;
};

/// Monte Carlo estimate of the penalized dual objective
///   phi*(lambda) + sum_B int h_B dmu_B + int g dmu
///     + int beta_gamma(f(y) - g(x) - sum_B h_B(y_B) - lambda c(x,y)) dtheta
/// with exact gradients. Network gradients are accumulated into g_grad /
/// h_grads; the lambda and aux sample derivatives are returned.
ObjectiveEval objective_batch(const DualPotentials& pot, const ProblemSpec& spec,
                              const Batch& batch, MlpGrad* g_grad, std::vector<MlpGrad>* h_grads,
                              SolveWorkspace& ws);

/// Loss-only evaluation (no gradients); used by finite-difference tests and
/// the fresh-sample headline estimate.
double objective_batch_value(const DualPotentials& pot, const ProblemSpec& spec,
                             const Batch& batch);

/// Full training loop. Inf-sense problems run on the negated integrand and
/// report negated values. A warm start reuses the handed-in potentials
/// (shapes must match the problem).
std::pair<DualPotentials, SolveReport> train(const ProblemSpec& spec, const SolveConfig& cfg,
                                             const DualPotentials* warm_start = nullptr);

/// d pi* / d theta at one pair: beta'(f(y) - g(x) - sum h(y_B) - lambda c).
/// For inf-sense problems the integrand is the internally trained negation.
double worstcase_density(const DualPotentials& pot, const ProblemSpec& spec,
                         const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y);

enum class WorstCaseMethod { Importance, Rejection };

struct WeightedCloud {
  Matrix y;  // n x d draws whose weighted law approximates mu*
  std::vector<double> weights;
  double ess = 0.0;
  double acceptance_rate = 1.0;
};

/// Sample the recovered worst-case measure mu* (the y-marginal of pi*).
/// Importance: theta draws weighted by the density. Rejection: envelope
/// 1.5 x pilot maximum, automatically re-piloted on a breach.
WeightedCloud sample_worstcase(const DualPotentials& pot, const ProblemSpec& spec, std::size_t n,
                               WorstCaseMethod method, RandomSource& rng);

/// Self-normalized estimate of int f dmu* from a weighted cloud.
double estimate_primal_value(const WeightedCloud& cloud, const ObjectiveSpec& objective,
                             const AuxMap& aux);

struct DualValueEstimate {
  double value = 0.0;  // sign follows the problem's sense
  double stderr_estimate = 0.0;
};

/// Fresh-sample Monte Carlo estimate of the dual objective at frozen
/// potentials, with each integral term on its own stream.
DualValueEstimate evaluate_dual_value(const DualPotentials& pot, const ProblemSpec& spec,
                                      std::size_t n, const RandomSource& root);

struct Diagnostics {
  double primal_estimate = 0.0;
  double penalization_gap = 0.0;
  double dc_estimate = 0.0;
  std::vector<double> marginal_ks;
  double effective_sample_size = 0.0;
  bool low_ess_warning = false;
};

/// Worst-case recovery diagnostics: importance estimate of int f dmu*, the
/// penalization gap against dual_value, per-coordinate KS feasibility, and
/// the exact-assignment transport distance to the reference.
Diagnostics compute_diagnostics(const DualPotentials& pot, const ProblemSpec& spec,
                                double dual_value, const SolveConfig& cfg,
                                const RandomSource& root);

/// Number of sampling threads honoring ROBUSTAGG_THREADS.
int resolve_threads(int requested);

}  // namespace robustagg
