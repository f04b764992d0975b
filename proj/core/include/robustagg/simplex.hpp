#pragma once

#include "robustagg/common.hpp"

#include <map>
#include <string>
#include <vector>

namespace robustagg::lp {

/// A linear program in canonical form: minimize c'x subject to sparse rows
/// a'x {>=,=,<=} b, with each variable either nonnegative or free.
struct LpProblem {
  enum class Sense : char { Ge = '>', Eq = '=', Le = '<' };

  struct Row {
    std::vector<std::pair<int, double>> coeffs;
    Sense sense = Sense::Ge;
    double rhs = 0.0;
  };

  int n_vars = 0;
  std::vector<double> objective;
  std::vector<bool> nonneg;
  std::vector<Row> rows;
  std::map<std::string, int> var_index;

  int add_var(const std::string& name, double obj_coef, bool nonnegative);
  void add_row(Row row);

  /// Plain-text row/column listing for external solvers.
  std::string export_listing() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpSolution {
  LpStatus status = LpStatus::Optimal;
  double value = 0.0;
  std::vector<double> x;
  /// Row multipliers: >= rows carry y >= 0, <= rows y <= 0, = rows free.
  std::vector<double> duals;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  long iterations = 0;
};

struct SolveOptions {
  double certify_tol = 1e-7;
  long max_iterations = 400000;
  /// Solve the LP dual instead when rows outnumber columns by this factor
  /// (dense tableau cost scales with rows^1 * cols^1 per pivot but the basis
  /// work scales with rows).
  double dualize_row_ratio = 3.0;
  bool allow_dualize = true;
};

/// Dense two-phase primal simplex with Bland anti-cycling. Optimal solutions
/// are certified against the handed-in problem: primal/dual feasibility and
/// the duality gap must all clear certify_tol, otherwise numerical_error.
/// Infeasible/unbounded/iteration-capped problems are reported via status.
LpSolution solve_lp(const LpProblem& p, const SolveOptions& opts = {});

/// The LP dual of a canonical problem, again in canonical form, plus enough
/// bookkeeping to map a solution of the dual back to the primal.
struct DualizedLp {
  LpProblem dual;
  /// sign applied to the dual's variable i to recover the primal's row-i
  /// multiplier
  std::vector<double> row_multiplier_sign;
};

DualizedLp dual_of(const LpProblem& p);

/// Residuals of a candidate primal/dual pair on a problem; used for
/// certification and exposed for tests.
struct Residuals {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
};

Residuals compute_residuals(const LpProblem& p, const std::vector<double>& x,
                            const std::vector<double>& y);

}  // namespace robustagg::lp
