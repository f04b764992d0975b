#include "robustagg/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace robustagg::lp {

int LpProblem::add_var(const std::string& name, double obj_coef, bool nonnegative) {
  int idx = n_vars++;
  objective.push_back(obj_coef);
  nonneg.push_back(nonnegative);
  if (!name.empty()) {
    auto [it, inserted] = var_index.emplace(name, idx);
    if (!inserted) throw std::logic_error("lp: duplicate variable name " + name);
  }
  return idx;
}

void LpProblem::add_row(Row row) {
  for (auto& [j, v] : row.coeffs)
    if (j < 0 || j >= n_vars) throw std::logic_error("lp: row references unknown variable");
  rows.push_back(std::move(row));
}

std::string LpProblem::export_listing() const {
  std::ostringstream os;
  os << "minimize\n";
  for (int j = 0; j < n_vars; ++j)
    if (objective[static_cast<std::size_t>(j)] != 0.0)
      os << "  " << objective[static_cast<std::size_t>(j)] << " x" << j << "\n";
  os << "subject to\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    os << "  r" << i << ":";
    for (auto& [j, v] : rows[i].coeffs) os << " " << v << " x" << j;
    os << " " << static_cast<char>(rows[i].sense) << "= " << rows[i].rhs << "\n";
  }
  os << "bounds\n";
  for (int j = 0; j < n_vars; ++j)
    os << "  x" << j << (nonneg[static_cast<std::size_t>(j)] ? " >= 0" : " free") << "\n";
  return os.str();
}

DualizedLp dual_of(const LpProblem& p) {
  DualizedLp out;
  LpProblem& d = out.dual;
  out.row_multiplier_sign.resize(p.rows.size(), 1.0);

  // One dual variable per primal row; Le rows are negated so the dual
  // variable is nonnegative.
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    const auto& r = p.rows[i];
    double sgn = r.sense == LpProblem::Sense::Le ? -1.0 : 1.0;
    out.row_multiplier_sign[i] = sgn;
    bool nonnegative = r.sense != LpProblem::Sense::Eq;
    d.add_var("", -sgn * r.rhs, nonnegative);
  }
  // One dual row per primal variable.
  std::vector<LpProblem::Row> dual_rows(static_cast<std::size_t>(p.n_vars));
  for (int j = 0; j < p.n_vars; ++j) {
    dual_rows[static_cast<std::size_t>(j)].sense = p.nonneg[static_cast<std::size_t>(j)]
                                                       ? LpProblem::Sense::Le
                                                       : LpProblem::Sense::Eq;
    dual_rows[static_cast<std::size_t>(j)].rhs = p.objective[static_cast<std::size_t>(j)];
  }
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    double sgn = out.row_multiplier_sign[i];
    for (auto& [j, v] : p.rows[i].coeffs)
      dual_rows[static_cast<std::size_t>(j)].coeffs.emplace_back(static_cast<int>(i), sgn * v);
  }
  for (auto& r : dual_rows) d.add_row(std::move(r));
  return out;
}

Residuals compute_residuals(const LpProblem& p, const std::vector<double>& x,
                            const std::vector<double>& y) {
  Residuals res;
  // primal feasibility
  for (int j = 0; j < p.n_vars; ++j)
    if (p.nonneg[static_cast<std::size_t>(j)])
      res.primal = std::max(res.primal, -x[static_cast<std::size_t>(j)]);
  for (const auto& r : p.rows) {
    double ax = 0.0;
    for (auto& [j, v] : r.coeffs) ax += v * x[static_cast<std::size_t>(j)];
    double scale = 1.0 + std::fabs(r.rhs);
    switch (r.sense) {
      case LpProblem::Sense::Ge:
        res.primal = std::max(res.primal, (r.rhs - ax) / scale);
        break;
      case LpProblem::Sense::Le:
        res.primal = std::max(res.primal, (ax - r.rhs) / scale);
        break;
      case LpProblem::Sense::Eq:
        res.primal = std::max(res.primal, std::fabs(ax - r.rhs) / scale);
        break;
    }
  }
  // dual feasibility: sign constraints plus stationarity of the reduced costs
  std::vector<double> ytA(static_cast<std::size_t>(p.n_vars), 0.0);
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    const auto& r = p.rows[i];
    if (r.sense == LpProblem::Sense::Ge) res.dual = std::max(res.dual, -y[i]);
    if (r.sense == LpProblem::Sense::Le) res.dual = std::max(res.dual, y[i]);
    for (auto& [j, v] : r.coeffs) ytA[static_cast<std::size_t>(j)] += v * y[i];
  }
  for (int j = 0; j < p.n_vars; ++j) {
    double rc = p.objective[static_cast<std::size_t>(j)] - ytA[static_cast<std::size_t>(j)];
    double scale = 1.0 + std::fabs(p.objective[static_cast<std::size_t>(j)]);
    if (p.nonneg[static_cast<std::size_t>(j)])
      res.dual = std::max(res.dual, -rc / scale);
    else
      res.dual = std::max(res.dual, std::fabs(rc) / scale);
  }
  // objective gap
  double cx = 0.0, by = 0.0;
  for (int j = 0; j < p.n_vars; ++j)
    cx += p.objective[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
  for (std::size_t i = 0; i < p.rows.size(); ++i) by += p.rows[i].rhs * y[i];
  res.gap = std::fabs(cx - by) / (1.0 + std::fabs(cx));
  return res;
}

namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kCostTol = 1e-9;

struct Standardized {
  Matrix t;                    // (m+1) x (ncols+1); last col = rhs, last row = costs
  std::vector<int> basis;      // basic column per row
  std::vector<int> plus_col;   // column of x_j (or x_j^+)
  std::vector<int> minus_col;  // column of x_j^- for free vars, else -1
  std::vector<double> row_sign;
  std::vector<int> art_col;    // artificial column per row
  int n_real_cols = 0;         // columns excluding artificials
  long iterations = 0;
};

// entering: Dantzig unless bland; returns -1 when optimal.
int choose_entering(const Standardized& s, int limit_cols, bool bland) {
  const auto& cost = s.t.row(s.t.rows() - 1);
  int best = -1;
  double best_val = -kCostTol;
  for (int j = 0; j < limit_cols; ++j) {
    double c = cost(j);
    if (c < best_val) {
      if (bland) return j;
      best_val = c;
      best = j;
    }
  }
  return best;
}

enum class PivotResult { Ok, Unbounded };

PivotResult pivot_step(Standardized& s, int entering, bool* degenerate) {
  const Eigen::Index m = s.t.rows() - 1;
  const Eigen::Index rhs_col = s.t.cols() - 1;
  Eigen::Index leave = -1;
  double best_ratio = std::numeric_limits<double>::infinity();
  for (Eigen::Index r = 0; r < m; ++r) {
    double a = s.t(r, entering);
    if (a > kPivotTol) {
      double ratio = s.t(r, rhs_col) / a;
      if (ratio < best_ratio - 1e-12 ||
          (ratio < best_ratio + 1e-12 && leave >= 0 &&
           s.basis[static_cast<std::size_t>(r)] < s.basis[static_cast<std::size_t>(leave)])) {
        best_ratio = ratio;
        leave = r;
      }
    }
  }
  if (leave < 0) return PivotResult::Unbounded;
  *degenerate = best_ratio < 1e-11;

  double piv = s.t(leave, entering);
  s.t.row(leave) /= piv;
  for (Eigen::Index r = 0; r < s.t.rows(); ++r) {
    if (r == leave) continue;
    double f = s.t(r, entering);
    if (f != 0.0) s.t.row(r) -= f * s.t.row(leave);
  }
  s.basis[static_cast<std::size_t>(leave)] = entering;
  ++s.iterations;
  return PivotResult::Ok;
}

// Runs the pivot loop until optimality/unboundedness/iteration cap.
LpStatus run_simplex(Standardized& s, int limit_cols, long max_iter) {
  long degenerate_run = 0;
  bool bland = false;
  for (;;) {
    if (s.iterations > max_iter) return LpStatus::IterationLimit;
    int entering = choose_entering(s, limit_cols, bland);
    if (entering < 0) return LpStatus::Optimal;
    bool degen = false;
    if (pivot_step(s, entering, &degen) == PivotResult::Unbounded) return LpStatus::Unbounded;
    if (degen) {
      if (++degenerate_run > 800) bland = true;
    } else {
      degenerate_run = 0;
      bland = false;
    }
  }
}

void rebuild_cost_row(Standardized& s, const std::vector<double>& col_cost) {
  const Eigen::Index m = s.t.rows() - 1;
  const Eigen::Index ncols = s.t.cols() - 1;
  auto cost = s.t.row(m);
  for (Eigen::Index j = 0; j <= ncols; ++j) {
    double c = j < ncols ? col_cost[static_cast<std::size_t>(j)] : 0.0;
    cost(j) = c;
  }
  for (Eigen::Index r = 0; r < m; ++r) {
    double cb = col_cost[static_cast<std::size_t>(s.basis[static_cast<std::size_t>(r)])];
    if (cb != 0.0) cost -= cb * s.t.row(r);
  }
}

LpSolution solve_direct(const LpProblem& p, const SolveOptions& opts) {
  const auto m = static_cast<Eigen::Index>(p.rows.size());
  Standardized s;
  s.plus_col.assign(static_cast<std::size_t>(p.n_vars), -1);
  s.minus_col.assign(static_cast<std::size_t>(p.n_vars), -1);
  s.row_sign.assign(static_cast<std::size_t>(m), 1.0);
  s.art_col.assign(static_cast<std::size_t>(m), -1);

  int ncols = 0;
  for (int j = 0; j < p.n_vars; ++j) {
    s.plus_col[static_cast<std::size_t>(j)] = ncols++;
    if (!p.nonneg[static_cast<std::size_t>(j)]) s.minus_col[static_cast<std::size_t>(j)] = ncols++;
  }
  std::vector<int> slack_col(static_cast<std::size_t>(m), -1);
  for (Eigen::Index i = 0; i < m; ++i)
    if (p.rows[static_cast<std::size_t>(i)].sense != LpProblem::Sense::Eq)
      slack_col[static_cast<std::size_t>(i)] = ncols++;
  s.n_real_cols = ncols;
  for (Eigen::Index i = 0; i < m; ++i) s.art_col[static_cast<std::size_t>(i)] = ncols++;

  s.t = Matrix::Zero(m + 1, ncols + 1);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& row = p.rows[static_cast<std::size_t>(i)];
    for (auto& [j, v] : row.coeffs) {
      s.t(i, s.plus_col[static_cast<std::size_t>(j)]) += v;
      if (s.minus_col[static_cast<std::size_t>(j)] >= 0)
        s.t(i, s.minus_col[static_cast<std::size_t>(j)]) -= v;
    }
    if (row.sense == LpProblem::Sense::Ge) s.t(i, slack_col[static_cast<std::size_t>(i)]) = -1.0;
    if (row.sense == LpProblem::Sense::Le) s.t(i, slack_col[static_cast<std::size_t>(i)]) = 1.0;
    s.t(i, s.t.cols() - 1) = row.rhs;
    if (row.rhs < 0.0) {
      s.t.row(i) = -s.t.row(i);
      s.row_sign[static_cast<std::size_t>(i)] = -1.0;
    }
    s.t(i, s.art_col[static_cast<std::size_t>(i)]) = 1.0;
    s.basis.push_back(s.art_col[static_cast<std::size_t>(i)]);
  }

  LpSolution sol;

  // Phase 1: minimize the artificial sum.
  std::vector<double> phase1_cost(static_cast<std::size_t>(ncols), 0.0);
  for (Eigen::Index i = 0; i < m; ++i)
    phase1_cost[static_cast<std::size_t>(s.art_col[static_cast<std::size_t>(i)])] = 1.0;
  rebuild_cost_row(s, phase1_cost);
  LpStatus st = run_simplex(s, ncols, opts.max_iterations);
  if (st == LpStatus::IterationLimit) {
    sol.status = st;
    sol.iterations = s.iterations;
    return sol;
  }
  double infeas = -s.t(m, s.t.cols() - 1);  // phase-1 objective value
  if (infeas > 1e-8) {
    sol.status = LpStatus::Infeasible;
    sol.iterations = s.iterations;
    return sol;
  }
  // Drive residual artificials out of the basis where possible.
  for (Eigen::Index r = 0; r < m; ++r) {
    int b = s.basis[static_cast<std::size_t>(r)];
    if (b < s.n_real_cols) continue;
    for (int j = 0; j < s.n_real_cols; ++j) {
      if (std::fabs(s.t(r, j)) > 1e-8) {
        bool degen = false;
        // manual pivot on (r, j)
        double piv = s.t(r, j);
        s.t.row(r) /= piv;
        for (Eigen::Index k = 0; k < s.t.rows(); ++k) {
          if (k == r) continue;
          double f = s.t(k, j);
          if (f != 0.0) s.t.row(k) -= f * s.t.row(r);
        }
        s.basis[static_cast<std::size_t>(r)] = j;
        (void)degen;
        break;
      }
    }
  }

  // Phase 2 on the real objective; artificial columns stay priced out by
  // restricting the entering choice to real columns.
  std::vector<double> phase2_cost(static_cast<std::size_t>(ncols), 0.0);
  for (int j = 0; j < p.n_vars; ++j) {
    phase2_cost[static_cast<std::size_t>(s.plus_col[static_cast<std::size_t>(j)])] =
        p.objective[static_cast<std::size_t>(j)];
    if (s.minus_col[static_cast<std::size_t>(j)] >= 0)
      phase2_cost[static_cast<std::size_t>(s.minus_col[static_cast<std::size_t>(j)])] =
          -p.objective[static_cast<std::size_t>(j)];
  }
  rebuild_cost_row(s, phase2_cost);
  st = run_simplex(s, s.n_real_cols, opts.max_iterations);
  sol.iterations = s.iterations;
  if (st != LpStatus::Optimal) {
    sol.status = st;
    return sol;
  }

  // Extract primal and dual solutions.
  std::vector<double> xs(static_cast<std::size_t>(ncols), 0.0);
  for (Eigen::Index r = 0; r < m; ++r)
    xs[static_cast<std::size_t>(s.basis[static_cast<std::size_t>(r)])] = s.t(r, s.t.cols() - 1);
  sol.x.assign(static_cast<std::size_t>(p.n_vars), 0.0);
  for (int j = 0; j < p.n_vars; ++j) {
    double v = xs[static_cast<std::size_t>(s.plus_col[static_cast<std::size_t>(j)])];
    if (s.minus_col[static_cast<std::size_t>(j)] >= 0)
      v -= xs[static_cast<std::size_t>(s.minus_col[static_cast<std::size_t>(j)])];
    sol.x[static_cast<std::size_t>(j)] = v;
  }
  sol.duals.assign(static_cast<std::size_t>(m), 0.0);
  for (Eigen::Index i = 0; i < m; ++i) {
    // reduced cost of the artificial identity column equals -y_i
    double rc = s.t(m, s.art_col[static_cast<std::size_t>(i)]);
    sol.duals[static_cast<std::size_t>(i)] = -rc * s.row_sign[static_cast<std::size_t>(i)];
  }
  double cx = 0.0;
  for (int j = 0; j < p.n_vars; ++j)
    cx += p.objective[static_cast<std::size_t>(j)] * sol.x[static_cast<std::size_t>(j)];
  sol.value = cx;
  sol.status = LpStatus::Optimal;
  return sol;
}

}  // namespace

LpSolution solve_lp(const LpProblem& p, const SolveOptions& opts) {
  require(p.n_vars > 0, "lp: empty problem");

  // Tall problems solve much faster through their dual: the tableau has one
  // row per constraint, and pivots cost rows * cols.
  bool tall = static_cast<double>(p.rows.size()) >
              opts.dualize_row_ratio * static_cast<double>(p.n_vars);
  if (opts.allow_dualize && tall && p.rows.size() > 64) {
    DualizedLp dz = dual_of(p);
    SolveOptions inner = opts;
    inner.allow_dualize = false;
    LpSolution ds = solve_direct(dz.dual, inner);
    if (ds.status == LpStatus::Optimal) {
      LpSolution sol;
      sol.status = LpStatus::Optimal;
      sol.iterations = ds.iterations;
      sol.value = -ds.value;
      sol.x.assign(static_cast<std::size_t>(p.n_vars), 0.0);
      for (int j = 0; j < p.n_vars; ++j) sol.x[static_cast<std::size_t>(j)] = -ds.duals[static_cast<std::size_t>(j)];
      sol.duals.assign(p.rows.size(), 0.0);
      for (std::size_t i = 0; i < p.rows.size(); ++i)
        sol.duals[i] = dz.row_multiplier_sign[i] * ds.x[i];
      Residuals res = compute_residuals(p, sol.x, sol.duals);
      if (std::max({res.primal, res.dual, res.gap}) <= opts.certify_tol) {
        sol.primal_residual = res.primal;
        sol.dual_residual = res.dual;
        sol.gap = res.gap;
        return sol;
      }
      // fall through to a direct solve when the mapped solution fails to
      // certify
    }
  }

  LpSolution sol = solve_direct(p, opts);
  if (sol.status != LpStatus::Optimal) return sol;
  Residuals res = compute_residuals(p, sol.x, sol.duals);
  sol.primal_residual = res.primal;
  sol.dual_residual = res.dual;
  sol.gap = res.gap;
  if (std::max({res.primal, res.dual, res.gap}) > opts.certify_tol)
    throw numerical_error("lp: optimal basis failed certification at tolerance");
  return sol;
}

}  // namespace robustagg::lp
