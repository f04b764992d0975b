#include "robustagg/lp.hpp"

#include <cmath>
#include <string>

namespace robustagg::lp {

void DiscreteInstance::validate() const {
  require(points.rows() >= 1 && points.cols() >= 1, "instance: empty point set");
  require(!pieces.empty(), "instance: objective needs at least one affine piece");
  for (const auto& p : pieces)
    require(p.a.size() == d(), "instance: affine piece dimension mismatch");
  require(rho >= 0.0, "instance: rho must be nonnegative");
  if (!cost.separable())
    throw unsupported_instance(
        "the LP reformulation requires an additively separable cost");
}

LpProblem build_dual_lp(const DiscreteInstance& inst) {
  inst.validate();
  const auto n = inst.n();
  const auto d = inst.d();
  const auto M = inst.m_pieces();
  const double inv_n = 1.0 / static_cast<double>(n);

  LpProblem p;
  const int lambda = p.add_var("lambda", inst.rho, true);
  // h_i(j), g(j), u_i(j,m); all free
  std::vector<int> h(static_cast<std::size_t>(d * n));
  std::vector<int> g(static_cast<std::size_t>(n));
  std::vector<int> u(static_cast<std::size_t>(d * n * M));
  auto h_at = [&](Eigen::Index i, Eigen::Index j) -> int& {
    return h[static_cast<std::size_t>(i * n + j)];
  };
  auto u_at = [&](Eigen::Index i, Eigen::Index j, Eigen::Index m) -> int& {
    return u[static_cast<std::size_t>((i * n + j) * M + m)];
  };
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      h_at(i, j) = p.add_var("h_" + std::to_string(i) + "_" + std::to_string(j), inv_n, false);
  for (Eigen::Index j = 0; j < n; ++j)
    g[static_cast<std::size_t>(j)] = p.add_var("g_" + std::to_string(j), inv_n, false);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index m = 0; m < M; ++m)
        u_at(i, j, m) = p.add_var(
            "u_" + std::to_string(i) + "_" + std::to_string(j) + "_" + std::to_string(m), 0.0,
            false);

  // g(j) - sum_i u_i(j,m) >= b^m
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index m = 0; m < M; ++m) {
      LpProblem::Row row;
      row.sense = LpProblem::Sense::Ge;
      row.rhs = inst.pieces[static_cast<std::size_t>(m)].b;
      row.coeffs.emplace_back(g[static_cast<std::size_t>(j)], 1.0);
      for (Eigen::Index i = 0; i < d; ++i) row.coeffs.emplace_back(u_at(i, j, m), -1.0);
      p.add_row(std::move(row));
    }
  }
  // u_i(j,m) + h_i(k) + lambda c_i(x_i^j, x_i^k) >= a_i^m x_i^k
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index m = 0; m < M; ++m) {
      const double a_im = inst.pieces[static_cast<std::size_t>(m)].a(i);
      for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = 0; k < n; ++k) {
          LpProblem::Row row;
          row.sense = LpProblem::Sense::Ge;
          row.rhs = a_im * inst.points(k, i);
          row.coeffs.emplace_back(u_at(i, j, m), 1.0);
          row.coeffs.emplace_back(h_at(i, k), 1.0);
          double ci = inst.cost.piece(static_cast<int>(i), inst.points(j, i), inst.points(k, i));
          if (ci != 0.0) row.coeffs.emplace_back(lambda, ci);
          p.add_row(std::move(row));
        }
      }
    }
  }
  // lambda >= 0, stated as an explicit row to mirror the reformulation
  {
    LpProblem::Row row;
    row.sense = LpProblem::Sense::Ge;
    row.rhs = 0.0;
    row.coeffs.emplace_back(lambda, 1.0);
    p.add_row(std::move(row));
  }
  return p;
}

LpProblem build_primal_lp(const DiscreteInstance& inst) {
  inst.validate();
  const auto n = inst.n();
  const auto d = inst.d();
  // d * n^(d+1) nonzeros in the marginal rows; keep instances at desk scale.
  if (std::log10(static_cast<double>(d)) +
          static_cast<double>(d + 1) * std::log10(static_cast<double>(n)) >
      7.0)
    throw unsupported_instance("primal grid LP too large (d * n^(d+1) exceeds 1e7 nonzeros)");

  Eigen::Index n_cells = 1;
  for (Eigen::Index i = 0; i < d; ++i) n_cells *= n;
  const double inv_n = 1.0 / static_cast<double>(n);

  LpProblem p;
  // pi(j, k_1..k_d) laid out with j slowest, then k_1, ..., k_d.
  std::vector<Eigen::Index> strides(static_cast<std::size_t>(d));
  Eigen::Index s = 1;
  for (Eigen::Index i = d - 1; i >= 0; --i) {
    strides[static_cast<std::size_t>(i)] = s;
    s *= n;
  }

  Vector y(d);
  std::vector<Eigen::Index> k(static_cast<std::size_t>(d), 0);
  ObjectiveSpec f = ObjectiveSpec::max_affine(inst.pieces);
  // objective: -f(y) per cell (duplicated across j)
  std::vector<double> cell_obj(static_cast<std::size_t>(n_cells));
  for (Eigen::Index cell = 0; cell < n_cells; ++cell) {
    Eigen::Index rem = cell;
    for (Eigen::Index i = 0; i < d; ++i) {
      k[static_cast<std::size_t>(i)] = rem / strides[static_cast<std::size_t>(i)];
      rem %= strides[static_cast<std::size_t>(i)];
      y(i) = inst.points(k[static_cast<std::size_t>(i)], i);
    }
    cell_obj[static_cast<std::size_t>(cell)] = -f.value(y);
  }
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index cell = 0; cell < n_cells; ++cell)
      p.add_var("", cell_obj[static_cast<std::size_t>(cell)], true);

  // first marginal: sum_cell pi(j, cell) = 1/n
  for (Eigen::Index j = 0; j < n; ++j) {
    LpProblem::Row row;
    row.sense = LpProblem::Sense::Eq;
    row.rhs = inv_n;
    row.coeffs.reserve(static_cast<std::size_t>(n_cells));
    for (Eigen::Index cell = 0; cell < n_cells; ++cell)
      row.coeffs.emplace_back(static_cast<int>(j * n_cells + cell), 1.0);
    p.add_row(std::move(row));
  }
  // y-marginals: for each coordinate i and grid label t
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index t = 0; t < n; ++t) {
      LpProblem::Row row;
      row.sense = LpProblem::Sense::Eq;
      row.rhs = inv_n;
      for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index cell = 0; cell < n_cells; ++cell) {
          Eigen::Index ki = (cell / strides[static_cast<std::size_t>(i)]) % n;
          if (ki == t) row.coeffs.emplace_back(static_cast<int>(j * n_cells + cell), 1.0);
        }
      }
      p.add_row(std::move(row));
    }
  }
  // transport budget: sum pi c(x^j, y) <= rho
  {
    LpProblem::Row row;
    row.sense = LpProblem::Sense::Le;
    row.rhs = inst.rho;
    Vector xj(d);
    for (Eigen::Index j = 0; j < n; ++j) {
      xj = inst.points.row(j).transpose();
      for (Eigen::Index cell = 0; cell < n_cells; ++cell) {
        Eigen::Index rem = cell;
        for (Eigen::Index i = 0; i < d; ++i) {
          Eigen::Index ki = rem / strides[static_cast<std::size_t>(i)];
          rem %= strides[static_cast<std::size_t>(i)];
          y(i) = inst.points(ki, i);
        }
        double c = inst.cost.value(xj, y);
        if (c != 0.0) row.coeffs.emplace_back(static_cast<int>(j * n_cells + cell), c);
      }
    }
    p.add_row(std::move(row));
  }
  return p;
}

double dual_lp_value(const DiscreteInstance& inst) {
  LpSolution sol = solve_lp(build_dual_lp(inst));
  if (sol.status != LpStatus::Optimal)
    throw numerical_error("dual LP did not reach a certified optimum");
  return sol.value;
}

double primal_lp_value(const DiscreteInstance& inst) {
  LpSolution sol = solve_lp(build_primal_lp(inst));
  if (sol.status != LpStatus::Optimal)
    throw numerical_error("primal LP did not reach a certified optimum");
  return -sol.value;
}

}  // namespace robustagg::lp
