#include "robustagg/assignment.hpp"

#include <limits>

namespace robustagg {

double solve_assignment(const Matrix& cost, std::vector<int>* col_of_row) {
  const auto n = cost.rows();
  require(n >= 1 && cost.cols() == n, "assignment: cost matrix must be square");
  const double inf = std::numeric_limits<double>::infinity();

  // Hungarian algorithm with row/column potentials; indices are 1-based with
  // a virtual 0 slot, p[j] = row matched to column j.
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<Eigen::Index> p(static_cast<std::size_t>(n) + 1, 0);
  std::vector<Eigen::Index> way(static_cast<std::size_t>(n) + 1, 0);

  for (Eigen::Index i = 1; i <= n; ++i) {
    p[0] = i;
    Eigen::Index j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, inf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      Eigen::Index i0 = p[static_cast<std::size_t>(j0)];
      Eigen::Index j1 = 0;
      double delta = inf;
      for (Eigen::Index j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                     v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (Eigen::Index j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      Eigen::Index j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  double total = 0.0;
  if (col_of_row) col_of_row->assign(static_cast<std::size_t>(n), -1);
  for (Eigen::Index j = 1; j <= n; ++j) {
    Eigen::Index i = p[static_cast<std::size_t>(j)];
    total += cost(i - 1, j - 1);
    if (col_of_row) (*col_of_row)[static_cast<std::size_t>(i - 1)] = static_cast<int>(j - 1);
  }
  return total;
}

double estimate_dc(const Matrix& cloud_a, const Matrix& cloud_b, const CostSpec& c) {
  const auto n = cloud_a.rows();
  require(n == cloud_b.rows(), "estimate_dc: clouds must have equal sizes");
  require(cloud_a.cols() == cloud_b.cols(), "estimate_dc: dimension mismatch");
  if (n > 2048)
    throw unsupported_instance(
        "estimate_dc: exact mode handles n <= 2048; subsample the clouds first");
  Matrix cost(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector a = cloud_a.row(i).transpose();
    for (Eigen::Index j = 0; j < n; ++j)
      cost(i, j) = c.value(a, cloud_b.row(j).transpose());
  }
  return solve_assignment(cost) / static_cast<double>(n);
}

}  // namespace robustagg
