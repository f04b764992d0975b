#pragma once

#include "robustagg/common.hpp"
#include "robustagg/objectives.hpp"

#include <vector>

namespace robustagg {

/// Exact minimum-cost perfect matching on a dense square cost matrix
/// (Hungarian algorithm with potentials, O(n^3)). Returns the optimal value;
/// col_of_row receives the matched column per row when non-null.
double solve_assignment(const Matrix& cost, std::vector<int>* col_of_row = nullptr);

/// Exact transport distance between two equal-weight empirical clouds
/// (rows are points) under cost c: the optimal assignment value divided by n.
/// Exact mode is limited to n <= 2048; larger clouds must be subsampled by
/// the caller.
double estimate_dc(const Matrix& cloud_a, const Matrix& cloud_b, const CostSpec& c);

}  // namespace robustagg
