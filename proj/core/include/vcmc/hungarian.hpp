#pragma once

#include <Eigen/Dense>
#include <vector>

namespace vcmc {

/// Exact minimum-cost assignment on a square cost matrix, O(n^3) potentials
/// method. Returns col_of[row] for each row.
std::vector<int> solve_assignment(const Eigen::MatrixXd& cost);

/// Total cost of an assignment under the given matrix.
double assignment_cost(const Eigen::MatrixXd& cost, const std::vector<int>& col_of);

}  // namespace vcmc
