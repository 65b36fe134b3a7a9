#include "vcmc/hungarian.hpp"

#include <limits>
#include <stdexcept>

namespace vcmc {

std::vector<int> solve_assignment(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n || n == 0) {
    throw std::invalid_argument("solve_assignment: cost matrix must be square and nonempty");
  }
  const double inf = std::numeric_limits<double>::infinity();

  // 1-indexed potentials formulation; p[j] holds the row matched to column j.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> col_of(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] > 0) col_of[p[j] - 1] = j - 1;
  }
  return col_of;
}

double assignment_cost(const Eigen::MatrixXd& cost, const std::vector<int>& col_of) {
  double total = 0.0;
  for (std::size_t i = 0; i < col_of.size(); ++i) {
    total += cost(static_cast<int>(i), col_of[i]);
  }
  return total;
}

}  // namespace vcmc
