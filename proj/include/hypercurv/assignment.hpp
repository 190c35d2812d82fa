#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace hypercurv {

struct Assignment {
    std::vector<std::size_t> row_to_col;
    double cost = 0.0;
};

// Minimum-cost perfect matching on a square cost matrix (shortest augmenting
// paths with potentials, O(k^3)).
Assignment solve_assignment(const Eigen::MatrixXd& cost);

}  // namespace hypercurv
