#include "hypercurv/assignment.hpp"

#include <limits>

#include "hypercurv/errors.hpp"

namespace hypercurv {

Assignment solve_assignment(const Eigen::MatrixXd& cost) {
    const auto k = static_cast<std::size_t>(cost.rows());
    if (cost.cols() != cost.rows()) throw InvalidArgument("assignment cost matrix must be square");
    if (!cost.allFinite()) throw InvalidArgument("assignment cost matrix must be finite");

    constexpr double inf = std::numeric_limits<double>::infinity();
    // 1-based arrays; index 0 is the virtual source column.
    std::vector<double> u(k + 1, 0.0), v(k + 1, 0.0);
    std::vector<std::size_t> match(k + 1, 0), way(k + 1, 0);

    for (std::size_t row = 1; row <= k; ++row) {
        match[0] = row;
        std::size_t col0 = 0;
        std::vector<double> minv(k + 1, inf);
        std::vector<bool> used(k + 1, false);
        do {
            used[col0] = true;
            const std::size_t r0 = match[col0];
            double delta = inf;
            std::size_t col1 = 0;
            for (std::size_t j = 1; j <= k; ++j) {
                if (used[j]) continue;
                const double cur = cost(static_cast<Eigen::Index>(r0 - 1), static_cast<Eigen::Index>(j - 1)) -
                                   u[r0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = col0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    col1 = j;
                }
            }
            for (std::size_t j = 0; j <= k; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            col0 = col1;
        } while (match[col0] != 0);
        do {
            const std::size_t col1 = way[col0];
            match[col0] = match[col1];
            col0 = col1;
        } while (col0 != 0);
    }

    Assignment out;
    out.row_to_col.assign(k, 0);
    for (std::size_t j = 1; j <= k; ++j) out.row_to_col[match[j] - 1] = j - 1;
    for (std::size_t i = 0; i < k; ++i)
        out.cost += cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(out.row_to_col[i]));
    return out;
}

}  // namespace hypercurv
