#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace hypercurv::lp {

// min c^T x  subject to  A x = b, x >= 0, with A stored column-wise.
class Problem {
public:
    explicit Problem(std::vector<double> rhs);

    // Appends a column; entries are (row, coefficient) with distinct rows.
    // Returns the column index.
    std::size_t add_column(double cost, std::span<const std::pair<std::uint32_t, double>> entries);

    std::size_t rows() const noexcept { return rhs_.size(); }
    std::size_t cols() const noexcept { return cost_.size(); }
    const std::vector<double>& rhs() const noexcept { return rhs_; }
    const std::vector<double>& cost() const noexcept { return cost_; }

    // Column j as parallel (row, value) ranges.
    std::span<const std::uint32_t> col_rows(std::size_t j) const noexcept;
    std::span<const double> col_values(std::size_t j) const noexcept;

private:
    std::vector<double> rhs_;
    std::vector<double> cost_;
    std::vector<std::size_t> start_{0};
    std::vector<std::uint32_t> row_;
    std::vector<double> value_;
};

enum class PivotRule {
    // Smallest-index entering and leaving variables; cannot cycle.
    Bland,
    // Most negative reduced cost, falling back to Bland after a run of
    // degenerate pivots.
    DantzigBland,
};

struct Options {
    PivotRule rule = PivotRule::Bland;
    double feasibility_tol = 1e-9;
    double optimality_tol = 1e-10;
    double pivot_tol = 1e-11;
    std::size_t refactor_every = 64;
    std::size_t max_iterations = 5'000'000;
    // Degenerate pivots tolerated under Dantzig pricing before switching.
    std::size_t degenerate_run = 50;
};

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

struct Solution {
    Status status = Status::IterationLimit;
    double objective = 0.0;
    std::vector<double> x;      // one entry per column
    std::vector<double> duals;  // one entry per row, y^T A <= c at optimum
    std::size_t iterations = 0;
};

// Two-phase revised simplex with an explicit dense basis inverse refreshed by
// LU refactorization. Redundant equality rows are tolerated: their
// artificial variables stay basic at zero and are never allowed to grow.
Solution solve(const Problem& problem, const Options& options = {});

}  // namespace hypercurv::lp
