#include "hypercurv/simplex.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "hypercurv/errors.hpp"

namespace hypercurv::lp {

Problem::Problem(std::vector<double> rhs) : rhs_(std::move(rhs)) {}

std::size_t Problem::add_column(double cost,
                                std::span<const std::pair<std::uint32_t, double>> entries) {
    for (const auto& [r, v] : entries) {
        if (r >= rhs_.size()) throw InvalidArgument("lp column references a missing row");
        row_.push_back(r);
        value_.push_back(v);
    }
    cost_.push_back(cost);
    start_.push_back(row_.size());
    return cost_.size() - 1;
}

std::span<const std::uint32_t> Problem::col_rows(std::size_t j) const noexcept {
    return {row_.data() + start_[j], start_[j + 1] - start_[j]};
}

std::span<const double> Problem::col_values(std::size_t j) const noexcept {
    return {value_.data() + start_[j], start_[j + 1] - start_[j]};
}

namespace {

class RevisedSimplex {
public:
    RevisedSimplex(const Problem& p, const Options& o)
        : p_(p),
          opt_(o),
          m_(p.rows()),
          n_(p.cols()),
          sign_(m_, 1.0),
          b_(m_),
          basis_(m_),
          basic_(n_ + m_, false),
          binv_(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(m_))),
          xb_(m_) {
        for (std::size_t r = 0; r < m_; ++r) {
            if (p.rhs()[r] < 0.0) sign_[r] = -1.0;
            b_(static_cast<Eigen::Index>(r)) = sign_[r] * p.rhs()[r];
            basis_[r] = n_ + r;
            basic_[n_ + r] = true;
        }
        xb_ = b_;
    }

    Solution run() {
        Solution sol;
        Status s = iterate(/*phase_one=*/true, sol.iterations);
        if (s != Status::Optimal) {
            sol.status = s;
            return sol;
        }
        double infeasibility = 0.0;
        for (std::size_t i = 0; i < m_; ++i)
            if (is_artificial(basis_[i])) infeasibility += xb_(static_cast<Eigen::Index>(i));
        const double scale = 1.0 + b_.lpNorm<1>();
        if (infeasibility > opt_.feasibility_tol * scale) {
            sol.status = Status::Infeasible;
            return sol;
        }
        s = iterate(/*phase_one=*/false, sol.iterations);
        sol.status = s;
        if (s != Status::Optimal) return sol;

        refactor();
        sol.x.assign(n_, 0.0);
        for (std::size_t i = 0; i < m_; ++i)
            if (!is_artificial(basis_[i]))
                sol.x[basis_[i]] = std::max(0.0, xb_(static_cast<Eigen::Index>(i)));
        sol.objective = 0.0;
        for (std::size_t j = 0; j < n_; ++j) sol.objective += p_.cost()[j] * sol.x[j];

        const Eigen::VectorXd y = duals(false);
        sol.duals.resize(m_);
        for (std::size_t r = 0; r < m_; ++r) sol.duals[r] = sign_[r] * y(static_cast<Eigen::Index>(r));
        return sol;
    }

private:
    bool is_artificial(std::size_t var) const noexcept { return var >= n_; }

    double cost_of(std::size_t var, bool phase_one) const noexcept {
        if (phase_one) return is_artificial(var) ? 1.0 : 0.0;
        return is_artificial(var) ? 0.0 : p_.cost()[var];
    }

    Eigen::VectorXd duals(bool phase_one) const {
        Eigen::VectorXd cb(static_cast<Eigen::Index>(m_));
        for (std::size_t i = 0; i < m_; ++i) cb(static_cast<Eigen::Index>(i)) = cost_of(basis_[i], phase_one);
        return binv_.transpose() * cb;
    }

    double reduced_cost(std::size_t j, const Eigen::VectorXd& y, bool phase_one) const {
        double d = cost_of(j, phase_one);
        const auto rows = p_.col_rows(j);
        const auto vals = p_.col_values(j);
        for (std::size_t k = 0; k < rows.size(); ++k) d -= y(rows[k]) * sign_[rows[k]] * vals[k];
        return d;
    }

    Eigen::VectorXd direction(std::size_t j) const {
        Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_));
        const auto rows = p_.col_rows(j);
        const auto vals = p_.col_values(j);
        for (std::size_t k = 0; k < rows.size(); ++k) w += (sign_[rows[k]] * vals[k]) * binv_.col(rows[k]);
        return w;
    }

    void refactor() {
        Eigen::MatrixXd basis_matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(m_));
        for (std::size_t i = 0; i < m_; ++i) {
            const auto c = static_cast<Eigen::Index>(i);
            if (is_artificial(basis_[i])) {
                basis_matrix(static_cast<Eigen::Index>(basis_[i] - n_), c) = 1.0;
                continue;
            }
            const auto rows = p_.col_rows(basis_[i]);
            const auto vals = p_.col_values(basis_[i]);
            for (std::size_t k = 0; k < rows.size(); ++k) basis_matrix(rows[k], c) = sign_[rows[k]] * vals[k];
        }
        binv_ = basis_matrix.partialPivLu().inverse();
        xb_ = binv_ * b_;
        for (Eigen::Index i = 0; i < xb_.size(); ++i)
            if (xb_(i) < 0.0 && xb_(i) > -opt_.feasibility_tol) xb_(i) = 0.0;
    }

    // Entering column or n_ when the current basis is optimal.
    std::size_t price(const Eigen::VectorXd& y, bool phase_one, bool bland) const {
        std::size_t best = n_;
        double best_d = -opt_.optimality_tol;
        for (std::size_t j = 0; j < n_; ++j) {
            if (basic_[j]) continue;
            const double d = reduced_cost(j, y, phase_one);
            if (d < best_d) {
                best = j;
                if (bland) return best;
                best_d = d;
            }
        }
        return best;
    }

    Status iterate(bool phase_one, std::size_t& iterations) {
        std::size_t since_refactor = 0;
        std::size_t degenerate = 0;
        bool bland = opt_.rule == PivotRule::Bland;
        while (true) {
            if (iterations >= opt_.max_iterations) return Status::IterationLimit;
            const Eigen::VectorXd y = duals(phase_one);
            const std::size_t enter = price(y, phase_one, bland);
            if (enter == n_) return Status::Optimal;

            const Eigen::VectorXd w = direction(enter);
            std::size_t leave = m_;
            double best_ratio = std::numeric_limits<double>::infinity();
            bool best_artificial = false;
            for (std::size_t i = 0; i < m_; ++i) {
                const double wi = w(static_cast<Eigen::Index>(i));
                const bool art = is_artificial(basis_[i]);
                double ratio;
                if (!phase_one && art && std::abs(wi) > opt_.pivot_tol) {
                    // Artificial parked at zero on a redundant row: pivot it out
                    // before it can move off zero.
                    ratio = 0.0;
                } else if (wi > opt_.pivot_tol) {
                    ratio = std::max(0.0, xb_(static_cast<Eigen::Index>(i))) / wi;
                } else {
                    continue;
                }
                bool take = false;
                if (leave == m_ || ratio < best_ratio - 1e-13) {
                    take = true;
                } else if (ratio <= best_ratio + 1e-13) {
                    if (art != best_artificial) take = art;
                    else take = basis_[i] < basis_[leave];
                }
                if (take) {
                    leave = i;
                    best_ratio = ratio;
                    best_artificial = art;
                }
            }
            if (leave == m_) return Status::Unbounded;

            pivot(enter, leave, w, best_ratio);
            ++iterations;

            if (best_ratio <= opt_.feasibility_tol) {
                if (++degenerate >= opt_.degenerate_run) bland = true;
            } else {
                degenerate = 0;
                bland = opt_.rule == PivotRule::Bland;
            }
            if (++since_refactor >= opt_.refactor_every) {
                refactor();
                since_refactor = 0;
            }
        }
    }

    void pivot(std::size_t enter, std::size_t leave, const Eigen::VectorXd& w, double theta) {
        const auto r = static_cast<Eigen::Index>(leave);
        const double wr = w(r);
        for (Eigen::Index i = 0; i < xb_.size(); ++i) xb_(i) -= theta * w(i);
        xb_(r) = theta;

        Eigen::RowVectorXd pivot_row = binv_.row(r) / wr;
        Eigen::VectorXd wm = w;
        wm(r) = 0.0;
        binv_.noalias() -= wm * pivot_row;
        binv_.row(r) = pivot_row;

        basic_[basis_[leave]] = false;
        basis_[leave] = enter;
        basic_[enter] = true;
    }

    const Problem& p_;
    Options opt_;
    std::size_t m_;
    std::size_t n_;
    std::vector<double> sign_;
    Eigen::VectorXd b_;
    std::vector<std::size_t> basis_;
    std::vector<bool> basic_;
    Eigen::MatrixXd binv_;
    Eigen::VectorXd xb_;
};

}  // namespace

Solution solve(const Problem& problem, const Options& options) {
    if (problem.rows() == 0) {
        Solution s;
        s.status = Status::Optimal;
        s.x.assign(problem.cols(), 0.0);
        return s;
    }
    return RevisedSimplex(problem, options).run();
}

}  // namespace hypercurv::lp
