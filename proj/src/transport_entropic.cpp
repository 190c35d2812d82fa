#include "hypercurv/transport_entropic.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "hypercurv/errors.hpp"

namespace hypercurv {

namespace {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_distribution(const Distribution& d) {
    if (d.support.empty()) throw MarginalError("empty distribution");
    for (double m : d.mass)
        if (!(m > 0.0)) throw MarginalError("distribution masses must be positive");
}

void check_connected(const DistanceMatrix& dm, std::span<const VertexId> a,
                     std::span<const VertexId> b) {
    if (!same_component(dm, a, b)) throw DisconnectedError("supports lie in different components");
}

// -C / eps with -inf for unreachable pairs; rejects kernels with an empty row
// or column (the representable floor of eps for this metric).
Matrix log_kernel(const DistanceMatrix& dm, std::span<const VertexId> rows,
                  std::span<const VertexId> cols, double eps) {
    Matrix lk(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = 0; b < cols.size(); ++b) {
            const double v = -dm.length(rows[a], cols[b]) / eps;
            lk(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = std::isfinite(v) ? v : kNegInf;
        }
    for (Eigen::Index a = 0; a < lk.rows(); ++a)
        if (lk.row(a).maxCoeff() == kNegInf)
            throw EpsilonFloorError("every kernel entry of a row underflows at epsilon " + std::to_string(eps));
    for (Eigen::Index b = 0; b < lk.cols(); ++b)
        if (lk.col(b).maxCoeff() == kNegInf)
            throw EpsilonFloorError("every kernel entry of a column underflows at epsilon " + std::to_string(eps));
    return lk;
}

// exp of the log kernel for the plain domain. Eigen's vectorized exp clamps
// large negative arguments instead of underflowing, so use std::exp and
// reject rows or columns that vanish in double precision.
Matrix plain_kernel(const Matrix& lk) {
    const Matrix k = lk.unaryExpr([](double x) { return std::exp(x); });
    for (Eigen::Index a = 0; a < k.rows(); ++a)
        if (k.row(a).maxCoeff() == 0.0)
            throw EpsilonFloorError("a kernel row underflows to zero; epsilon below the plain-domain floor");
    for (Eigen::Index b = 0; b < k.cols(); ++b)
        if (k.col(b).maxCoeff() == 0.0)
            throw EpsilonFloorError("a kernel column underflows to zero; epsilon below the plain-domain floor");
    return k;
}

double lse(const Eigen::Ref<const Vector>& v) {
    const double m = v.maxCoeff();
    if (m == kNegInf) return kNegInf;
    return m + std::log((v.array() - m).exp().sum());
}

// log of row sums of exp(lk + f 1^T + 1 g^T).
Vector row_lse(const Matrix& lk, const Vector& f, const Vector& g) {
    Vector out(lk.rows());
    for (Eigen::Index a = 0; a < lk.rows(); ++a) out(a) = f(a) + lse(lk.row(a).transpose() + g);
    return out;
}

Vector col_lse(const Matrix& lk, const Vector& f, const Vector& g) {
    Vector out(lk.cols());
    for (Eigen::Index b = 0; b < lk.cols(); ++b) out(b) = g(b) + lse(lk.col(b) + f);
    return out;
}

Vector to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

double entropy_term(double p) { return p > 0.0 ? -p * std::log(p) : 0.0; }

// Plan entries pi_ab = exp(lk_ab + f_a + g_b) accumulated into summaries.
struct PlanSummary {
    double transport = 0.0;
    double entropy = 0.0;
};

PlanSummary summarize(const DistanceMatrix& dm, std::span<const VertexId> rows,
                      std::span<const VertexId> cols, const Matrix& plan) {
    PlanSummary s;
    for (Eigen::Index a = 0; a < plan.rows(); ++a)
        for (Eigen::Index b = 0; b < plan.cols(); ++b) {
            const double p = plan(a, b);
            if (p <= 0.0) continue;
            s.transport += p * dm.length(rows[static_cast<std::size_t>(a)], cols[static_cast<std::size_t>(b)]);
            s.entropy += entropy_term(p);
        }
    return s;
}

Matrix plan_from_logs(const Matrix& lk, const Vector& f, const Vector& g) {
    Matrix p(lk.rows(), lk.cols());
    for (Eigen::Index a = 0; a < lk.rows(); ++a)
        for (Eigen::Index b = 0; b < lk.cols(); ++b) {
            const double l = lk(a, b);
            p(a, b) = l == kNegInf ? 0.0 : std::exp(l + f(a) + g(b));
        }
    return p;
}

// Damped Newton ascent on the concave dual of the scaling problems,
//   Phi = sum_k <a_k, f_k> [+ <b, g_0>] - sum_k sum_ab exp(lk_ab + f_k(a) + g_k(b)),
// where either the single coupling has fixed column marginal b, or the
// couplings share a free column marginal and sum_k g_k = 0 (the last g is
// eliminated). Returns false when no ascent step can be taken.
class DualNewton {
public:
    DualNewton(const std::vector<Matrix>& lk, const std::vector<Vector>& a, const Vector* fixed_cols)
        : lk_(lk), a_(a), b_(fixed_cols), n_(lk.size()), m_(lk.front().cols()) {
        offsets_.push_back(0);
        for (const auto& k : lk_) offsets_.push_back(offsets_.back() + k.rows());
        const Eigen::Index col_blocks = b_ ? 1 : static_cast<Eigen::Index>(n_) - 1;
        dim_ = offsets_.back() + col_blocks * m_;
    }

    Eigen::Index dim() const { return dim_; }

    Vector pack(const std::vector<Vector>& f, const std::vector<Vector>& g) const {
        Vector x(dim_);
        for (std::size_t k = 0; k < n_; ++k) x.segment(offsets_[k], f[k].size()) = f[k];
        const std::size_t blocks = b_ ? 1 : n_ - 1;
        for (std::size_t j = 0; j < blocks; ++j) x.segment(offsets_.back() + static_cast<Eigen::Index>(j) * m_, m_) = g[j];
        return x;
    }

    void unpack(const Vector& x, std::vector<Vector>& f, std::vector<Vector>& g) const {
        f.resize(n_);
        g.resize(n_);
        for (std::size_t k = 0; k < n_; ++k) f[k] = x.segment(offsets_[k], lk_[k].rows());
        if (b_) {
            g[0] = x.segment(offsets_.back(), m_);
            return;
        }
        g[n_ - 1] = Vector::Zero(m_);
        for (std::size_t j = 0; j + 1 < n_; ++j) {
            g[j] = x.segment(offsets_.back() + static_cast<Eigen::Index>(j) * m_, m_);
            g[n_ - 1] -= g[j];
        }
    }

    // Iterates until the marginal residual is below tol; returns the residual.
    double run(Vector& x, double tol, std::size_t max_steps, std::size_t& steps) {
        Eval cur = evaluate(x);
        for (steps = 0; steps < max_steps && cur.residual > tol; ++steps) {
            const Vector grad = gradient(cur);
            Matrix A = hessian(cur);
            const double mu = 1e-12 * std::max(A.diagonal().maxCoeff(), 1e-300);
            A.diagonal().array() += mu;
            const Vector d = A.ldlt().solve(grad);
            if (!d.allFinite()) break;
            const double slope = grad.dot(d);
            bool moved = false;
            for (double t = 1.0; t > 1e-12; t *= 0.5) {
                const Vector trial = x + t * d;
                Eval next = evaluate(trial);
                if (std::isfinite(next.phi) && next.phi >= cur.phi + 1e-4 * t * slope) {
                    x = trial;
                    cur = std::move(next);
                    moved = true;
                    break;
                }
            }
            if (!moved) break;
        }
        return cur.residual;
    }

private:
    struct Eval {
        std::vector<Matrix> plans;
        std::vector<Vector> rows, cols;
        double phi = 0.0;
        double residual = 0.0;
    };

    Eval evaluate(const Vector& x) const {
        std::vector<Vector> f, g;
        unpack(x, f, g);
        Eval e;
        for (std::size_t k = 0; k < n_; ++k) {
            e.plans.push_back(plan_from_logs(lk_[k], f[k], g[k]));
            e.rows.push_back(e.plans[k].rowwise().sum());
            e.cols.push_back(e.plans[k].colwise().sum().transpose());
            e.phi += a_[k].dot(f[k]) - e.plans[k].sum();
            e.residual = std::max(e.residual, (e.rows[k] - a_[k]).lpNorm<1>());
        }
        if (b_) {
            e.phi += b_->dot(g[0]);
            e.residual = std::max(e.residual, (e.cols[0] - *b_).lpNorm<1>());
        } else {
            Vector mean = Vector::Zero(m_);
            for (const auto& c : e.cols) mean += c / static_cast<double>(n_);
            for (const auto& c : e.cols) e.residual = std::max(e.residual, (c - mean).lpNorm<1>());
        }
        if (!std::isfinite(e.residual)) e.phi = kNegInf;
        return e;
    }

    Vector gradient(const Eval& e) const {
        Vector grad(dim_);
        for (std::size_t k = 0; k < n_; ++k) grad.segment(offsets_[k], lk_[k].rows()) = a_[k] - e.rows[k];
        const Eigen::Index base = offsets_.back();
        if (b_) {
            grad.segment(base, m_) = *b_ - e.cols[0];
        } else {
            for (std::size_t j = 0; j + 1 < n_; ++j)
                grad.segment(base + static_cast<Eigen::Index>(j) * m_, m_) = e.cols[n_ - 1] - e.cols[j];
        }
        return grad;
    }

    // Negated Hessian (positive semidefinite).
    Matrix hessian(const Eval& e) const {
        Matrix A = Matrix::Zero(dim_, dim_);
        for (std::size_t k = 0; k < n_; ++k)
            A.block(offsets_[k], offsets_[k], lk_[k].rows(), lk_[k].rows()).diagonal() = e.rows[k];
        const Eigen::Index base = offsets_.back();
        if (b_) {
            A.block(0, base, lk_[0].rows(), m_) = e.plans[0];
            A.block(base, 0, m_, lk_[0].rows()) = e.plans[0].transpose();
            A.block(base, base, m_, m_).diagonal() = e.cols[0];
            return A;
        }
        const std::size_t last = n_ - 1;
        for (std::size_t j = 0; j < last; ++j) {
            const Eigen::Index hj = base + static_cast<Eigen::Index>(j) * m_;
            A.block(offsets_[j], hj, lk_[j].rows(), m_) = e.plans[j];
            A.block(hj, offsets_[j], m_, lk_[j].rows()) = e.plans[j].transpose();
            A.block(offsets_[last], hj, lk_[last].rows(), m_) = -e.plans[last];
            A.block(hj, offsets_[last], m_, lk_[last].rows()) = -e.plans[last].transpose();
            for (std::size_t i = 0; i < last; ++i) {
                const Eigen::Index hi = base + static_cast<Eigen::Index>(i) * m_;
                A.block(hi, hj, m_, m_).diagonal() += e.cols[last];
            }
            A.block(hj, hj, m_, m_).diagonal() += e.cols[j];
        }
        return A;
    }

    const std::vector<Matrix>& lk_;
    const std::vector<Vector>& a_;
    const Vector* b_;
    std::size_t n_;
    Eigen::Index m_;
    std::vector<Eigen::Index> offsets_;
    Eigen::Index dim_ = 0;
};

}  // namespace

void EntropicConfig::validate() const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InvalidArgument("epsilon must be positive and finite");
    if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
    if (max_iter == 0) throw InvalidArgument("max_iter must be positive");
}

EntropicPair sinkhorn_w1(const DistanceMatrix& dm, const Distribution& mu, const Distribution& nu,
                         const EntropicConfig& cfg) {
    cfg.validate();
    check_distribution(mu);
    check_distribution(nu);
    if (std::abs(mu.total() - nu.total()) > kMarginalTol) throw MarginalError("marginal totals differ");
    check_connected(dm, mu.support, nu.support);

    const Vector a = to_vector(mu.mass);
    const Vector b = to_vector(nu.mass);
    const Matrix lk = log_kernel(dm, mu.support, nu.support, cfg.epsilon);
    const Eigen::Index n = lk.rows(), m = lk.cols();

    EntropicPair out;
    Matrix plan;
    if (cfg.log_domain) {
        // Scaled potentials: f = F / eps, g = G / eps.
        Vector f = Vector::Zero(n), g = Vector::Zero(m);
        const Vector log_a = a.array().log(), log_b = b.array().log();
        double residual = std::numeric_limits<double>::infinity();
        std::size_t it = 0;
        while (it < cfg.max_iter) {
            ++it;
            f = log_a - (row_lse(lk, Vector::Zero(n), g));
            g = log_b - (col_lse(lk, f, Vector::Zero(m)));
            residual = (row_lse(lk, f, g).array().exp() - a.array()).abs().sum();
            if (residual <= cfg.tol) break;
            if (it == cfg.newton_after && n + m <= static_cast<Eigen::Index>(cfg.newton_max_dim)) {
                const std::vector<Matrix> kernels{lk};
                const std::vector<Vector> rows{a};
                DualNewton newton(kernels, rows, &b);
                Vector x = newton.pack({f}, {g});
                std::size_t steps = 0;
                newton.run(x, cfg.tol / 10.0, 200, steps);
                std::vector<Vector> fs, gs;
                newton.unpack(x, fs, gs);
                f = fs[0];
                g = gs[0];
                it += steps;
            }
        }
        if (residual > cfg.tol) throw ConvergenceError("sinkhorn did not converge", residual);
        out.iterations = it;
        out.residual = residual;
        plan = plan_from_logs(lk, f, g);
    } else {
        const Matrix k = plain_kernel(lk);
        Vector u = Vector::Ones(n), v = Vector::Ones(m);
        double residual = std::numeric_limits<double>::infinity();
        std::size_t it = 0;
        while (it < cfg.max_iter) {
            ++it;
            u = a.array() / (k * v).array();
            v = b.array() / (k.transpose() * u).array();
            if (!u.allFinite() || !v.allFinite())
                throw EpsilonFloorError("kernel scaling overflowed; epsilon below the plain-domain floor");
            residual = ((u.asDiagonal() * k * v).array() - a.array()).abs().sum();
            if (residual <= cfg.tol) break;
        }
        if (residual > cfg.tol) throw ConvergenceError("sinkhorn did not converge", residual);
        out.iterations = it;
        out.residual = residual;
        plan = u.asDiagonal() * k * v.asDiagonal();
    }

    const PlanSummary s = summarize(dm, mu.support, nu.support, plan);
    out.transport = s.transport;
    out.regularized = s.transport - cfg.epsilon * s.entropy;
    out.plan.arity = 2;
    for (Eigen::Index i = 0; i < plan.rows(); ++i)
        for (Eigen::Index j = 0; j < plan.cols(); ++j) {
            if (plan(i, j) <= 0.0) continue;
            out.plan.tuples.push_back(mu.support[static_cast<std::size_t>(i)]);
            out.plan.tuples.push_back(nu.support[static_cast<std::size_t>(j)]);
            out.plan.mass.push_back(plan(i, j));
        }
    out.plan.objective = s.transport;
    return out;
}

EntropicBarycenter entropic_barycenter(const DistanceMatrix& dm,
                                       std::span<const WalkDistribution> walks,
                                       const EntropicConfig& cfg) {
    cfg.validate();
    if (walks.size() < 2) throw InvalidArgument("entropic barycenter needs at least two marginals");
    for (const auto& w : walks) check_distribution(w.mass);
    for (const auto& w : walks)
        if (std::abs(w.mass.total() - walks[0].mass.total()) > kMarginalTol)
            throw MarginalError("marginal totals differ");
    for (const auto& w : walks) check_connected(dm, walks[0].mass.support, w.mass.support);

    std::vector<VertexId> cols;
    const VertexId anchor = walks[0].mass.support.front();
    for (VertexId z = 0; z < dm.size(); ++z)
        if (dm.finite(anchor, z)) cols.push_back(z);
    const auto m = static_cast<Eigen::Index>(cols.size());
    const std::size_t n = walks.size();
    const double weight = 1.0 / static_cast<double>(n);

    std::vector<Matrix> lk;
    std::vector<Vector> a;
    for (const auto& w : walks) {
        lk.push_back(log_kernel(dm, w.mass.support, cols, cfg.epsilon));
        a.push_back(to_vector(w.mass.mass));
    }

    EntropicBarycenter out;
    std::vector<Matrix> plans(n);
    double residual = std::numeric_limits<double>::infinity();
    std::size_t it = 0;

    if (cfg.log_domain) {
        std::vector<Vector> f(n), g(n, Vector::Zero(m)), log_q(n);
        std::vector<Vector> log_a(n);
        for (std::size_t k = 0; k < n; ++k) {
            f[k] = Vector::Zero(lk[k].rows());
            log_a[k] = a[k].array().log();
        }
        Vector log_eta(m);
        while (it < cfg.max_iter) {
            ++it;
            log_eta.setZero();
            for (std::size_t k = 0; k < n; ++k) {
                f[k] = log_a[k] - row_lse(lk[k], Vector::Zero(lk[k].rows()), g[k]);
                log_q[k] = col_lse(lk[k], f[k], g[k]);
                log_eta += weight * log_q[k];
            }
            residual = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                g[k] += log_eta - log_q[k];
                residual = std::max(residual,
                                    (row_lse(lk[k], f[k], g[k]).array().exp() - a[k].array()).abs().sum());
            }
            if (residual <= cfg.tol) break;
            if (it == cfg.newton_after) {
                DualNewton newton(lk, a, nullptr);
                if (newton.dim() <= static_cast<Eigen::Index>(cfg.newton_max_dim)) {
                    Vector x = newton.pack(f, g);
                    std::size_t steps = 0;
                    newton.run(x, cfg.tol / 10.0, 200, steps);
                    newton.unpack(x, f, g);
                    it += steps;
                }
            }
        }
        if (residual > cfg.tol) throw ConvergenceError("bregman projections did not converge", residual);
        for (std::size_t k = 0; k < n; ++k) plans[k] = plan_from_logs(lk[k], f[k], g[k]);
    } else {
        std::vector<Matrix> kern(n);
        std::vector<Vector> u(n), v(n, Vector::Ones(m));
        for (std::size_t k = 0; k < n; ++k) kern[k] = plain_kernel(lk[k]);
        Vector eta(m);
        std::vector<Vector> q(n);
        while (it < cfg.max_iter) {
            ++it;
            eta.setOnes();
            for (std::size_t k = 0; k < n; ++k) {
                u[k] = a[k].array() / (kern[k] * v[k]).array();
                q[k] = (kern[k].transpose() * u[k]).array() * v[k].array();
                eta.array() *= q[k].array().pow(weight);
            }
            residual = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                v[k] = v[k].array() * eta.array() / q[k].array();
                if (!u[k].allFinite() || !v[k].allFinite())
                    throw EpsilonFloorError("kernel scaling overflowed; epsilon below the plain-domain floor");
                residual = std::max(residual,
                                    ((u[k].asDiagonal() * kern[k] * v[k]).array() - a[k].array()).abs().sum());
            }
            if (residual <= cfg.tol) break;
        }
        if (residual > cfg.tol) throw ConvergenceError("bregman projections did not converge", residual);
        for (std::size_t k = 0; k < n; ++k) plans[k] = u[k].asDiagonal() * kern[k] * v[k].asDiagonal();
    }

    out.iterations = it;
    out.residual = residual;
    Vector eta = Vector::Zero(m);
    for (std::size_t k = 0; k < n; ++k) {
        const PlanSummary s = summarize(dm, walks[k].mass.support, cols, plans[k]);
        out.transport += s.transport;
        out.regularized += s.transport - cfg.epsilon * s.entropy;
        eta += weight * plans[k].colwise().sum().transpose();
    }
    eta /= eta.sum();
    std::vector<double> dense(dm.size(), 0.0);
    for (Eigen::Index c = 0; c < m; ++c) dense[cols[static_cast<std::size_t>(c)]] = eta(c);
    out.nu = Distribution::from_dense(dense);
    return out;
}

}  // namespace hypercurv
