#include "hypercurv/transport_exact.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "hypercurv/errors.hpp"

namespace hypercurv {

namespace {

struct TupleHash {
    std::size_t operator()(const std::vector<VertexId>& t) const noexcept {
        std::size_t h = 0x9e3779b97f4a7c15ULL;
        for (VertexId v : t) h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h;
    }
};

// c(x) memoized on the sorted tuple.
class CostCache {
public:
    explicit CostCache(const DistanceMatrix& dm) : dm_(dm) {}

    std::uint32_t operator()(std::span<const VertexId> xs) {
        key_.assign(xs.begin(), xs.end());
        std::sort(key_.begin(), key_.end());
        auto it = cache_.find(key_);
        if (it != cache_.end()) return it->second;
        const auto value = cost_c(dm_, key_).value;
        cache_.emplace(key_, value);
        return value;
    }

private:
    const DistanceMatrix& dm_;
    std::vector<VertexId> key_;
    std::unordered_map<std::vector<VertexId>, std::uint32_t, TupleHash> cache_;
};

void require_connected(const DistanceMatrix& dm, std::span<const Distribution* const> dists) {
    const VertexId anchor = dists.front()->support.front();
    for (const Distribution* d : dists)
        for (VertexId v : d->support) {
            if (v >= dm.size()) throw IndexError("distribution support outside the vertex set");
            if (!dm.finite(anchor, v))
                throw DisconnectedError("marginal supports lie in different components");
        }
}

void require_masses(std::span<const Distribution* const> dists) {
    for (const Distribution* d : dists) {
        if (d->support.empty()) throw MarginalError("empty distribution");
        if (d->support.size() != d->mass.size()) throw MarginalError("support/mass length mismatch");
        for (double m : d->mass)
            if (!(m >= 0.0)) throw MarginalError("negative or NaN mass");
    }
    const double reference = dists.front()->total();
    for (const Distribution* d : dists)
        if (std::abs(d->total() - reference) > kMarginalTol)
            throw MarginalError("marginal totals differ by more than 1e-9");
}

std::vector<const Distribution*> as_dists(std::span<const WalkDistribution> walks) {
    std::vector<const Distribution*> out;
    out.reserve(walks.size());
    for (const auto& w : walks) out.push_back(&w.mass);
    return out;
}

lp::Solution solve_or_throw(const lp::Problem& problem, const lp::Options& options) {
    lp::Solution sol = lp::solve(problem, options);
    switch (sol.status) {
        case lp::Status::Optimal: return sol;
        case lp::Status::Infeasible: throw MarginalError("transport LP infeasible");
        case lp::Status::Unbounded: throw LpError("transport LP unbounded");
        case lp::Status::IterationLimit: throw LpError("simplex iteration limit reached");
    }
    throw LpError("unknown simplex status");
}

// Visits every tuple of prod_k supp(m_k) in odometer order (last axis fastest);
// `visit` receives the per-axis support indices.
template <class Visit>
void for_each_tuple(std::span<const Distribution* const> dists, Visit&& visit) {
    const std::size_t n = dists.size();
    std::vector<std::size_t> idx(n, 0);
    while (true) {
        visit(std::span<const std::size_t>(idx));
        std::size_t axis = n;
        while (axis > 0) {
            --axis;
            if (++idx[axis] < dists[axis]->size()) break;
            idx[axis] = 0;
            if (axis == 0) return;
        }
    }
}

}  // namespace

std::vector<double> TransportPlan::marginal(std::size_t axis, std::size_t n) const {
    std::vector<double> out(n, 0.0);
    for (std::size_t k = 0; k < size(); ++k) out[tuple(k)[axis]] += mass[k];
    return out;
}

double DualPotentials::value(std::span<const WalkDistribution> walks) const {
    double total = 0.0;
    for (std::size_t k = 0; k < walks.size(); ++k) {
        const auto& d = walks[k].mass;
        for (std::size_t s = 0; s < d.size(); ++s) total += f[k][d.support[s]] * d.mass[s];
    }
    return total;
}

PairTransport w1_pair(const DistanceMatrix& dm, const Distribution& mu, const Distribution& nu,
                      const lp::Options& lp) {
    const Distribution* dists[] = {&mu, &nu};
    require_masses(dists);
    require_connected(dm, dists);

    const std::size_t rows = mu.size() + nu.size();
    std::vector<double> rhs(rows);
    std::copy(mu.mass.begin(), mu.mass.end(), rhs.begin());
    std::copy(nu.mass.begin(), nu.mass.end(), rhs.begin() + static_cast<std::ptrdiff_t>(mu.size()));
    lp::Problem problem(std::move(rhs));
    for (std::size_t a = 0; a < mu.size(); ++a)
        for (std::size_t b = 0; b < nu.size(); ++b) {
            const std::pair<std::uint32_t, double> entries[] = {
                {static_cast<std::uint32_t>(a), 1.0},
                {static_cast<std::uint32_t>(mu.size() + b), 1.0}};
            problem.add_column(dm.length(mu.support[a], nu.support[b]), entries);
        }
    const lp::Solution sol = solve_or_throw(problem, lp);

    PairTransport out;
    out.iterations = sol.iterations;
    out.plan.arity = 2;
    for (std::size_t a = 0; a < mu.size(); ++a)
        for (std::size_t b = 0; b < nu.size(); ++b) {
            const double m = sol.x[a * nu.size() + b];
            if (m <= 0.0) continue;
            out.plan.tuples.push_back(mu.support[a]);
            out.plan.tuples.push_back(nu.support[b]);
            out.plan.mass.push_back(m);
            out.plan.objective += m * dm.length(mu.support[a], nu.support[b]);
        }
    out.value = sol.objective;
    return out;
}

double joint_support_size(std::span<const WalkDistribution> walks) {
    double total = 1.0;
    for (const auto& w : walks) total *= static_cast<double>(w.mass.size());
    return total;
}

MmotResult mmot(const DistanceMatrix& dm, std::span<const WalkDistribution> walks,
                const MmotOptions& opts) {
    if (walks.size() < 2) throw InvalidArgument("multi-marginal transport needs at least two marginals");
    const auto dists = as_dists(walks);
    require_masses(dists);
    require_connected(dm, dists);
    const double tuples = joint_support_size(walks);
    if (tuples > opts.support_cap) throw SupportCapExceeded(tuples, opts.support_cap);

    const std::size_t n = walks.size();
    std::vector<std::size_t> offset(n + 1, 0);
    for (std::size_t k = 0; k < n; ++k) offset[k + 1] = offset[k] + dists[k]->size();
    std::vector<double> rhs(offset[n]);
    for (std::size_t k = 0; k < n; ++k)
        std::copy(dists[k]->mass.begin(), dists[k]->mass.end(),
                  rhs.begin() + static_cast<std::ptrdiff_t>(offset[k]));
    lp::Problem problem(std::move(rhs));

    CostCache cost(dm);
    std::vector<VertexId> tuple(n);
    std::vector<VertexId> all_tuples;
    std::vector<double> tuple_cost;
    all_tuples.reserve(static_cast<std::size_t>(tuples) * n);
    tuple_cost.reserve(static_cast<std::size_t>(tuples));
    std::vector<std::pair<std::uint32_t, double>> entries(n);
    for_each_tuple(dists, [&](std::span<const std::size_t> idx) {
        for (std::size_t k = 0; k < n; ++k) {
            tuple[k] = dists[k]->support[idx[k]];
            entries[k] = {static_cast<std::uint32_t>(offset[k] + idx[k]), 1.0};
        }
        const double c = cost(tuple);
        problem.add_column(c, entries);
        all_tuples.insert(all_tuples.end(), tuple.begin(), tuple.end());
        tuple_cost.push_back(c);
    });

    const lp::Solution sol = solve_or_throw(problem, opts.lp);

    MmotResult out;
    out.iterations = sol.iterations;
    out.tuples = tuple_cost.size();
    out.value = sol.objective;
    out.plan.arity = n;
    for (std::size_t j = 0; j < tuple_cost.size(); ++j) {
        if (sol.x[j] <= 0.0) continue;
        out.plan.tuples.insert(out.plan.tuples.end(), all_tuples.begin() + static_cast<std::ptrdiff_t>(j * n),
                               all_tuples.begin() + static_cast<std::ptrdiff_t>((j + 1) * n));
        out.plan.mass.push_back(sol.x[j]);
        out.plan.objective += sol.x[j] * tuple_cost[j];
    }

    out.duals.f.assign(n, std::vector<double>(dm.size(), 0.0));
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t s = 0; s < dists[k]->size(); ++s)
            out.duals.f[k][dists[k]->support[s]] = sol.duals[offset[k] + s];
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < tuple_cost.size(); ++j) {
        double lhs = 0.0;
        for (std::size_t k = 0; k < n; ++k) lhs += out.duals.f[k][all_tuples[j * n + k]];
        worst = std::max(worst, lhs - tuple_cost[j]);
    }
    out.duals.max_violation = worst;
    out.duals.certified = worst <= kMarginalTol;
    return out;
}

BarycenterSolution barycenter(const DistanceMatrix& dm, std::span<const WalkDistribution> walks,
                              const lp::Options& lp) {
    if (walks.size() < 2) throw InvalidArgument("barycenter needs at least two marginals");
    const auto dists = as_dists(walks);
    require_masses(dists);
    require_connected(dm, dists);
    const std::size_t n = walks.size();

    // Candidate barycenter support. A minimizer z of sum_i d(x_i, z) over a
    // tuple drawn from the union S of supports satisfies n * d(z, S) <=
    // (n - 1) * diam(S), so d(z, S) < diam(S); nothing else can carry mass.
    std::vector<VertexId> pool;
    for (const Distribution* d : dists) pool.insert(pool.end(), d->support.begin(), d->support.end());
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    std::uint32_t diam = 0;
    for (VertexId a : pool)
        for (VertexId b : pool) diam = std::max<std::uint32_t>(diam, dm(a, b));
    std::vector<VertexId> candidates;
    for (VertexId z = 0; z < dm.size(); ++z) {
        if (!dm.finite(pool.front(), z)) continue;
        std::uint32_t reach = DistanceMatrix::kInfinite;
        for (VertexId s : pool) reach = std::min<std::uint32_t>(reach, dm(z, s));
        if (reach == 0 || reach < diam) candidates.push_back(z);
    }
    const std::size_t nc = candidates.size();

    // Rows: [source rows of marginal k] then [target rows of marginal k] for
    // each k, then the normalization row of nu.
    std::vector<std::size_t> source_off(n), target_off(n);
    std::size_t rows = 0;
    for (std::size_t k = 0; k < n; ++k) {
        source_off[k] = rows;
        rows += dists[k]->size();
        target_off[k] = rows;
        rows += nc;
    }
    const std::size_t norm_row = rows++;
    std::vector<double> rhs(rows, 0.0);
    for (std::size_t k = 0; k < n; ++k)
        std::copy(dists[k]->mass.begin(), dists[k]->mass.end(),
                  rhs.begin() + static_cast<std::ptrdiff_t>(source_off[k]));
    rhs[norm_row] = dists.front()->total();
    lp::Problem problem(std::move(rhs));

    // nu columns first.
    for (std::size_t c = 0; c < nc; ++c) {
        std::vector<std::pair<std::uint32_t, double>> entries;
        for (std::size_t k = 0; k < n; ++k) entries.emplace_back(static_cast<std::uint32_t>(target_off[k] + c), -1.0);
        entries.emplace_back(static_cast<std::uint32_t>(norm_row), 1.0);
        problem.add_column(0.0, entries);
    }
    struct Coupling {
        std::size_t k, a, c;
    };
    std::vector<Coupling> couplings;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t a = 0; a < dists[k]->size(); ++a)
            for (std::size_t c = 0; c < nc; ++c) {
                const VertexId r = dists[k]->support[a];
                const std::pair<std::uint32_t, double> entries[] = {
                    {static_cast<std::uint32_t>(source_off[k] + a), 1.0},
                    {static_cast<std::uint32_t>(target_off[k] + c), 1.0}};
                problem.add_column(dm.length(r, candidates[c]), entries);
                couplings.push_back({k, a, c});
            }

    const lp::Solution sol = solve_or_throw(problem, lp);

    BarycenterSolution out;
    out.iterations = sol.iterations;
    out.objective = sol.objective;
    std::vector<double> dense(dm.size(), 0.0);
    for (std::size_t c = 0; c < nc; ++c) dense[candidates[c]] = sol.x[c];
    out.nu = Distribution::from_dense(dense);
    out.plans.assign(n, TransportPlan{});
    for (auto& p : out.plans) p.arity = 2;
    for (std::size_t j = 0; j < couplings.size(); ++j) {
        const double m = sol.x[nc + j];
        if (m <= 0.0) continue;
        const auto& cp = couplings[j];
        const VertexId r = dists[cp.k]->support[cp.a];
        const VertexId z = candidates[cp.c];
        auto& plan = out.plans[cp.k];
        plan.tuples.push_back(r);
        plan.tuples.push_back(z);
        plan.mass.push_back(m);
        plan.objective += m * dm.length(r, z);
    }
    return out;
}

DualBound dual_lower_bound(const DistanceMatrix& dm, std::span<const WalkDistribution> walks,
                           std::size_t u, std::size_t v) {
    if (u >= walks.size() || v >= walks.size())
        throw IndexError("dual_lower_bound index outside the hyperedge");
    if (u == v) throw IndexError("dual_lower_bound needs two distinct members");
    const auto& mu = walks[u].mass;
    const auto& mv = walks[v].mass;

    // f = 2 on N(u) \ N(v), 1 elsewhere; f is 1-Lipschitz for the hop metric,
    // so (f, -f) is a feasible Kantorovich pair for marginals u and v and the
    // remaining potentials vanish.
    const std::size_t nv = dm.size();
    std::vector<double> f(nv, 1.0);
    for (VertexId r : mu.support)
        if (mv.at(r) == 0.0) f[r] = 2.0;

    DualBound out;
    out.potentials.f.assign(walks.size(), std::vector<double>(nv, 0.0));
    out.potentials.f[u] = f;
    for (VertexId r = 0; r < nv; ++r) out.potentials.f[v][r] = -f[r];

    double shared = 0.0;
    for (std::size_t s = 0; s < mu.size(); ++s)
        if (mv.at(mu.support[s]) > 0.0) shared += mu.mass[s];
    out.value = 1.0 - shared;

    // f(r) - f(s) <= d(r, s) for all pairs implies the n-ary constraint via
    // d(x_u, x_v) <= c(x).
    double worst = -std::numeric_limits<double>::infinity();
    for (VertexId r = 0; r < nv; ++r)
        for (VertexId s = 0; s < nv; ++s) worst = std::max(worst, f[r] - f[s] - dm.length(r, s));
    out.potentials.max_violation = worst;
    out.potentials.certified = worst <= kMarginalTol;
    return out;
}

void certify(DualPotentials& potentials, const DistanceMatrix& dm,
             std::span<const WalkDistribution> walks, double support_cap) {
    const double tuples = joint_support_size(walks);
    if (tuples > support_cap) throw SupportCapExceeded(tuples, support_cap);
    const auto dists = as_dists(walks);
    require_connected(dm, dists);
    const std::size_t n = walks.size();
    CostCache cost(dm);
    std::vector<VertexId> tuple(n);
    double worst = -std::numeric_limits<double>::infinity();
    for_each_tuple(dists, [&](std::span<const std::size_t> idx) {
        double lhs = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            tuple[k] = dists[k]->support[idx[k]];
            lhs += potentials.f[k][tuple[k]];
        }
        worst = std::max(worst, lhs - static_cast<double>(cost(tuple)));
    });
    potentials.max_violation = worst;
    potentials.certified = worst <= kMarginalTol;
}

}  // namespace hypercurv
