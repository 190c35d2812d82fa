#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hypercurv/metric.hpp"
#include "hypercurv/random_walk.hpp"
#include "hypercurv/simplex.hpp"

namespace hypercurv {

// Coupling with `arity` marginals, stored as a flat list of tuples with
// positive mass.
struct TransportPlan {
    std::size_t arity = 0;
    std::vector<VertexId> tuples;  // arity entries per support tuple
    std::vector<double> mass;
    double objective = 0.0;  // transported cost in hops

    std::size_t size() const noexcept { return mass.size(); }
    std::span<const VertexId> tuple(std::size_t k) const noexcept {
        return {tuples.data() + k * arity, arity};
    }
    // Push-forward onto coordinate `axis`, as a dense vector over n vertices.
    std::vector<double> marginal(std::size_t axis, std::size_t n) const;
};

// Kantorovich potentials, one dense array over V per marginal.
struct DualPotentials {
    std::vector<std::vector<double>> f;
    bool certified = false;
    double max_violation = 0.0;  // max over checked tuples of sum_k f_k - c

    // sum_k E_{m_k}[f_k]
    double value(std::span<const WalkDistribution> walks) const;
};

struct PairTransport {
    double value = 0.0;
    TransportPlan plan;
    std::size_t iterations = 0;
};

struct MmotOptions {
    double support_cap = 2e6;
    lp::Options lp{};
};

struct MmotResult {
    double value = 0.0;
    TransportPlan plan;
    DualPotentials duals;
    std::size_t iterations = 0;
    std::size_t tuples = 0;
};

struct BarycenterSolution {
    Distribution nu;
    std::vector<TransportPlan> plans;  // plan i couples m_i (first) with nu
    double objective = 0.0;
    std::size_t iterations = 0;
};

struct DualBound {
    double value = 0.0;
    DualPotentials potentials;
};

inline constexpr double kMarginalTol = 1e-9;

// Exact W1 between two distributions on the vertex set. Throws
// DisconnectedError, MarginalError.
PairTransport w1_pair(const DistanceMatrix& dm, const Distribution& mu, const Distribution& nu,
                      const lp::Options& lp = {});

// Exact multi-marginal transport value with cost c over prod_i supp(m_i).
// Throws SupportCapExceeded when the joint support exceeds the cap.
MmotResult mmot(const DistanceMatrix& dm, std::span<const WalkDistribution> walks,
                const MmotOptions& opts = {});

// Number of tuples mmot would enumerate.
double joint_support_size(std::span<const WalkDistribution> walks);

// Joint LP over a barycenter nu and n pairwise couplings.
BarycenterSolution barycenter(const DistanceMatrix& dm, std::span<const WalkDistribution> walks,
                              const lp::Options& lp = {});

// Feasible potentials from the common-neighbour construction for marginals u
// and v: 1 - m_u(N(u) ∩ N(v)) <= W by weak duality. u, v index into walks.
DualBound dual_lower_bound(const DistanceMatrix& dm, std::span<const WalkDistribution> walks,
                           std::size_t u, std::size_t v);

// Checks sum_k f_k(x_k) <= c(x) on every tuple of the joint support; fills
// certified / max_violation. Throws SupportCapExceeded past the cap.
void certify(DualPotentials& potentials, const DistanceMatrix& dm,
             std::span<const WalkDistribution> walks, double support_cap = 2e6);

}  // namespace hypercurv
