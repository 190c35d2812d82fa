#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hypercurv/metric.hpp"
#include "hypercurv/random_walk.hpp"
#include "hypercurv/transport_exact.hpp"

namespace hypercurv {

struct EntropicConfig {
    double epsilon = 0.05;  // hops
    std::size_t max_iter = 200'000;
    double tol = 1e-9;  // max L1 marginal violation
    bool log_domain = true;
    // Log domain only: after `newton_after` scaling sweeps, take damped Newton
    // steps on the same dual (the scaling iteration alone converges
    // sublinearly for small epsilon). 0 disables.
    std::size_t newton_after = 200;
    std::size_t newton_max_dim = 4000;  // skip Newton above this many dual variables

    void validate() const;
};

struct EntropicPair {
    double transport = 0.0;    // sum pi * d
    double regularized = 0.0;  // transport - epsilon * H(pi)
    TransportPlan plan;
    std::size_t iterations = 0;
    double residual = 0.0;
};

struct EntropicBarycenter {
    double transport = 0.0;    // sum_i <pi_i, d>
    double regularized = 0.0;  // sum_i (<pi_i, d> - epsilon * H(pi_i))
    Distribution nu;           // the shared second marginal, normalized
    std::size_t iterations = 0;
    double residual = 0.0;
};

// Sinkhorn scaling for W_eps(mu, nu). Throws ConvergenceError,
// EpsilonFloorError, DisconnectedError, MarginalError.
EntropicPair sinkhorn_w1(const DistanceMatrix& dm, const Distribution& mu, const Distribution& nu,
                         const EntropicConfig& cfg);

// Iterative Bregman projections: n couplings with prescribed first marginals
// m_i and one shared second marginal over the component's vertices.
EntropicBarycenter entropic_barycenter(const DistanceMatrix& dm,
                                       std::span<const WalkDistribution> walks,
                                       const EntropicConfig& cfg);

}  // namespace hypercurv
