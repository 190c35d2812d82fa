#pragma once

#include <vector>

#include "hypercurv/hypergraph.hpp"

namespace hypercurv {

// Sparse probability distribution over vertex ids; support is strictly
// increasing and every listed mass is positive.
struct Distribution {
    std::vector<VertexId> support;
    std::vector<double> mass;

    std::size_t size() const noexcept { return support.size(); }
    double total() const noexcept;
    // Mass at v (0 when v is outside the support).
    double at(VertexId v) const noexcept;

    // Drops zero entries and sorts; masses must be nonnegative.
    static Distribution from_dense(const std::vector<double>& dense);
    std::vector<double> to_dense(std::size_t n) const;
};

// The uniform hypergraph random walk started at `owner`.
struct WalkDistribution {
    VertexId owner = 0;
    Distribution mass;
};

// m_i(j) = sum over edges E containing i and j (j != i) of 1 / (d_i (|E| - 1)).
WalkDistribution walk_distribution(const Hypergraph& h, VertexId i);

// One walk per listed vertex, in order.
std::vector<WalkDistribution> walks_for(const Hypergraph& h, const std::vector<VertexId>& vertices);

}  // namespace hypercurv
