#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "hypercurv/hypergraph.hpp"

namespace hypercurv {

// All-pairs chain distances in hyperedge hops. Entries are 16-bit with
// kInfinite marking pairs in different components.
class DistanceMatrix {
public:
    static constexpr std::uint16_t kInfinite = std::numeric_limits<std::uint16_t>::max();

    DistanceMatrix() = default;
    DistanceMatrix(std::size_t n, std::vector<std::uint16_t> entries);

    std::size_t size() const noexcept { return n_; }
    std::uint16_t operator()(VertexId i, VertexId j) const noexcept { return d_[i * n_ + j]; }
    bool finite(VertexId i, VertexId j) const noexcept { return (*this)(i, j) != kInfinite; }
    // Distance as a double, +inf across components.
    double length(VertexId i, VertexId j) const noexcept;

private:
    std::size_t n_ = 0;
    std::vector<std::uint16_t> d_;
};

DistanceMatrix distance_matrix(const Hypergraph& h);

struct MedianCost {
    std::uint32_t value = 0;
    VertexId center = 0;  // smallest minimizer
};

// c(x_1..x_n) = min over z of sum_i d(x_i, z), by exhaustive scan. Throws
// DisconnectedError when the points span several components.
MedianCost cost_c(const DistanceMatrix& dm, std::span<const VertexId> xs);

// True when every pair drawn from the given vertex sets is at finite distance.
bool same_component(const DistanceMatrix& dm, std::span<const VertexId> a,
                    std::span<const VertexId> b);

}  // namespace hypercurv
