#include "hypercurv/metric.hpp"

#include "hypercurv/errors.hpp"

namespace hypercurv {

DistanceMatrix::DistanceMatrix(std::size_t n, std::vector<std::uint16_t> entries)
    : n_(n), d_(std::move(entries)) {
    if (d_.size() != n_ * n_) throw InvalidArgument("distance matrix has wrong entry count");
}

double DistanceMatrix::length(VertexId i, VertexId j) const noexcept {
    const auto v = (*this)(i, j);
    return v == kInfinite ? std::numeric_limits<double>::infinity() : static_cast<double>(v);
}

DistanceMatrix distance_matrix(const Hypergraph& h) {
    const std::size_t n = h.num_vertices();
    if (n >= DistanceMatrix::kInfinite) throw SizeCapError("too many vertices for 16-bit distances");
    std::vector<std::uint16_t> entries(n * n, DistanceMatrix::kInfinite);
    for (VertexId s = 0; s < n; ++s) {
        const auto row = distances_from(h, s);
        for (VertexId t = 0; t < n; ++t)
            if (row[t] != kUnreachable) entries[s * n + t] = static_cast<std::uint16_t>(row[t]);
    }
    return DistanceMatrix(n, std::move(entries));
}

MedianCost cost_c(const DistanceMatrix& dm, std::span<const VertexId> xs) {
    if (xs.empty()) throw InvalidArgument("cost_c needs at least one point");
    for (VertexId x : xs)
        if (x >= dm.size()) throw IndexError("vertex id " + std::to_string(x) + " out of range");
    for (VertexId x : xs)
        if (!dm.finite(xs[0], x)) throw DisconnectedError("cost_c points lie in different components");

    MedianCost best{std::numeric_limits<std::uint32_t>::max(), 0};
    const VertexId anchor = xs[0];
    for (VertexId z = 0; z < dm.size(); ++z) {
        if (!dm.finite(anchor, z)) continue;
        std::uint32_t total = 0;
        for (VertexId x : xs) total += dm(x, z);
        if (total < best.value) best = {total, z};
    }
    return best;
}

bool same_component(const DistanceMatrix& dm, std::span<const VertexId> a,
                    std::span<const VertexId> b) {
    for (VertexId x : a)
        for (VertexId y : b)
            if (!dm.finite(x, y)) return false;
    return true;
}

}  // namespace hypercurv
