#include "hypercurv/random_walk.hpp"

#include <algorithm>
#include <numeric>

namespace hypercurv {

double Distribution::total() const noexcept {
    return std::accumulate(mass.begin(), mass.end(), 0.0);
}

double Distribution::at(VertexId v) const noexcept {
    auto it = std::lower_bound(support.begin(), support.end(), v);
    if (it == support.end() || *it != v) return 0.0;
    return mass[static_cast<std::size_t>(it - support.begin())];
}

Distribution Distribution::from_dense(const std::vector<double>& dense) {
    Distribution d;
    for (std::size_t v = 0; v < dense.size(); ++v) {
        if (dense[v] > 0.0) {
            d.support.push_back(static_cast<VertexId>(v));
            d.mass.push_back(dense[v]);
        }
    }
    return d;
}

std::vector<double> Distribution::to_dense(std::size_t n) const {
    std::vector<double> out(n, 0.0);
    for (std::size_t k = 0; k < support.size(); ++k) out[support[k]] = mass[k];
    return out;
}

WalkDistribution walk_distribution(const Hypergraph& h, VertexId i) {
    const auto& inc = h.incident(i);
    const double degree = static_cast<double>(inc.size());
    std::vector<double> dense(h.num_vertices(), 0.0);
    for (EdgeId e : inc) {
        const auto& members = h.edges()[e];
        const double share = 1.0 / (degree * static_cast<double>(members.size() - 1));
        for (VertexId j : members)
            if (j != i) dense[j] += share;
    }
    return WalkDistribution{i, Distribution::from_dense(dense)};
}

std::vector<WalkDistribution> walks_for(const Hypergraph& h, const std::vector<VertexId>& vertices) {
    std::vector<WalkDistribution> out;
    out.reserve(vertices.size());
    for (VertexId v : vertices) out.push_back(walk_distribution(h, v));
    return out;
}

}  // namespace hypercurv
