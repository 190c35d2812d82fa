#pragma once

// Fixtures and independent oracles shared by the unit and acceptance tests.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hypercurv/hypergraph.hpp"
#include "hypercurv/rng.hpp"

namespace testing_support {

using hypercurv::Hypergraph;
using hypercurv::VertexId;

inline std::string data_path(const std::string& name) { return std::string(HYPERCURV_DATA_DIR) + "/" + name; }

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline Hypergraph toy() {
    return hypercurv::parse_hypergraph("1 2 3\n2 4 5 6 7\n6 7 8 9 10 11\n7 11 12 13\n");
}

inline Hypergraph from_edges(std::size_t n_vertices, std::vector<std::vector<VertexId>> edges) {
    std::vector<std::string> labels;
    for (std::size_t v = 0; v < n_vertices; ++v) labels.push_back(std::to_string(v + 1));
    for (auto& e : edges) std::sort(e.begin(), e.end());
    return Hypergraph(std::move(labels), std::move(edges));
}

inline Hypergraph complete_graph(std::size_t n) {
    std::vector<std::vector<VertexId>> edges;
    for (VertexId i = 0; i < n; ++i)
        for (VertexId j = i + 1; j < n; ++j) edges.push_back({i, j});
    return from_edges(n, std::move(edges));
}

inline Hypergraph path_graph(std::size_t n) {
    std::vector<std::vector<VertexId>> edges;
    for (VertexId i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
    return from_edges(n, std::move(edges));
}

// Random connected-or-not hypergraph with max_edge_size-bounded edges; every
// vertex is covered and edges are distinct.
inline Hypergraph random_hypergraph(std::uint64_t seed, std::size_t max_vertices = 12,
                                    std::size_t max_edge_size = 4) {
    hypercurv::CounterRng rng(seed, 0xC0FFEE);
    auto pick = [&](std::size_t lo, std::size_t hi) {
        return lo + static_cast<std::size_t>(rng.uniform() * static_cast<double>(hi - lo + 1));
    };
    const std::size_t n = pick(3, max_vertices);
    std::set<std::vector<VertexId>> edges;
    // n = 3 admits only four distinct edges.
    const std::size_t target = std::min(pick(1, n + 2), n == 3 ? std::size_t{4} : n + 2);
    while (edges.size() < target) {
        const std::size_t size = pick(2, std::min(max_edge_size, n));
        std::set<VertexId> e;
        while (e.size() < size) e.insert(static_cast<VertexId>(pick(0, n - 1)));
        edges.insert(std::vector<VertexId>(e.begin(), e.end()));
    }
    std::vector<bool> covered(n, false);
    for (const auto& e : edges)
        for (VertexId v : e) covered[v] = true;
    for (VertexId v = 0; v < n; ++v) {
        if (covered[v]) continue;
        VertexId u = static_cast<VertexId>(pick(0, n - 1));
        if (u == v) u = (v + 1) % static_cast<VertexId>(n);
        edges.insert({std::min(u, v), std::max(u, v)});
        covered[v] = covered[u] = true;
    }
    return from_edges(n, std::vector<std::vector<VertexId>>(edges.begin(), edges.end()));
}

// Central edge {0..n-1}; each of the first `shared` members also lies in its
// own pendant edge of size n. Vertex 0 is always shared when shared >= 1.
inline Hypergraph hyperpath_star(std::size_t n, std::size_t shared) {
    std::vector<std::vector<VertexId>> edges;
    std::vector<VertexId> central;
    for (VertexId v = 0; v < n; ++v) central.push_back(v);
    edges.push_back(central);
    VertexId next = static_cast<VertexId>(n);
    for (VertexId s = 0; s < shared; ++s) {
        std::vector<VertexId> pendant{s};
        for (std::size_t k = 1; k < n; ++k) pendant.push_back(next++);
        edges.push_back(pendant);
    }
    return from_edges(next, std::move(edges));
}

// Seven edges of sizes 5..10 glued into a tree of single-vertex intersections.
inline Hypergraph mixed_hyperpath() {
    const std::vector<std::size_t> sizes{6, 5, 10, 8, 6, 7, 9};
    // (parent edge, slot in parent) for edges 1..6; slot 0 of a child is shared.
    const std::vector<std::pair<std::size_t, std::size_t>> attach{{0, 1}, {1, 2}, {2, 3}, {3, 4}, {2, 5}, {3, 6}};
    std::vector<std::vector<VertexId>> edges(sizes.size());
    VertexId next = 0;
    for (std::size_t k = 0; k < sizes[0]; ++k) edges[0].push_back(next++);
    for (std::size_t e = 1; e < sizes.size(); ++e) {
        const auto [parent, slot] = attach[e - 1];
        edges[e].push_back(edges[parent][slot]);
        for (std::size_t k = 1; k < sizes[e]; ++k) edges[e].push_back(next++);
    }
    return from_edges(next, std::move(edges));
}

// All-pairs chain distances on the 2-section graph by Floyd-Warshall; an
// oracle independent of the library's BFS.
inline std::vector<std::vector<double>> floyd_warshall(const Hypergraph& h) {
    const std::size_t n = h.num_vertices();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> d(n, std::vector<double>(n, inf));
    for (std::size_t i = 0; i < n; ++i) d[i][i] = 0.0;
    for (const auto& e : h.edges())
        for (VertexId a : e)
            for (VertexId b : e)
                if (a != b) d[a][b] = 1.0;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    return d;
}

}  // namespace testing_support
