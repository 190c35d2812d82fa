#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace hypercurv {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;

// Sentinel for "no chain of hyperedges connects the two vertices".
inline constexpr std::uint32_t kUnreachable = UINT32_MAX;

struct ParseOptions {
    // Collapse repeated hyperedges instead of rejecting them.
    bool dedupe = false;
};

// Immutable hypergraph with dense vertex ids. Vertices exist only through the
// edges that contain them; every edge is a strictly increasing id list with at
// least two members and no two edges are equal as sets.
class Hypergraph {
public:
    // Validates all invariants; throws InvalidArgument on violation. Edges are
    // normalized (sorted) but kept in the given order.
    Hypergraph(std::vector<std::string> labels, std::vector<std::vector<VertexId>> edges,
               bool dedupe = false);

    std::size_t num_vertices() const noexcept { return labels_.size(); }
    std::size_t num_edges() const noexcept { return edges_.size(); }

    const std::string& label(VertexId v) const;
    const std::vector<std::string>& labels() const noexcept { return labels_; }

    const std::vector<VertexId>& edge(EdgeId e) const;
    const std::vector<std::vector<VertexId>>& edges() const noexcept { return edges_; }

    // Edge ids incident to v, ascending.
    const std::vector<EdgeId>& incident(VertexId v) const;

    // Throws IndexError for ids outside [0, N).
    void check_vertex(VertexId v) const;
    void check_edge(EdgeId e) const;

    // Returns the id for an external label, or throws IndexError.
    VertexId id_of(std::string_view label) const;

    // Same vertex ids, edges sorted lexicographically.
    Hypergraph canonical() const;

private:
    std::vector<std::string> labels_;
    std::vector<std::vector<VertexId>> edges_;
    std::vector<std::vector<EdgeId>> incidence_;
};

// Hyperedge-list text: one edge per line, whitespace separated labels, '#'
// starts a comment, blank lines are skipped. Ids follow first appearance.
Hypergraph parse_hypergraph(std::istream& in, const ParseOptions& opts = {});
Hypergraph parse_hypergraph(std::string_view text, const ParseOptions& opts = {});

// Canonical serialization: vertices of each edge by id, edges lexicographic.
std::string serialize(const Hypergraph& h);

// d_i: number of edges containing i.
std::size_t vertex_degree(const Hypergraph& h, VertexId i);

// N(i): vertices other than i sharing an edge with i, ascending.
std::vector<VertexId> neighbors(const Hypergraph& h, VertexId i);

// Minimal length of a chain of pairwise-intersecting edges linking i to j;
// 0 for i == j and kUnreachable across components.
std::uint32_t shortest_distance(const Hypergraph& h, VertexId i, VertexId j);

// Chain distances from `source` to every vertex (BFS on the vertex/edge
// incidence structure).
std::vector<std::uint32_t> distances_from(const Hypergraph& h, VertexId source);

// Connected component index per vertex, numbered by smallest member.
std::vector<std::uint32_t> components(const Hypergraph& h);

}  // namespace hypercurv
