#include "hypercurv/hypergraph.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>
#include <unordered_map>

#include "hypercurv/errors.hpp"

namespace hypercurv {

namespace {

bool valid_utf8(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        const auto c = static_cast<unsigned char>(s[i]);
        std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : (c >> 3) == 0x1E ? 4 : 0;
        if (len == 0 || i + len > s.size()) return false;
        for (std::size_t k = 1; k < len; ++k)
            if ((static_cast<unsigned char>(s[i + k]) >> 6) != 0x2) return false;
        i += len;
    }
    return true;
}

}  // namespace

Hypergraph::Hypergraph(std::vector<std::string> labels, std::vector<std::vector<VertexId>> edges,
                       bool dedupe)
    : labels_(std::move(labels)) {
    const std::size_t n = labels_.size();
    std::set<std::vector<VertexId>> seen;
    for (auto& e : edges) {
        std::sort(e.begin(), e.end());
        if (e.size() < 2) throw InvalidArgument("hyperedge with fewer than two vertices");
        if (std::adjacent_find(e.begin(), e.end()) != e.end())
            throw InvalidArgument("hyperedge repeats a vertex");
        if (e.back() >= n) throw InvalidArgument("hyperedge references unknown vertex id");
        if (!seen.insert(e).second) {
            if (dedupe) continue;
            throw InvalidArgument("duplicate hyperedge");
        }
        edges_.push_back(std::move(e));
    }
    if (edges_.empty()) throw InvalidArgument("hypergraph has no hyperedges");

    incidence_.assign(n, {});
    for (EdgeId id = 0; id < edges_.size(); ++id)
        for (VertexId v : edges_[id]) incidence_[v].push_back(id);
    for (VertexId v = 0; v < n; ++v)
        if (incidence_[v].empty())
            throw InvalidArgument("vertex '" + labels_[v] + "' lies in no hyperedge");
}

const std::string& Hypergraph::label(VertexId v) const {
    check_vertex(v);
    return labels_[v];
}

const std::vector<VertexId>& Hypergraph::edge(EdgeId e) const {
    check_edge(e);
    return edges_[e];
}

const std::vector<EdgeId>& Hypergraph::incident(VertexId v) const {
    check_vertex(v);
    return incidence_[v];
}

void Hypergraph::check_vertex(VertexId v) const {
    if (v >= labels_.size())
        throw IndexError("vertex id " + std::to_string(v) + " out of range [0, " +
                         std::to_string(labels_.size()) + ")");
}

void Hypergraph::check_edge(EdgeId e) const {
    if (e >= edges_.size())
        throw IndexError("edge id " + std::to_string(e) + " out of range [0, " +
                         std::to_string(edges_.size()) + ")");
}

VertexId Hypergraph::id_of(std::string_view label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) throw IndexError("unknown vertex label '" + std::string(label) + "'");
    return static_cast<VertexId>(it - labels_.begin());
}

Hypergraph Hypergraph::canonical() const {
    auto sorted = edges_;
    std::sort(sorted.begin(), sorted.end());
    return Hypergraph(labels_, std::move(sorted));
}

Hypergraph parse_hypergraph(std::istream& in, const ParseOptions& opts) {
    std::vector<std::string> labels;
    std::unordered_map<std::string, VertexId> ids;
    std::vector<std::vector<VertexId>> edges;
    std::set<std::vector<VertexId>> seen;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!valid_utf8(line)) throw ParseError(lineno, "input is not valid UTF-8");
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream tokens(line);
        std::vector<std::string> words;
        for (std::string w; tokens >> w;) words.push_back(std::move(w));
        if (words.empty()) continue;
        if (words.size() < 2) throw ParseError(lineno, "hyperedge needs at least two vertices");

        // Register labels only once the line is known to be valid, so a
        // rejected line never leaves orphan vertices behind.
        std::set<std::string> local;
        for (const auto& w : words)
            if (!local.insert(w).second)
                throw ParseError(lineno, "vertex '" + w + "' repeated within hyperedge");

        std::vector<VertexId> edge;
        edge.reserve(words.size());
        for (auto& w : words) {
            auto [it, inserted] = ids.try_emplace(w, static_cast<VertexId>(labels.size()));
            if (inserted) labels.push_back(w);
            edge.push_back(it->second);
        }
        std::sort(edge.begin(), edge.end());
        if (!seen.insert(edge).second) {
            if (opts.dedupe) continue;
            throw ParseError(lineno, "duplicate hyperedge");
        }
        edges.push_back(std::move(edge));
    }
    if (edges.empty()) throw ParseError(0, "input contains no hyperedges");
    return Hypergraph(std::move(labels), std::move(edges));
}

Hypergraph parse_hypergraph(std::string_view text, const ParseOptions& opts) {
    std::istringstream in{std::string(text)};
    return parse_hypergraph(in, opts);
}

std::string serialize(const Hypergraph& h) {
    const Hypergraph c = h.canonical();
    std::string out;
    for (const auto& e : c.edges()) {
        for (std::size_t k = 0; k < e.size(); ++k) {
            if (k) out += ' ';
            out += c.labels()[e[k]];
        }
        out += '\n';
    }
    return out;
}

std::size_t vertex_degree(const Hypergraph& h, VertexId i) { return h.incident(i).size(); }

std::vector<VertexId> neighbors(const Hypergraph& h, VertexId i) {
    std::vector<VertexId> out;
    for (EdgeId e : h.incident(i))
        for (VertexId j : h.edges()[e])
            if (j != i) out.push_back(j);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<std::uint32_t> distances_from(const Hypergraph& h, VertexId source) {
    h.check_vertex(source);
    std::vector<std::uint32_t> dist(h.num_vertices(), kUnreachable);
    std::vector<bool> edge_done(h.num_edges(), false);
    std::deque<VertexId> queue{source};
    dist[source] = 0;
    // Each edge is expanded once: the first time it is reached it puts all of
    // its members one hop further than the vertex that reached it.
    while (!queue.empty()) {
        VertexId u = queue.front();
        queue.pop_front();
        for (EdgeId e : h.incident(u)) {
            if (edge_done[e]) continue;
            edge_done[e] = true;
            for (VertexId w : h.edges()[e]) {
                if (dist[w] == kUnreachable) {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
    }
    return dist;
}

std::uint32_t shortest_distance(const Hypergraph& h, VertexId i, VertexId j) {
    h.check_vertex(j);
    return distances_from(h, i)[j];
}

std::vector<std::uint32_t> components(const Hypergraph& h) {
    std::vector<std::uint32_t> comp(h.num_vertices(), kUnreachable);
    for (VertexId v = 0; v < h.num_vertices(); ++v) {
        if (comp[v] != kUnreachable) continue;
        auto d = distances_from(h, v);
        for (VertexId w = 0; w < h.num_vertices(); ++w)
            if (d[w] != kUnreachable) comp[w] = v;
    }
    return comp;
}

}  // namespace hypercurv
