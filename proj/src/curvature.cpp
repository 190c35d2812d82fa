#include "hypercurv/curvature.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "hypercurv/errors.hpp"
#include "hypercurv/random_walk.hpp"

namespace hypercurv {

std::string_view method_tag(Method m) {
    switch (m) {
        case Method::ExactBarycenter: return "exact-barycenter";
        case Method::ExactMmot: return "exact-mmot";
        case Method::Entropic: return "entropic";
    }
    return "unknown";
}

namespace {

double shared_mass(const WalkDistribution& from, const WalkDistribution& other) {
    double total = 0.0;
    for (std::size_t s = 0; s < from.mass.size(); ++s)
        if (other.mass.at(from.mass.support[s]) > 0.0) total += from.mass.mass[s];
    return total;
}

}  // namespace

CurvatureRecord hyperedge_curvature(const Hypergraph& h, const DistanceMatrix& dm, EdgeId edge,
                                    const CurvatureOptions& opts) {
    const auto& members = h.edge(edge);
    const auto start = std::chrono::steady_clock::now();

    CurvatureRecord rec;
    rec.edge = edge;
    rec.vertices = members;
    rec.n = members.size();
    rec.method = opts.method;
    rec.upper_bound = common_neighbor_upper_bound(h, edge);

    const auto walks = walks_for(h, members);
    switch (opts.method) {
        case Method::ExactBarycenter: {
            const auto sol = barycenter(dm, walks, opts.lp);
            rec.W = sol.objective;
            rec.iterations = sol.iterations;
            break;
        }
        case Method::ExactMmot: {
            if (opts.mmot_fallback && joint_support_size(walks) > opts.mmot.support_cap) {
                const auto sol = barycenter(dm, walks, opts.lp);
                rec.W = sol.objective;
                rec.iterations = sol.iterations;
                rec.method = Method::ExactBarycenter;
            } else {
                const auto sol = mmot(dm, walks, opts.mmot);
                rec.W = sol.value;
                rec.iterations = sol.iterations;
            }
            break;
        }
        case Method::Entropic: {
            const auto sol = entropic_barycenter(dm, walks, opts.entropic);
            rec.W = sol.transport;
            rec.iterations = sol.iterations;
            rec.residual = sol.residual;
            break;
        }
    }
    rec.kappa = 1.0 - rec.W / static_cast<double>(rec.n - 1);
    rec.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

double graph_ricci(const Hypergraph& h, const DistanceMatrix& dm, VertexId i, VertexId j) {
    h.check_vertex(i);
    h.check_vertex(j);
    std::vector<VertexId> pair{std::min(i, j), std::max(i, j)};
    const bool is_edge = i != j && std::any_of(h.incident(i).begin(), h.incident(i).end(),
                                               [&](EdgeId e) { return h.edges()[e] == pair; });
    if (!is_edge)
        throw NotAnEdgeError("{" + h.label(i) + ", " + h.label(j) + "} is not a 2-element hyperedge");
    const auto mi = walk_distribution(h, i);
    const auto mj = walk_distribution(h, j);
    return 1.0 - w1_pair(dm, mi.mass, mj.mass).value / dm.length(i, j);
}

double common_neighbor_mass(const Hypergraph& h, EdgeId edge) {
    const auto& members = h.edge(edge);
    const auto walks = walks_for(h, members);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t u = 0; u < walks.size(); ++u)
        for (std::size_t v = 0; v < walks.size(); ++v)
            if (u != v) best = std::min(best, shared_mass(walks[u], walks[v]));
    return best;
}

double common_neighbor_upper_bound(const Hypergraph& h, EdgeId edge) {
    const double n = static_cast<double>(h.edge(edge).size());
    return 1.0 - (1.0 - common_neighbor_mass(h, edge)) / (n - 1.0);
}

CompleteUniform complete_uniform(std::size_t N, std::size_t n) {
    if (N > kCompleteUniformMaxVertices)
        throw SizeCapError("complete uniform hypergraph limited to " +
                           std::to_string(kCompleteUniformMaxVertices) + " vertices");
    if (n < 2 || n > N) throw InvalidArgument("complete uniform hypergraph needs 2 <= n <= N");
    std::vector<std::string> labels;
    for (std::size_t v = 1; v <= N; ++v) labels.push_back(std::to_string(v));

    // Lexicographic n-subsets via a selection mask.
    std::vector<std::vector<VertexId>> edges;
    std::vector<bool> mask(N, false);
    std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(n), true);
    do {
        std::vector<VertexId> e;
        for (VertexId v = 0; v < N; ++v)
            if (mask[v]) e.push_back(v);
        edges.push_back(std::move(e));
    } while (std::prev_permutation(mask.begin(), mask.end()));

    const double Nd = static_cast<double>(N);
    return {Hypergraph(std::move(labels), std::move(edges)), (Nd - 2.0) / (Nd - 1.0)};
}

void validate_hyperpath(const Hypergraph& h) {
    for (VertexId v = 0; v < h.num_vertices(); ++v)
        if (vertex_degree(h, v) > 2)
            throw NotAHyperpathError("vertex '" + h.label(v) + "' lies in more than two hyperedges");
    // With degrees <= 2, two edges meeting in k vertices show up as k shared
    // vertices with the same incident pair.
    std::vector<std::pair<EdgeId, EdgeId>> pairs;
    for (VertexId v = 0; v < h.num_vertices(); ++v)
        if (h.incident(v).size() == 2) pairs.emplace_back(h.incident(v)[0], h.incident(v)[1]);
    std::sort(pairs.begin(), pairs.end());
    if (std::adjacent_find(pairs.begin(), pairs.end()) != pairs.end())
        throw NotAHyperpathError("two hyperedges share more than one vertex");
}

HyperpathBound hyperpath_lower_bound(const Hypergraph& h, EdgeId edge) {
    validate_hyperpath(h);
    const auto& members = h.edge(edge);
    if (members.size() < 3) throw InvalidArgument("hyperpath bound needs |E| >= 3");
    HyperpathBound out;
    for (VertexId v : members)
        if (vertex_degree(h, v) == 1) ++out.beta;
    const double n = static_cast<double>(members.size());
    const double beta = static_cast<double>(out.beta);
    out.bound = -(n - beta - 2.0) / (2.0 * (n - 1.0));
    return out;
}

std::vector<CurvatureRecord> curvature_report(const Hypergraph& h, const DistanceMatrix& dm,
                                              const CurvatureOptions& opts, std::size_t jobs) {
    const std::size_t m = h.num_edges();
    std::vector<CurvatureRecord> records(m);
    auto solve_one = [&](EdgeId e) {
        try {
            records[e] = hyperedge_curvature(h, dm, e, opts);
        } catch (const Error& err) {
            CurvatureRecord rec;
            rec.edge = e;
            rec.vertices = h.edges()[e];
            rec.n = rec.vertices.size();
            rec.method = opts.method;
            rec.W = rec.kappa = std::numeric_limits<double>::quiet_NaN();
            rec.upper_bound = common_neighbor_upper_bound(h, e);
            rec.error_code = err.code();
            rec.error_message = err.what();
            records[e] = std::move(rec);
        }
    };

    jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(m, 1));
    if (jobs == 1) {
        for (EdgeId e = 0; e < m; ++e) solve_one(e);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < jobs; ++t)
            pool.emplace_back([&] {
                for (std::size_t e = next++; e < m; e = next++) solve_one(static_cast<EdgeId>(e));
            });
        for (auto& th : pool) th.join();
    }

    // Curvatures that agree to the solver tolerance rank as ties; rounding to a
    // fixed grid keeps the ordering transitive.
    auto rank_key = [](const CurvatureRecord& r) { return std::round(r.kappa / kRankTieTol); };
    std::stable_sort(records.begin(), records.end(), [&](const CurvatureRecord& a, const CurvatureRecord& b) {
        if (a.ok() != b.ok()) return a.ok();
        if (a.ok() && rank_key(a) != rank_key(b)) return rank_key(a) < rank_key(b);
        return a.edge < b.edge;
    });
    return records;
}

}  // namespace hypercurv
