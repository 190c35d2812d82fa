#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hypercurv/hypergraph.hpp"
#include "hypercurv/metric.hpp"
#include "hypercurv/transport_entropic.hpp"
#include "hypercurv/transport_exact.hpp"

namespace hypercurv {

enum class Method { ExactBarycenter, ExactMmot, Entropic };

std::string_view method_tag(Method m);

struct CurvatureOptions {
    Method method = Method::ExactBarycenter;
    MmotOptions mmot{};
    lp::Options lp{};
    EntropicConfig entropic{};
    // ExactMmot falls back to the barycenter LP when the joint support
    // exceeds mmot.support_cap instead of failing.
    bool mmot_fallback = true;
};

struct CurvatureRecord {
    EdgeId edge = 0;
    std::vector<VertexId> vertices;
    std::size_t n = 0;
    double W = 0.0;
    double kappa = 0.0;
    double upper_bound = 0.0;
    Method method = Method::ExactBarycenter;
    std::size_t iterations = 0;
    double residual = 0.0;
    double runtime_ms = 0.0;
    // Set when the solve failed; W and kappa are then NaN.
    std::optional<std::string> error_code;
    std::optional<std::string> error_message;

    bool ok() const noexcept { return !error_code.has_value(); }
};

// kappa(E) = 1 - W(E) / (|E| - 1) with W from the selected solver.
CurvatureRecord hyperedge_curvature(const Hypergraph& h, const DistanceMatrix& dm, EdgeId edge,
                                    const CurvatureOptions& opts = {});

// Ollivier curvature 1 - W1(m_i, m_j) / d(i, j) of a 2-element hyperedge
// {i, j}. Throws NotAnEdgeError otherwise.
double graph_ricci(const Hypergraph& h, const DistanceMatrix& dm, VertexId i, VertexId j);

// min over ordered pairs (u, v) of distinct members of m_u(N(u) ∩ N(v)).
double common_neighbor_mass(const Hypergraph& h, EdgeId edge);

// Curvature ceiling implied by W(E) >= 1 - m_u(N(u) ∩ N(v)):
// kappa(E) <= 1 - (1 - min m_u(N(u) ∩ N(v))) / (|E| - 1). For 2-edges this is
// the common-neighbour mass itself.
double common_neighbor_upper_bound(const Hypergraph& h, EdgeId edge);

struct CompleteUniform {
    Hypergraph graph;
    double predicted_kappa;
};

inline constexpr std::size_t kCompleteUniformMaxVertices = 14;

// All n-subsets of N vertices labelled 1..N; predicted kappa (N-2)/(N-1).
CompleteUniform complete_uniform(std::size_t N, std::size_t n);

struct HyperpathBound {
    std::size_t beta = 0;  // members of E in no other edge
    double bound = 0.0;    // -(n - beta - 2) / (2 (n - 1))
};

// Throws NotAHyperpathError unless every vertex has degree <= 2 and any two
// intersecting edges share exactly one vertex.
void validate_hyperpath(const Hypergraph& h);

// Lower bound on kappa(E) for an edge of a hyperpath with |E| >= 3.
HyperpathBound hyperpath_lower_bound(const Hypergraph& h, EdgeId edge);

// Curvatures closer than this are ranked by edge id.
inline constexpr double kRankTieTol = 1e-9;

// Records for every edge, ascending by kappa then edge id; failed edges sort
// last. Per-edge solves run on `jobs` threads; output order does not depend
// on scheduling.
std::vector<CurvatureRecord> curvature_report(const Hypergraph& h, const DistanceMatrix& dm,
                                              const CurvatureOptions& opts = {}, std::size_t jobs = 1);

}  // namespace hypercurv
