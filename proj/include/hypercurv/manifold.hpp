#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "hypercurv/hypergraph.hpp"

namespace hypercurv {

enum class SurfaceKind { Sphere, FlatTorus, Hyperbolic };

// Constant-curvature model surface of dimension 2. `scale` is the radius R
// for the sphere and the hyperbolic plane, the side length L for the torus.
class ModelSurface {
public:
    static ModelSurface sphere(double radius = 1.0);
    static ModelSurface flat_torus(double length = 1.0);
    static ModelSurface hyperbolic(double radius = 1.0);

    SurfaceKind kind() const noexcept { return kind_; }
    double scale() const noexcept { return scale_; }
    std::string_view name() const noexcept;

    static constexpr int dimension = 2;

    double sectional() const noexcept;       // K
    double ricci() const noexcept;           // Ric(v, v) for unit v; equals K
    double scalar_average() const noexcept;  // (1/d) sum_i Ric(e_i, e_i) = K
    double scalar_trace() const noexcept;    // sum_i Ric(e_i, e_i) = d K
    double curvature_norm() const noexcept;  // sum_i Ric(e_i, e_i)^2 = d K^2
    double injectivity_radius() const noexcept;
    double sectional_bound() const noexcept;  // D = max(K, 0)

    // Largest ball radius for which sampling is well defined (ball embedded):
    // eps < injectivity radius.
    bool sampling_radius_ok(double eps) const noexcept;
    // Convexity condition used for medians: 2 eps < min(pi / (4 sqrt(D)), Inj / 2).
    bool median_radius_ok(double eps) const noexcept;
    double median_radius_limit() const noexcept;

private:
    ModelSurface(SurfaceKind kind, double scale) : kind_(kind), scale_(scale) {}

    SurfaceKind kind_;
    double scale_;
};

// Sphere: unit vector (the surface point is R times it).
// Torus: (x, y, 0) with x, y in [0, L).
// Hyperbolic: (x, y, t) on the unit hyperboloid t^2 - x^2 - y^2 = 1, t > 0.
using SurfacePoint = Eigen::Vector3d;

inline constexpr double kOnManifoldTol = 1e-12;

// The base point used for sampling: north pole, (0, 0), hyperboloid vertex.
SurfacePoint origin(const ModelSurface& m);

// Throws GeometryError when p violates the surface constraint beyond 1e-12.
void check_point(const ModelSurface& m, const SurfacePoint& p);

double geodesic_distance(const ModelSurface& m, const SurfacePoint& x, const SurfacePoint& y);

// Point at geodesic distance r from `center` in direction angle theta,
// measured in the frame transported from the origin.
SurfacePoint point_at(const ModelSurface& m, const SurfacePoint& center, double r, double theta);

// Isometry moving `from` to `to` along their geodesic (rotation, boost or
// translation), applied to p.
SurfacePoint transvect(const ModelSurface& m, const SurfacePoint& from, const SurfacePoint& to,
                       const SurfacePoint& p);

// Tangent vectors are ambient 3-vectors at the base point, with lengths in
// surface units.
Eigen::Vector3d log_map(const ModelSurface& m, const SurfacePoint& base, const SurfacePoint& p);
SurfacePoint exp_map(const ModelSurface& m, const SurfacePoint& base, const Eigen::Vector3d& v);

// Orthonormal tangent frame at `base` (metric of the surface).
std::pair<Eigen::Vector3d, Eigen::Vector3d> tangent_frame(const ModelSurface& m, const SurfacePoint& base);

// Geodesic-ball radius with the area-uniform law: inverse CDF at u in [0, 1).
double ball_radius_quantile(const ModelSurface& m, double eps, double u);

// Mean distance to the center of the uniform ball measure, in closed form.
double ball_moment(const ModelSurface& m, double eps);

// k i.i.d. area-uniform points in B(center, eps). Throws EpsilonInvalidError
// unless 0 < eps < injectivity radius.
std::vector<SurfacePoint> sample_ball(const ModelSurface& m, const SurfacePoint& center, double eps,
                                      std::size_t k, std::uint64_t seed, std::uint64_t stream = 0);

struct MedianOptions {
    double tol = 1e-12;  // stop when a step moves less than this (surface units)
    std::size_t max_iter = 10'000;
    double collinear_tol = 1e-8;
};

struct MedianResult {
    SurfacePoint point;
    double objective = 0.0;  // sum of distances
    std::size_t iterations = 0;
    std::vector<double> trace;  // objective after each accepted step
};

// Weiszfeld iteration in normal coordinates with the Vardi-Zhang step at
// data points. Throws CollinearError when the smallest singular value of the
// centered log-map coordinates is below collinear_tol, EpsilonInvalidError
// when the points cannot lie in a ball satisfying median_radius_ok, and
// ConvergenceError.
MedianResult riemannian_median(const ModelSurface& m, std::span<const SurfacePoint> points,
                               const MedianOptions& opts = {});

struct MomentEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    double sample_sd = 0.0;
    std::size_t k = 0;
    std::uint64_t seed = 0;
};

// Monte Carlo mean of d(o, y) for y uniform in B(o, eps). The uniforms depend
// only on the seed, so equal seeds give paired samples across surfaces.
MomentEstimate mc_moment(const ModelSurface& m, double eps, std::size_t k, std::uint64_t seed);

// Ric(v, v) d(o, y) over the same samples; the surfaces have constant Ric.
MomentEstimate mc_ricci_moment(const ModelSurface& m, double eps, std::size_t k, std::uint64_t seed);

inline constexpr std::size_t kCloudCap = 512;

struct PairRicciEstimate {
    double kappa = 0.0;
    double W = 0.0;
    double delta = 0.0;
    std::size_t k = 0;
    std::uint64_t seed = 0;
};

// 1 - W1(cloud_x, cloud_y) / delta where cloud_x holds k uniform points of
// B(x, eps) and cloud_y is its image under the transvection x -> y, so both
// clouds are uniform samples of their balls. W1 is the exact optimal
// assignment. Throws SizeCapError for k > 512.
PairRicciEstimate empirical_pair_ricci(const ModelSurface& m, double eps, double delta, std::size_t k,
                                       std::uint64_t seed);

// Maximal vertex sets of diameter < 2 eps (maximal cliques of the proximity
// graph). Labels are point indices; points in no edge are left out. Throws
// ParseError when no edge exists.
Hypergraph eps_neighborhood_hypergraph(const ModelSurface& m, std::span<const SurfacePoint> points,
                                       double eps);

struct CoarseScalarTrial {
    std::size_t trial = 0;
    double kappa_hat = 0.0;
    double ci_low = 0.0;  // jackknife over the points, 95%
    double ci_high = 0.0;
    double W = 0.0;  // sum_i W1(m_{x_i}, m_median)
    double cost = 0.0;  // sum_i d(x_i, median)
    SurfacePoint median;
};

struct CoarseScalarSummary {
    std::vector<CoarseScalarTrial> trials;
    double mean = 0.0;
    double sd = 0.0;
    double std_error = 0.0;
    double ci_low = 0.0;  // 95% Student t over trials, widened by kResolutionFloor
    double ci_high = 0.0;
    // eps^2 Scal / (2 (d + 2)) with Scal as the average and as the trace.
    double prediction_average = 0.0;
    double prediction_trace = 0.0;
};

// Half-width added to confidence intervals: the smallest curvature the
// double-precision transport sums can resolve.
inline constexpr double kResolutionFloor = 1e-12;

// Per trial: n_pts uniform points of B(o, eps) form one hyperedge; each point
// carries a k-point cloud obtained by transvecting one base cloud at the
// Riemannian median; kappa_hat = 1 - sum_i W1 / sum_i d(x_i, median).
CoarseScalarSummary empirical_coarse_scalar(const ModelSurface& m, double eps, std::size_t n_pts,
                                            std::size_t k, std::size_t trials, std::uint64_t seed);

// Two-sided 95% Student t quantile with `df` degrees of freedom.
double t_quantile_975(std::size_t df);

}  // namespace hypercurv
