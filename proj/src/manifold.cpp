#include "hypercurv/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Geometry>
#include <Eigen/SVD>
#include <boost/math/distributions/students_t.hpp>

#include "hypercurv/assignment.hpp"
#include "hypercurv/errors.hpp"
#include "hypercurv/rng.hpp"

namespace hypercurv {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double minkowski(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    return a.x() * b.x() + a.y() * b.y() - a.z() * b.z();
}

double wrap(double x, double L) {
    double r = std::fmod(x, L);
    if (r < 0.0) r += L;
    if (r >= L) r = 0.0;
    return r;
}

// Shortest representative of x - y on the torus.
Eigen::Vector3d torus_delta(double L, const SurfacePoint& x, const SurfacePoint& y) {
    Eigen::Vector3d d(x.x() - y.x(), x.y() - y.y(), 0.0);
    d.x() -= L * std::round(d.x() / L);
    d.y() -= L * std::round(d.y() / L);
    return d;
}

SurfacePoint renormalize(const ModelSurface& m, SurfacePoint p) {
    switch (m.kind()) {
        case SurfaceKind::Sphere: return p.normalized();
        case SurfaceKind::FlatTorus: return {wrap(p.x(), m.scale()), wrap(p.y(), m.scale()), 0.0};
        case SurfaceKind::Hyperbolic:
            p.z() = std::sqrt(1.0 + p.x() * p.x() + p.y() * p.y());
            return p;
    }
    return p;
}

double inner(const ModelSurface& m, const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    return m.kind() == SurfaceKind::Hyperbolic ? minkowski(a, b) : a.dot(b);
}

double tangent_norm(const ModelSurface& m, const Eigen::Vector3d& v) {
    return std::sqrt(std::max(inner(m, v, v), 0.0));
}

void require_sampling_eps(const ModelSurface& m, double eps) {
    if (!m.sampling_radius_ok(eps))
        throw EpsilonInvalidError("eps = " + std::to_string(eps) + " must lie in (0, injectivity radius) on the " +
                                  std::string(m.name()));
}

void require_median_eps(const ModelSurface& m, double eps) {
    if (!m.median_radius_ok(eps))
        throw EpsilonInvalidError("eps = " + std::to_string(eps) + " violates 2 eps < min(pi/(4 sqrt D), Inj/2) on the " +
                                  std::string(m.name()) + " (limit " + std::to_string(m.median_radius_limit()) + ")");
}

double sum_distances(const ModelSurface& m, const SurfacePoint& y, std::span<const SurfacePoint> points) {
    double s = 0.0;
    for (const auto& p : points) s += geodesic_distance(m, y, p);
    return s;
}

double optimal_cloud_cost(const ModelSurface& m, const std::vector<SurfacePoint>& a,
                          const std::vector<SurfacePoint>& b) {
    const auto k = static_cast<Eigen::Index>(a.size());
    Eigen::MatrixXd cost(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j)
            cost(i, j) = geodesic_distance(m, a[static_cast<std::size_t>(i)], b[static_cast<std::size_t>(j)]);
    return solve_assignment(cost).cost / static_cast<double>(k);
}

}  // namespace

ModelSurface ModelSurface::sphere(double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidArgument("sphere radius must be positive");
    return {SurfaceKind::Sphere, radius};
}

ModelSurface ModelSurface::flat_torus(double length) {
    if (!(length > 0.0) || !std::isfinite(length)) throw InvalidArgument("torus side length must be positive");
    return {SurfaceKind::FlatTorus, length};
}

ModelSurface ModelSurface::hyperbolic(double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidArgument("hyperbolic radius must be positive");
    return {SurfaceKind::Hyperbolic, radius};
}

std::string_view ModelSurface::name() const noexcept {
    switch (kind_) {
        case SurfaceKind::Sphere: return "sphere";
        case SurfaceKind::FlatTorus: return "torus";
        case SurfaceKind::Hyperbolic: return "hyperbolic";
    }
    return "unknown";
}

double ModelSurface::sectional() const noexcept {
    switch (kind_) {
        case SurfaceKind::Sphere: return 1.0 / (scale_ * scale_);
        case SurfaceKind::FlatTorus: return 0.0;
        case SurfaceKind::Hyperbolic: return -1.0 / (scale_ * scale_);
    }
    return 0.0;
}

double ModelSurface::ricci() const noexcept { return sectional(); }
double ModelSurface::scalar_average() const noexcept { return sectional(); }
double ModelSurface::scalar_trace() const noexcept { return dimension * sectional(); }
double ModelSurface::curvature_norm() const noexcept { return dimension * sectional() * sectional(); }

double ModelSurface::injectivity_radius() const noexcept {
    switch (kind_) {
        case SurfaceKind::Sphere: return kPi * scale_;
        case SurfaceKind::FlatTorus: return scale_ / 2.0;
        case SurfaceKind::Hyperbolic: return kInf;
    }
    return 0.0;
}

double ModelSurface::sectional_bound() const noexcept { return std::max(sectional(), 0.0); }

bool ModelSurface::sampling_radius_ok(double eps) const noexcept {
    return eps > 0.0 && std::isfinite(eps) && eps < injectivity_radius();
}

double ModelSurface::median_radius_limit() const noexcept {
    const double D = sectional_bound();
    const double convex = D > 0.0 ? kPi / (4.0 * std::sqrt(D)) : kInf;
    return std::min(convex, injectivity_radius() / 2.0) / 2.0;
}

bool ModelSurface::median_radius_ok(double eps) const noexcept {
    return eps > 0.0 && std::isfinite(eps) && eps < median_radius_limit();
}

SurfacePoint origin(const ModelSurface& m) {
    return m.kind() == SurfaceKind::FlatTorus ? SurfacePoint(0.0, 0.0, 0.0) : SurfacePoint(0.0, 0.0, 1.0);
}

void check_point(const ModelSurface& m, const SurfacePoint& p) {
    if (!p.allFinite()) throw GeometryError("non-finite coordinates");
    switch (m.kind()) {
        case SurfaceKind::Sphere:
            if (std::abs(p.norm() - 1.0) > kOnManifoldTol) throw GeometryError("point is not a unit vector");
            return;
        case SurfaceKind::FlatTorus:
            if (p.z() != 0.0 || p.x() < 0.0 || p.x() >= m.scale() || p.y() < 0.0 || p.y() >= m.scale())
                throw GeometryError("torus point outside [0, L)^2");
            return;
        case SurfaceKind::Hyperbolic:
            if (p.z() <= 0.0 || std::abs(-minkowski(p, p) - 1.0) > kOnManifoldTol * std::max(1.0, p.z() * p.z()))
                throw GeometryError("point is not on the upper hyperboloid sheet");
            return;
    }
}

double geodesic_distance(const ModelSurface& m, const SurfacePoint& x, const SurfacePoint& y) {
    check_point(m, x);
    check_point(m, y);
    switch (m.kind()) {
        case SurfaceKind::Sphere: return m.scale() * std::atan2(x.cross(y).norm(), x.dot(y));
        case SurfaceKind::FlatTorus: return torus_delta(m.scale(), x, y).norm();
        case SurfaceKind::Hyperbolic: {
            const Eigen::Vector3d w = x - y;
            return 2.0 * m.scale() * std::asinh(std::sqrt(std::max(minkowski(w, w), 0.0)) / 2.0);
        }
    }
    return 0.0;
}

SurfacePoint transvect(const ModelSurface& m, const SurfacePoint& from, const SurfacePoint& to,
                       const SurfacePoint& p) {
    switch (m.kind()) {
        case SurfaceKind::Sphere: {
            const double c = from.dot(to);
            if (1.0 + c < 1e-15) throw GeometryError("transvection between antipodal points is not unique");
            const Eigen::Vector3d s = from + to;
            return renormalize(m, p - (s.dot(p) / (1.0 + c)) * s + 2.0 * from.dot(p) * to);
        }
        case SurfaceKind::FlatTorus: {
            const Eigen::Vector3d d = torus_delta(m.scale(), to, from);
            return renormalize(m, p + d);
        }
        case SurfaceKind::Hyperbolic: {
            const Eigen::Vector3d s = from + to;
            return renormalize(m, p + (minkowski(s, p) / (1.0 - minkowski(from, to))) * s -
                                      2.0 * minkowski(from, p) * to);
        }
    }
    return p;
}

SurfacePoint point_at(const ModelSurface& m, const SurfacePoint& center, double r, double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    switch (m.kind()) {
        case SurfaceKind::Sphere: {
            const double a = r / m.scale();
            const SurfacePoint p(std::sin(a) * c, std::sin(a) * s, std::cos(a));
            return transvect(m, origin(m), center, p);
        }
        case SurfaceKind::FlatTorus: return renormalize(m, center + Eigen::Vector3d(r * c, r * s, 0.0));
        case SurfaceKind::Hyperbolic: {
            const double a = r / m.scale();
            const SurfacePoint p(std::sinh(a) * c, std::sinh(a) * s, std::cosh(a));
            return transvect(m, origin(m), center, renormalize(m, p));
        }
    }
    return center;
}

Eigen::Vector3d log_map(const ModelSurface& m, const SurfacePoint& base, const SurfacePoint& p) {
    if (m.kind() == SurfaceKind::FlatTorus) {
        check_point(m, base);
        check_point(m, p);
        return torus_delta(m.scale(), p, base);
    }
    const double dist = geodesic_distance(m, base, p);
    Eigen::Vector3d v = m.kind() == SurfaceKind::Sphere ? Eigen::Vector3d(p - base.dot(p) * base)
                                                        : Eigen::Vector3d(p + minkowski(base, p) * base);
    const double len = tangent_norm(m, v);
    if (len == 0.0 || dist == 0.0) return Eigen::Vector3d::Zero();
    return (dist / len) * v;
}

SurfacePoint exp_map(const ModelSurface& m, const SurfacePoint& base, const Eigen::Vector3d& v) {
    if (m.kind() == SurfaceKind::FlatTorus) return renormalize(m, base + Eigen::Vector3d(v.x(), v.y(), 0.0));
    const double len = tangent_norm(m, v);
    if (len == 0.0) return base;
    const double a = len / m.scale();
    const Eigen::Vector3d dir = v / len;
    if (m.kind() == SurfaceKind::Sphere) return renormalize(m, std::cos(a) * base + std::sin(a) * dir);
    return renormalize(m, std::cosh(a) * base + std::sinh(a) * dir);
}

std::pair<Eigen::Vector3d, Eigen::Vector3d> tangent_frame(const ModelSurface& m, const SurfacePoint& base) {
    switch (m.kind()) {
        case SurfaceKind::FlatTorus: return {Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY()};
        case SurfaceKind::Sphere: {
            Eigen::Index axis = 0;
            base.cwiseAbs().minCoeff(&axis);
            const Eigen::Vector3d e = Eigen::Vector3d::Unit(axis);
            const Eigen::Vector3d e1 = (e - e.dot(base) * base).normalized();
            return {e1, base.cross(e1)};
        }
        case SurfaceKind::Hyperbolic: {
            Eigen::Vector3d e1 = Eigen::Vector3d::UnitX() + minkowski(base, Eigen::Vector3d::UnitX()) * base;
            e1 /= tangent_norm(m, e1);
            Eigen::Vector3d e2 = Eigen::Vector3d::UnitY() + minkowski(base, Eigen::Vector3d::UnitY()) * base;
            e2 -= minkowski(e2, e1) * e1;
            e2 /= tangent_norm(m, e2);
            return {e1, e2};
        }
    }
    return {};
}

double ball_radius_quantile(const ModelSurface& m, double eps, double u) {
    const double R = m.scale();
    switch (m.kind()) {
        case SurfaceKind::Sphere: return 2.0 * R * std::asin(std::sqrt(u) * std::sin(eps / (2.0 * R)));
        case SurfaceKind::FlatTorus: return eps * std::sqrt(u);
        case SurfaceKind::Hyperbolic: return 2.0 * R * std::asinh(std::sqrt(u) * std::sinh(eps / (2.0 * R)));
    }
    return 0.0;
}

double ball_moment(const ModelSurface& m, double eps) {
    const double R = m.scale();
    const double a = eps / R;
    switch (m.kind()) {
        case SurfaceKind::Sphere: return R * (std::sin(a) - a * std::cos(a)) / (1.0 - std::cos(a));
        case SurfaceKind::FlatTorus: return 2.0 * eps / 3.0;
        case SurfaceKind::Hyperbolic: return R * (a * std::cosh(a) - std::sinh(a)) / (std::cosh(a) - 1.0);
    }
    return 0.0;
}

std::vector<SurfacePoint> sample_ball(const ModelSurface& m, const SurfacePoint& center, double eps,
                                      std::size_t k, std::uint64_t seed, std::uint64_t stream) {
    require_sampling_eps(m, eps);
    check_point(m, center);
    CounterRng rng(seed, stream);
    std::vector<SurfacePoint> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double r = ball_radius_quantile(m, eps, rng.uniform());
        const double theta = 2.0 * kPi * rng.uniform();
        out.push_back(point_at(m, center, r, theta));
    }
    return out;
}

MedianResult riemannian_median(const ModelSurface& m, std::span<const SurfacePoint> points,
                               const MedianOptions& opts) {
    const std::size_t n = points.size();
    if (n < 3) throw InvalidArgument("riemannian_median needs at least 3 points");
    for (const auto& p : points) check_point(m, p);

    double diameter = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) diameter = std::max(diameter, geodesic_distance(m, points[i], points[j]));
    if (!(diameter < 2.0 * m.median_radius_limit()))
        throw EpsilonInvalidError("points of diameter " + std::to_string(diameter) +
                                  " do not fit in a ball where the median is unique");

    // Start at the best data point.
    MedianResult res;
    res.objective = kInf;
    for (const auto& p : points) {
        const double f = sum_distances(m, p, points);
        if (f < res.objective) {
            res.objective = f;
            res.point = p;
        }
    }

    {
        const auto [e1, e2] = tangent_frame(m, res.point);
        Eigen::MatrixXd coords(static_cast<Eigen::Index>(n), 2);
        for (std::size_t i = 0; i < n; ++i) {
            const Eigen::Vector3d v = log_map(m, res.point, points[i]);
            coords(static_cast<Eigen::Index>(i), 0) = inner(m, v, e1);
            coords(static_cast<Eigen::Index>(i), 1) = inner(m, v, e2);
        }
        coords.rowwise() -= coords.colwise().mean();
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(coords);
        if (svd.singularValues()(1) < opts.collinear_tol)
            throw CollinearError("points lie on one geodesic; the median is not unique");
    }

    const double coincide = 1e-14 * std::max(1.0, m.scale());
    double last_step = kInf;
    for (std::size_t it = 0; it < opts.max_iter; ++it) {
        Eigen::Vector3d num = Eigen::Vector3d::Zero();
        double den = 0.0;
        double at_point = 0.0;
        for (const auto& p : points) {
            const double d = geodesic_distance(m, res.point, p);
            if (d <= coincide) {
                at_point += 1.0;
                continue;
            }
            num += log_map(m, res.point, p) / d;
            den += 1.0 / d;
        }
        if (den == 0.0) return res;
        const double pull = tangent_norm(m, num);
        if (at_point > 0.0 && pull <= at_point) return res;  // subgradient contains 0

        Eigen::Vector3d step = num / den;
        if (at_point > 0.0) step *= 1.0 - at_point / pull;

        bool accepted = false;
        for (int halvings = 0; halvings < 60; ++halvings) {
            const SurfacePoint cand = exp_map(m, res.point, step);
            const double f = sum_distances(m, cand, points);
            if (f <= res.objective) {
                last_step = geodesic_distance(m, res.point, cand);
                res.point = cand;
                res.objective = f;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) return res;  // no descent at working precision
        ++res.iterations;
        res.trace.push_back(res.objective);
        if (last_step < opts.tol) return res;
    }
    throw ConvergenceError("riemannian_median did not converge in " + std::to_string(opts.max_iter) + " iterations",
                           last_step);
}

MomentEstimate mc_moment(const ModelSurface& m, double eps, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw InvalidArgument("mc_moment needs k >= 2");
    const SurfacePoint o = origin(m);
    const auto samples = sample_ball(m, o, eps, k, seed);
    std::vector<double> dist(k);
    for (std::size_t i = 0; i < k; ++i) dist[i] = geodesic_distance(m, o, samples[i]);

    const double kd = static_cast<double>(k);
    double mean = 0.0;
    for (double d : dist) mean += d;
    mean /= kd;
    double ss = 0.0;
    for (double d : dist) ss += (d - mean) * (d - mean);
    MomentEstimate est;
    est.mean = mean;
    est.sample_sd = std::sqrt(ss / (kd - 1.0));
    est.std_error = est.sample_sd / std::sqrt(kd);
    est.k = k;
    est.seed = seed;
    return est;
}

MomentEstimate mc_ricci_moment(const ModelSurface& m, double eps, std::size_t k, std::uint64_t seed) {
    MomentEstimate est = mc_moment(m, eps, k, seed);
    const double ric = m.ricci();
    est.mean *= ric;
    est.sample_sd *= std::abs(ric);
    est.std_error *= std::abs(ric);
    return est;
}

PairRicciEstimate empirical_pair_ricci(const ModelSurface& m, double eps, double delta, std::size_t k,
                                       std::uint64_t seed) {
    require_sampling_eps(m, eps);
    if (!(delta > 0.0 && delta < eps)) throw InvalidArgument("empirical_pair_ricci needs 0 < delta < eps");
    if (k == 0) throw InvalidArgument("empirical_pair_ricci needs k >= 1");
    if (k > kCloudCap) throw SizeCapError("cloud size " + std::to_string(k) + " exceeds " + std::to_string(kCloudCap));

    const SurfacePoint x = origin(m);
    const SurfacePoint y = point_at(m, x, delta, 0.0);
    const auto cloud_x = sample_ball(m, x, eps, k, seed, 1);
    std::vector<SurfacePoint> cloud_y;
    cloud_y.reserve(k);
    for (const auto& p : cloud_x) cloud_y.push_back(transvect(m, x, y, p));

    PairRicciEstimate est;
    est.delta = geodesic_distance(m, x, y);
    est.W = optimal_cloud_cost(m, cloud_x, cloud_y);
    est.kappa = 1.0 - est.W / est.delta;
    est.k = k;
    est.seed = seed;
    return est;
}

namespace {

void bron_kerbosch(const std::vector<std::vector<bool>>& adj, std::vector<std::size_t>& r,
                   std::vector<std::size_t> p, std::vector<std::size_t> x,
                   std::vector<std::vector<std::size_t>>& out) {
    if (p.empty() && x.empty()) {
        out.push_back(r);
        return;
    }
    // Pivot with the most neighbours in p.
    std::size_t pivot = p.empty() ? x.front() : p.front();
    std::size_t best = 0;
    for (const auto* set : {&p, &x})
        for (std::size_t u : *set) {
            std::size_t cnt = 0;
            for (std::size_t w : p) cnt += adj[u][w] ? 1 : 0;
            if (cnt > best) {
                best = cnt;
                pivot = u;
            }
        }
    const std::vector<std::size_t> candidates = [&] {
        std::vector<std::size_t> c;
        for (std::size_t v : p)
            if (!adj[pivot][v]) c.push_back(v);
        return c;
    }();
    for (std::size_t v : candidates) {
        std::vector<std::size_t> p2, x2;
        for (std::size_t w : p)
            if (adj[v][w]) p2.push_back(w);
        for (std::size_t w : x)
            if (adj[v][w]) x2.push_back(w);
        r.push_back(v);
        bron_kerbosch(adj, r, std::move(p2), std::move(x2), out);
        r.pop_back();
        p.erase(std::find(p.begin(), p.end(), v));
        x.push_back(v);
    }
}

}  // namespace

Hypergraph eps_neighborhood_hypergraph(const ModelSurface& m, std::span<const SurfacePoint> points,
                                       double eps) {
    const std::size_t n = points.size();
    if (n < 2) throw InvalidArgument("eps_neighborhood_hypergraph needs at least 2 points");
    if (!(eps > 0.0)) throw EpsilonInvalidError("eps must be positive");
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            adj[i][j] = adj[j][i] = geodesic_distance(m, points[i], points[j]) < 2.0 * eps;

    std::vector<std::vector<std::size_t>> cliques;
    std::vector<std::size_t> r, all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    bron_kerbosch(adj, r, all, {}, cliques);
    std::erase_if(cliques, [](const auto& c) { return c.size() < 2; });
    if (cliques.empty()) throw ParseError(0, "no two points are closer than 2 eps; the hypergraph is empty");
    for (auto& c : cliques) std::sort(c.begin(), c.end());
    std::sort(cliques.begin(), cliques.end());

    std::vector<bool> covered(n, false);
    for (const auto& c : cliques)
        for (std::size_t v : c) covered[v] = true;
    std::vector<VertexId> id(n, kUnreachable);
    std::vector<std::string> labels;
    for (std::size_t v = 0; v < n; ++v)
        if (covered[v]) {
            id[v] = static_cast<VertexId>(labels.size());
            labels.push_back(std::to_string(v));
        }
    std::vector<std::vector<VertexId>> edges;
    for (const auto& c : cliques) {
        std::vector<VertexId> e;
        for (std::size_t v : c) e.push_back(id[v]);
        edges.push_back(std::move(e));
    }
    return Hypergraph(std::move(labels), std::move(edges));
}

double t_quantile_975(std::size_t df) {
    if (df == 0) return kInf;
    const boost::math::students_t dist(static_cast<double>(df));
    return boost::math::quantile(boost::math::complement(dist, 0.025));
}

CoarseScalarSummary empirical_coarse_scalar(const ModelSurface& m, double eps, std::size_t n_pts,
                                            std::size_t k, std::size_t trials, std::uint64_t seed) {
    require_sampling_eps(m, eps);
    require_median_eps(m, eps);
    if (n_pts < 3) throw InvalidArgument("empirical_coarse_scalar needs n_pts >= 3");
    if (k == 0) throw InvalidArgument("empirical_coarse_scalar needs k >= 1");
    if (k > kCloudCap) throw SizeCapError("cloud size " + std::to_string(k) + " exceeds " + std::to_string(kCloudCap));
    if (trials < 2) throw InvalidArgument("empirical_coarse_scalar needs at least 2 trials");

    const SurfacePoint o = origin(m);
    const double t_pts = t_quantile_975(n_pts - 1);
    CoarseScalarSummary out;
    for (std::size_t t = 0; t < trials; ++t) {
        const std::uint64_t stream = 0x100 + 2 * static_cast<std::uint64_t>(t);
        const auto pts = sample_ball(m, o, eps, n_pts, seed, stream);
        const auto med = riemannian_median(m, pts);
        const auto base = sample_ball(m, med.point, eps, k, seed, stream + 1);

        std::vector<double> w(n_pts), c(n_pts);
        for (std::size_t i = 0; i < n_pts; ++i) {
            std::vector<SurfacePoint> cloud;
            cloud.reserve(k);
            for (const auto& p : base) cloud.push_back(transvect(m, med.point, pts[i], p));
            w[i] = optimal_cloud_cost(m, base, cloud);
            c[i] = geodesic_distance(m, pts[i], med.point);
        }

        CoarseScalarTrial tr;
        tr.trial = t;
        tr.median = med.point;
        for (std::size_t i = 0; i < n_pts; ++i) {
            tr.W += w[i];
            tr.cost += c[i];
        }
        tr.kappa_hat = 1.0 - tr.W / tr.cost;

        // Leave-one-point-out jackknife.
        std::vector<double> loo(n_pts);
        double loo_mean = 0.0;
        for (std::size_t i = 0; i < n_pts; ++i) {
            loo[i] = 1.0 - (tr.W - w[i]) / (tr.cost - c[i]);
            loo_mean += loo[i];
        }
        loo_mean /= static_cast<double>(n_pts);
        double var = 0.0;
        for (double v : loo) var += (v - loo_mean) * (v - loo_mean);
        var *= static_cast<double>(n_pts - 1) / static_cast<double>(n_pts);
        const double half = t_pts * std::sqrt(var) + kResolutionFloor;
        tr.ci_low = tr.kappa_hat - half;
        tr.ci_high = tr.kappa_hat + half;
        out.trials.push_back(tr);
    }

    const double nt = static_cast<double>(trials);
    for (const auto& tr : out.trials) out.mean += tr.kappa_hat;
    out.mean /= nt;
    double ss = 0.0;
    for (const auto& tr : out.trials) ss += (tr.kappa_hat - out.mean) * (tr.kappa_hat - out.mean);
    out.sd = std::sqrt(ss / (nt - 1.0));
    out.std_error = out.sd / std::sqrt(nt);
    const double half = t_quantile_975(trials - 1) * out.std_error + kResolutionFloor;
    out.ci_low = out.mean - half;
    out.ci_high = out.mean + half;

    const double d = ModelSurface::dimension;
    out.prediction_average = eps * eps * m.scalar_average() / (2.0 * (d + 2.0));
    out.prediction_trace = eps * eps * m.scalar_trace() / (2.0 * (d + 2.0));
    return out;
}

}  // namespace hypercurv
