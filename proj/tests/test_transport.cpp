#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hypercurv/errors.hpp"
#include "hypercurv/metric.hpp"
#include "hypercurv/random_walk.hpp"
#include "hypercurv/transport_entropic.hpp"
#include "hypercurv/transport_exact.hpp"
#include "support.hpp"

using namespace hypercurv;
using testing_support::toy;

namespace {

Hypergraph complete_uniform_graph(VertexId N, std::size_t n) {
    std::vector<std::vector<VertexId>> edges;
    std::vector<bool> mask(N, false);
    std::fill(mask.begin(), mask.begin() + static_cast<long>(n), true);
    do {
        std::vector<VertexId> e;
        for (VertexId v = 0; v < N; ++v)
            if (mask[v]) e.push_back(v);
        edges.push_back(e);
    } while (std::prev_permutation(mask.begin(), mask.end()));
    return testing_support::from_edges(N, edges);
}

void check_plan_marginals(const TransportPlan& plan, std::span<const Distribution* const> marginals, std::size_t n) {
    for (std::size_t axis = 0; axis < marginals.size(); ++axis) {
        const auto got = plan.marginal(axis, n);
        const auto want = marginals[axis]->to_dense(n);
        for (std::size_t v = 0; v < n; ++v) CHECK(std::abs(got[v] - want[v]) <= 1e-9);
    }
    double total = 0.0;
    for (double m : plan.mass) {
        CHECK(m >= 0.0);
        total += m;
    }
    CHECK(std::abs(total - 1.0) <= 1e-9);
}

}  // namespace

TEST_CASE("w1_pair basics") {
    const auto h = toy();
    const auto dm = distance_matrix(h);
    const auto m2 = walk_distribution(h, h.id_of("2"));
    CHECK(w1_pair(dm, m2.mass, m2.mass).value == doctest::Approx(0.0).scale(1.0));

    const auto k = complete_uniform_graph(7, 3);
    const auto dk = distance_matrix(k);
    for (VertexId j = 1; j < 7; ++j) {
        const auto r = w1_pair(dk, walk_distribution(k, 0).mass, walk_distribution(k, j).mass);
        CHECK(r.value == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    }
}

TEST_CASE("w1_pair equals total variation when all distances are 1") {
    const auto k = testing_support::complete_graph(8);
    const auto dm = distance_matrix(k);
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        CounterRng rng(seed, 3);
        std::vector<double> a(8), b(8);
        for (std::size_t v = 0; v < 8; ++v) {
            a[v] = rng.uniform() < 0.3 ? 0.0 : rng.uniform();
            b[v] = rng.uniform() < 0.3 ? 0.0 : rng.uniform();
        }
        a[0] += 0.1;
        b[7] += 0.1;
        const double sa = std::accumulate(a.begin(), a.end(), 0.0), sb = std::accumulate(b.begin(), b.end(), 0.0);
        for (auto& x : a) x /= sa;
        for (auto& x : b) x /= sb;
        double tv = 0.0;
        for (std::size_t v = 0; v < 8; ++v) tv += std::abs(a[v] - b[v]) / 2.0;
        const auto mu = Distribution::from_dense(a), nu = Distribution::from_dense(b);
        const auto r = w1_pair(dm, mu, nu);
        CHECK(r.value == doctest::Approx(tv).epsilon(1e-10));
        const Distribution* margs[] = {&mu, &nu};
        check_plan_marginals(r.plan, margs, 8);
    }
}

TEST_CASE("w1_pair on uniform point sets matches the best permutation") {
    const auto h = testing_support::path_graph(9);
    const auto dm = distance_matrix(h);
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        CounterRng rng(seed, 11);
        const std::size_t k = 2 + seed % 4;
        std::vector<VertexId> xs, ys;
        std::vector<double> a(9, 0.0), b(9, 0.0);
        while (xs.size() < k) {
            const auto v = static_cast<VertexId>(rng.uniform() * 9);
            if (a[v] == 0.0) {
                a[v] = 1.0 / static_cast<double>(k);
                xs.push_back(v);
            }
        }
        while (ys.size() < k) {
            const auto v = static_cast<VertexId>(rng.uniform() * 9);
            if (b[v] == 0.0) {
                b[v] = 1.0 / static_cast<double>(k);
                ys.push_back(v);
            }
        }
        std::sort(ys.begin(), ys.end());
        double best = 1e300;
        do {
            double s = 0.0;
            for (std::size_t i = 0; i < k; ++i) s += dm.length(xs[i], ys[i]);
            best = std::min(best, s / static_cast<double>(k));
        } while (std::next_permutation(ys.begin(), ys.end()));
        CHECK(w1_pair(dm, Distribution::from_dense(a), Distribution::from_dense(b)).value ==
              doctest::Approx(best).epsilon(1e-10));
    }
}

TEST_CASE("w1_pair errors") {
    const auto h = parse_hypergraph("a b\nc d\n");
    const auto dm = distance_matrix(h);
    const auto ma = walk_distribution(h, 0), mc = walk_distribution(h, 2);
    CHECK_THROWS_AS(w1_pair(dm, ma.mass, mc.mass), DisconnectedError);
    Distribution heavy = ma.mass;
    heavy.mass[0] = 1.5;
    CHECK_THROWS_AS(w1_pair(dm, heavy, ma.mass), MarginalError);
}

TEST_CASE("mmot on the toy hypergraph and complete uniform edges") {
    const auto h = toy();
    const auto dm = distance_matrix(h);
    const auto walks = walks_for(h, h.edge(0));
    const auto r = mmot(dm, walks);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));
    std::vector<const Distribution*> margs;
    for (const auto& w : walks) margs.push_back(&w.mass);
    check_plan_marginals(r.plan, margs, h.num_vertices());

    double recomputed = 0.0;
    for (std::size_t t = 0; t < r.plan.size(); ++t) recomputed += r.plan.mass[t] * cost_c(dm, r.plan.tuple(t)).value;
    CHECK(recomputed == doctest::Approx(r.value).epsilon(1e-9));
    CHECK(r.duals.certified);
    CHECK(r.duals.value(walks) == doctest::Approx(r.value).epsilon(1e-8));

    const auto k = complete_uniform_graph(5, 3);
    const auto dk = distance_matrix(k);
    for (EdgeId e = 0; e < k.num_edges(); ++e)
        CHECK(mmot(dk, walks_for(k, k.edge(e))).value == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("two-marginal mmot and barycenter reduce to w1_pair") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto h = testing_support::random_hypergraph(seed);
        const auto dm = distance_matrix(h);
        for (const auto& e : h.edges()) {
            if (e.size() != 2) continue;
            const auto walks = walks_for(h, e);
            const double pair = w1_pair(dm, walks[0].mass, walks[1].mass).value;
            CHECK(mmot(dm, walks).value == doctest::Approx(pair).epsilon(1e-9));
            CHECK(barycenter(dm, walks).objective == doctest::Approx(pair).epsilon(1e-9));
        }
    }
}

TEST_CASE("barycenter objective equals the sum of W1 to the returned nu") {
    const auto h = toy();
    const auto dm = distance_matrix(h);
    const auto walks = walks_for(h, h.edge(1));
    const auto sol = barycenter(dm, walks);
    CHECK(sol.objective == doctest::Approx(2.375).epsilon(1e-9));
    double sum = 0.0;
    for (std::size_t i = 0; i < walks.size(); ++i) {
        sum += w1_pair(dm, walks[i].mass, sol.nu).value;
        const Distribution* margs[] = {&walks[i].mass, &sol.nu};
        check_plan_marginals(sol.plans[i], margs, h.num_vertices());
    }
    CHECK(sum == doctest::Approx(sol.objective).epsilon(1e-9));

    const auto k = complete_uniform_graph(7, 4);
    const auto dk = distance_matrix(k);
    const auto kw = walks_for(k, k.edge(3));
    const auto ks = barycenter(dk, kw);
    CHECK(ks.objective == doctest::Approx(3.0 / 6.0).epsilon(1e-9));
    // The uniform mixture of the marginals is an optimal barycenter.
    std::vector<double> mix(7, 0.0);
    for (const auto& w : kw)
        for (std::size_t s = 0; s < w.mass.size(); ++s) mix[w.mass.support[s]] += w.mass.mass[s] / 4.0;
    double mix_cost = 0.0;
    for (const auto& w : kw) mix_cost += w1_pair(dk, w.mass, Distribution::from_dense(mix)).value;
    CHECK(mix_cost == doctest::Approx(ks.objective).epsilon(1e-9));
}

TEST_CASE("mmot and barycenter agree on random hypergraphs") {
    for (std::uint64_t seed = 1000; seed < 1025; ++seed) {
        const auto h = testing_support::random_hypergraph(seed);
        const auto dm = distance_matrix(h);
        for (const auto& e : h.edges()) {
            const auto walks = walks_for(h, e);
            const double a = mmot(dm, walks).value;
            const double b = barycenter(dm, walks).objective;
            CHECK(std::abs(a - b) <= 1e-6);
            CHECK(a >= 0.0);
            CHECK(a <= 3.0 * static_cast<double>(e.size() - 1) + 1e-9);
        }
    }
}

TEST_CASE("mmot errors") {
    const auto h = toy();
    const auto dm = distance_matrix(h);
    const auto walks = walks_for(h, h.edge(2));
    CHECK_THROWS_AS(mmot(dm, walks, MmotOptions{.support_cap = 10}), SupportCapExceeded);
    CHECK_THROWS_AS(mmot(dm, std::span(walks).first(1)), InvalidArgument);
    CHECK_THROWS_AS(barycenter(dm, std::span(walks).first(1)), InvalidArgument);

    const auto split = parse_hypergraph("a b\nc d\n");
    const auto ds = distance_matrix(split);
    const auto mixed = walks_for(split, {0, 2});
    CHECK_THROWS_AS(mmot(ds, mixed), DisconnectedError);
    CHECK_THROWS_AS(barycenter(ds, mixed), DisconnectedError);
}

TEST_CASE("dual lower bound") {
    const auto k = complete_uniform_graph(6, 3);
    const auto dk = distance_matrix(k);
    const auto kw = walks_for(k, k.edge(0));
    const auto kb = dual_lower_bound(dk, kw, 0, 1);
    CHECK(kb.value == doctest::Approx(1.0 / 5.0));
    CHECK(kb.potentials.certified);
    CHECK(kb.value <= 2.0 / 5.0 + 1e-9);

    // Middle edge of P_4: the endpoints' neighbourhoods are disjoint.
    const auto p = testing_support::path_graph(4);
    const auto dp = distance_matrix(p);
    const auto pw = walks_for(p, {1, 2});
    CHECK(dual_lower_bound(dp, pw, 0, 1).value == doctest::Approx(1.0));
    CHECK_THROWS_AS(dual_lower_bound(dp, pw, 0, 2), IndexError);
    CHECK_THROWS_AS(dual_lower_bound(dp, pw, 1, 1), IndexError);

    for (std::uint64_t seed = 40; seed < 60; ++seed) {
        const auto h = testing_support::random_hypergraph(seed);
        const auto dm = distance_matrix(h);
        for (const auto& e : h.edges()) {
            const auto walks = walks_for(h, e);
            const double W = mmot(dm, walks).value;
            for (std::size_t u = 0; u < walks.size(); ++u)
                for (std::size_t v = 0; v < walks.size(); ++v) {
                    if (u == v) continue;
                    auto b = dual_lower_bound(dm, walks, u, v);
                    CHECK(b.value <= W + 1e-9);
                    certify(b.potentials, dm, walks);
                    CHECK(b.potentials.certified);
                    CHECK(b.potentials.value(walks) == doctest::Approx(b.value).epsilon(1e-12));
                }
        }
    }
}

TEST_CASE("entropic: log and plain domains agree") {
    const auto h = toy();
    const auto dm = distance_matrix(h);
    for (double eps : {0.5, 0.25}) {
        EntropicConfig log_cfg{.epsilon = eps, .max_iter = 200000, .tol = 1e-13};
        EntropicConfig plain_cfg = log_cfg;
        plain_cfg.log_domain = false;
        const auto m1 = walk_distribution(h, h.id_of("1")), m7 = walk_distribution(h, h.id_of("7"));
        const auto a = sinkhorn_w1(dm, m1.mass, m7.mass, log_cfg);
        const auto b = sinkhorn_w1(dm, m1.mass, m7.mass, plain_cfg);
        CHECK(std::abs(a.transport - b.transport) <= 1e-8);
        CHECK(std::abs(a.regularized - b.regularized) <= 1e-8);
        for (EdgeId e = 0; e < h.num_edges(); ++e) {
            const auto walks = walks_for(h, h.edge(e));
            const auto x = entropic_barycenter(dm, walks, log_cfg);
            const auto y = entropic_barycenter(dm, walks, plain_cfg);
            CHECK(std::abs(x.transport - y.transport) <= 1e-8);
            CHECK(std::abs(x.regularized - y.regularized) <= 1e-8);
        }
    }
}

TEST_CASE("entropic: identical marginals cost at most eps log N") {
    const auto h = toy();
    const auto dm = distance_matrix(h);
    const auto m2 = walk_distribution(h, h.id_of("2"));
    double prev = 1e300;
    for (double eps : {0.5, 0.1, 0.05, 0.01}) {
        const auto r = sinkhorn_w1(dm, m2.mass, m2.mass, {.epsilon = eps});
        CHECK(r.transport <= eps * std::log(13.0));
        CHECK(r.transport <= prev);
        prev = r.transport;
    }
    CHECK(prev < 1e-12);
}

TEST_CASE("entropic: small epsilon approaches the exact values") {
    const auto h = toy();
    const auto dm = distance_matrix(h);
    const auto m1 = walk_distribution(h, h.id_of("1")), m2 = walk_distribution(h, h.id_of("2"));
    const double exact = w1_pair(dm, m1.mass, m2.mass).value;
    const auto r = sinkhorn_w1(dm, m1.mass, m2.mass, {.epsilon = 0.01});
    CHECK(std::abs(r.transport - exact) <= 0.05);
    CHECK(r.residual <= 1e-9);
    const Distribution* margs[] = {&m1.mass, &m2.mass};
    check_plan_marginals(r.plan, margs, h.num_vertices());

    const auto e2 = entropic_barycenter(dm, walks_for(h, h.edge(1)), {.epsilon = 0.01});
    CHECK(std::abs(e2.transport - 2.375) <= 0.05);
    CHECK(std::abs(e2.nu.total() - 1.0) <= 1e-9);

    const auto k = complete_uniform_graph(5, 3);
    const auto dk = distance_matrix(k);
    const auto ek = entropic_barycenter(dk, walks_for(k, k.edge(0)), {.epsilon = 0.01});
    CHECK(std::abs(ek.transport - 0.5) <= 0.02);
}

TEST_CASE("entropic: regularized objective is bounded below by exact minus eps log support") {
    const auto h = toy();
    const auto dm = distance_matrix(h);
    for (EdgeId e = 0; e < h.num_edges(); ++e) {
        const auto walks = walks_for(h, h.edge(e));
        const double exact = barycenter(dm, walks).objective;
        for (double eps : {0.5, 0.1, 0.05, 0.01}) {
            const auto r = entropic_barycenter(dm, walks, {.epsilon = eps});
            double slack = 0.0;
            for (const auto& w : walks) slack += std::log(static_cast<double>(w.mass.size() * h.num_vertices()));
            CHECK(r.regularized >= exact - eps * slack - 1e-9);
            CHECK(r.transport >= exact - 1e-7);
        }
    }
}

TEST_CASE("entropic: argument and floor errors") {
    const auto h = toy();
    const auto dm = distance_matrix(h);
    const auto walks = walks_for(h, h.edge(1));
    CHECK_THROWS_AS(entropic_barycenter(dm, std::span(walks).first(1), {}), InvalidArgument);
    CHECK_THROWS_AS(entropic_barycenter(dm, walks, {.epsilon = 0.0}), InvalidArgument);
    CHECK_THROWS_AS(entropic_barycenter(dm, walks, {.epsilon = 0.1, .tol = 0.0}), InvalidArgument);

    EntropicConfig plain{.epsilon = 1e-3};
    plain.log_domain = false;
    CHECK_THROWS_AS(entropic_barycenter(dm, walks, plain), EpsilonFloorError);
    CHECK_THROWS_AS(sinkhorn_w1(dm, walks[0].mass, walks[1].mass, plain), EpsilonFloorError);

    EntropicConfig starved{.epsilon = 0.01, .max_iter = 3};
    starved.newton_after = 0;
    try {
        entropic_barycenter(dm, walks, starved);
        FAIL("expected no convergence");
    } catch (const ConvergenceError& e) {
        CHECK(e.residual() > starved.tol);
    }

    const auto split = parse_hypergraph("a b\nc d\n");
    CHECK_THROWS_AS(sinkhorn_w1(distance_matrix(split), walk_distribution(split, 0).mass,
                                walk_distribution(split, 2).mass, {}),
                    DisconnectedError);
}
