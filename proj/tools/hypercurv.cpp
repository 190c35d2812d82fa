#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "hypercurv/cli.hpp"

namespace {

void add_solver_flags(CLI::App* sub, hypercurv::cli::RunConfig& cfg) {
    sub->add_option("--method", cfg.method, "exact or entropic")->check(CLI::IsMember({"exact", "entropic"}));
    sub->add_option("--solver", cfg.solver, "exact solver: barycenter or mmot")
        ->check(CLI::IsMember({"barycenter", "mmot"}));
    sub->add_option("--epsilon", cfg.epsilon, "entropic regularization in hops (required with --method entropic)");
    sub->add_option("--tol", cfg.tol, "solver tolerance");
    sub->add_option("--max-iter", cfg.max_iter, "solver iteration limit");
    sub->add_option("--jobs", cfg.jobs, "parallel per-edge solves (default $HYPERCURV_JOBS or 1)");
}

void add_common_flags(CLI::App* sub, hypercurv::cli::RunConfig& cfg) {
    sub->add_option("--output", cfg.output, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_flag("--timings", cfg.timings, "report runtime_ms (output is then not reproducible)");
    sub->add_option("--log", cfg.log_path, "append timestamps to this sidecar log");
}

}  // namespace

int main(int argc, char** argv) {
    hypercurv::cli::RunConfig cfg;
    if (const char* env = std::getenv("HYPERCURV_JOBS")) {
        try {
            cfg.jobs = std::stoul(env);
        } catch (const std::exception&) {
            std::cerr << "hypercurv: ignoring malformed HYPERCURV_JOBS\n";
        }
    }

    CLI::App app{"Hyperedge curvature via multi-marginal optimal transport"};
    app.require_subcommand(1);

    for (const char* name : {"curvature", "bounds", "distances", "walks", "hyperpath-check"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("input", cfg.input, "hypergraph file, one hyperedge per line")->required();
        sub->add_flag("--dedupe", cfg.dedupe, "drop repeated hyperedges instead of failing");
        add_common_flags(sub, cfg);
        if (std::string(name) != "distances" && std::string(name) != "walks") add_solver_flags(sub, cfg);
    }
    app.get_subcommand("curvature")->description("curvature of every hyperedge, ascending");
    app.get_subcommand("bounds")->description("curvature with upper, dual and hyperpath bounds");
    app.get_subcommand("distances")->description("hyperedge-chain distance matrix");
    app.get_subcommand("walks")->description("uniform random walk of every vertex");
    app.get_subcommand("hyperpath-check")->description("check the hyperpath lower bound on every edge");

    auto* cu = app.add_subcommand("complete-uniform", "curvature of the complete n-uniform hypergraph on N vertices");
    cu->add_option("N", cfg.N, "vertex count")->required();
    cu->add_option("n", cfg.n, "edge size")->required();
    cu->add_flag("--all-edges", cfg.all_edges, "solve every edge instead of one representative");
    add_common_flags(cu, cfg);
    add_solver_flags(cu, cfg);

    auto* mc = app.add_subcommand("manifold-check", "empirical coarse scalar curvature on a model surface");
    mc->add_option("--surface", cfg.surface, "sphere, torus or hyperbolic")->required();
    mc->add_option("--radius", cfg.radius, "sphere / hyperbolic radius (default 1)");
    mc->add_option("--length", cfg.length, "torus side length (default 2 pi)");
    mc->add_option("--eps", cfg.eps, "ball radius")->capture_default_str();
    mc->add_option("--n-pts", cfg.n_pts, "points per hyperedge")->capture_default_str();
    mc->add_option("--k", cfg.k, "cloud size per point")->capture_default_str();
    mc->add_option("--trials", cfg.trials, "independent trials")->capture_default_str();
    mc->add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
    add_common_flags(mc, cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cout << nlohmann::json{{"code", "usage_error"}, {"message", e.what()}}.dump() << '\n';
        std::cerr << "hypercurv: " << e.what() << '\n';
        return hypercurv::cli::kUsageError;
    }
    cfg.command = app.get_subcommands().front()->get_name();
    return hypercurv::cli::run(cfg, std::cout, std::cerr);
}
