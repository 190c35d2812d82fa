#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace hypercurv::cli {

enum ExitCode : int { kOk = 0, kComputationError = 1, kUsageError = 2 };

struct RunConfig {
    std::string command;  // curvature | bounds | distances | walks | manifold-check
                          // | complete-uniform | hyperpath-check
    std::string input;
    std::string method = "exact";       // exact | entropic
    std::string solver = "barycenter";  // exact solver: barycenter | mmot
    std::optional<double> epsilon;      // entropic regularization, hops
    std::optional<double> tol;
    std::optional<std::size_t> max_iter;
    std::string output = "json";  // json | csv
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
    bool dedupe = false;
    bool timings = false;  // fill runtime_ms (breaks byte-for-byte reproducibility)
    std::string log_path;  // sidecar log with timestamps

    // manifold-check
    std::string surface;  // sphere | torus | hyperbolic
    std::optional<double> radius;
    std::optional<double> length;
    double eps = 0.3;
    std::size_t n_pts = 10;
    std::size_t k = 200;
    std::size_t trials = 20;

    // complete-uniform
    std::size_t N = 0;
    std::size_t n = 0;
    bool all_edges = false;
};

// Writes the report (or an error object with a "code" member) to `out` and
// returns the process exit status.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& diag);

}  // namespace hypercurv::cli
