#include <doctest.h>

#include <cstdio>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "hypercurv/cli.hpp"
#include "support.hpp"

using hypercurv::cli::RunConfig;
using Json = nlohmann::json;

namespace {

struct Outcome {
    int status;
    std::string out;
};

Outcome run(RunConfig cfg) {
    std::ostringstream out, diag;
    const int status = hypercurv::cli::run(cfg, out, diag);
    return {status, out.str()};
}

RunConfig on_toy(std::string command) {
    RunConfig cfg;
    cfg.command = std::move(command);
    cfg.input = testing_support::data_path("toy.hg");
    return cfg;
}

Outcome run_binary(const std::string& args) {
    const std::string cmd = std::string(HYPERCURV_BIN) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    while (std::size_t got = fread(buf, 1, sizeof buf, pipe)) out.append(buf, got);
    const int raw = pclose(pipe);
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, sep)) cells.push_back(cell);
    return cells;
}

}  // namespace

TEST_CASE("curvature report schema") {
    const auto r = run(on_toy("curvature"));
    REQUIRE(r.status == 0);
    const auto doc = Json::parse(r.out);
    REQUIRE(doc["edges"].size() == 4);
    const auto& first = doc["edges"][0];
    for (const char* key : {"id", "vertices", "n", "W", "kappa", "upper_bound", "method", "iterations", "runtime_ms"})
        CHECK(first.contains(key));
    CHECK(first["id"] == 1);
    CHECK(first["vertices"] == Json::array({"2", "4", "5", "6", "7"}));
    CHECK(first["kappa"].get<double>() == doctest::Approx(0.40625));
    CHECK(first["method"] == "exact-barycenter");
    CHECK(first["runtime_ms"].is_null());
    for (const char* key : {"file", "N", "num_edges", "method", "epsilon"}) CHECK(doc["meta"].contains(key));
    CHECK(doc["meta"]["N"] == 13);
    CHECK(doc["meta"]["epsilon"].is_null());
}

TEST_CASE("CSV columns mirror the JSON record keys") {
    auto cfg = on_toy("curvature");
    cfg.output = "csv";
    const auto csv = run(cfg);
    REQUIRE(csv.status == 0);
    std::istringstream lines(csv.out);
    std::string header;
    std::getline(lines, header);
    const auto doc = Json::parse(run(on_toy("curvature")).out);
    std::vector<std::string> keys;
    for (const auto& [k, v] : doc["edges"][0].items()) keys.push_back(k);
    auto cols = split(header, ',');
    std::sort(keys.begin(), keys.end());
    std::sort(cols.begin(), cols.end());
    CHECK(cols == keys);
    std::size_t rows = 0;
    for (std::string line; std::getline(lines, line);) ++rows;
    CHECK(rows == 4);
}

TEST_CASE("repeated runs are byte-identical") {
    for (const char* command : {"curvature", "bounds", "distances", "walks", "hyperpath-check"}) {
        const auto a = run(on_toy(command));
        const auto b = run(on_toy(command));
        CHECK(a.out == b.out);
    }
    auto threaded = on_toy("curvature");
    threaded.jobs = 3;
    CHECK(run(threaded).out == run(on_toy("curvature")).out);

    RunConfig mc;
    mc.command = "manifold-check";
    mc.surface = "sphere";
    mc.k = 40;
    mc.trials = 3;
    mc.seed = 11;
    CHECK(run(mc).out == run(mc).out);
}

TEST_CASE("bounds report") {
    const auto r = run(on_toy("bounds"));
    REQUIRE(r.status == 0);
    const auto doc = Json::parse(r.out);
    for (const auto& e : doc["edges"]) {
        CHECK(e["kappa"].get<double>() <= e["upper_bound"].get<double>() + 1e-9);
        CHECK(e["dual_lower_bound"].get<double>() <= e["W"].get<double>() + 1e-9);
        CHECK(e.contains("common_neighbor_mass"));
    }
}

TEST_CASE("entropic method needs epsilon and lands near the exact values") {
    auto cfg = on_toy("curvature");
    cfg.method = "entropic";
    const auto missing = run(cfg);
    CHECK(missing.status == 2);
    CHECK(Json::parse(missing.out)["code"] == "usage_error");

    cfg.epsilon = 0.01;
    const auto ent = run(cfg);
    REQUIRE(ent.status == 0);
    const auto exact = Json::parse(run(on_toy("curvature")).out);
    const auto doc = Json::parse(ent.out);
    CHECK(doc["meta"]["epsilon"].get<double>() == 0.01);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(doc["edges"][i]["id"] == exact["edges"][i]["id"]);
        CHECK(std::abs(doc["edges"][i]["kappa"].get<double>() - exact["edges"][i]["kappa"].get<double>()) <= 0.05);
    }

    auto stray = on_toy("curvature");
    stray.epsilon = 0.1;
    CHECK(run(stray).status == 2);
}

TEST_CASE("usage and computation errors map to exit codes") {
    auto missing = on_toy("curvature");
    missing.input = "/nonexistent/graph.hg";
    const auto r = run(missing);
    CHECK(r.status == 2);
    CHECK(Json::parse(r.out)["code"] == "io_not_found");

    RunConfig mc;
    mc.command = "manifold-check";
    mc.surface = "sphere";
    mc.eps = 3.0;
    const auto bad = run(mc);
    CHECK(bad.status == 1);
    CHECK(Json::parse(bad.out)["code"] == "epsilon_invalid");

    RunConfig cu;
    cu.command = "complete-uniform";
    cu.N = 15;
    cu.n = 3;
    CHECK(run(cu).status == 1);
    CHECK(Json::parse(run(cu).out)["code"] == "size_cap_exceeded");
}

TEST_CASE("the installed binary reports errors as JSON with the documented exit codes") {
    const auto missing = run_binary("curvature /nonexistent/graph.hg");
    CHECK(missing.status == 2);
    CHECK(Json::parse(missing.out)["code"] == "io_not_found");

    const auto bad_flag = run_binary("curvature --no-such-flag x");
    CHECK(bad_flag.status == 2);
    CHECK(Json::parse(bad_flag.out)["code"] == "usage_error");

    const auto eps = run_binary("manifold-check --surface sphere --eps 3.0");
    CHECK(eps.status == 1);
    CHECK(Json::parse(eps.out)["code"] == "epsilon_invalid");

    const auto ok = run_binary("curvature " + testing_support::data_path("toy.hg"));
    CHECK(ok.status == 0);
    CHECK(ok.out == run_binary("curvature " + testing_support::data_path("toy.hg")).out);
}

TEST_CASE("complete-uniform and manifold-check outputs") {
    RunConfig cu;
    cu.command = "complete-uniform";
    cu.N = 6;
    cu.n = 4;
    const auto r = run(cu);
    REQUIRE(r.status == 0);
    const auto doc = Json::parse(r.out);
    CHECK(doc["max_deviation"].get<double>() <= 1e-8);

    RunConfig mc;
    mc.command = "manifold-check";
    mc.surface = "torus";
    mc.k = 40;
    mc.trials = 3;
    mc.seed = 5;
    const auto m = run(mc);
    REQUIRE(m.status == 0);
    const auto mdoc = Json::parse(m.out);
    REQUIRE(mdoc["trials"].size() == 3);
    for (const char* key : {"surface", "eps", "n_pts", "k", "seed", "trial", "kappa_hat", "ci_low", "ci_high"})
        CHECK(mdoc["trials"][0].contains(key));
    CHECK(mdoc["summary"]["ci_contains_zero"] == true);
}
