#include "hypercurv/cli.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "hypercurv/curvature.hpp"
#include "hypercurv/errors.hpp"
#include "hypercurv/hypergraph.hpp"
#include "hypercurv/manifold.hpp"
#include "hypercurv/metric.hpp"
#include "hypercurv/random_walk.hpp"

namespace hypercurv::cli {

namespace {

using Json = nlohmann::ordered_json;

class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error("usage_error", what) {}
};

class IoError : public Error {
public:
    IoError(std::string code, const std::string& what) : Error(std::move(code), what) {}
};

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

std::string format_number(double x) {
    if (!std::isfinite(x)) return "";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}

std::string join_labels(const Hypergraph& h, const std::vector<VertexId>& vs) {
    std::string s;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (i) s += ' ';
        s += h.label(vs[i]);
    }
    return s;
}

Json label_array(const Hypergraph& h, const std::vector<VertexId>& vs) {
    Json a = Json::array();
    for (VertexId v : vs) a.push_back(h.label(v));
    return a;
}

Hypergraph load(const RunConfig& cfg) {
    if (cfg.input.empty()) throw UsageError(cfg.command + " needs an input file");
    std::error_code ec;
    if (!std::filesystem::exists(cfg.input, ec)) throw IoError("io_not_found", "no such file: " + cfg.input);
    std::ifstream in(cfg.input, std::ios::binary);
    if (!in) throw IoError("io_unreadable", "cannot open " + cfg.input);
    return parse_hypergraph(in, ParseOptions{.dedupe = cfg.dedupe});
}

CurvatureOptions curvature_options(const RunConfig& cfg) {
    CurvatureOptions opts;
    if (cfg.method == "entropic") {
        opts.method = Method::Entropic;
        opts.entropic.epsilon = *cfg.epsilon;
        if (cfg.tol) opts.entropic.tol = *cfg.tol;
        if (cfg.max_iter) opts.entropic.max_iter = *cfg.max_iter;
        opts.entropic.validate();
    } else {
        opts.method = cfg.solver == "mmot" ? Method::ExactMmot : Method::ExactBarycenter;
        if (cfg.tol) opts.lp.feasibility_tol = *cfg.tol;
        if (cfg.max_iter) opts.lp.max_iterations = *cfg.max_iter;
        opts.mmot.lp = opts.lp;
    }
    return opts;
}

void validate(const RunConfig& cfg) {
    static const std::vector<std::string> commands{"curvature",      "bounds",           "distances",     "walks",
                                                   "manifold-check", "complete-uniform", "hyperpath-check"};
    if (std::find(commands.begin(), commands.end(), cfg.command) == commands.end())
        throw UsageError("unknown command '" + cfg.command + "'");
    if (cfg.method != "exact" && cfg.method != "entropic")
        throw UsageError("--method must be exact or entropic");
    if (cfg.solver != "barycenter" && cfg.solver != "mmot") throw UsageError("--solver must be barycenter or mmot");
    if (cfg.method == "entropic" && !cfg.epsilon) throw UsageError("--method entropic requires --epsilon");
    if (cfg.method != "entropic" && cfg.epsilon) throw UsageError("--epsilon applies only to --method entropic");
    if (cfg.output != "json" && cfg.output != "csv") throw UsageError("--output must be json or csv");
    if (cfg.jobs == 0) throw UsageError("--jobs must be at least 1");
    const bool manifold = cfg.command == "manifold-check";
    if (manifold && cfg.surface.empty()) throw UsageError("manifold-check requires --surface");
    if (!manifold && (!cfg.surface.empty() || cfg.radius || cfg.length))
        throw UsageError("surface parameters apply only to manifold-check");
    if (manifold && cfg.surface != "sphere" && cfg.surface != "torus" && cfg.surface != "hyperbolic")
        throw UsageError("--surface must be sphere, torus or hyperbolic");
    if (manifold && cfg.surface == "torus" && cfg.radius) throw UsageError("the torus takes --length, not --radius");
    if (manifold && cfg.surface != "torus" && cfg.length) throw UsageError("--length applies only to the torus");
}

Json record_json(const Hypergraph& h, const CurvatureRecord& r, bool timings) {
    Json j;
    j["id"] = r.edge;
    j["vertices"] = label_array(h, r.vertices);
    j["n"] = r.n;
    j["W"] = number_or_null(r.W);
    j["kappa"] = number_or_null(r.kappa);
    j["upper_bound"] = number_or_null(r.upper_bound);
    j["method"] = std::string(method_tag(r.method));
    j["iterations"] = r.iterations;
    j["runtime_ms"] = timings ? Json(r.runtime_ms) : Json(nullptr);
    if (!r.ok()) j["error"] = Json{{"code", *r.error_code}, {"message", *r.error_message}};
    return j;
}

void write_records_csv(std::ostream& out, const Hypergraph& h, const std::vector<CurvatureRecord>& records,
                       bool timings) {
    out << "id,vertices,n,W,kappa,upper_bound,method,iterations,runtime_ms\n";
    for (const auto& r : records) {
        out << r.edge << ',' << csv_field(join_labels(h, r.vertices)) << ',' << r.n << ',' << format_number(r.W)
            << ',' << format_number(r.kappa) << ',' << format_number(r.upper_bound) << ',' << method_tag(r.method)
            << ',' << r.iterations << ',' << (timings ? format_number(r.runtime_ms) : "") << '\n';
    }
}

Json meta_json(const RunConfig& cfg, const Hypergraph& h, const CurvatureOptions& opts) {
    Json meta;
    meta["file"] = cfg.input;
    meta["N"] = h.num_vertices();
    meta["num_edges"] = h.num_edges();
    meta["method"] = std::string(method_tag(opts.method));
    meta["epsilon"] = opts.method == Method::Entropic ? Json(opts.entropic.epsilon) : Json(nullptr);
    return meta;
}

int cmd_curvature(const RunConfig& cfg, std::ostream& out) {
    const Hypergraph h = load(cfg);
    const DistanceMatrix dm = distance_matrix(h);
    const CurvatureOptions opts = curvature_options(cfg);
    const auto records = curvature_report(h, dm, opts, cfg.jobs);
    if (cfg.output == "csv") {
        write_records_csv(out, h, records, cfg.timings);
    } else {
        Json doc;
        doc["edges"] = Json::array();
        for (const auto& r : records) doc["edges"].push_back(record_json(h, r, cfg.timings));
        doc["meta"] = meta_json(cfg, h, opts);
        out << doc.dump(2) << '\n';
    }
    return kOk;
}

int cmd_bounds(const RunConfig& cfg, std::ostream& out) {
    const Hypergraph h = load(cfg);
    const DistanceMatrix dm = distance_matrix(h);
    const CurvatureOptions opts = curvature_options(cfg);
    const auto records = curvature_report(h, dm, opts, cfg.jobs);

    bool is_hyperpath = true;
    try {
        validate_hyperpath(h);
    } catch (const NotAHyperpathError&) {
        is_hyperpath = false;
    }

    struct Row {
        const CurvatureRecord* rec;
        double cn_mass, dual;
        std::optional<HyperpathBound> hp;
    };
    std::vector<Row> rows;
    for (const auto& r : records) {
        const auto walks = walks_for(h, r.vertices);
        double dual = -std::numeric_limits<double>::infinity();
        for (std::size_t u = 0; u < walks.size(); ++u)
            for (std::size_t v = 0; v < walks.size(); ++v)
                if (u != v) dual = std::max(dual, dual_lower_bound(dm, walks, u, v).value);
        std::optional<HyperpathBound> hp;
        if (is_hyperpath && r.n >= 3) hp = hyperpath_lower_bound(h, r.edge);
        rows.push_back({&r, common_neighbor_mass(h, r.edge), dual, hp});
    }

    if (cfg.output == "csv") {
        out << "id,vertices,n,W,kappa,upper_bound,common_neighbor_mass,dual_lower_bound,beta,hyperpath_bound\n";
        for (const auto& row : rows) {
            const auto& r = *row.rec;
            out << r.edge << ',' << csv_field(join_labels(h, r.vertices)) << ',' << r.n << ',' << format_number(r.W)
                << ',' << format_number(r.kappa) << ',' << format_number(r.upper_bound) << ','
                << format_number(row.cn_mass) << ',' << format_number(row.dual) << ','
                << (row.hp ? std::to_string(row.hp->beta) : "") << ','
                << (row.hp ? format_number(row.hp->bound) : "") << '\n';
        }
        return kOk;
    }
    Json doc;
    doc["edges"] = Json::array();
    for (const auto& row : rows) {
        Json j = record_json(h, *row.rec, cfg.timings);
        j["common_neighbor_mass"] = row.cn_mass;
        j["dual_lower_bound"] = row.dual;
        j["beta"] = row.hp ? Json(row.hp->beta) : Json(nullptr);
        j["hyperpath_bound"] = row.hp ? Json(row.hp->bound) : Json(nullptr);
        doc["edges"].push_back(std::move(j));
    }
    doc["meta"] = meta_json(cfg, h, opts);
    doc["meta"]["hyperpath"] = is_hyperpath;
    out << doc.dump(2) << '\n';
    return kOk;
}

int cmd_distances(const RunConfig& cfg, std::ostream& out) {
    const Hypergraph h = load(cfg);
    const DistanceMatrix dm = distance_matrix(h);
    const auto n = static_cast<VertexId>(h.num_vertices());
    if (cfg.output == "csv") {
        out << "source,target,distance\n";
        for (VertexId i = 0; i < n; ++i)
            for (VertexId j = 0; j < n; ++j)
                out << csv_field(h.label(i)) << ',' << csv_field(h.label(j)) << ','
                    << (dm.finite(i, j) ? std::to_string(dm(i, j)) : "") << '\n';
        return kOk;
    }
    Json doc;
    doc["labels"] = h.labels();
    doc["distances"] = Json::array();
    for (VertexId i = 0; i < n; ++i) {
        Json row = Json::array();
        for (VertexId j = 0; j < n; ++j) row.push_back(dm.finite(i, j) ? Json(dm(i, j)) : Json(nullptr));
        doc["distances"].push_back(std::move(row));
    }
    out << doc.dump() << '\n';
    return kOk;
}

int cmd_walks(const RunConfig& cfg, std::ostream& out) {
    const Hypergraph h = load(cfg);
    if (cfg.output == "csv") out << "vertex,neighbor,mass\n";
    Json doc;
    doc["walks"] = Json::array();
    for (VertexId v = 0; v < h.num_vertices(); ++v) {
        const auto w = walk_distribution(h, v);
        Json mass = Json::object();
        for (std::size_t s = 0; s < w.mass.size(); ++s) {
            const auto& label = h.label(w.mass.support[s]);
            if (cfg.output == "csv")
                out << csv_field(h.label(v)) << ',' << csv_field(label) << ',' << format_number(w.mass.mass[s]) << '\n';
            mass[label] = w.mass.mass[s];
        }
        doc["walks"].push_back(Json{{"vertex", h.label(v)}, {"mass", std::move(mass)}});
    }
    if (cfg.output == "json") out << doc.dump(2) << '\n';
    return kOk;
}

int cmd_complete_uniform(const RunConfig& cfg, std::ostream& out) {
    const auto cu = complete_uniform(cfg.N, cfg.n);
    const DistanceMatrix dm = distance_matrix(cu.graph);
    const CurvatureOptions opts = curvature_options(cfg);
    std::vector<CurvatureRecord> records;
    if (cfg.all_edges) {
        records = curvature_report(cu.graph, dm, opts, cfg.jobs);
    } else {
        records.push_back(hyperedge_curvature(cu.graph, dm, 0, opts));
    }
    double max_dev = 0.0;
    for (const auto& r : records) max_dev = std::max(max_dev, std::abs(r.kappa - cu.predicted_kappa));

    if (cfg.output == "csv") {
        write_records_csv(out, cu.graph, records, cfg.timings);
        return kOk;
    }
    Json doc;
    doc["N"] = cfg.N;
    doc["n"] = cfg.n;
    doc["num_edges"] = cu.graph.num_edges();
    doc["predicted_kappa"] = cu.predicted_kappa;
    doc["max_deviation"] = max_dev;
    doc["edges"] = Json::array();
    for (const auto& r : records) doc["edges"].push_back(record_json(cu.graph, r, cfg.timings));
    out << doc.dump(2) << '\n';
    return kOk;
}

int cmd_hyperpath_check(const RunConfig& cfg, std::ostream& out) {
    const Hypergraph h = load(cfg);
    validate_hyperpath(h);
    const DistanceMatrix dm = distance_matrix(h);
    const CurvatureOptions opts = curvature_options(cfg);
    auto records = curvature_report(h, dm, opts, cfg.jobs);
    std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) { return a.edge < b.edge; });

    bool all_hold = true;
    Json doc;
    doc["edges"] = Json::array();
    if (cfg.output == "csv") out << "id,vertices,n,kappa,beta,bound,holds\n";
    for (const auto& r : records) {
        std::optional<HyperpathBound> hp;
        if (r.n >= 3) hp = hyperpath_lower_bound(h, r.edge);
        const bool holds = !hp || (r.ok() && r.kappa >= hp->bound - 1e-9);
        all_hold = all_hold && holds;
        if (cfg.output == "csv") {
            out << r.edge << ',' << csv_field(join_labels(h, r.vertices)) << ',' << r.n << ','
                << format_number(r.kappa) << ',' << (hp ? std::to_string(hp->beta) : "") << ','
                << (hp ? format_number(hp->bound) : "") << ',' << (holds ? "true" : "false") << '\n';
            continue;
        }
        Json j;
        j["id"] = r.edge;
        j["vertices"] = label_array(h, r.vertices);
        j["n"] = r.n;
        j["kappa"] = number_or_null(r.kappa);
        j["beta"] = hp ? Json(hp->beta) : Json(nullptr);
        j["bound"] = hp ? Json(hp->bound) : Json(nullptr);
        j["holds"] = holds;
        doc["edges"].push_back(std::move(j));
    }
    if (cfg.output == "json") {
        doc["all_hold"] = all_hold;
        doc["meta"] = meta_json(cfg, h, opts);
        out << doc.dump(2) << '\n';
    }
    return kOk;
}

ModelSurface surface_of(const RunConfig& cfg) {
    if (cfg.surface == "sphere") return ModelSurface::sphere(cfg.radius.value_or(1.0));
    if (cfg.surface == "hyperbolic") return ModelSurface::hyperbolic(cfg.radius.value_or(1.0));
    return ModelSurface::flat_torus(cfg.length.value_or(2.0 * std::numbers::pi));
}

int cmd_manifold_check(const RunConfig& cfg, std::ostream& out) {
    const ModelSurface m = surface_of(cfg);
    const auto summary = empirical_coarse_scalar(m, cfg.eps, cfg.n_pts, cfg.k, cfg.trials, cfg.seed);

    if (cfg.output == "csv") {
        out << "surface,eps,n_pts,k,seed,trial,kappa_hat,ci_low,ci_high\n";
        for (const auto& t : summary.trials)
            out << m.name() << ',' << format_number(cfg.eps) << ',' << cfg.n_pts << ',' << cfg.k << ',' << cfg.seed << ','
                << t.trial << ',' << format_number(t.kappa_hat) << ',' << format_number(t.ci_low) << ','
                << format_number(t.ci_high) << '\n';
        return kOk;
    }
    Json doc;
    doc["trials"] = Json::array();
    for (const auto& t : summary.trials) {
        Json j;
        j["surface"] = std::string(m.name());
        j["eps"] = cfg.eps;
        j["n_pts"] = cfg.n_pts;
        j["k"] = cfg.k;
        j["seed"] = cfg.seed;
        j["trial"] = t.trial;
        j["kappa_hat"] = t.kappa_hat;
        j["ci_low"] = t.ci_low;
        j["ci_high"] = t.ci_high;
        doc["trials"].push_back(std::move(j));
    }
    Json s;
    s["surface"] = std::string(m.name());
    s["scale"] = m.scale();
    s["eps"] = cfg.eps;
    s["n_pts"] = cfg.n_pts;
    s["k"] = cfg.k;
    s["trials"] = cfg.trials;
    s["seed"] = cfg.seed;
    s["sectional_curvature"] = m.sectional();
    s["mean"] = summary.mean;
    s["sd"] = summary.sd;
    s["std_error"] = summary.std_error;
    s["ci_low"] = summary.ci_low;
    s["ci_high"] = summary.ci_high;
    s["ci_contains_zero"] = summary.ci_low <= 0.0 && 0.0 <= summary.ci_high;
    s["prediction_scal_average"] = summary.prediction_average;
    s["prediction_scal_trace"] = summary.prediction_trace;
    doc["summary"] = std::move(s);
    out << doc.dump(2) << '\n';
    return kOk;
}

std::string timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

int dispatch(const RunConfig& cfg, std::ostream& out) {
    if (cfg.command == "curvature") return cmd_curvature(cfg, out);
    if (cfg.command == "bounds") return cmd_bounds(cfg, out);
    if (cfg.command == "distances") return cmd_distances(cfg, out);
    if (cfg.command == "walks") return cmd_walks(cfg, out);
    if (cfg.command == "complete-uniform") return cmd_complete_uniform(cfg, out);
    if (cfg.command == "hyperpath-check") return cmd_hyperpath_check(cfg, out);
    return cmd_manifold_check(cfg, out);
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& diag) {
    std::ofstream log;
    if (!cfg.log_path.empty()) {
        log.open(cfg.log_path, std::ios::app);
        if (!log) {
            out << Json{{"code", "io_unwritable"}, {"message", "cannot open log " + cfg.log_path}}.dump() << '\n';
            return kUsageError;
        }
        log << timestamp() << " start " << cfg.command << " input=" << cfg.input << " seed=" << cfg.seed << '\n';
    }
    const auto start = std::chrono::steady_clock::now();

    int status = kOk;
    std::string code;
    std::ostringstream report;
    try {
        validate(cfg);
        status = dispatch(cfg, report);
    } catch (const UsageError& e) {
        status = kUsageError;
        code = e.code();
        report.str("");
        report << Json{{"code", e.code()}, {"message", e.what()}}.dump() << '\n';
    } catch (const IoError& e) {
        status = kUsageError;
        code = e.code();
        report.str("");
        report << Json{{"code", e.code()}, {"message", e.what()}}.dump() << '\n';
    } catch (const Error& e) {
        status = kComputationError;
        code = e.code();
        report.str("");
        report << Json{{"code", e.code()}, {"message", e.what()}}.dump() << '\n';
    } catch (const std::exception& e) {
        status = kComputationError;
        code = "internal_error";
        report.str("");
        report << Json{{"code", "internal_error"}, {"message", e.what()}}.dump() << '\n';
    }
    out << report.str();
    if (status != kOk) diag << "hypercurv: " << code << '\n';

    if (log) {
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        log << timestamp() << " end " << cfg.command << " status=" << status << (code.empty() ? "" : " code=" + code)
            << " elapsed_ms=" << ms << '\n';
    }
    return status;
}

}  // namespace hypercurv::cli
