#include "blockpythag/serialization.hpp"

#include <cmath>
#include <fstream>

namespace blockpythag {

namespace {

const json& need(const json& j, const char* key, const char* ctx) {
    if (!j.is_object())
        throw SchemaError(std::string(ctx) + ": expected a JSON object");
    if (!j.contains(key))
        throw SchemaError(std::string(ctx) + ": missing field \"" + key + "\"");
    return j.at(key);
}

std::size_t as_size(const json& v, const char* key, const char* ctx) {
    if (!v.is_number_integer() ||
        (!v.is_number_unsigned() && v.get<long long>() < 0))
        throw SchemaError(std::string(ctx) + ": \"" + key +
                          "\" must be a nonnegative integer");
    return v.get<std::size_t>();
}

std::size_t get_size(const json& j, const char* key, const char* ctx) {
    return as_size(need(j, key, ctx), key, ctx);
}

double as_double(const json& v, const char* key, const char* ctx) {
    if (!v.is_number())
        throw SchemaError(std::string(ctx) + ": \"" + key + "\" must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d))
        throw SchemaError(std::string(ctx) + ": \"" + key + "\" must be finite");
    return d;
}

double get_double(const json& j, const char* key, const char* ctx) {
    return as_double(need(j, key, ctx), key, ctx);
}

std::string get_string(const json& j, const char* key, const char* ctx) {
    const json& v = need(j, key, ctx);
    if (!v.is_string())
        throw SchemaError(std::string(ctx) + ": \"" + key + "\" must be a string");
    return v.get<std::string>();
}

bool get_bool(const json& j, const char* key, const char* ctx) {
    const json& v = need(j, key, ctx);
    if (!v.is_boolean())
        throw SchemaError(std::string(ctx) + ": \"" + key + "\" must be a boolean");
    return v.get<bool>();
}

json grid_to_json(const ComplexMatrix& m, bool imaginary) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j)
            row.push_back(imaginary ? m(i, j).imag() : m(i, j).real());
        rows.push_back(std::move(row));
    }
    return rows;
}

void grid_from_json(const json& v, ComplexMatrix& m, bool imaginary, const char* key,
                    const char* ctx) {
    if (!v.is_array() || v.size() != m.rows())
        throw SchemaError(std::string(ctx) + ": \"" + key + "\" must be an array of " +
                          std::to_string(m.rows()) + " rows");
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const json& row = v[i];
        if (!row.is_array() || row.size() != m.cols())
            throw SchemaError(std::string(ctx) + ": \"" + key + "\" row " +
                              std::to_string(i) + " must hold " +
                              std::to_string(m.cols()) + " numbers");
        for (std::size_t j = 0; j < m.cols(); ++j) {
            const double x = as_double(row[j], key, ctx);
            if (imaginary)
                m(i, j) = cplx(m(i, j).real(), x);
            else
                m(i, j) = cplx(x, m(i, j).imag());
        }
    }
}

std::vector<std::size_t> index_list(const json& v, const char* key, const char* ctx) {
    if (!v.is_array())
        throw SchemaError(std::string(ctx) + ": \"" + key + "\" must be an array");
    std::vector<std::size_t> out;
    out.reserve(v.size());
    for (const auto& e : v) out.push_back(as_size(e, key, ctx));
    return out;
}

std::vector<double> double_list(const json& v, const char* key, const char* ctx) {
    if (!v.is_array())
        throw SchemaError(std::string(ctx) + ": \"" + key + "\" must be an array");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& e : v) out.push_back(as_double(e, key, ctx));
    return out;
}

std::vector<ComplexMatrix> matrix_list(const json& v, const char* key, const char* ctx) {
    if (!v.is_array())
        throw SchemaError(std::string(ctx) + ": \"" + key +
                          "\" must be an array of matrices");
    std::vector<ComplexMatrix> out;
    out.reserve(v.size());
    for (const auto& e : v) out.push_back(matrix_from_json(e));
    return out;
}

json matrices_to_json(const std::vector<ComplexMatrix>& ms) {
    json arr = json::array();
    for (const auto& m : ms) arr.push_back(matrix_to_json(m));
    return arr;
}

}  // namespace

json matrix_to_json(const ComplexMatrix& m) {
    json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    j["re"] = grid_to_json(m, false);
    j["im"] = grid_to_json(m, true);
    return j;
}

ComplexMatrix matrix_from_json(const json& j) {
    const char* ctx = "matrix";
    const std::size_t rows = get_size(j, "rows", ctx);
    const std::size_t cols = get_size(j, "cols", ctx);
    ComplexMatrix m(rows, cols);
    grid_from_json(need(j, "re", ctx), m, false, "re", ctx);
    if (j.contains("im")) grid_from_json(j.at("im"), m, true, "im", ctx);
    return m;
}

json partition_to_json(const Partition& p) {
    json j;
    j["hostRows"] = p.host_rows;
    j["hostCols"] = p.host_cols;
    json blocks = json::array();
    for (const auto& b : p.blocks) {
        json jb;
        jb["name"] = b.name;
        jb["rows"] = b.rows;
        jb["cols"] = b.cols;
        blocks.push_back(std::move(jb));
    }
    j["blocks"] = std::move(blocks);
    return j;
}

Partition partition_from_json(const json& j) {
    const char* ctx = "partition";
    Partition p;
    p.host_rows = get_size(j, "hostRows", ctx);
    p.host_cols = get_size(j, "hostCols", ctx);
    const json& blocks = need(j, "blocks", ctx);
    if (!blocks.is_array() || blocks.empty())
        throw SchemaError("partition: \"blocks\" must be a non-empty array");
    for (const auto& jb : blocks) {
        BlockSpec b;
        b.name = get_string(jb, "name", "partition block");
        b.rows = index_list(need(jb, "rows", "partition block"), "rows", ctx);
        b.cols = index_list(need(jb, "cols", "partition block"), "cols", ctx);
        p.blocks.push_back(std::move(b));
    }
    if (auto err = validate(p)) throw SchemaError("partition: " + err->message);
    return p;
}

json certificate_to_json(const PythagorasCertificate& c) {
    json j;
    j["blockNames"] = c.block_names;
    j["witnesses"] = matrices_to_json(c.witnesses);
    j["route"] = c.route;
    j["residual"] = c.residual;
    j["witnessDefect"] = c.witness_defect;
    return j;
}

PythagorasCertificate certificate_from_json(const json& j) {
    const char* ctx = "certificate";
    PythagorasCertificate c;
    const json& names = need(j, "blockNames", ctx);
    if (!names.is_array())
        throw SchemaError("certificate: \"blockNames\" must be an array");
    for (const auto& n : names) {
        if (!n.is_string())
            throw SchemaError("certificate: block names must be strings");
        c.block_names.push_back(n.get<std::string>());
    }
    c.witnesses = matrix_list(need(j, "witnesses", ctx), "witnesses", ctx);
    if (c.witnesses.size() != c.block_names.size())
        throw SchemaError("certificate: one witness per block name required");
    c.route = get_string(j, "route", ctx);
    c.residual = get_double(j, "residual", ctx);
    c.witness_defect = get_double(j, "witnessDefect", ctx);
    return c;
}

json report_to_json(const InequalityReport& r) {
    json j;
    j["name"] = r.name;
    json params = json::object();
    for (const auto& [k, v] : r.parameters) params[k] = v;
    j["parameters"] = std::move(params);
    j["margins"] = r.margins;
    j["minMargin"] = r.min_margin;
    j["pass"] = r.pass;
    j["note"] = r.note;
    return j;
}

json functional_to_json(const FunctionalCertificate& c) {
    json j;
    j["name"] = c.name;
    j["direction"] = c.direction;
    j["status"] = c.status;
    j["witnesses"] = matrices_to_json(c.witnesses);
    j["loewnerMargin"] = c.loewner_margin;
    j["directMargin"] = c.direct_margin;
    j["witnessDefect"] = c.witness_defect;
    j["iterations"] = c.trace.iterations;
    j["restarts"] = c.trace.restarts;
    j["note"] = c.note;
    return j;
}

json hyperplane_to_json(const ComplexMatrix& compressed, const HyperplaneSpec& spec) {
    json j;
    j["compressed"] = matrix_to_json(compressed);
    j["h"] = matrix_to_json(spec.h);
    j["betaNormal"] = spec.beta_normal;
    j["betaMin"] = spec.beta_min;
    j["betaSum"] = spec.beta_sum;
    return j;
}

json search_result_to_json(const SearchResult& r) {
    json j;
    j["bestResidual"] = r.best_residual;
    j["iterations"] = r.iterations;
    j["restarts"] = r.restarts;
    j["seed"] = r.seed;
    j["converged"] = r.converged;
    j["frames"] = matrices_to_json(r.point.frames);
    j["objectiveTrace"] = r.objective_trace;
    return j;
}

SearchResult search_result_from_json(const json& j) {
    const char* ctx = "search result";
    SearchResult r;
    r.best_residual = get_double(j, "bestResidual", ctx);
    r.iterations = get_size(j, "iterations", ctx);
    r.restarts = get_size(j, "restarts", ctx);
    const json& seed = need(j, "seed", ctx);
    if (!seed.is_number_integer())
        throw SchemaError("search result: \"seed\" must be an integer");
    r.seed = seed.get<std::uint64_t>();
    r.converged = get_bool(j, "converged", ctx);
    r.point.frames = matrix_list(need(j, "frames", ctx), "frames", ctx);
    r.objective_trace = double_list(need(j, "objectiveTrace", ctx), "objectiveTrace", ctx);
    return r;
}

json scan_report_to_json(const ScanReport& r) {
    json j;
    j["trials"] = r.trials;
    j["seed"] = r.seed;
    j["minMargin"] = r.min_margin;
    j["minIndices"] = r.min_indices;
    j["minHost"] = matrix_to_json(r.min_host);
    j["ascentMargin"] = r.ascent_margin;
    j["ascentHost"] = matrix_to_json(r.ascent_host);
    j["recheckRowMajor"] = r.recheck_row_major;
    j["recheckColMajor"] = r.recheck_col_major;
    j["counterexampleCandidate"] = r.counterexample_candidate;
    j["notes"] = r.notes;
    return j;
}

SearchManifest manifest_from_json(const json& j) {
    const char* ctx = "manifest";
    SearchManifest m;
    m.partition = partition_from_json(need(j, "partition", ctx));
    if (j.contains("host")) {
        m.host = matrix_from_json(j.at("host"));
        if (m.host->rows() != m.partition.host_rows ||
            m.host->cols() != m.partition.host_cols)
            throw SchemaError("manifest: host shape does not match the partition");
    }
    if (j.contains("entries")) {
        const std::string dist = get_string(j, "entries", ctx);
        if (dist != "unit-disk")
            throw SchemaError("manifest: unknown entry distribution \"" + dist +
                              "\" (only \"unit-disk\" is supported)");
    }
    if (j.contains("seeds")) {
        const json& seeds = j.at("seeds");
        if (!seeds.is_array() || seeds.empty())
            throw SchemaError("manifest: \"seeds\" must be a non-empty array");
        for (const auto& s : seeds) {
            if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<long long>() < 0))
                throw SchemaError("manifest: seeds must be nonnegative integers");
            m.seeds.push_back(s.get<std::uint64_t>());
        }
    } else {
        m.seeds = {0};
    }
    if (j.contains("budget")) {
        const json& b = j.at("budget");
        if (!b.is_object()) throw SchemaError("manifest: \"budget\" must be an object");
        if (b.contains("maxIters")) m.budget.max_iters = get_size(b, "maxIters", ctx);
        if (b.contains("restarts")) m.budget.restarts = get_size(b, "restarts", ctx);
        if (b.contains("step0")) m.budget.step0 = get_double(b, "step0", ctx);
        if (b.contains("target")) m.budget.target = get_double(b, "target", ctx);
        if (b.contains("warmStart")) m.budget.warm_start = get_bool(b, "warmStart", ctx);
    }
    if (j.contains("mode")) {
        m.mode = get_string(j, "mode", ctx);
        if (m.mode != "search" && m.mode != "scan")
            throw SchemaError("manifest: \"mode\" must be \"search\" or \"scan\"");
    }
    if (j.contains("trials")) m.trials = get_size(j, "trials", ctx);
    return m;
}

json manifest_to_json(const SearchManifest& m) {
    json j;
    j["partition"] = partition_to_json(m.partition);
    if (m.host) j["host"] = matrix_to_json(*m.host);
    j["entries"] = "unit-disk";
    j["seeds"] = m.seeds;
    json b;
    b["maxIters"] = m.budget.max_iters;
    b["restarts"] = m.budget.restarts;
    b["step0"] = m.budget.step0;
    b["target"] = m.budget.target;
    b["warmStart"] = m.budget.warm_start;
    j["budget"] = std::move(b);
    j["mode"] = m.mode;
    j["trials"] = m.trials;
    return j;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(path + ": " + e.what());
    }
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw SchemaError("cannot write " + path);
    out << j.dump(2) << '\n';
    if (!out) throw SchemaError("failed while writing " + path);
}

}  // namespace blockpythag
