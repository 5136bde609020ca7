#include "a2dr/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace a2dr {

using nlohmann::json;

namespace {

const json& need(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw IoError(std::string("missing field \"") + key + "\"");
    return *it;
}

template <typename T>
T field(const json& j, const char* key) {
    try {
        return need(j, key).get<T>();
    } catch (const IoError&) {
        throw;
    } catch (const std::exception& e) {
        throw IoError(std::string("bad field \"") + key + "\": " + e.what());
    }
}

template <typename T>
T field_or(const json& j, const char* key, T fallback) {
    if (j.find(key) == j.end()) return fallback;
    return field<T>(j, key);
}

}  // namespace

json sparse_to_json(const SparseMatrix& A) {
    json j;
    j["m"] = A.rows();
    j["n"] = A.cols();
    j["rows"] = A.entry_rows();
    j["cols"] = A.entry_cols();
    j["vals"] = A.entry_vals();
    return j;
}

SparseMatrix sparse_from_json(const json& j, std::vector<int> block_offsets) {
    int m = field<int>(j, "m");
    int n = field<int>(j, "n");
    auto rows = field<std::vector<int>>(j, "rows");
    auto cols = field<std::vector<int>>(j, "cols");
    auto vals = field<std::vector<double>>(j, "vals");
    if (rows.size() != cols.size() || rows.size() != vals.size())
        throw IoError("sparse matrix: rows/cols/vals lengths differ");
    std::vector<Triplet> entries(rows.size());
    for (size_t k = 0; k < rows.size(); ++k) entries[k] = {rows[k], cols[k], vals[k]};
    try {
        return SparseMatrix(m, n, std::move(entries), std::move(block_offsets));
    } catch (const std::exception& e) {
        throw IoError(std::string("sparse matrix: ") + e.what());
    }
}

json prox_to_json(const ProxOperator& p) {
    json j;
    j["kind"] = std::string(p.kind());
    j["n"] = p.dim();
    json params = json::object();
    p.write_params(params);
    j["params"] = params;
    return j;
}

ProxPtr prox_from_json(const json& j) {
    auto kind = field<std::string>(j, "kind");
    int n = field<int>(j, "n");
    json params = j.find("params") != j.end() ? j.at("params") : json::object();
    if (!params.is_object()) throw IoError("prox \"params\" must be an object");
    try {
        if (kind == "zero") return make_zero(n);
        if (kind == "nonneg") return make_nonneg(n);
        if (kind == "sum_squares_affine") {
            SparseMatrix F = sparse_from_json(need(params, "F"));
            if (F.cols() != n) throw IoError("sum_squares_affine: F has wrong column count");
            return make_sum_squares_affine(std::move(F), field<DenseVector>(params, "g"));
        }
        if (kind == "soft_threshold") return make_soft_threshold(n, field<double>(params, "alpha"));
        if (kind == "box")
            return make_box(field<DenseVector>(params, "lo"), field<DenseVector>(params, "hi"));
        if (kind == "quad_box")
            return make_quad_box(field<DenseVector>(params, "w"), field<DenseVector>(params, "lo"),
                                 field<DenseVector>(params, "hi"));
        if (kind == "affine_indicator") return make_affine_indicator(field<DenseVector>(params, "value"));
        if (kind == "neg_log_det_trace")
            return make_neg_log_det_trace(field<int>(params, "q"), field<DenseVector>(params, "Q"));
        if (kind == "group_lasso")
            return make_group_lasso(field<double>(params, "alpha"),
                                    field<std::vector<int>>(params, "widths"));
        if (kind == "nuclear_norm")
            return make_nuclear_norm(field<int>(params, "rows"), field<int>(params, "cols"),
                                     field<double>(params, "beta"));
        if (kind == "logistic") return make_logistic(field<DenseVector>(params, "labels"));
        if (kind == "quad_form_polyhedron")
            return make_quad_form_polyhedron(
                n, field_or<DenseVector>(params, "Q", {}), field<DenseVector>(params, "c"),
                field<int>(params, "n_ineq"), field_or<DenseVector>(params, "F", {}),
                field_or<DenseVector>(params, "d", {}));
        if (kind == "scaled")
            return wrap_scaled(prox_from_json(need(params, "inner")), field<double>(params, "e"));
    } catch (const IoError&) {
        throw;
    } catch (const std::exception& e) {
        throw IoError("prox \"" + kind + "\": " + e.what());
    }
    throw IoError("unknown prox kind \"" + kind + "\"");
}

json problem_to_json(const BlockProblem& p) {
    json j;
    j["version"] = 1;
    json blocks = json::array();
    for (const auto& op : p.prox) blocks.push_back(prox_to_json(*op));
    j["blocks"] = std::move(blocks);
    if (p.A.rows() > 0) {
        j["A"] = sparse_to_json(p.A);
        j["b"] = p.b;
    }
    return j;
}

BlockProblem problem_from_json(const json& j) {
    if (!j.is_object()) throw IoError("problem file: top level must be an object");
    int version = field<int>(j, "version");
    if (version != 1) throw IoError("problem file: unsupported version " + std::to_string(version));
    const json& blocks = need(j, "blocks");
    if (!blocks.is_array() || blocks.empty())
        throw IoError("problem file: \"blocks\" must be a non-empty array");
    std::vector<ProxPtr> prox;
    prox.reserve(blocks.size());
    std::vector<int> offsets{0};
    for (const auto& bj : blocks) {
        prox.push_back(prox_from_json(bj));
        offsets.push_back(offsets.back() + prox.back()->dim());
    }
    bool has_a = j.find("A") != j.end();
    bool has_b = j.find("b") != j.end();
    if (has_a != has_b) throw IoError("problem file: \"A\" and \"b\" must appear together");
    try {
        if (!has_a) return BlockProblem::unconstrained(std::move(prox));
        SparseMatrix A = sparse_from_json(need(j, "A"), std::move(offsets));
        return BlockProblem::make(std::move(prox), std::move(A), field<DenseVector>(j, "b"));
    } catch (const IoError&) {
        throw;
    } catch (const std::exception& e) {
        throw IoError(std::string("problem file: ") + e.what());
    }
}

json result_to_json(const SolverResult& r) {
    json j;
    j["version"] = 1;
    j["status"] = status_name(r.status);
    j["num_iters"] = r.num_iters;
    j["solve_time"] = r.solve_time;
    j["t"] = r.t_used;
    j["eps_tol"] = r.eps_tol;
    j["best_iter"] = r.best_iter;
    j["aa_accepted"] = r.aa_accepted;
    json x = json::array();
    for (const auto& blk : r.x_blocks) x.push_back(blk);
    j["x"] = std::move(x);
    j["lambda"] = r.lambda;
    json hist;
    hist["primal"] = r.primal_norms;
    hist["dual"] = r.dual_norms;
    hist["g"] = r.g_norms;
    hist["delta_v"] = r.delta_v_norms;
    j["history"] = std::move(hist);
    if (r.status == Status::infeasible_candidate || r.status == Status::unbounded_candidate ||
        r.status == Status::linear_system_infeasible)
        j["pathology_estimate"] = r.pathology_estimate;
    return j;
}

namespace {

void dump_number(const json& j, std::string& out) {
    if (j.is_number_float()) {
        double v = j.get<double>();
        if (!std::isfinite(v)) {
            out += "null";
            return;
        }
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out += buf;
        return;
    }
    out += j.dump();
}

void dump_rec(const json& j, int indent, int depth, std::string& out) {
    auto pad = [&](int d) { out.append(static_cast<size_t>(indent) * d, ' '); };
    if (j.is_object()) {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        size_t i = 0;
        for (auto it = j.begin(); it != j.end(); ++it, ++i) {
            pad(depth + 1);
            out += json(it.key()).dump();
            out += ": ";
            dump_rec(it.value(), indent, depth + 1, out);
            if (i + 1 < j.size()) out += ',';
            out += '\n';
        }
        pad(depth);
        out += '}';
    } else if (j.is_array()) {
        if (j.empty()) {
            out += "[]";
            return;
        }
        out += "[\n";
        for (size_t i = 0; i < j.size(); ++i) {
            pad(depth + 1);
            dump_rec(j[i], indent, depth + 1, out);
            if (i + 1 < j.size()) out += ',';
            out += '\n';
        }
        pad(depth);
        out += ']';
    } else if (j.is_number()) {
        dump_number(j, out);
    } else {
        out += j.dump();
    }
}

}  // namespace

std::string dump_json(const json& j, int indent) {
    std::string out;
    dump_rec(j, indent, 0, out);
    out += '\n';
    return out;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open \"" + path + "\" for reading");
    try {
        return json::parse(in);
    } catch (const std::exception& e) {
        throw IoError("parse error in \"" + path + "\": " + e.what());
    }
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open \"" + path + "\" for writing");
    out << dump_json(j);
    if (!out) throw IoError("write to \"" + path + "\" failed");
}

BlockProblem load_problem(const std::string& path) { return problem_from_json(read_json_file(path)); }

void save_problem(const std::string& path, const BlockProblem& p) {
    write_json_file(path, problem_to_json(p));
}

void save_result(const std::string& path, const SolverResult& r) {
    write_json_file(path, result_to_json(r));
}

}  // namespace a2dr
