#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "a2dr/problem.hpp"
#include "a2dr/solver.hpp"

namespace a2dr {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Problem files ({"version": 1, "blocks": [...], "A": {...}, "b": [...]},
// A/b omitted together for unconstrained problems) and result files. Numbers
// are written with 17 significant digits so doubles round-trip exactly.

nlohmann::json sparse_to_json(const SparseMatrix& A);
SparseMatrix sparse_from_json(const nlohmann::json& j, std::vector<int> block_offsets = {});

nlohmann::json prox_to_json(const ProxOperator& p);  // {"kind", "n", "params"}
ProxPtr prox_from_json(const nlohmann::json& j);

nlohmann::json problem_to_json(const BlockProblem& p);
BlockProblem problem_from_json(const nlohmann::json& j);

nlohmann::json result_to_json(const SolverResult& r);

std::string dump_json(const nlohmann::json& j, int indent = 2);
nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

BlockProblem load_problem(const std::string& path);
void save_problem(const std::string& path, const BlockProblem& p);
void save_result(const std::string& path, const SolverResult& r);

}  // namespace a2dr
