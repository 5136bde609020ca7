#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "a2dr/problem.hpp"

namespace a2dr {

// Seeded generators for the experiment families, plus independent reference
// solvers used by the acceptance tests. Generation is deterministic: every
// matrix or vector draws from its own named stream (see Rng), so a (family,
// sizes, seed) triple always produces the same problem.

struct GeneratedProblem {
    BlockProblem problem;
    std::string family;
    nlohmann::json meta;  // family, seed, sizes, derived hyperparameters
    // Dense payloads for the reference solvers, keyed by name ("F", "Q",
    // ...). Matrices are column-major.
    std::map<std::string, DenseVector> data;
    std::map<std::string, int> dims;
};

const std::vector<std::string>& family_names();
// Small sizes meant for tests and quick runs; each family solves in seconds.
nlohmann::json desk_sizes(const std::string& family);
// Sizes of the original experiments.
nlohmann::json paper_sizes(const std::string& family);

// Missing size fields fall back to the desk defaults.
GeneratedProblem gen_problem(const std::string& family, nlohmann::json sizes, std::uint64_t seed);

// Reference solution by a method unrelated to the solver under test:
// projected gradient (nnls), proximal gradient with line search on the
// matrix variable (sparse_inv_cov), accelerated projected gradient on the
// box dual (l1_trend), augmented Lagrangian over a box QP (commodity_flow,
// optimal_control, coupled_qp), three-operator splitting in the weight
// space (multitask_logistic).
struct OracleSolution {
    DenseVector x;  // solver-coordinate stacked solution
    double objective = 0.0;
    int iters = 0;
    double gap = 0.0;  // method-specific optimality measure at exit
};
OracleSolution reference_solution(const GeneratedProblem& gp);

// Smallest weight for which the trend-filter penalty forces an affine fit:
// the max-norm of the unconstrained dual solve (DD')^-1 D y.
double l1_trend_affine_threshold(const DenseVector& y);

}  // namespace a2dr
