#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "a2dr/io.hpp"
#include "a2dr/problem.hpp"
#include "a2dr/vec.hpp"

using namespace a2dr;

namespace {

#ifndef A2DR_CLI_PATH
#error "A2DR_CLI_PATH must point at the cli binary"
#endif

int run(const std::string& args) {
    std::string cmd = std::string(A2DR_CLI_PATH) + " " + args + " >/dev/null 2>/dev/null";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// consensus nonneg least squares small enough to solve in milliseconds
void write_small_problem(const std::string& path) {
    SparseMatrix F(6, 4, {{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}, {3, 3, 1.0},
                          {4, 0, 0.5}, {5, 2, -0.7}});
    DenseVector g = {1.0, -2.0, 0.5, 1.5, 0.3, 0.4};
    SparseMatrix A(4, 8, {{0, 0, 1.0}, {0, 4, -1.0}, {1, 1, 1.0}, {1, 5, -1.0},
                          {2, 2, 1.0}, {2, 6, -1.0}, {3, 3, 1.0}, {3, 7, -1.0}},
                   {0, 4, 8});
    BlockProblem p = BlockProblem::make({make_sum_squares_affine(F, g), make_nonneg(4)}, A,
                                        DenseVector(4, 0.0));
    save_problem(path, p);
}

void write_infeasible_problem(const std::string& path) {
    BlockProblem p = BlockProblem::make({make_box(DenseVector{1.0}, DenseVector{1e300})},
                                        SparseMatrix(1, 1, {{0, 0, 1.0}}), DenseVector{0.0});
    save_problem(path, p);
}

}  // namespace

TEST_CASE("solve returns 0 and writes a parseable result") {
    write_small_problem("/tmp/a2dr_cli_small.json");
    CHECK(run("solve /tmp/a2dr_cli_small.json --output /tmp/a2dr_cli_res.json") == 0);
    nlohmann::json j = read_json_file("/tmp/a2dr_cli_res.json");
    CHECK(j["status"] == "solved");
    CHECK(j.contains("objective"));
    CHECK(j["x"].size() == 2);
    std::remove("/tmp/a2dr_cli_res.json");
}

TEST_CASE("generation is byte-identical for a repeated seed") {
    CHECK(run("gen nnls --seed 7 --p 20 --q 12 --density 0.2 --output /tmp/a2dr_cli_g1.json") == 0);
    CHECK(run("gen nnls --seed 7 --p 20 --q 12 --density 0.2 --output /tmp/a2dr_cli_g2.json") == 0);
    CHECK(run("gen nnls --seed 8 --p 20 --q 12 --density 0.2 --output /tmp/a2dr_cli_g3.json") == 0);
    std::string a = slurp("/tmp/a2dr_cli_g1.json");
    std::string b = slurp("/tmp/a2dr_cli_g2.json");
    std::string c = slurp("/tmp/a2dr_cli_g3.json");
    CHECK(a == b);
    CHECK(a != c);
    // generated files load as valid problems
    BlockProblem p = load_problem("/tmp/a2dr_cli_g1.json");
    CHECK(p.num_blocks() == 2);
    std::remove("/tmp/a2dr_cli_g1.json");
    std::remove("/tmp/a2dr_cli_g2.json");
    std::remove("/tmp/a2dr_cli_g3.json");
}

TEST_CASE("acceleration cuts the iteration count") {
    CHECK(run("gen nnls --seed 3 --p 60 --q 40 --density 0.2 --output /tmp/a2dr_cli_n.json") == 0);
    CHECK(run("solve /tmp/a2dr_cli_n.json --eps-abs 1e-7 --eps-rel 0 --max-iters 20000 "
              "--output /tmp/a2dr_cli_aa.json") == 0);
    CHECK(run("solve /tmp/a2dr_cli_n.json --eps-abs 1e-7 --eps-rel 0 --max-iters 20000 --no-aa "
              "--output /tmp/a2dr_cli_van.json") == 0);
    nlohmann::json fast = read_json_file("/tmp/a2dr_cli_aa.json");
    nlohmann::json slow = read_json_file("/tmp/a2dr_cli_van.json");
    CHECK(fast["num_iters"].get<int>() < slow["num_iters"].get<int>());
    std::remove("/tmp/a2dr_cli_n.json");
    std::remove("/tmp/a2dr_cli_aa.json");
    std::remove("/tmp/a2dr_cli_van.json");
}

TEST_CASE("iteration budget exhaustion exits 2") {
    write_small_problem("/tmp/a2dr_cli_small.json");
    CHECK(run("solve /tmp/a2dr_cli_small.json --max-iters 2 --eps-abs 1e-14 --eps-rel 0") == 2);
}

TEST_CASE("pathology candidates exit 3") {
    write_infeasible_problem("/tmp/a2dr_cli_bad.json");
    CHECK(run("solve /tmp/a2dr_cli_bad.json --max-iters 200") == 3);
    std::remove("/tmp/a2dr_cli_bad.json");

    // inconsistent linear system, caught by the presolve
    BlockProblem p = BlockProblem::make({make_zero(1)},
                                        SparseMatrix(2, 1, {{0, 0, 1.0}, {1, 0, 1.0}}),
                                        DenseVector{0.0, 2.0});
    save_problem("/tmp/a2dr_cli_inc.json", p);
    CHECK(run("solve /tmp/a2dr_cli_inc.json") == 3);
    std::remove("/tmp/a2dr_cli_inc.json");
}

TEST_CASE("input errors exit 1") {
    CHECK(run("solve /tmp/a2dr_cli_does_not_exist.json") == 1);
    CHECK(run("gen mystery_family --seed 1") == 1);
    CHECK(run("solve") == 1);
    CHECK(run("--definitely-not-a-flag") == 1);

    std::ofstream bad("/tmp/a2dr_cli_garbage.json");
    bad << "{ not json";
    bad.close();
    CHECK(run("solve /tmp/a2dr_cli_garbage.json") == 1);
    std::remove("/tmp/a2dr_cli_garbage.json");
}

TEST_CASE("solver flags are accepted") {
    write_small_problem("/tmp/a2dr_cli_small.json");
    CHECK(run("solve /tmp/a2dr_cli_small.json --t 0.2 --eta 1e-6 --mem 5 --reg constant "
              "--safeguard-D 1e5 --safeguard-eps 1e-5 --safeguard-R 8 --threads 1 "
              "--no-precond") == 0);
    CHECK(run("solve /tmp/a2dr_cli_small.json --reg bogus") == 1);
    std::remove("/tmp/a2dr_cli_small.json");
}

TEST_CASE("gen presets and bench run") {
    CHECK(run("gen l1_trend --seed 2 --q 30 --output /tmp/a2dr_cli_t.json") == 0);
    BlockProblem p = load_problem("/tmp/a2dr_cli_t.json");
    CHECK(p.num_rows() == 28);
    std::remove("/tmp/a2dr_cli_t.json");
    CHECK(run("bench l1_trend --seed 2 --preset desk --tol 1e-3 --max-iters 4000") == 0);
}
