#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "a2dr/problem.hpp"
#include "a2dr/rng.hpp"
#include "a2dr/solver.hpp"
#include "a2dr/vec.hpp"

using namespace a2dr;

namespace {

constexpr double kHuge = 1e300;

SparseMatrix identity(int n) {
    std::vector<Triplet> t;
    for (int i = 0; i < n; ++i) t.push_back({i, i, 1.0});
    return SparseMatrix(n, n, std::move(t));
}

DenseVector randn(int n, unsigned long long seed, const char* tag = "test.solver") {
    Rng rng(seed, tag);
    DenseVector x(n);
    for (double& v : x) v = rng.normal();
    return x;
}

// small nonneg least squares in consensus form:
// f1 = ||F z - g||^2 on x1, f2 = indicator(x2 >= 0), x1 - x2 = 0
BlockProblem small_nnls(int p, int q, unsigned long long seed) {
    Rng rng(seed, "test.solver.nnls");
    std::vector<Triplet> ft;
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < q; ++j) ft.push_back({i, j, rng.normal()});
    SparseMatrix F(p, q, std::move(ft));
    DenseVector g(p);
    for (double& v : g) v = rng.normal();

    std::vector<Triplet> at;
    for (int i = 0; i < q; ++i) {
        at.push_back({i, i, 1.0});
        at.push_back({i, q + i, -1.0});
    }
    SparseMatrix A(q, 2 * q, std::move(at), {0, q, 2 * q});
    return BlockProblem::make({make_sum_squares_affine(F, g), make_nonneg(q)}, A,
                              DenseVector(q, 0.0));
}

BlockProblem infeasible_1d() {
    // x >= 1 and x = 0 cannot hold together
    return BlockProblem::make({make_box(DenseVector{1.0}, DenseVector{kHuge})},
                              SparseMatrix(1, 1, {{0, 0, 1.0}}), DenseVector{0.0});
}

BlockProblem unbounded_1d() {
    // minimize x with no constraint tying x down: A = [0], b = 0
    return BlockProblem::make(
        {make_quad_form_polyhedron(1, DenseVector{0.0}, DenseVector{1.0}, 0, {}, {})},
        SparseMatrix(1, 1, {}), DenseVector{0.0});
}

}  // namespace

TEST_CASE("safeguard ladder follows the three-way rule") {
    const double d = 2.0, eps = 0.5;
    const int r = 3;
    SafeguardState st;
    st.g0_norm = 1.0;

    // first iteration: check required, bound = d * (0/3 + 1)^-1.5 = 2
    CHECK(safeguard_decide(st, 1.5, d, eps, r) == SafeguardDecision::accept_aa);
    CHECK(st.n_aa == 1);
    CHECK(st.r_aa == 1);
    CHECK_FALSE(st.check_required);

    // r_aa < r: no check, accept and advance
    CHECK(safeguard_decide(st, 100.0, d, eps, r) == SafeguardDecision::skip_check_accept_aa);
    CHECK(safeguard_decide(st, 100.0, d, eps, r) == SafeguardDecision::skip_check_accept_aa);
    CHECK(st.n_aa == 3);
    CHECK(st.r_aa == 3);

    // r_aa == r forces a check; bound = 2 * (3/3 + 1)^-1.5 = 2^-0.5 ~ 0.707
    CHECK(safeguard_decide(st, 0.5, d, eps, r) == SafeguardDecision::accept_aa);
    CHECK(st.n_aa == 4);
    CHECK(st.r_aa == 1);

    // rejection: counter resets, acceptance flag state unchanged
    st.r_aa = 3;
    CHECK(safeguard_decide(st, 10.0, d, eps, r) == SafeguardDecision::reject_aa);
    CHECK(st.n_aa == 4);
    CHECK(st.r_aa == 0);
    CHECK_FALSE(st.check_required);

    // after the reset the next two iterations skip their checks
    CHECK(safeguard_decide(st, 1e9, d, eps, r) == SafeguardDecision::skip_check_accept_aa);
}

TEST_CASE("safeguard with d=0 rejects every candidate") {
    SafeguardState st;
    st.g0_norm = 1.0;
    for (int k = 0; k < 5; ++k)
        CHECK(safeguard_decide(st, 1e-9, 0.0, 1e-6, 10) == SafeguardDecision::reject_aa);
    CHECK(st.n_aa == 0);
}

TEST_CASE("pathology monitor classifies stalls") {
    // stalled nonzero delta_v with vanishing primal residual: unbounded
    PathologyMonitor mon(5, 1e-3, 1e-6);
    for (int k = 0; k < 5; ++k) {
        CHECK_FALSE(mon.current().has_value());
        mon.update(0.5, 1e-9);
    }
    REQUIRE(mon.current().has_value());
    CHECK(mon.current()->status == Status::unbounded_candidate);
    CHECK(mon.current()->delta_v_norm == doctest::Approx(0.5));

    // same stall with a live primal residual: infeasible
    PathologyMonitor mon2(5, 1e-3, 1e-6);
    for (int k = 0; k < 6; ++k) mon2.update(0.7, 0.3);
    REQUIRE(mon2.current().has_value());
    CHECK(mon2.current()->status == Status::infeasible_candidate);

    // shrinking delta_v is healthy convergence, not a stall
    PathologyMonitor mon3(5, 1e-3, 1e-6);
    double dv = 1.0;
    for (int k = 0; k < 20; ++k) {
        mon3.update(dv, 0.1);
        dv *= 0.7;
        CHECK_FALSE(mon3.current().has_value());
    }

    // delta_v near the solve tolerance is convergence, not a stall
    PathologyMonitor mon4(5, 1e-3, 1e-6);
    for (int k = 0; k < 10; ++k) mon4.update(2e-6, 0.5);
    CHECK_FALSE(mon4.current().has_value());
}

TEST_CASE("zero objective with identity constraint solves in one iteration") {
    BlockProblem p = BlockProblem::make({make_zero(3)}, identity(3), DenseVector(3, 0.0));
    SolverOptions opt;
    opt.v0 = randn(3, 1);
    SolverResult res = solve(p, opt);
    CHECK(res.status == Status::solved);
    CHECK(res.num_iters == 1);
    DenseVector x = res.x_stacked();
    for (int i = 0; i < 3; ++i) CHECK(x[i] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(res.lambda.size() == 3);
}

TEST_CASE("histories line up with the iteration count") {
    BlockProblem p = small_nnls(8, 6, 2);
    SolverOptions opt;
    opt.max_iter = 400;
    SolverResult res = solve(p, opt);
    CHECK(res.status == Status::solved);
    size_t n = static_cast<size_t>(res.num_iters);
    CHECK(res.primal_norms.size() == n);
    CHECK(res.dual_norms.size() == n);
    CHECK(res.g_norms.size() == n);
    CHECK(res.delta_v_norms.size() == n);
    CHECK(res.best_iter >= 1);
    CHECK(res.best_iter <= res.num_iters);
    CHECK(res.aa_accepted > 0);
    CHECK(res.solve_time > 0.0);
    CHECK(res.t_used > 0.0);

    // final residual obeys the stopping rule recorded in eps_tol
    double final_norm = std::hypot(res.primal_norms.back(), res.dual_norms.back());
    CHECK(final_norm <= res.eps_tol);

    // best iterate has the smallest combined residual
    double best = std::hypot(res.primal_norms[res.best_iter - 1], res.dual_norms[res.best_iter - 1]);
    for (size_t k = 0; k < n; ++k)
        CHECK(best <= std::hypot(res.primal_norms[k], res.dual_norms[k]) + 1e-15);
}

TEST_CASE("solution blocks agree with the nonneg constraint and consensus") {
    BlockProblem p = small_nnls(10, 7, 3);
    SolverOptions opt;
    opt.max_iter = 2000;
    opt.eps_abs = 1e-9;
    SolverResult res = solve(p, opt);
    REQUIRE(res.status == Status::solved);
    REQUIRE(res.x_blocks.size() == 2);
    for (double v : res.x_blocks[1]) CHECK(v >= -1e-7);
    for (int i = 0; i < 7; ++i)
        CHECK(res.x_blocks[0][i] == doctest::Approx(res.x_blocks[1][i]).epsilon(1e-5));
    CHECK(res.lambda.size() == 7);
}

TEST_CASE("two identical runs are bitwise identical") {
    BlockProblem p = small_nnls(9, 5, 4);
    SolverOptions opt;
    opt.max_iter = 300;
    SolverResult a = solve(p, opt);
    SolverResult b = solve(p, opt);
    REQUIRE(a.num_iters == b.num_iters);
    CHECK(a.primal_norms == b.primal_norms);
    CHECK(a.dual_norms == b.dual_norms);
    CHECK(a.g_norms == b.g_norms);
    CHECK(a.x_stacked() == b.x_stacked());
}

TEST_CASE("a zero safeguard bound reproduces vanilla splitting bitwise") {
    BlockProblem p = small_nnls(9, 5, 5);
    SolverOptions plain;
    plain.enable_aa = false;
    plain.max_iter = 120;
    plain.eps_abs = 0.0;
    plain.eps_rel = 0.0;
    SolverOptions gated;
    gated.enable_aa = true;
    gated.safeguard_d = 0.0;  // every candidate fails the acceptance test
    gated.max_iter = 120;
    gated.eps_abs = 0.0;
    gated.eps_rel = 0.0;
    SolverResult a = solve(p, plain);
    SolverResult b = solve(p, gated);
    REQUIRE(a.num_iters == b.num_iters);
    CHECK(a.primal_norms == b.primal_norms);
    CHECK(a.dual_norms == b.dual_norms);
    CHECK(a.g_norms == b.g_norms);
    CHECK(b.aa_accepted == 0);
    CHECK(a.x_stacked() == b.x_stacked());
}

TEST_CASE("acceleration beats vanilla splitting on a small instance") {
    BlockProblem p = small_nnls(30, 20, 6);
    SolverOptions fast;
    fast.max_iter = 5000;
    SolverOptions slow = fast;
    slow.enable_aa = false;
    SolverResult a = solve(p, fast);
    SolverResult b = solve(p, slow);
    REQUIRE(a.status == Status::solved);
    CHECK(a.num_iters < b.num_iters);
}

TEST_CASE("max_iterations status when the budget is too small") {
    BlockProblem p = small_nnls(12, 8, 7);
    SolverOptions opt;
    opt.max_iter = 3;
    opt.eps_abs = 1e-14;
    opt.eps_rel = 0.0;
    SolverResult res = solve(p, opt);
    CHECK(res.status == Status::max_iterations);
    CHECK(res.num_iters == 3);
}

TEST_CASE("infeasible linear system is caught before iterating") {
    BlockProblem p = BlockProblem::make({make_zero(1)},
                                        SparseMatrix(2, 1, {{0, 0, 1.0}, {1, 0, 1.0}}),
                                        DenseVector{0.0, 2.0});
    SolverResult res = solve(p, SolverOptions{});
    CHECK(res.status == Status::linear_system_infeasible);
    CHECK(res.num_iters == 0);
    CHECK(res.pathology_estimate == doctest::Approx(std::sqrt(2.0)).epsilon(1e-8));
    CHECK(res.x_blocks.empty());
}

TEST_CASE("infeasible pair of constraints stalls and is flagged") {
    SolverOptions opt;
    opt.max_iter = 300;
    SolverResult res = solve(infeasible_1d(), opt);
    CHECK(res.status == Status::infeasible_candidate);
    CHECK(res.delta_v_norm == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(res.pathology_estimate == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("unbounded objective stalls and is flagged") {
    SolverOptions opt;
    opt.max_iter = 300;
    SolverResult res = solve(unbounded_1d(), opt);
    CHECK(res.status == Status::unbounded_candidate);
    // delta_v settles at t, the reported rate is delta_v / t = 1
    CHECK(res.delta_v_norm == doctest::Approx(res.t_used).epsilon(1e-6));
    CHECK(res.pathology_estimate == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("stop_on_pathology ends the run at the first classification") {
    SolverOptions opt;
    opt.max_iter = 5000;
    opt.stop_on_pathology = true;
    SolverResult res = solve(infeasible_1d(), opt);
    CHECK(res.status == Status::infeasible_candidate);
    CHECK(res.num_iters <= opt.stall_window + 5);
}

TEST_CASE("unconstrained problem converges to the prox fixed point") {
    // minimize ||x - a||^2 has solution a
    DenseVector a = {1.5, -0.5, 2.0};
    std::vector<Triplet> ft;
    for (int i = 0; i < 3; ++i) ft.push_back({i, i, 1.0});
    BlockProblem p =
        BlockProblem::unconstrained({make_sum_squares_affine(SparseMatrix(3, 3, ft), a)});
    SolverOptions opt;
    opt.eps_abs = 1e-10;
    opt.max_iter = 2000;
    SolverResult res = solve(p, opt);
    REQUIRE(res.status == Status::solved);
    for (int i = 0; i < 3; ++i) CHECK(res.x_blocks[0][i] == doctest::Approx(a[i]).epsilon(1e-6));
    CHECK(res.lambda.empty());
    CHECK(res.primal_norms.back() == 0.0);
}

TEST_CASE("explicit t and disabled preconditioning are honored") {
    BlockProblem p = small_nnls(8, 6, 8);
    SolverOptions opt;
    opt.t = 0.37;
    opt.enable_precond = false;
    opt.max_iter = 2000;
    SolverResult res = solve(p, opt);
    CHECK(res.t_used == 0.37);
    CHECK(res.status == Status::solved);

    SolverOptions defaults;
    defaults.enable_precond = false;
    defaults.max_iter = 2000;
    SolverResult res2 = solve(p, defaults);
    CHECK(res2.t_used == 0.1);
}

TEST_CASE("warm start v0 is validated and used") {
    BlockProblem p = small_nnls(8, 6, 9);
    SolverOptions opt;
    opt.v0 = DenseVector(3, 0.0);  // wrong size
    CHECK_THROWS_AS((void)solve(p, opt), std::invalid_argument);

    opt.max_iter = 4000;
    opt.eps_abs = 1e-8;
    opt.v0.clear();
    SolverResult cold = solve(p, opt);
    REQUIRE(cold.status == Status::solved);
    // restarting from the solution's iterate takes far fewer iterations
    // than the cold run; use the stacked solution as a near-fixed point
    opt.v0 = cold.x_stacked();
    SolverResult warm = solve(p, opt);
    CHECK(warm.status == Status::solved);
    CHECK(warm.num_iters <= cold.num_iters);
}

TEST_CASE("option validation") {
    BlockProblem p = small_nnls(6, 4, 10);
    SolverOptions opt;
    opt.max_iter = 0;
    CHECK_THROWS_AS((void)solve(p, opt), std::invalid_argument);
    opt = SolverOptions{};
    opt.aa_memory = 0;
    CHECK_THROWS_AS((void)solve(p, opt), std::invalid_argument);
}
