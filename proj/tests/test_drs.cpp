#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "a2dr/drs.hpp"
#include "a2dr/problem.hpp"
#include "a2dr/rng.hpp"
#include "a2dr/vec.hpp"

using namespace a2dr;

namespace {

SparseMatrix identity(int n) {
    std::vector<Triplet> t;
    for (int i = 0; i < n; ++i) t.push_back({i, i, 1.0});
    return SparseMatrix(n, n, std::move(t));
}

DenseVector randn(int n, unsigned long long seed) {
    Rng rng(seed, "test.drs");
    DenseVector x(n);
    for (double& v : x) v = rng.normal();
    return x;
}

SparseMatrix random_matrix(int m, int n, unsigned long long seed,
                           std::vector<int> offsets = {}) {
    Rng rng(seed, "test.drs.mat");
    std::vector<Triplet> t;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) t.push_back({i, j, rng.normal()});
    return SparseMatrix(m, n, std::move(t), std::move(offsets));
}

}  // namespace

TEST_CASE("project_affine onto a hyperplane matches the closed form") {
    // {x : a'x = b}: P(w) = w - a (a'w - b)/||a||^2
    SparseMatrix A(1, 3, {{0, 0, 1.0}, {0, 1, 2.0}, {0, 2, -1.0}});
    DenseVector b = {3.0};
    DenseVector w = randn(3, 1);
    DenseVector p = project_affine(A, b, w);
    DenseVector a = {1.0, 2.0, -1.0};
    double coef = (dot(a, w) - 3.0) / dot(a, a);
    for (int i = 0; i < 3; ++i) CHECK(p[i] == doctest::Approx(w[i] - coef * a[i]).epsilon(1e-9));
}

TEST_CASE("project_affine is idempotent and feasible") {
    SparseMatrix A = random_matrix(4, 9, 2);
    DenseVector b = A.mul(randn(9, 3));
    DenseVector w = randn(9, 4);
    DrsWorkspace ws;
    ws.lsqr_tol = 1e-13;
    DenseVector p1 = project_affine(A, b, w, &ws);
    CHECK(norm2(sub(A.mul(p1), b)) <= 1e-8 * (1.0 + norm2(b)));
    DenseVector p2 = project_affine(A, b, p1, &ws);
    CHECK(norm2(sub(p2, p1)) <= 1e-7 * (1.0 + norm2(p1)));
}

TEST_CASE("project_affine with an identity constraint pins x to b") {
    SparseMatrix A = identity(3);
    DenseVector b = {1.0, 2.0, 3.0};
    DenseVector p = project_affine(A, b, randn(3, 5));
    for (int i = 0; i < 3; ++i) CHECK(p[i] == doctest::Approx(b[i]).epsilon(1e-10));
}

TEST_CASE("one step with zero objective and identity constraint x = 0") {
    // prox is the identity, projection sends everything to 0:
    // x_half = v, v_next = v + Pi(2v - v) - v = Pi(v) = 0, g = v
    BlockProblem p = BlockProblem::make({make_zero(3)}, identity(3), DenseVector(3, 0.0));
    DenseVector v = randn(3, 6);
    DrsWorkspace ws;
    DrsStep st = drs_step(p, v, 0.1, ws);
    CHECK(st.x_half == v);
    for (int i = 0; i < 3; ++i) {
        CHECK(st.v_next[i] == doctest::Approx(0.0).epsilon(1e-10));
        CHECK(st.g[i] == doctest::Approx(v[i]).epsilon(1e-10));
    }
}

TEST_CASE("drs map is firmly nonexpansive on random problems") {
    Rng rng(7, "test.drs.fne");
    for (int trial = 0; trial < 40; ++trial) {
        int n1 = 3 + static_cast<int>(rng.integer(3));
        int n2 = 2 + static_cast<int>(rng.integer(3));
        int n = n1 + n2, m = 4;
        std::vector<ProxPtr> prox = {make_soft_threshold(n1, 0.5), make_nonneg(n2)};
        SparseMatrix A = random_matrix(m, n, 100 + trial, {0, n1, n});
        DenseVector b = randn(m, 200 + trial);
        BlockProblem p = BlockProblem::make(prox, A, b);

        DenseVector u(n), v(n);
        for (double& x : u) x = 2.0 * rng.normal();
        for (double& x : v) x = 2.0 * rng.normal();
        double t = std::exp(rng.uniform(-1.5, 1.0));

        DrsWorkspace wu, wv;
        wu.lsqr_tol = wv.lsqr_tol = 1e-13;
        DenseVector Fu = drs_step(p, u, t, wu).v_next;
        DenseVector Fv = drs_step(p, v, t, wv).v_next;

        DenseVector dF = sub(Fu, Fv);
        DenseVector dI = sub(sub(u, Fu), sub(v, Fv));
        DenseVector duv = sub(u, v);
        CHECK(dot(dF, dF) + dot(dI, dI) <= dot(duv, duv) * (1.0 + 1e-9) + 1e-9);
    }
}

TEST_CASE("residuals at a solution vanish") {
    // minimize ||x - a||^2 st x1 + x2 = 1, solved by hand for the dual check:
    // at optimum r_prim = 0 and r_dual = 0 with lam the true multiplier
    SparseMatrix A(1, 2, {{0, 0, 1.0}, {0, 1, 1.0}});
    DenseVector b = {1.0};
    DenseVector a = {2.0, -1.0};
    std::vector<Triplet> ft = {{0, 0, 1.0}, {1, 1, 1.0}};
    BlockProblem p =
        BlockProblem::make({make_sum_squares_affine(SparseMatrix(2, 2, ft), a)}, A, b);

    // run DRS to convergence
    DenseVector v(2, 0.0);
    DrsWorkspace ws;
    ws.lsqr_tol = 1e-13;
    double t = 0.5;
    DrsStep st{};
    for (int k = 0; k < 300; ++k) {
        st = drs_step(p, v, t, ws);
        v = st.v_next;
    }
    st = drs_step(p, v, t, ws);
    Residuals r = residuals(p, v, st.x_half, t, ws);
    CHECK(r.prim_norm <= 1e-9);
    CHECK(r.dual_norm <= 1e-8);
    CHECK(r.norm == doctest::Approx(std::hypot(r.prim_norm, r.dual_norm)));
    // optimum of the quadratic subject to the sum constraint: x = a - lam/2 * 1
    CHECK(st.x_half[0] == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(st.x_half[1] == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("residual definitions match their formulas") {
    SparseMatrix A = random_matrix(3, 7, 8);
    DenseVector b = randn(3, 9);
    std::vector<ProxPtr> prox = {make_soft_threshold(7, 0.3)};
    BlockProblem p = BlockProblem::make(prox, SparseMatrix(3, 7, [&] {
                                            std::vector<Triplet> t;
                                            for (int k = 0; k < A.nnz(); ++k)
                                                t.push_back({A.entry_rows()[k], A.entry_cols()[k],
                                                             A.entry_vals()[k]});
                                            return t;
                                        }()),
                                        b);
    DenseVector v = randn(7, 10);
    double t = 0.7;
    DrsWorkspace ws;
    ws.lsqr_tol = 1e-13;
    DrsStep st = drs_step(p, v, t, ws);
    Residuals r = residuals(p, v, st.x_half, t, ws);

    DenseVector prim = sub(p.A.mul(st.x_half), b);
    for (int i = 0; i < 3; ++i) CHECK(r.r_prim[i] == doctest::Approx(prim[i]).epsilon(1e-12));

    // r_dual = (v - x_half)/t + A' lam with lam the least-squares multiplier
    DenseVector atl = p.A.tmul(r.lam);
    for (int j = 0; j < 7; ++j) {
        double want = (v[j] - st.x_half[j]) / t + atl[j];
        CHECK(r.r_dual[j] == doctest::Approx(want).epsilon(1e-10));
    }
    // lam minimizes ||A' lam - (x_half - v)/t||: gradient A (A' lam - target) = 0
    DenseVector target(7);
    for (int j = 0; j < 7; ++j) target[j] = (st.x_half[j] - v[j]) / t;
    DenseVector grad = p.A.mul(sub(atl, target));
    CHECK(norm2(grad) <= 1e-7 * (1.0 + norm2(target)));
}

TEST_CASE("unconstrained problems have zero primal residual") {
    BlockProblem p = BlockProblem::unconstrained({make_soft_threshold(4, 1.0)});
    DenseVector v = randn(4, 11);
    DrsWorkspace ws;
    DrsStep st = drs_step(p, v, 0.5, ws);
    // with m = 0 the projection is the identity: v_next = x_half
    for (int i = 0; i < 4; ++i) CHECK(st.v_next[i] == st.x_half[i]);
    Residuals r = residuals(p, v, st.x_half, 0.5, ws);
    CHECK(r.prim_norm == 0.0);
    CHECK(r.lam.empty());
    for (int j = 0; j < 4; ++j)
        CHECK(r.r_dual[j] == doctest::Approx((v[j] - st.x_half[j]) / 0.5));
}

TEST_CASE("check_stop applies the absolute plus relative rule") {
    CHECK(check_stop(1e-7, 10.0, 1e-6, 0.0));
    CHECK_FALSE(check_stop(1e-5, 10.0, 1e-6, 0.0));
    CHECK(check_stop(0.5, 100.0, 1e-6, 1e-2));
    CHECK_FALSE(check_stop(1.5, 100.0, 1e-6, 1e-2));
    CHECK(check_stop(0.0, 0.0, 0.0, 0.0));
}

TEST_CASE("multi-block fan-out matches the serial reference bitwise") {
    std::vector<ProxPtr> prox = {make_soft_threshold(5, 0.4), make_nonneg(3),
                                 make_box(DenseVector(4, -1.0), DenseVector(4, 1.0))};
    SparseMatrix A = random_matrix(6, 12, 12, {0, 5, 8, 12});
    BlockProblem p = BlockProblem::make(prox, A, randn(6, 13));
    DenseVector v = randn(12, 14);
    DenseVector xp(12), xs(12);
    p.prox_all(v, 0.3, xp);
    p.prox_all_serial(v, 0.3, xs);
    for (int i = 0; i < 12; ++i) CHECK(xp[i] == xs[i]);
}
