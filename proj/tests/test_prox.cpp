#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "a2dr/dense.hpp"
#include "a2dr/prox.hpp"
#include "a2dr/rng.hpp"
#include "a2dr/vec.hpp"

using namespace a2dr;

namespace {

constexpr double kHuge = 1e300;

DenseVector randn(int n, unsigned long long seed, const char* tag = "test.prox") {
    Rng rng(seed, tag);
    DenseVector x(n);
    for (double& v : x) v = rng.normal();
    return x;
}

// Firm nonexpansiveness: ||P(u) - P(v)||^2 <= <P(u) - P(v), u - v>.
void check_firm(const ProxPtr& p, int pairs, unsigned long long seed, double slack = 1e-10) {
    Rng rng(seed, "test.prox.firm");
    const int n = p->dim();
    for (int k = 0; k < pairs; ++k) {
        DenseVector u(n), v(n);
        for (double& x : u) x = 3.0 * rng.normal();
        for (double& x : v) x = 3.0 * rng.normal();
        double t = std::exp(rng.uniform(-2.0, 2.0));
        DenseVector pu = p->evaluate(u, t), pv = p->evaluate(v, t);
        DenseVector dp = sub(pu, pv), dv = sub(u, v);
        CHECK(dot(dp, dp) <= dot(dp, dv) + slack * (1.0 + dot(dv, dv)));
    }
}

// The prox output minimizes f(x) + ||x - v||^2/(2t); random feasible
// perturbations around it must not do better.
void check_minimizer(const ProxPtr& p, const DenseVector& v, double t, unsigned long long seed,
                     double tol = 1e-8) {
    DenseVector x = p->evaluate(v, t);
    double fx = p->objective(x);
    REQUIRE(std::isfinite(fx));
    double phi = fx + dot(sub(x, v), sub(x, v)) / (2.0 * t);
    Rng rng(seed, "test.prox.min");
    int checked = 0;
    for (int k = 0; k < 60 && checked < 20; ++k) {
        DenseVector y = x;
        double step = (k % 2 == 0) ? 1e-3 : 1e-1;
        for (double& yi : y) yi += step * (1.0 + std::fabs(yi)) * rng.normal();
        double fy = p->objective(y);
        if (!std::isfinite(fy)) continue;  // perturbation left the domain
        ++checked;
        double phiy = fy + dot(sub(y, v), sub(y, v)) / (2.0 * t);
        CHECK(phi <= phiy + tol * (1.0 + std::fabs(phi)));
    }
    CHECK(checked > 0);
}

}  // namespace

TEST_CASE("zero prox is the identity") {
    ProxPtr p = make_zero(4);
    DenseVector v = randn(4, 1);
    CHECK(p->evaluate(v, 0.7) == v);
    CHECK(p->objective(v) == 0.0);
    check_firm(p, 20, 100);
}

TEST_CASE("nonneg prox clips at zero") {
    ProxPtr p = make_nonneg(5);
    DenseVector v = {1.5, -2.0, 0.0, 3.0, -0.1};
    DenseVector x = p->evaluate(v, 2.0);
    CHECK(x == DenseVector{1.5, 0.0, 0.0, 3.0, 0.0});
    CHECK(p->objective(x) == 0.0);
    CHECK(std::isinf(p->objective(DenseVector{-1.0, 0, 0, 0, 0})));
    check_firm(p, 50, 101);
}

TEST_CASE("soft threshold shrinks toward zero by t*alpha") {
    ProxPtr p = make_soft_threshold(3, 0.5);
    // t*alpha = 1
    DenseVector x = p->evaluate(DenseVector{3.0, -0.4, -2.5}, 2.0);
    CHECK(x[0] == doctest::Approx(2.0));
    CHECK(x[1] == doctest::Approx(0.0));
    CHECK(x[2] == doctest::Approx(-1.5));
    CHECK(p->objective(x) == doctest::Approx(0.5 * 3.5));
    check_firm(p, 50, 102);
    check_minimizer(p, randn(3, 2), 0.8, 3);
}

TEST_CASE("box prox projects onto the box") {
    ProxPtr p = make_box(DenseVector{-1.0, 0.0}, DenseVector{1.0, 2.0});
    DenseVector x = p->evaluate(DenseVector{-3.0, 5.0}, 1.0);
    CHECK(x == DenseVector{-1.0, 2.0});
    CHECK(p->objective(x) == 0.0);
    CHECK(std::isinf(p->objective(DenseVector{0.0, 2.5})));
    check_firm(p, 50, 103);
}

TEST_CASE("quad_box prox matches the closed form") {
    // minimize w x^2 + (x - v)^2/(2t) over [lo, hi]:
    // unconstrained x = v / (1 + 2 t w), then clip
    DenseVector w = {2.0, 0.0, 1.0}, lo = {-1.0, -1.0, -1.0}, hi = {1.0, 1.0, 1.0};
    ProxPtr p = make_quad_box(w, lo, hi);
    double t = 0.5;
    DenseVector v = {0.9, 0.4, 5.0};
    DenseVector x = p->evaluate(v, t);
    CHECK(x[0] == doctest::Approx(0.9 / 3.0));
    CHECK(x[1] == doctest::Approx(0.4));
    CHECK(x[2] == doctest::Approx(1.0));
    CHECK(p->objective(x) == doctest::Approx(2.0 * x[0] * x[0] + x[2] * x[2]));
    check_firm(p, 50, 104);
    check_minimizer(p, DenseVector{0.3, -0.2, 0.1}, 0.7, 4);
}

TEST_CASE("affine indicator returns the pinned value") {
    DenseVector val = {2.0, -1.0};
    ProxPtr p = make_affine_indicator(val);
    CHECK(p->evaluate(randn(2, 5), 0.3) == val);
    CHECK(p->objective(val) == 0.0);
    CHECK(std::isinf(p->objective(DenseVector{2.0, -1.1})));
    check_firm(p, 20, 105);
}

TEST_CASE("sum_squares_affine prox satisfies its normal equations") {
    // prox: (I + 2t F'F) x = v + 2t F'g
    const int m = 7, q = 4;
    Rng rng(6, "test.prox.ssa");
    std::vector<Triplet> tr;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < q; ++j) tr.push_back({i, j, rng.normal()});
    SparseMatrix F(m, q, tr);
    DenseVector g = randn(m, 7);
    ProxPtr p = make_sum_squares_affine(F, g);

    double t = 0.37;
    DenseVector v = randn(q, 8);
    DenseVector x = p->evaluate(v, t);
    DenseVector Fx = F.mul(x);
    DenseVector FtFx = F.tmul(Fx), Ftg = F.tmul(g);
    DenseVector res(q);
    for (int j = 0; j < q; ++j) res[j] = x[j] + 2 * t * FtFx[j] - v[j] - 2 * t * Ftg[j];
    CHECK(norm2(res) <= 1e-8 * (1.0 + norm2(v)));

    DenseVector d = sub(Fx, g);
    CHECK(p->objective(x) == doctest::Approx(dot(d, d)));
    check_firm(p, 30, 106, 1e-8);
    check_minimizer(p, v, t, 9, 1e-7);
}

TEST_CASE("neg_log_det_trace prox satisfies the stationarity condition") {
    // -X^{-1} + Q + (X - V)/t = 0 at the prox point
    const int q = 4;
    Rng rng(10, "test.prox.nld");
    DenseVector B(q * q);
    for (double& x : B) x = rng.normal();
    DenseVector Q(q * q);
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) {
            Q[i + j * q] = 0.1 * (B[i + j * q] + B[j + i * q]);
            if (i == j) Q[i + j * q] += 1.0;
        }
    ProxPtr p = make_neg_log_det_trace(q, Q);

    DenseVector C(q * q);
    for (double& x : C) x = rng.normal();
    DenseVector V(q * q);
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) V[i + j * q] = 0.5 * (C[i + j * q] + C[j + i * q]);

    double t = 0.9;
    DenseVector X = p->evaluate(V, t);
    // symmetry of the output
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) CHECK(X[i + j * q] == doctest::Approx(X[j + i * q]).epsilon(1e-12));

    // invert X through its eigendecomposition
    SymEig eig = jacobi_eigh(q, X.data());
    for (double w : eig.values) CHECK(w > 0.0);
    DenseVector Xinv(q * q, 0.0);
    for (int a = 0; a < q; ++a)
        for (int j = 0; j < q; ++j)
            for (int i = 0; i < q; ++i)
                Xinv[i + j * q] += eig.vectors[i + a * q] * eig.vectors[j + a * q] / eig.values[a];

    for (int i = 0; i < q * q; ++i) {
        double r = -Xinv[i] + Q[i] + (X[i] - V[i]) / t;
        CHECK(std::fabs(r) <= 1e-7);
    }

    // objective: -log det X + tr(X Q)
    double logdet = 0.0;
    for (double w : eig.values) logdet += std::log(w);
    double trXQ = 0.0;
    for (int i = 0; i < q * q; ++i) trXQ += X[i] * Q[i];
    CHECK(p->objective(X) == doctest::Approx(-logdet + trXQ).epsilon(1e-9));

    // evaluate_checked flags asymmetric inputs
    auto* nld = dynamic_cast<const NegLogDetTrace*>(p.get());
    REQUIRE(nld != nullptr);
    DenseVector Xout(q * q);
    CHECK_FALSE(nld->evaluate_checked(V.data(), t, Xout.data()));
    DenseVector Vskew = V;
    Vskew[1] += 0.5;
    CHECK(nld->evaluate_checked(Vskew.data(), t, Xout.data()));
}

TEST_CASE("scalar neg_log_det_trace has a closed form") {
    // q=1: minimize -log x + qx + (x-v)^2/(2t): x = (v - tq + sqrt((v-tq)^2 + 4t))/2
    ProxPtr p = make_neg_log_det_trace(1, DenseVector{2.0});
    double v = 0.3, t = 0.6, tq = t * 2.0;
    double expect = 0.5 * ((v - tq) + std::sqrt((v - tq) * (v - tq) + 4.0 * t));
    DenseVector x = p->evaluate(DenseVector{v}, t);
    CHECK(x[0] == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("group lasso shrinks whole blocks") {
    ProxPtr p = make_group_lasso(2.0, {2, 3});
    double t = 0.5;  // threshold t*alpha = 1
    DenseVector v = {3.0, 4.0, 0.1, 0.2, 0.1};  // ||v1|| = 5, ||v2|| ~ 0.245
    DenseVector x = p->evaluate(v, t);
    // block 1 scaled by (1 - 1/5), block 2 zeroed
    CHECK(x[0] == doctest::Approx(3.0 * 0.8));
    CHECK(x[1] == doctest::Approx(4.0 * 0.8));
    CHECK(x[2] == 0.0);
    CHECK(x[3] == 0.0);
    CHECK(x[4] == 0.0);
    CHECK(p->objective(x) == doctest::Approx(2.0 * 4.0));
    check_firm(p, 50, 107);
    check_minimizer(p, randn(5, 11), 0.4, 12);
}

TEST_CASE("nuclear norm prox shrinks singular values") {
    const int rows = 4, cols = 3;
    ProxPtr p = make_nuclear_norm(rows, cols, 1.5);
    DenseVector V = randn(rows * cols, 13);
    double t = 0.8;  // shrink by t*beta = 1.2
    DenseVector X = p->evaluate(V, t);

    Svd sv = jacobi_svd(rows, cols, V.data());
    Svd sx = jacobi_svd(rows, cols, X.data());
    for (int i = 0; i < cols; ++i)
        CHECK(sx.s[i] == doctest::Approx(std::max(0.0, sv.s[i] - 1.2)).epsilon(1e-8));

    double nuc = 0.0;
    for (double s : sx.s) nuc += s;
    CHECK(p->objective(X) == doctest::Approx(1.5 * nuc).epsilon(1e-8));
    check_firm(p, 30, 108, 1e-8);
    check_minimizer(p, V, t, 14, 1e-7);
}

TEST_CASE("logistic prox satisfies scalar optimality") {
    DenseVector labels = {1.0, -1.0, 1.0};
    ProxPtr p = make_logistic(labels);
    DenseVector v = {2.0, -0.5, -4.0};
    double t = 1.3;
    DenseVector x = p->evaluate(v, t);
    for (int i = 0; i < 3; ++i) {
        double y = labels[i];
        double sig = 1.0 / (1.0 + std::exp(y * x[i]));  // sigma(-y x)
        double grad = -y * sig;
        CHECK(std::fabs(x[i] - v[i] + t * grad) <= 1e-10 * (1.0 + std::fabs(v[i])));
    }
    // objective = sum softplus(-y x)
    double expect = 0.0;
    for (int i = 0; i < 3; ++i) {
        double z = -labels[i] * x[i];
        expect += (z > 0) ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    }
    CHECK(p->objective(x) == doctest::Approx(expect).epsilon(1e-12));
    check_firm(p, 50, 109, 1e-9);
    check_minimizer(p, v, t, 15, 1e-8);
}

TEST_CASE("quad_form_polyhedron without constraints solves the linear system") {
    // minimize x'Qx + c'x + ||x - v||^2/(2t): (2Q + I/t) x = v/t - c
    const int n = 3;
    DenseVector Q = {2.0, 0.5, 0.0, 0.5, 1.0, 0.2, 0.0, 0.2, 3.0};
    DenseVector c = {1.0, -1.0, 0.5};
    ProxPtr p = make_quad_form_polyhedron(n, Q, c, 0, {}, {});
    double t = 0.4;
    DenseVector v = randn(n, 16);
    DenseVector x = p->evaluate(v, t);
    DenseVector Qx(n);
    dense_mul(n, n, Q.data(), x.data(), Qx.data());
    for (int i = 0; i < n; ++i) {
        double r = 2.0 * Qx[i] + x[i] / t - v[i] / t + c[i];
        CHECK(std::fabs(r) <= 1e-7 * (1.0 + std::fabs(v[i]) / t));
    }
    double obj = dot(x, Qx) + dot(c, x);
    CHECK(p->objective(x) == doctest::Approx(obj).epsilon(1e-10));
}

TEST_CASE("quad_form_polyhedron scalar halfspace hits both branches") {
    // minimize x^2 + (x - v)^2/(2t) subject to x <= 0
    ProxPtr p = make_quad_form_polyhedron(1, DenseVector{1.0}, DenseVector{0.0}, 1,
                                          DenseVector{1.0}, DenseVector{0.0});
    double t = 0.5;
    // inactive: v < 0 keeps the unconstrained solution v/(1+2t)
    DenseVector xa = p->evaluate(DenseVector{-2.0}, t);
    CHECK(xa[0] == doctest::Approx(-1.0).epsilon(1e-7));
    // active: v > 0 lands on the boundary
    DenseVector xb = p->evaluate(DenseVector{3.0}, t);
    CHECK(xb[0] == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(std::isinf(p->objective(DenseVector{0.5})));
}

TEST_CASE("quad_form_polyhedron box constraints match quad_box") {
    const int n = 4;
    DenseVector w = {1.0, 2.0, 0.5, 3.0};
    DenseVector lo = {-1.0, -0.5, 0.0, -2.0}, hi = {1.0, 0.5, 2.0, 0.0};
    // encode the box as F = [I; -I], d = (hi, -lo), Q = diag(w)
    DenseVector Q(n * n, 0.0), F(2 * n * n, 0.0), d(2 * n);
    for (int i = 0; i < n; ++i) {
        Q[i + i * n] = w[i];
        F[i + i * 2 * n] = 1.0;
        F[(n + i) + i * 2 * n] = -1.0;
        d[i] = hi[i];
        d[n + i] = -lo[i];
    }
    ProxPtr qp = make_quad_form_polyhedron(n, Q, DenseVector(n, 0.0), 2 * n, F, d);
    ProxPtr qb = make_quad_box(w, lo, hi);
    Rng rng(17, "test.prox.qpbox");
    for (int k = 0; k < 10; ++k) {
        DenseVector v(n);
        for (double& y : v) y = 2.0 * rng.normal();
        double t = std::exp(rng.uniform(-1.5, 1.5));
        DenseVector xq = qp->evaluate(v, t), xb = qb->evaluate(v, t);
        for (int i = 0; i < n; ++i) CHECK(xq[i] == doctest::Approx(xb[i]).epsilon(1e-6));
    }
    check_firm(qp, 25, 110, 1e-6);
}

TEST_CASE("quad_form_polyhedron reports an infeasible polyhedron") {
    // x <= -1 and -x <= 0 cannot hold together
    ProxPtr p = make_quad_form_polyhedron(1, DenseVector{1.0}, DenseVector{0.0}, 2,
                                          DenseVector{1.0, -1.0}, DenseVector{-1.0, 0.0});
    CHECK_THROWS_AS((void)p->evaluate(DenseVector{0.0}, 1.0), ProxError);
}

TEST_CASE("wrap_scaled with e=1 matches the inner prox") {
    ProxPtr inner = make_soft_threshold(3, 0.7);
    ProxPtr p = wrap_scaled(inner, 1.0);
    DenseVector v = randn(3, 18);
    CHECK(p->evaluate(v, 0.9) == inner->evaluate(v, 0.9));
    CHECK(p->objective(v) == inner->objective(DenseVector{v}));
}

TEST_CASE("wrap_scaled applies the scaling identity") {
    // fhat(x) = f(e x) gives prox_{t fhat}(v) = (1/e) prox_{e^2 t f}(e v)
    ProxPtr inner = make_soft_threshold(4, 1.1);
    double e = 2.5, t = 0.6;
    ProxPtr p = wrap_scaled(inner, e);
    DenseVector v = randn(4, 19);
    DenseVector ev = v;
    scale(ev, e);
    DenseVector want = inner->evaluate(ev, e * e * t);
    scale(want, 1.0 / e);
    DenseVector got = p->evaluate(v, t);
    for (int i = 0; i < 4; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-14));
    // objective of the wrapped function evaluates f at e*x
    DenseVector x = randn(4, 20);
    DenseVector ex = x;
    scale(ex, e);
    CHECK(p->objective(x) == doctest::Approx(inner->objective(ex)));
    check_firm(p, 30, 111);
}

TEST_CASE("evaluate validates inputs") {
    ProxPtr p = make_nonneg(3);
    CHECK_THROWS_AS((void)p->evaluate(DenseVector(2, 0.0), 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)p->evaluate(DenseVector(3, 0.0), 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)p->evaluate(DenseVector(3, 0.0), -1.0), std::invalid_argument);
}

TEST_CASE("factory validation") {
    CHECK_THROWS_AS(make_soft_threshold(2, -0.5), std::invalid_argument);
    CHECK_THROWS_AS(make_box(DenseVector{1.0}, DenseVector{0.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_quad_box(DenseVector{-1.0}, DenseVector{0.0}, DenseVector{1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_group_lasso(1.0, {2, -1}), std::invalid_argument);
    CHECK_THROWS_AS(make_logistic(DenseVector{0.5}), std::invalid_argument);
    CHECK_THROWS_AS(wrap_scaled(make_zero(2), 0.0), std::invalid_argument);
}

TEST_CASE("firm nonexpansiveness holds for boxes with huge bounds") {
    ProxPtr p = make_quad_box(DenseVector{1.0, 1.0}, DenseVector{-kHuge, -kHuge},
                              DenseVector{kHuge, kHuge});
    check_firm(p, 30, 112);
    DenseVector x = p->evaluate(DenseVector{4.0, -4.0}, 0.5);
    CHECK(x[0] == doctest::Approx(2.0));
    CHECK(x[1] == doctest::Approx(-2.0));
}
