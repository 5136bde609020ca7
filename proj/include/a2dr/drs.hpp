#pragma once

#include "a2dr/problem.hpp"
#include "a2dr/vec.hpp"

namespace a2dr {

// One Douglas-Rachford splitting step on the v iterate:
//   x_half = prox_t(v)
//   x_proj = Pi(2 x_half - v)        (projection onto {x : A x = b})
//   v_next = v + x_proj - x_half
// g = v - v_next is the fixed-point residual; the map v -> v_next is
// 1/2-averaged, which the tests sample.
struct DrsStep {
    DenseVector x_half;
    DenseVector v_next;
    DenseVector g;
};

// Warm starts for the two least-squares solves of an iteration. Reused
// across iterations by the solver; zero-initialized works standalone.
struct DrsWorkspace {
    DenseVector proj_corr;  // correction d in Pi(w) = w - d
    DenseVector lam;        // dual estimate
    double lsqr_tol = 1e-10;
    int lsqr_max_iter = 0;  // <= 0 means 2*min(m,n)+50
};

// Pi(w) = w - A^+(A w - b): least-norm correction via LSQR.
DenseVector project_affine(const SparseMatrix& A, const DenseVector& b, const DenseVector& w,
                           DrsWorkspace* ws = nullptr);

DrsStep drs_step(const BlockProblem& p, const DenseVector& v, double t, DrsWorkspace& ws);

struct Residuals {
    DenseVector r_prim;  // A x_half - b
    DenseVector r_dual;  // (v - x_half)/t + A' lam
    DenseVector lam;     // argmin ||A' lam - (x_half - v)/t||
    double prim_norm = 0.0;
    double dual_norm = 0.0;
    double norm = 0.0;  // ||(r_prim, r_dual)||_2
};

Residuals residuals(const BlockProblem& p, const DenseVector& v, const DenseVector& x_half,
                    double t, DrsWorkspace& ws);

// Stopping rule: ||r|| <= eps_abs + eps_rel * ||r0||.
bool check_stop(double norm, double r0_norm, double eps_abs, double eps_rel);

}  // namespace a2dr
