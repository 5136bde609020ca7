#pragma once

#include "a2dr/problem.hpp"
#include "a2dr/sparse.hpp"
#include "a2dr/vec.hpp"

namespace a2dr {

struct FeasibilityReport {
    bool feasible = true;
    double residual_norm = 0.0;  // ||A x_ls - b||
    DenseVector x_ls;
};

// Least-squares feasibility check of {x : A x = b}:
// feasible iff ||A x_ls - b|| <= tol * (1 + ||b||).
FeasibilityReport presolve_check(const SparseMatrix& A, const DenseVector& b, double tol = 1e-8);

struct Equilibration {
    DenseVector d;  // row scalings, size m
    DenseVector e;  // block column scalings, size N
    int sweeps = 0;
    double final_change = 0.0;
};

// Blockwise two-sided diagonal scaling. Minimizes the regularized
// log-Sinkhorn objective over (u, v) by exact coordinate descent (all rows,
// then all blocks per sweep), with gamma = (m+N)/(mN) * sqrt(eps_machine).
// Scalings of empty rows/blocks are pinned to 1. The result is normalized so
// the geometric means of d and e match and ||D A E||_F = sqrt(min(m, N)).
Equilibration equilibrate(const SparseMatrix& A, int max_sweeps = 50, double tol = 1e-8);

// t = (1/10) * (prod e_j)^(-2/N), computed through sorted logs so it is
// exactly invariant to permutations of e.
double choose_t(const DenseVector& e);

struct ScaledProblem {
    BlockProblem problem;  // prox wrapped per block, A and b scaled
    DenseVector d, e;
    double t = 0.1;

    DenseVector unscale_x(const DenseVector& x_scaled) const;
    DenseVector unscale_lambda(const DenseVector& lam_scaled) const;
    DenseVector scale_v(const DenseVector& v) const;  // v0 from problem space
};

ScaledProblem rescale_problem(const BlockProblem& p, const Equilibration& eq);

}  // namespace a2dr
