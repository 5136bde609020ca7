#pragma once

#include "a2dr/vec.hpp"

namespace a2dr {

// Dense helpers on column-major buffers. Sized for the small dense work in
// this project: AA memories (<= ~10 columns), symmetric prox kinds, QP prox
// factorizations, generators.

// min_gamma ||Y gamma - g||^2 + mu ||gamma||^2, Y is n x k column-major.
// mu > 0: Householder QR of the stacked system [Y; sqrt(mu) I].
// mu = 0: minimum-norm solution through a one-sided Jacobi SVD, which covers
// rank-deficient Y.
DenseVector ridge_lstsq(int n, int k, const double* Y, const double* g, double mu);

struct SymEig {
    DenseVector values;   // ascending
    DenseVector vectors;  // q x q column-major, column i pairs with values[i]
};
// Cyclic Jacobi rotations; sweeps until off(A) <= 1e-12 * ||A||_F.
SymEig jacobi_eigh(int q, const double* M);

struct Svd {
    DenseVector U;  // rows x r column-major
    DenseVector s;  // r singular values, descending
    DenseVector V;  // cols x r column-major
};
// One-sided Jacobi (Hestenes) economy SVD, r = min(rows, cols).
Svd jacobi_svd(int rows, int cols, const double* M);

// In-place lower Cholesky of SPD M (n x n column-major). Returns false if a
// nonpositive pivot appears.
bool cholesky_lower(int n, double* M);
// Solve L L' x = b given the lower factor.
void cholesky_solve(int n, const double* L, double* x);

// y = M x and y = M' x for column-major M (rows x cols).
void dense_mul(int rows, int cols, const double* M, const double* x, double* y);
void dense_tmul(int rows, int cols, const double* M, const double* x, double* y);

}  // namespace a2dr
