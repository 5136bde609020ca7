#pragma once

#include "a2dr/sparse.hpp"
#include "a2dr/vec.hpp"

namespace a2dr {

struct LsqrResult {
    DenseVector x;
    int iters = 0;
    double resid_norm = 0.0;   // estimate of ||A x - rhs||
    double normal_norm = 0.0;  // estimate of ||A'(A x - rhs)||
    bool converged = false;
};

// Least squares min ||A x - rhs||_2 by Golub-Kahan bidiagonalization.
// max_iter <= 0 selects 2*min(m,n) + 50. A warm start is handled by the
// residual correction trick: solve for the update d in
// min ||A d - (rhs - A*warm)|| and return warm + d, so the bidiagonalization
// always starts from a zero iterate.
LsqrResult lsqr_solve(const SparseMatrix& A, const DenseVector& rhs,
                      const DenseVector* warm = nullptr, double tol = 1e-10,
                      int max_iter = 0);

// Same, for min ||A' w - rhs||_2 without materializing the transpose.
LsqrResult lsqr_solve_transpose(const SparseMatrix& A, const DenseVector& rhs,
                                const DenseVector* warm = nullptr, double tol = 1e-10,
                                int max_iter = 0);

}  // namespace a2dr
