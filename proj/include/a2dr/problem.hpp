#pragma once

#include <vector>

#include "a2dr/prox.hpp"
#include "a2dr/sparse.hpp"
#include "a2dr/vec.hpp"

namespace a2dr {

// minimize sum_i f_i(x_i)  subject to  sum_i A_i x_i = b
// with each f_i given by a prox operator. A's column blocks line up with the
// operators; an empty A (m = 0) means no coupling constraint.
struct BlockProblem {
    std::vector<ProxPtr> prox;
    SparseMatrix A;
    DenseVector b;

    static BlockProblem make(std::vector<ProxPtr> prox, SparseMatrix A, DenseVector b);
    static BlockProblem unconstrained(std::vector<ProxPtr> prox);

    int num_blocks() const { return static_cast<int>(prox.size()); }
    int total_dim() const { return A.cols(); }
    int num_rows() const { return A.rows(); }

    // Evaluates all blocks' proxes into x (the fan-out is OpenMP parallel;
    // blocks write disjoint slices, so the result is thread-count
    // independent). Failures carry the block index.
    void prox_all(const DenseVector& v, double t, DenseVector& x) const;
    // Serial loop over blocks, kept as the reference for the parallel path.
    void prox_all_serial(const DenseVector& v, double t, DenseVector& x) const;

    // sum_i f_i(x_i)
    double objective(const DenseVector& x) const;
};

struct InvalidProblem : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace a2dr
