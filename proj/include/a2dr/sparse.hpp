#pragma once

#include <vector>

#include "a2dr/vec.hpp"

namespace a2dr {

struct Triplet {
    int row = 0;
    int col = 0;
    double val = 0.0;
};

// Sparse matrix in canonical triplet form: entries sorted by (col, row),
// duplicates summed at construction. The canonical order fixes the
// accumulation order of every kernel, so results are reproducible bit for
// bit across runs and thread counts. Column block offsets partition the
// columns into the N variable blocks of a block-separable problem.
class SparseMatrix {
  public:
    SparseMatrix() = default;
    // block_offsets empty means a single block [0, cols].
    SparseMatrix(int rows, int cols, std::vector<Triplet> entries,
                 std::vector<int> block_offsets = {});

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int nnz() const { return static_cast<int>(val_.size()); }
    int num_blocks() const { return static_cast<int>(block_offsets_.size()) - 1; }
    const std::vector<int>& block_offsets() const { return block_offsets_; }
    int block_of_col(int c) const;
    int block_dim(int i) const { return block_offsets_[i + 1] - block_offsets_[i]; }

    // Canonical (col, row) sorted entry views.
    const std::vector<int>& entry_rows() const { return row_; }
    const std::vector<int>& entry_cols() const { return col_; }
    const std::vector<double>& entry_vals() const { return val_; }

    // y = A x. Row-partitioned OpenMP kernel; each y[r] accumulates its
    // entries in increasing column order, which matches the canonical
    // entry-order accumulation of reference::mul exactly.
    void mul(const double* x, double* y) const;
    // y = A' x. Column-partitioned; per column accumulation in increasing
    // row order, again matching the canonical order.
    void tmul(const double* x, double* y) const;

    DenseVector mul(const DenseVector& x) const;
    DenseVector tmul(const DenseVector& x) const;

    double frob_sq() const;
    // Largest singular value estimate by power iteration on A'A.
    double norm2_est(int iters = 50) const;

    // Returns a copy with entries scaled by row weights d (size m) and
    // per-block column weights e (size N).
    SparseMatrix scaled(const DenseVector& d, const DenseVector& e) const;
    SparseMatrix transposed() const;

  private:
    int rows_ = 0;
    int cols_ = 0;
    // Canonical storage, (col, row) sorted. Doubles as CSC with col_ptr_.
    std::vector<int> row_, col_;
    std::vector<double> val_;
    std::vector<int> col_ptr_;
    // CSR view for the row-partitioned kernel, built from the canonical
    // order by a stable counting sort (per-row column order preserved).
    std::vector<int> row_ptr_, csr_col_;
    std::vector<double> csr_val_;
    std::vector<int> block_offsets_;

    void build_index();
};

namespace reference {
// Serial reference kernels: plain loops over the canonical entry order.
// Kept for tests (bitwise comparison against the OpenMP kernels) and for
// the kernel_bench tool.
void mul(const SparseMatrix& A, const double* x, double* y);
void tmul(const SparseMatrix& A, const double* x, double* y);
}  // namespace reference

}  // namespace a2dr
