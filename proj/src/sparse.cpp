#include "a2dr/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace a2dr {

SparseMatrix::SparseMatrix(int rows, int cols, std::vector<Triplet> entries,
                           std::vector<int> block_offsets)
    : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("SparseMatrix: negative dimension");
    if (block_offsets.empty()) {
        block_offsets_ = {0, cols};
    } else {
        block_offsets_ = std::move(block_offsets);
        if (block_offsets_.front() != 0 || block_offsets_.back() != cols)
            throw std::invalid_argument("SparseMatrix: block offsets must span [0, cols]");
        for (std::size_t i = 1; i < block_offsets_.size(); ++i)
            if (block_offsets_[i] <= block_offsets_[i - 1])
                throw std::invalid_argument("SparseMatrix: block offsets must be strictly increasing");
    }
    for (const Triplet& t : entries) {
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
            throw std::invalid_argument("SparseMatrix: entry index out of range at (" +
                                        std::to_string(t.row) + "," + std::to_string(t.col) + ")");
        if (!std::isfinite(t.val))
            throw std::invalid_argument("SparseMatrix: non-finite entry value");
    }
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.col != b.col ? a.col < b.col : a.row < b.row;
    });
    row_.reserve(entries.size());
    col_.reserve(entries.size());
    val_.reserve(entries.size());
    for (const Triplet& t : entries) {
        if (!row_.empty() && row_.back() == t.row && col_.back() == t.col) {
            val_.back() += t.val;  // duplicates summed
        } else {
            row_.push_back(t.row);
            col_.push_back(t.col);
            val_.push_back(t.val);
        }
    }
    build_index();
}

void SparseMatrix::build_index() {
    const int nz = nnz();
    col_ptr_.assign(cols_ + 1, 0);
    for (int k = 0; k < nz; ++k) col_ptr_[col_[k] + 1]++;
    for (int c = 0; c < cols_; ++c) col_ptr_[c + 1] += col_ptr_[c];

    row_ptr_.assign(rows_ + 1, 0);
    for (int k = 0; k < nz; ++k) row_ptr_[row_[k] + 1]++;
    for (int r = 0; r < rows_; ++r) row_ptr_[r + 1] += row_ptr_[r];
    csr_col_.resize(nz);
    csr_val_.resize(nz);
    std::vector<int> next(row_ptr_.begin(), row_ptr_.end() - 1);
    for (int k = 0; k < nz; ++k) {  // canonical order keeps per-row cols sorted
        int slot = next[row_[k]]++;
        csr_col_[slot] = col_[k];
        csr_val_[slot] = val_[k];
    }
}

int SparseMatrix::block_of_col(int c) const {
    auto it = std::upper_bound(block_offsets_.begin(), block_offsets_.end(), c);
    return static_cast<int>(it - block_offsets_.begin()) - 1;
}

void SparseMatrix::mul(const double* x, double* y) const {
#pragma omp parallel for schedule(static) if (nnz() > 8192)
    for (int r = 0; r < rows_; ++r) {
        double s = 0.0;
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += csr_val_[k] * x[csr_col_[k]];
        y[r] = s;
    }
}

void SparseMatrix::tmul(const double* x, double* y) const {
#pragma omp parallel for schedule(static) if (nnz() > 8192)
    for (int c = 0; c < cols_; ++c) {
        double s = 0.0;
        for (int k = col_ptr_[c]; k < col_ptr_[c + 1]; ++k) s += val_[k] * x[row_[k]];
        y[c] = s;
    }
}

DenseVector SparseMatrix::mul(const DenseVector& x) const {
    if (static_cast<int>(x.size()) != cols_) throw std::invalid_argument("mul: size mismatch");
    DenseVector y(rows_);
    mul(x.data(), y.data());
    return y;
}

DenseVector SparseMatrix::tmul(const DenseVector& x) const {
    if (static_cast<int>(x.size()) != rows_) throw std::invalid_argument("tmul: size mismatch");
    DenseVector y(cols_);
    tmul(x.data(), y.data());
    return y;
}

double SparseMatrix::frob_sq() const {
    double s = 0.0;
    for (double v : val_) s += v * v;
    return s;
}

double SparseMatrix::norm2_est(int iters) const {
    if (nnz() == 0 || cols_ == 0 || rows_ == 0) return 0.0;
    DenseVector w(cols_);
    for (int i = 0; i < cols_; ++i) w[i] = 1.0 + 1e-3 * std::cos(static_cast<double>(i));
    DenseVector Aw(rows_);
    double lam = 0.0;
    for (int it = 0; it < iters; ++it) {
        double nw = norm2(w);
        if (nw == 0.0) return 0.0;
        scale(w, 1.0 / nw);
        mul(w.data(), Aw.data());
        tmul(Aw.data(), w.data());
        lam = norm2(w);
    }
    return std::sqrt(lam);
}

SparseMatrix SparseMatrix::scaled(const DenseVector& d, const DenseVector& e) const {
    if (static_cast<int>(d.size()) != rows_ || static_cast<int>(e.size()) != num_blocks())
        throw std::invalid_argument("scaled: weight size mismatch");
    std::vector<Triplet> ts(nnz());
    for (int k = 0; k < nnz(); ++k)
        ts[k] = {row_[k], col_[k], val_[k] * d[row_[k]] * e[block_of_col(col_[k])]};
    return SparseMatrix(rows_, cols_, std::move(ts), block_offsets_);
}

SparseMatrix SparseMatrix::transposed() const {
    std::vector<Triplet> ts(nnz());
    for (int k = 0; k < nnz(); ++k) ts[k] = {col_[k], row_[k], val_[k]};
    return SparseMatrix(cols_, rows_, std::move(ts));
}

namespace reference {

void mul(const SparseMatrix& A, const double* x, double* y) {
    std::fill(y, y + A.rows(), 0.0);
    const auto& r = A.entry_rows();
    const auto& c = A.entry_cols();
    const auto& v = A.entry_vals();
    for (int k = 0; k < A.nnz(); ++k) y[r[k]] += v[k] * x[c[k]];
}

void tmul(const SparseMatrix& A, const double* x, double* y) {
    std::fill(y, y + A.cols(), 0.0);
    const auto& r = A.entry_rows();
    const auto& c = A.entry_cols();
    const auto& v = A.entry_vals();
    for (int k = 0; k < A.nnz(); ++k) y[c[k]] += v[k] * x[r[k]];
}

}  // namespace reference

}  // namespace a2dr
