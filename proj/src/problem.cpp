#include "a2dr/problem.hpp"

#include <exception>
#include <string>

namespace a2dr {

BlockProblem BlockProblem::make(std::vector<ProxPtr> prox, SparseMatrix A, DenseVector b) {
    if (prox.empty()) throw InvalidProblem("problem: needs at least one block");
    const int N = static_cast<int>(prox.size());
    if (A.num_blocks() != N)
        throw InvalidProblem("problem: A has " + std::to_string(A.num_blocks()) +
                             " column blocks for " + std::to_string(N) + " operators");
    for (int i = 0; i < N; ++i)
        if (!prox[i] || prox[i]->dim() != A.block_dim(i))
            throw InvalidProblem("problem: block " + std::to_string(i) + " dimension mismatch");
    if (static_cast<int>(b.size()) != A.rows())
        throw InvalidProblem("problem: b size does not match rows of A");
    if (!all_finite(b)) throw InvalidProblem("problem: non-finite b");
    return BlockProblem{std::move(prox), std::move(A), std::move(b)};
}

BlockProblem BlockProblem::unconstrained(std::vector<ProxPtr> prox) {
    if (prox.empty()) throw InvalidProblem("problem: needs at least one block");
    std::vector<int> offsets{0};
    for (const ProxPtr& p : prox) offsets.push_back(offsets.back() + p->dim());
    const int n = offsets.back();
    SparseMatrix A(0, n, {}, std::move(offsets));
    return BlockProblem{std::move(prox), std::move(A), {}};
}

void BlockProblem::prox_all(const DenseVector& v, double t, DenseVector& x) const {
    const int N = num_blocks();
    const auto& off = A.block_offsets();
    x.resize(v.size());
    std::exception_ptr err;
    int err_block = -1;
#pragma omp parallel for schedule(dynamic) if (N > 1)
    for (int i = 0; i < N; ++i) {
        try {
            prox[i]->evaluate(v.data() + off[i], t, x.data() + off[i]);
        } catch (...) {
#pragma omp critical
            if (!err) {
                err = std::current_exception();
                err_block = i;
            }
        }
    }
    if (err) {
        try {
            std::rethrow_exception(err);
        } catch (const std::exception& e) {
            throw ProxError("block " + std::to_string(err_block) + ": " + e.what());
        }
    }
}

void BlockProblem::prox_all_serial(const DenseVector& v, double t, DenseVector& x) const {
    const auto& off = A.block_offsets();
    x.resize(v.size());
    for (int i = 0; i < num_blocks(); ++i) {
        try {
            prox[i]->evaluate(v.data() + off[i], t, x.data() + off[i]);
        } catch (const std::exception& e) {
            throw ProxError("block " + std::to_string(i) + ": " + e.what());
        }
    }
}

double BlockProblem::objective(const DenseVector& x) const {
    const auto& off = A.block_offsets();
    double s = 0.0;
    for (int i = 0; i < num_blocks(); ++i) s += prox[i]->objective(x.data() + off[i]);
    return s;
}

}  // namespace a2dr
