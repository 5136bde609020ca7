#pragma once

#include <deque>

#include "a2dr/vec.hpp"

namespace a2dr {

enum class RegMode { adaptive, constant, none };

// Type-II Anderson acceleration memory over the DRS fixed-point map.
// Holds up to m_max columns of iterate differences S = [s_{k-M} .. s_{k-1}]
// and residual differences Y = [y_{k-M} .. y_{k-1}] (newest last), plus the
// raw DRS candidates the extrapolation combines. Frobenius norms of S and Y
// are cached incrementally and refreshed every 1000 pushes to stop drift.
class AaMemory {
  public:
    AaMemory(int n, int m_max);

    // The seed candidate v_drs^1 opens the ring before any differences exist.
    void seed(const DenseVector& v_drs);
    void push(const DenseVector& s, const DenseVector& y, const DenseVector& v_drs);

    int width() const { return static_cast<int>(y_.size()); }
    int dim() const { return n_; }
    double frob_s_sq() const { return fs_; }
    double frob_y_sq() const { return fy_; }
    const std::deque<DenseVector>& s_cols() const { return s_; }
    const std::deque<DenseVector>& y_cols() const { return y_; }
    const std::deque<DenseVector>& drs_ring() const { return ring_; }

  private:
    int n_, m_max_;
    std::deque<DenseVector> s_, y_, ring_;
    double fs_ = 0.0, fy_ = 0.0;
    long pushes_ = 0;
};

struct AaCandidate {
    DenseVector v;       // extrapolated iterate
    DenseVector gamma;   // least-squares weights, size = width
    double mu = 0.0;     // regularization actually used
};

// Solves min_gamma ||g - Y gamma||^2 + mu ||gamma||^2 with
//   mu = eta * (||S||_F^2 + ||Y||_F^2)   (adaptive)
//   mu = eta                             (constant)
//   mu = 0                               (none; minimum-norm on rank defect)
// then combines the stored DRS candidates with the affine weights
//   alpha_0 = gamma_0, alpha_i = gamma_i - gamma_{i-1}, alpha_M = 1 - gamma_{M-1}.
// Width 0 returns the newest DRS candidate unchanged.
AaCandidate aa_candidate(const AaMemory& mem, const DenseVector& g, double eta,
                         RegMode mode = RegMode::adaptive);

// Power-method estimate of ||H||_2 for H = I + (S - Y)(Y'Y + mu I)^{-1} Y'.
// The type-II update is v_next = v - H g; with adaptive mu the bound
// ||H||_2 <= 1 + 2/eta holds.
double hk_norm_estimate(const AaMemory& mem, double mu, int power_iters = 100);

}  // namespace a2dr
