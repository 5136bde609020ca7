#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace a2dr {

using DenseVector = std::vector<double>;

inline double dot(const DenseVector& a, const DenseVector& b) {
    assert(a.size() == b.size());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const DenseVector& a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(const DenseVector& a) {
    double m = 0.0;
    for (double x : a) m = std::max(m, std::fabs(x));
    return m;
}

// y += alpha * x
inline void axpy(double alpha, const DenseVector& x, DenseVector& y) {
    assert(x.size() == y.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline void scale(DenseVector& x, double alpha) {
    for (double& v : x) v *= alpha;
}

inline DenseVector sub(const DenseVector& a, const DenseVector& b) {
    assert(a.size() == b.size());
    DenseVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline DenseVector add(const DenseVector& a, const DenseVector& b) {
    assert(a.size() == b.size());
    DenseVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline bool all_finite(const DenseVector& a) {
    for (double x : a)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace a2dr
