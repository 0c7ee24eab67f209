#pragma once

#include <cstddef>
#include <vector>

#include "bitrec/errors.hpp"

namespace bitrec {
namespace nn {

// Batched activation array, NCHW layout. T is float for training and
// double for gradient-check mode.
template <typename T>
struct Tensor4 {
    int n = 0, c = 0, h = 0, w = 0;
    std::vector<T> v;

    Tensor4() = default;
    Tensor4(int n_, int c_, int h_, int w_)
        : n(n_), c(c_), h(h_), w(w_),
          v(static_cast<std::size_t>(n_) * c_ * h_ * w_, T(0)) {}

    std::size_t size() const { return v.size(); }
    std::size_t sample_stride() const { return static_cast<std::size_t>(c) * h * w; }

    bool same_shape(const Tensor4& o) const {
        return n == o.n && c == o.c && h == o.h && w == o.w;
    }

    T* sample(int i) { return v.data() + sample_stride() * i; }
    const T* sample(int i) const { return v.data() + sample_stride() * i; }
};

namespace detail {

// C(MxN) += A(MxK) * B(KxN), all row-major.
template <typename T>
void gemm_nn(int m, int n, int k, const T* a, const T* b, T* c) {
    for (int i = 0; i < m; ++i) {
        T* ci = c + static_cast<std::size_t>(i) * n;
        const T* ai = a + static_cast<std::size_t>(i) * k;
        for (int p = 0; p < k; ++p) {
            const T av = ai[p];
            const T* bp = b + static_cast<std::size_t>(p) * n;
            for (int j = 0; j < n; ++j) ci[j] += av * bp[j];
        }
    }
}

// C(MxN) += A(KxM)^T * B(KxN).
template <typename T>
void gemm_tn(int m, int n, int k, const T* a, const T* b, T* c) {
    for (int p = 0; p < k; ++p) {
        const T* ap = a + static_cast<std::size_t>(p) * m;
        const T* bp = b + static_cast<std::size_t>(p) * n;
        for (int i = 0; i < m; ++i) {
            const T av = ap[i];
            T* ci = c + static_cast<std::size_t>(i) * n;
            for (int j = 0; j < n; ++j) ci[j] += av * bp[j];
        }
    }
}

// C(MxN) += A(MxK) * B(NxK)^T.
template <typename T>
void gemm_nt(int m, int n, int k, const T* a, const T* b, T* c) {
    for (int i = 0; i < m; ++i) {
        const T* ai = a + static_cast<std::size_t>(i) * k;
        T* ci = c + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            const T* bj = b + static_cast<std::size_t>(j) * k;
            T acc = T(0);
            for (int p = 0; p < k; ++p) acc += ai[p] * bj[p];
            ci[j] += acc;
        }
    }
}

} // namespace detail
} // namespace nn
} // namespace bitrec
