#pragma once

#include <cstring>

namespace jigclu {

// Small row-major GEMM kernels, written so the inner loops vectorize under
// -O3. Shapes at desk scale stay in the low hundreds, so no packing/tiling.

/// C[M,N] = A[M,K] * B[K,N] (+ C if accumulate)
template <class T>
void gemm_nn(const T* A, const T* B, T* C, int M, int K, int N, bool accumulate) {
    if (!accumulate) std::memset(C, 0, sizeof(T) * size_t(M) * size_t(N));
    for (int i = 0; i < M; ++i) {
        const T* a_row = A + size_t(i) * size_t(K);
        T* c_row = C + size_t(i) * size_t(N);
        for (int k = 0; k < K; ++k) {
            const T a = a_row[k];
            if (a == T(0)) continue;
            const T* b_row = B + size_t(k) * size_t(N);
            for (int j = 0; j < N; ++j) c_row[j] += a * b_row[j];
        }
    }
}

/// C[M,N] = A[M,K] * B^T where B is [N,K] (+ C if accumulate)
template <class T>
void gemm_nt(const T* A, const T* B, T* C, int M, int K, int N, bool accumulate) {
    for (int i = 0; i < M; ++i) {
        const T* a_row = A + size_t(i) * size_t(K);
        T* c_row = C + size_t(i) * size_t(N);
        for (int j = 0; j < N; ++j) {
            const T* b_row = B + size_t(j) * size_t(K);
            T acc = T(0);
            for (int k = 0; k < K; ++k) acc += a_row[k] * b_row[k];
            c_row[j] = accumulate ? c_row[j] + acc : acc;
        }
    }
}

/// C[M,N] = A^T * B where A is [K,M], B is [K,N] (+ C if accumulate)
template <class T>
void gemm_tn(const T* A, const T* B, T* C, int M, int K, int N, bool accumulate) {
    if (!accumulate) std::memset(C, 0, sizeof(T) * size_t(M) * size_t(N));
    for (int k = 0; k < K; ++k) {
        const T* a_row = A + size_t(k) * size_t(M);
        const T* b_row = B + size_t(k) * size_t(N);
        for (int i = 0; i < M; ++i) {
            const T a = a_row[i];
            if (a == T(0)) continue;
            T* c_row = C + size_t(i) * size_t(N);
            for (int j = 0; j < N; ++j) c_row[j] += a * b_row[j];
        }
    }
}

} // namespace jigclu
