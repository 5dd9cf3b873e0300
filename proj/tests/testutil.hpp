#pragma once

// Test-only oracles, kept deliberately independent of the library's
// implementation paths: literal scalar double-precision loss formulas and a
// central finite-difference gradient checker.

#include <cmath>
#include <functional>
#include <vector>

#include "core/rng.hpp"
#include "nn/tensor.hpp"

namespace jigclu::testutil {

inline double cosine(const Tensor<double>& z, int i, int j) {
    const int c = z.dim(1);
    double dot = 0, ni = 0, nj = 0;
    for (int d = 0; d < c; ++d) {
        double a = z.ptr()[size_t(i) * size_t(c) + size_t(d)];
        double b = z.ptr()[size_t(j) * size_t(c) + size_t(d)];
        dot += a * b;
        ni += a * a;
        nj += b * b;
    }
    return dot / (std::sqrt(ni) * std::sqrt(nj));
}

/// Literal pair term: plain exponentials, no max-subtraction.
inline double pair_loss_brute(const Tensor<double>& z, int i, int j, double tau) {
    const int p = z.dim(0);
    double denom = 0;
    for (int k = 0; k < p; ++k)
        if (k != i) denom += std::exp(cosine(z, i, k) / tau);
    return -std::log(std::exp(cosine(z, i, j) / tau) / denom);
}

/// Literal clustering loss.
inline double cluster_loss_brute(const Tensor<double>& z, const std::vector<int>& ids,
                                 int cluster_size, double tau) {
    const int p = z.dim(0);
    double total = 0;
    for (int i = 0; i < p; ++i) {
        double inner = 0;
        for (int j = 0; j < p; ++j)
            if (j != i && ids[size_t(j)] == ids[size_t(i)])
                inner += pair_loss_brute(z, i, j, tau);
        total += inner / double(cluster_size - 1);
    }
    return total / double(p);
}

/// Literal location loss: mean softmax cross-entropy.
inline double location_loss_brute(const Tensor<double>& logits,
                                  const std::vector<int>& ids) {
    const int p = logits.dim(0), c = logits.dim(1);
    double total = 0;
    for (int i = 0; i < p; ++i) {
        double denom = 0;
        for (int k = 0; k < c; ++k)
            denom += std::exp(logits.ptr()[size_t(i) * size_t(c) + size_t(k)]);
        double num = std::exp(logits.ptr()[size_t(i) * size_t(c) + size_t(ids[size_t(i)])]);
        total += -std::log(num / denom);
    }
    return total / double(p);
}

/// Central finite differences of a scalar function of x.
inline Tensor<double> finite_difference(Tensor<double>& x,
                                        const std::function<double()>& eval,
                                        double eps = 1e-4) {
    Tensor<double> grad(x.shape);
    for (size_t i = 0; i < x.data.size(); ++i) {
        const double keep = x.data[i];
        x.data[i] = keep + eps;
        const double hi = eval();
        x.data[i] = keep - eps;
        const double lo = eval();
        x.data[i] = keep;
        grad.data[i] = (hi - lo) / (2 * eps);
    }
    return grad;
}

/// ||a - b|| / max(||a||, ||b||); 0 when both vanish.
inline double relative_error(const Tensor<double>& a, const Tensor<double>& b) {
    double diff = 0, na = 0, nb = 0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        double d = a.data[i] - b.data[i];
        diff += d * d;
        na += a.data[i] * a.data[i];
        nb += b.data[i] * b.data[i];
    }
    double denom = std::max(std::sqrt(na), std::sqrt(nb));
    return denom == 0 ? std::sqrt(diff) : std::sqrt(diff) / denom;
}

template <class T>
Tensor<T> random_tensor(std::vector<int> shape, RngStream& rng, double scale = 1.0) {
    Tensor<T> t(std::move(shape));
    for (auto& v : t.data) v = T(rng.normal() * scale);
    return t;
}

/// Random orthogonal matrix via Gram-Schmidt on a Gaussian matrix.
inline std::vector<double> random_rotation(int c, RngStream& rng) {
    std::vector<double> q(size_t(c) * size_t(c));
    for (int col = 0; col < c; ++col) {
        std::vector<double> v(static_cast<size_t>(c), 0.0);
        for (auto& x : v) x = rng.normal();
        for (int prev = 0; prev < col; ++prev) {
            double dot = 0;
            for (int r = 0; r < c; ++r) dot += v[size_t(r)] * q[size_t(r) * size_t(c) + size_t(prev)];
            for (int r = 0; r < c; ++r) v[size_t(r)] -= dot * q[size_t(r) * size_t(c) + size_t(prev)];
        }
        double norm = 0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        for (int r = 0; r < c; ++r) q[size_t(r) * size_t(c) + size_t(col)] = v[size_t(r)] / norm;
    }
    return q;
}

/// Jigsaw-shaped labels: ids[i] = perm-free canonical (i / mm, i % mm),
/// shuffled by a permutation so clusters are scattered like a real batch.
inline void random_batch_labels(int n, int m, RngStream& rng, std::vector<int>& cluster,
                                std::vector<int>& location) {
    const int total = n * m * m;
    std::vector<int> order(size_t(total), 0);
    for (int i = 0; i < total; ++i) order[size_t(i)] = i;
    for (int i = total - 1; i >= 1; --i)
        std::swap(order[size_t(i)], order[rng.uniform_int(uint64_t(i) + 1)]);
    cluster.resize(size_t(total));
    location.resize(size_t(total));
    for (int i = 0; i < total; ++i) {
        cluster[size_t(i)] = order[size_t(i)] / (m * m);
        location[size_t(i)] = order[size_t(i)] % (m * m);
    }
}

} // namespace jigclu::testutil
