#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "nn/tensor.hpp"

namespace jigclu {

/// Loss weights and switches. tau smooths/sharpens the contrastive softmax;
/// alpha/beta balance the two branches.
struct LossConfig {
    double tau = 0.2;
    double alpha = 1.0;
    double beta = 1.0;
    bool clustering_enabled = true;
    bool location_enabled = true;

    void validate() const {
        require_config(tau > 0.0, "loss: tau must be > 0");
        require_config(alpha >= 0.0 && beta >= 0.0, "loss: weights must be >= 0");
        require_config(clustering_enabled || location_enabled,
                       "loss: at least one branch must be enabled");
    }
};

/// Cluster membership: C_i = { j != i : ids[j] == ids[i] }. For a jigsaw
/// batch every C_i has exactly m*m - 1 members.
struct ClusterTargets {
    std::vector<int> ids;
    int cluster_size = 0; // m*m

    static ClusterTargets from_batch(std::vector<int> cluster_ids, int m) {
        ClusterTargets t;
        t.cluster_size = m * m;
        t.ids = std::move(cluster_ids);
        std::vector<int> counts;
        for (int id : t.ids) {
            require(id >= 0, "cluster targets: negative id");
            if (id >= int(counts.size())) counts.resize(size_t(id) + 1, 0);
            counts[size_t(id)]++;
        }
        for (size_t i = 0; i < counts.size(); ++i)
            require(counts[i] == 0 || counts[i] == t.cluster_size,
                    "cluster targets: cluster " + std::to_string(i) +
                        " has " + std::to_string(counts[i]) + " members, expected " +
                        std::to_string(t.cluster_size));
        return t;
    }
};

/// Ground-truth grid location per patch; the per-batch class histogram is
/// flat (each location appears exactly n times).
struct LocationTargets {
    std::vector<int> ids;
    int num_classes = 0; // m*m

    static LocationTargets from_batch(std::vector<int> location_ids, int m, int n) {
        LocationTargets t;
        t.num_classes = m * m;
        t.ids = std::move(location_ids);
        std::vector<int> counts(size_t(t.num_classes), 0);
        for (int id : t.ids) {
            require(id >= 0 && id < t.num_classes, "location targets: id out of range");
            counts[size_t(id)]++;
        }
        for (int c : counts)
            require(c == n, "location targets: class histogram not flat");
        return t;
    }
};

namespace detail {

template <class T>
std::vector<double> embedding_norms(const Tensor<T>& z) {
    const int p = z.dim(0), c = z.dim(1);
    std::vector<double> norms(static_cast<size_t>(p), 0.0);
    for (int i = 0; i < p; ++i) {
        double acc = 0.0;
        const T* row = z.ptr() + size_t(i) * size_t(c);
        for (int d = 0; d < c; ++d) acc += double(row[d]) * double(row[d]);
        if (!(acc > 0.0) || !std::isfinite(acc))
            throw NumericError("loss: zero-norm or non-finite embedding at index " +
                               std::to_string(i) + " (cosine similarity undefined)");
        norms[size_t(i)] = std::sqrt(acc);
    }
    return norms;
}

/// Full pairwise cosine matrix; diagonal left at 0 (never read).
template <class T>
std::vector<double> cosine_matrix(const Tensor<T>& z, const std::vector<double>& norms) {
    const int p = z.dim(0), c = z.dim(1);
    std::vector<double> cos(size_t(p) * size_t(p), 0.0);
    for (int i = 0; i < p; ++i) {
        const T* zi = z.ptr() + size_t(i) * size_t(c);
        for (int k = i + 1; k < p; ++k) {
            const T* zk = z.ptr() + size_t(k) * size_t(c);
            double dot = 0.0;
            for (int d = 0; d < c; ++d) dot += double(zi[d]) * double(zk[d]);
            double v = dot / (norms[size_t(i)] * norms[size_t(k)]);
            cos[size_t(i) * size_t(p) + size_t(k)] = v;
            cos[size_t(k) * size_t(p) + size_t(i)] = v;
        }
    }
    return cos;
}

} // namespace detail

/// Contrastive pair term for anchor i and same-cluster partner j:
/// -log( exp(cos(z_i,z_j)/tau) / sum_{k != i} exp(cos(z_i,z_k)/tau) ),
/// computed with max-subtraction.
template <class T>
double pair_loss(const Tensor<T>& z, int i, int j, double tau) {
    require(i != j, "pair_loss: i == j");
    const int p = z.dim(0);
    auto norms = detail::embedding_norms(z);
    auto cos = detail::cosine_matrix(z, norms);
    double mx = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < p; ++k)
        if (k != i) mx = std::max(mx, cos[size_t(i) * size_t(p) + size_t(k)] / tau);
    double denom = 0.0;
    for (int k = 0; k < p; ++k)
        if (k != i) denom += std::exp(cos[size_t(i) * size_t(p) + size_t(k)] / tau - mx);
    const double a_ij = cos[size_t(i) * size_t(p) + size_t(j)] / tau;
    return (mx + std::log(denom)) - a_ij;
}

/// Clustering loss: mean over anchors of the mean pair loss over the anchor's
/// cluster. Both orderings (i,j) and (j,i) contribute with their own
/// denominators. Optionally accumulates d(loss)/dZ into *dz (same shape as z).
template <class T>
double cluster_loss(const Tensor<T>& z, const ClusterTargets& targets, double tau,
                    Tensor<T>* dz = nullptr) {
    const int p = z.dim(0), c = z.dim(1);
    require(int(targets.ids.size()) == p, "cluster_loss: target size mismatch");
    require(targets.cluster_size >= 2, "cluster_loss: clusters need >= 2 members");
    const int members = targets.cluster_size - 1;

    auto norms = detail::embedding_norms(z);
    auto cos = detail::cosine_matrix(z, norms);

    std::vector<double> softmax(dz ? size_t(p) * size_t(p) : 0, 0.0);
    const double weight = 1.0 / (double(p) * double(members));
    double loss = 0.0;
    for (int i = 0; i < p; ++i) {
        const double* row = &cos[size_t(i) * size_t(p)];
        double mx = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < p; ++k)
            if (k != i) mx = std::max(mx, row[k] / tau);
        double denom = 0.0;
        for (int k = 0; k < p; ++k)
            if (k != i) denom += std::exp(row[k] / tau - mx);
        const double lse = mx + std::log(denom);
        for (int j = 0; j < p; ++j)
            if (j != i && targets.ids[size_t(j)] == targets.ids[size_t(i)])
                loss += weight * (lse - row[j] / tau);
        if (dz)
            for (int k = 0; k < p; ++k)
                if (k != i)
                    softmax[size_t(i) * size_t(p) + size_t(k)] =
                        std::exp(row[k] / tau - mx) / denom;
    }

    if (dz) {
        require(dz->shape == z.shape, "cluster_loss: gradient shape mismatch");
        // dL/dcos(i,k) for ordered (i,k): w/tau * ((M-1) * softmax_ik - [k in C_i])
        std::vector<double> grad(size_t(p) * size_t(c), 0.0);
        for (int i = 0; i < p; ++i) {
            const T* zi = z.ptr() + size_t(i) * size_t(c);
            for (int k = 0; k < p; ++k) {
                if (k == i) continue;
                const bool same = targets.ids[size_t(k)] == targets.ids[size_t(i)];
                const double g_cos =
                    weight / tau *
                    (double(members) * softmax[size_t(i) * size_t(p) + size_t(k)] -
                     (same ? 1.0 : 0.0));
                if (g_cos == 0.0) continue;
                const T* zk = z.ptr() + size_t(k) * size_t(c);
                const double inv_ik = 1.0 / (norms[size_t(i)] * norms[size_t(k)]);
                const double s = cos[size_t(i) * size_t(p) + size_t(k)];
                const double inv_ii = 1.0 / (norms[size_t(i)] * norms[size_t(i)]);
                const double inv_kk = 1.0 / (norms[size_t(k)] * norms[size_t(k)]);
                double* gi = &grad[size_t(i) * size_t(c)];
                double* gk = &grad[size_t(k) * size_t(c)];
                for (int d = 0; d < c; ++d) {
                    gi[d] += g_cos * (double(zk[d]) * inv_ik - s * double(zi[d]) * inv_ii);
                    gk[d] += g_cos * (double(zi[d]) * inv_ik - s * double(zk[d]) * inv_kk);
                }
            }
        }
        for (size_t idx = 0; idx < grad.size(); ++idx)
            dz->data[idx] += T(grad[idx]);
    }
    return loss;
}

/// Location loss: mean softmax cross-entropy of the location logits.
template <class T>
double location_loss(const Tensor<T>& logits, const LocationTargets& targets,
                     Tensor<T>* dlogits = nullptr) {
    const int p = logits.dim(0), classes = logits.dim(1);
    require(int(targets.ids.size()) == p, "location_loss: target size mismatch");
    require(targets.num_classes == classes, "location_loss: class count mismatch");
    if (!logits.all_finite()) throw NumericError("location_loss: non-finite logits");

    double loss = 0.0;
    for (int i = 0; i < p; ++i) {
        const T* row = logits.ptr() + size_t(i) * size_t(classes);
        double mx = -std::numeric_limits<double>::infinity();
        for (int c = 0; c < classes; ++c) mx = std::max(mx, double(row[c]));
        double denom = 0.0;
        for (int c = 0; c < classes; ++c) denom += std::exp(double(row[c]) - mx);
        const double lse = mx + std::log(denom);
        loss += (lse - double(row[targets.ids[size_t(i)]])) / double(p);
        if (dlogits) {
            T* g = dlogits->ptr() + size_t(i) * size_t(classes);
            for (int c = 0; c < classes; ++c) {
                double softmax = std::exp(double(row[c]) - lse);
                double onehot = (c == targets.ids[size_t(i)]) ? 1.0 : 0.0;
                g[c] += T((softmax - onehot) / double(p));
            }
        }
    }
    return loss;
}

struct LossBreakdown {
    double total = 0.0;
    double clustering = 0.0;
    double location = 0.0;
};

/// Combined objective: alpha * clustering + beta * location over the enabled
/// branches.
/// Gradients (scaled by the weights) accumulate into *dz / *dlogits when
/// provided.
template <class T>
LossBreakdown total_loss(const Tensor<T>& z, const Tensor<T>& logits,
                         const ClusterTargets& clusters, const LocationTargets& locations,
                         const LossConfig& cfg, Tensor<T>* dz = nullptr,
                         Tensor<T>* dlogits = nullptr) {
    cfg.validate();
    LossBreakdown out;
    if (cfg.clustering_enabled) {
        Tensor<T> raw_dz;
        if (dz) raw_dz = Tensor<T>(z.shape);
        out.clustering = cluster_loss(z, clusters, cfg.tau, dz ? &raw_dz : nullptr);
        if (dz)
            for (size_t i = 0; i < raw_dz.data.size(); ++i)
                dz->data[i] += T(cfg.alpha) * raw_dz.data[i];
        out.total += cfg.alpha * out.clustering;
    }
    if (cfg.location_enabled) {
        Tensor<T> raw_dl;
        if (dlogits) raw_dl = Tensor<T>(logits.shape);
        out.location = location_loss(logits, locations, dlogits ? &raw_dl : nullptr);
        if (dlogits)
            for (size_t i = 0; i < raw_dl.data.size(); ++i)
                dlogits->data[i] += T(cfg.beta) * raw_dl.data[i];
        out.total += cfg.beta * out.location;
    }
    return out;
}

/// Fraction of patches whose cosine-nearest neighbour (self excluded, ties to
/// the lowest index) shares their cluster id. Chance level is
/// (m*m - 1) / (n*m*m - 1).
template <class T>
double retrieval_accuracy(const Tensor<T>& z, const ClusterTargets& targets) {
    const int p = z.dim(0);
    auto norms = detail::embedding_norms(z);
    auto cos = detail::cosine_matrix(z, norms);
    int correct = 0;
    for (int i = 0; i < p; ++i) {
        int best = -1;
        double best_v = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < p; ++k) {
            if (k == i) continue;
            double v = cos[size_t(i) * size_t(p) + size_t(k)];
            if (v > best_v) {
                best_v = v;
                best = k;
            }
        }
        if (targets.ids[size_t(best)] == targets.ids[size_t(i)]) ++correct;
    }
    return double(correct) / double(p);
}

/// Top-1 accuracy of the location logits (argmax ties to the lowest index).
/// Chance level is 1 / (m*m).
template <class T>
double location_accuracy(const Tensor<T>& logits, const LocationTargets& targets) {
    const int p = logits.dim(0), classes = logits.dim(1);
    int correct = 0;
    for (int i = 0; i < p; ++i) {
        const T* row = logits.ptr() + size_t(i) * size_t(classes);
        int best = 0;
        for (int c = 1; c < classes; ++c)
            if (double(row[c]) > double(row[best])) best = c;
        if (best == targets.ids[size_t(i)]) ++correct;
    }
    return double(correct) / double(p);
}

} // namespace jigclu
