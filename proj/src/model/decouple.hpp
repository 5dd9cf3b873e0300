#pragma once

#include "nn/layers.hpp"

namespace jigclu {

/// Parameter-free decouple stage: converts one feature map per montage into
/// m*m per-patch vectors. If the map side is not a multiple of m it is first
/// enlarged (never shrunk) by bilinear interpolation to the smallest multiple
/// of m >= side, then average-pooled with kernel = stride = side/m. Output
/// vectors are ordered batch-major, slots row-major: vector i belongs to
/// (image i / (m*m), slot i % (m*m)).
template <class T>
class Decouple {
public:
    /// fm: [n, c, h, w] with h == w. Returns [n*m*m, c].
    Tensor<T> forward(const Tensor<T>& fm, int m) {
        require(fm.dim(2) == fm.dim(3), "decouple: feature map must be square");
        m_ = m;
        n_ = fm.dim(0);
        c_ = fm.dim(1);
        const int h = fm.dim(2);
        const int target = ((h + m - 1) / m) * m;
        upsampled_ = (target != h);
        Tensor<T> y = upsampled_ ? up_.forward(fm, target, target) : fm;
        pool_.set_kernel(target / m);
        y = pool_.forward(y, true); // [n, c, m, m]
        Tensor<T> out({n_ * m * m, c_});
        for (int i = 0; i < n_; ++i)
            for (int ch = 0; ch < c_; ++ch)
                for (int p = 0; p < m * m; ++p)
                    out.ptr()[size_t(i * m * m + p) * size_t(c_) + size_t(ch)] =
                        y.ptr()[(size_t(i) * size_t(c_) + size_t(ch)) * size_t(m) * size_t(m) + size_t(p)];
        return out;
    }

    /// gout: [n*m*m, c] -> gradient w.r.t. the input feature map.
    Tensor<T> backward(const Tensor<T>& gout) {
        const int m = m_;
        Tensor<T> g({n_, c_, m, m});
        for (int i = 0; i < n_; ++i)
            for (int ch = 0; ch < c_; ++ch)
                for (int p = 0; p < m * m; ++p)
                    g.ptr()[(size_t(i) * size_t(c_) + size_t(ch)) * size_t(m) * size_t(m) + size_t(p)] =
                        gout.ptr()[size_t(i * m * m + p) * size_t(c_) + size_t(ch)];
        Tensor<T> gm = pool_.backward(g);
        return upsampled_ ? up_.backward(gm) : gm;
    }

private:
    int m_ = 2, n_ = 0, c_ = 0;
    bool upsampled_ = false;
    BilinearUpsample<T> up_;
    AvgPool2d<T> pool_;
};

} // namespace jigclu
