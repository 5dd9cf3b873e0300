#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "core/parallel.hpp"
#include "core/rng.hpp"
#include "nn/gemm.hpp"
#include "nn/tensor.hpp"

namespace jigclu {

// Caffe-style layers: each layer owns its parameters, parameter gradients and
// whatever it must cache for the backward pass. forward() may be called with
// train=false for inference (no caching requirements beyond BN statistics).

template <class T>
void he_normal_init(Tensor<T>& w, int fan_in, RngStream& rng) {
    const double std = std::sqrt(2.0 / double(fan_in));
    for (auto& v : w.data) v = T(rng.normal() * std);
}

template <class T>
void uniform_fan_init(Tensor<T>& w, int fan_in, RngStream& rng) {
    const double bound = 1.0 / std::sqrt(double(fan_in));
    for (auto& v : w.data) v = T(rng.uniform(-bound, bound));
}

// ---------------------------------------------------------------------------

template <class T>
class Conv2d {
public:
    Conv2d() = default;
    Conv2d(int in_ch, int out_ch, int ksize, int stride, int pad)
        : in_ch_(in_ch), out_ch_(out_ch), k_(ksize), stride_(stride), pad_(pad) {
        weight = Tensor<T>({out_ch, in_ch, ksize, ksize});
        wgrad = Tensor<T>({out_ch, in_ch, ksize, ksize});
    }

    void init(RngStream& rng) { he_normal_init(weight, in_ch_ * k_ * k_, rng); }

    int out_side(int in_side) const { return (in_side + 2 * pad_ - k_) / stride_ + 1; }

    Tensor<T> forward(const Tensor<T>& x, bool train) {
        const int n = x.dim(0), h = x.dim(2), w = x.dim(3);
        const int oh = out_side(h), ow = out_side(w);
        if (train) input_ = x;
        in_h_ = h;
        in_w_ = w;
        Tensor<T> out({n, out_ch_, oh, ow});
        const int ckk = in_ch_ * k_ * k_;
        parallel_for(n, [&](int64_t begin, int64_t end) {
            std::vector<T> cols(size_t(ckk) * size_t(oh) * size_t(ow));
            for (int64_t i = begin; i < end; ++i) {
                im2col(x.ptr() + size_t(i) * size_t(in_ch_) * size_t(h) * size_t(w), h, w,
                       cols.data());
                gemm_nn(weight.ptr(), cols.data(),
                        out.ptr() + size_t(i) * size_t(out_ch_) * size_t(oh) * size_t(ow),
                        out_ch_, ckk, oh * ow, false);
            }
        });
        return out;
    }

    Tensor<T> backward(const Tensor<T>& gout) {
        const int n = gout.dim(0), oh = gout.dim(2), ow = gout.dim(3);
        const int hw = oh * ow;
        const int ckk = in_ch_ * k_ * k_;
        Tensor<T> gin({n, in_ch_, in_h_, in_w_});

        // W^T once, so the input-gradient GEMM runs through the fast NN path
        std::vector<T> wt(size_t(ckk) * size_t(out_ch_));
        for (int o = 0; o < out_ch_; ++o)
            for (int r = 0; r < ckk; ++r)
                wt[size_t(r) * size_t(out_ch_) + size_t(o)] =
                    weight.ptr()[size_t(o) * size_t(ckk) + size_t(r)];

        // Weight gradients accumulate per fixed-size image chunk and are
        // reduced in chunk order, so results do not depend on thread count.
        constexpr int kChunk = 4;
        const int chunks = (n + kChunk - 1) / kChunk;
        std::vector<std::vector<T>> chunk_wgrad(static_cast<size_t>(chunks));

        parallel_for(chunks, [&](int64_t cb, int64_t ce) {
            std::vector<T> cols(size_t(ckk) * size_t(hw));
            std::vector<T> gcols(size_t(ckk) * size_t(hw));
            std::vector<T> gout_t(size_t(hw) * size_t(out_ch_));
            for (int64_t c = cb; c < ce; ++c) {
                auto& wg = chunk_wgrad[size_t(c)];
                wg.assign(size_t(ckk) * size_t(out_ch_), T(0));
                const int lo = int(c) * kChunk, hi = std::min(n, lo + kChunk);
                for (int i = lo; i < hi; ++i) {
                    const T* x_i = input_.ptr() +
                                   size_t(i) * size_t(in_ch_) * size_t(in_h_) * size_t(in_w_);
                    const T* g_i = gout.ptr() + size_t(i) * size_t(out_ch_) * size_t(hw);
                    im2col(x_i, in_h_, in_w_, cols.data());
                    // dW^T += cols * gout_i^T   (both operands row-contiguous)
                    for (int o = 0; o < out_ch_; ++o)
                        for (int j = 0; j < hw; ++j)
                            gout_t[size_t(j) * size_t(out_ch_) + size_t(o)] =
                                g_i[size_t(o) * size_t(hw) + size_t(j)];
                    gemm_nn(cols.data(), gout_t.data(), wg.data(), ckk, hw, out_ch_, true);
                    // dcols = W^T * gout_i
                    gemm_nn(wt.data(), g_i, gcols.data(), ckk, out_ch_, hw, false);
                    col2im(gcols.data(), in_h_, in_w_,
                           gin.ptr() +
                               size_t(i) * size_t(in_ch_) * size_t(in_h_) * size_t(in_w_));
                }
            }
        });

        for (const auto& wg : chunk_wgrad)
            for (int o = 0; o < out_ch_; ++o)
                for (int r = 0; r < ckk; ++r)
                    wgrad.ptr()[size_t(o) * size_t(ckk) + size_t(r)] +=
                        wg[size_t(r) * size_t(out_ch_) + size_t(o)];
        return gin;
    }

    void collect_params(const std::string& prefix, std::vector<ParamRef<T>>& out) {
        out.push_back({prefix + ".weight", &weight, &wgrad});
    }

    Tensor<T> weight, wgrad;

private:
    void im2col(const T* x, int h, int w, T* cols) const {
        const int oh = out_side(h), ow = out_side(w);
        for (int c = 0; c < in_ch_; ++c) {
            const T* plane = x + size_t(c) * size_t(h) * size_t(w);
            for (int ky = 0; ky < k_; ++ky) {
                for (int kx = 0; kx < k_; ++kx) {
                    T* row = cols + size_t((c * k_ + ky) * k_ + kx) * size_t(oh) * size_t(ow);
                    for (int oy = 0; oy < oh; ++oy) {
                        const int iy = oy * stride_ - pad_ + ky;
                        if (iy < 0 || iy >= h) {
                            std::fill(row + size_t(oy) * size_t(ow),
                                      row + size_t(oy + 1) * size_t(ow), T(0));
                            continue;
                        }
                        for (int ox = 0; ox < ow; ++ox) {
                            const int ix = ox * stride_ - pad_ + kx;
                            row[size_t(oy) * size_t(ow) + size_t(ox)] =
                                (ix >= 0 && ix < w) ? plane[size_t(iy) * size_t(w) + size_t(ix)]
                                                    : T(0);
                        }
                    }
                }
            }
        }
    }

    void col2im(const T* cols, int h, int w, T* x) const {
        const int oh = out_side(h), ow = out_side(w);
        std::fill(x, x + size_t(in_ch_) * size_t(h) * size_t(w), T(0));
        for (int c = 0; c < in_ch_; ++c) {
            T* plane = x + size_t(c) * size_t(h) * size_t(w);
            for (int ky = 0; ky < k_; ++ky) {
                for (int kx = 0; kx < k_; ++kx) {
                    const T* row =
                        cols + size_t((c * k_ + ky) * k_ + kx) * size_t(oh) * size_t(ow);
                    for (int oy = 0; oy < oh; ++oy) {
                        const int iy = oy * stride_ - pad_ + ky;
                        if (iy < 0 || iy >= h) continue;
                        for (int ox = 0; ox < ow; ++ox) {
                            const int ix = ox * stride_ - pad_ + kx;
                            if (ix >= 0 && ix < w)
                                plane[size_t(iy) * size_t(w) + size_t(ix)] +=
                                    row[size_t(oy) * size_t(ow) + size_t(ox)];
                        }
                    }
                }
            }
        }
    }

    int in_ch_ = 0, out_ch_ = 0, k_ = 0, stride_ = 1, pad_ = 0;
    int in_h_ = 0, in_w_ = 0;
    Tensor<T> input_;
};

// ---------------------------------------------------------------------------

template <class T>
class BatchNorm2d {
public:
    BatchNorm2d() = default;
    explicit BatchNorm2d(int channels) : channels_(channels) {
        gamma = Tensor<T>::full({channels}, T(1));
        beta = Tensor<T>({channels});
        ggrad = Tensor<T>({channels});
        bgrad = Tensor<T>({channels});
        running_mean = Tensor<T>({channels});
        running_var = Tensor<T>::full({channels}, T(1));
    }

    Tensor<T> forward(const Tensor<T>& x, bool train) {
        const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
        const int64_t r = int64_t(n) * h * w; // reduction size per channel
        Tensor<T> out(x.shape);
        if (train) {
            xhat_ = Tensor<T>(x.shape);
            invstd_.assign(size_t(c), T(0));
            parallel_for(c, [&](int64_t cb, int64_t ce) {
            for (int ch = int(cb); ch < int(ce); ++ch) {
                double mean = 0.0, var = 0.0;
                for (int i = 0; i < n; ++i) {
                    const T* p = plane(x, i, ch, h, w);
                    for (int64_t j = 0; j < int64_t(h) * w; ++j) mean += double(p[j]);
                }
                mean /= double(r);
                for (int i = 0; i < n; ++i) {
                    const T* p = plane(x, i, ch, h, w);
                    for (int64_t j = 0; j < int64_t(h) * w; ++j) {
                        double d = double(p[j]) - mean;
                        var += d * d;
                    }
                }
                var /= double(r); // biased, used for normalization
                const T istd = T(1.0 / std::sqrt(var + eps_));
                invstd_[size_t(ch)] = istd;
                const T g = gamma.data[size_t(ch)], b = beta.data[size_t(ch)];
                for (int i = 0; i < n; ++i) {
                    const T* p = plane(x, i, ch, h, w);
                    T* xh = plane(xhat_, i, ch, h, w);
                    T* o = plane(out, i, ch, h, w);
                    for (int64_t j = 0; j < int64_t(h) * w; ++j) {
                        xh[j] = (p[j] - T(mean)) * istd;
                        o[j] = g * xh[j] + b;
                    }
                }
                const double unbiased = r > 1 ? var * double(r) / double(r - 1) : var;
                running_mean.data[size_t(ch)] =
                    T((1.0 - momentum_) * double(running_mean.data[size_t(ch)]) +
                      momentum_ * mean);
                running_var.data[size_t(ch)] =
                    T((1.0 - momentum_) * double(running_var.data[size_t(ch)]) +
                      momentum_ * unbiased);
            }
            });
        } else {
            for (int ch = 0; ch < c; ++ch) {
                const T istd =
                    T(1.0 / std::sqrt(double(running_var.data[size_t(ch)]) + eps_));
                const T mean = running_mean.data[size_t(ch)];
                const T g = gamma.data[size_t(ch)], b = beta.data[size_t(ch)];
                for (int i = 0; i < n; ++i) {
                    const T* p = plane(x, i, ch, h, w);
                    T* o = plane(out, i, ch, h, w);
                    for (int64_t j = 0; j < int64_t(h) * w; ++j)
                        o[j] = g * (p[j] - mean) * istd + b;
                }
            }
        }
        n_ = n; h_ = h; w_ = w;
        train_mode_ = train;
        return out;
    }

    Tensor<T> backward(const Tensor<T>& gout) {
        const int n = n_, c = channels_, h = h_, w = w_;
        const int64_t r = int64_t(n) * h * w;
        Tensor<T> gin(gout.shape);
        if (!train_mode_) {
            for (int ch = 0; ch < c; ++ch) {
                const T scale =
                    gamma.data[size_t(ch)] *
                    T(1.0 / std::sqrt(double(running_var.data[size_t(ch)]) + eps_));
                for (int i = 0; i < n; ++i) {
                    const T* g = plane(gout, i, ch, h, w);
                    T* gi = plane(gin, i, ch, h, w);
                    for (int64_t j = 0; j < int64_t(h) * w; ++j) gi[j] = g[j] * scale;
                }
            }
            return gin;
        }
        parallel_for(c, [&](int64_t cb, int64_t ce) {
        for (int ch = int(cb); ch < int(ce); ++ch) {
            double sum_g = 0.0, sum_gx = 0.0;
            for (int i = 0; i < n; ++i) {
                const T* g = plane(gout, i, ch, h, w);
                const T* xh = plane(xhat_, i, ch, h, w);
                for (int64_t j = 0; j < int64_t(h) * w; ++j) {
                    sum_g += double(g[j]);
                    sum_gx += double(g[j]) * double(xh[j]);
                }
            }
            ggrad.data[size_t(ch)] += T(sum_gx);
            bgrad.data[size_t(ch)] += T(sum_g);
            const double k = double(gamma.data[size_t(ch)]) *
                             double(invstd_[size_t(ch)]) / double(r);
            for (int i = 0; i < n; ++i) {
                const T* g = plane(gout, i, ch, h, w);
                const T* xh = plane(xhat_, i, ch, h, w);
                T* gi = plane(gin, i, ch, h, w);
                for (int64_t j = 0; j < int64_t(h) * w; ++j)
                    gi[j] = T(k * (double(r) * double(g[j]) - sum_g -
                                   double(xh[j]) * sum_gx));
            }
        }
        });
        return gin;
    }

    void collect_params(const std::string& prefix, std::vector<ParamRef<T>>& out) {
        out.push_back({prefix + ".weight", &gamma, &ggrad});
        out.push_back({prefix + ".bias", &beta, &bgrad});
    }

    void collect_buffers(const std::string& prefix, std::vector<BufferRef<T>>& out) {
        out.push_back({prefix + ".running_mean", &running_mean});
        out.push_back({prefix + ".running_var", &running_var});
    }

    Tensor<T> gamma, beta, ggrad, bgrad;
    Tensor<T> running_mean, running_var;

private:
    static T* plane(Tensor<T>& t, int i, int ch, int h, int w) {
        return t.ptr() + (size_t(i) * size_t(t.dim(1)) + size_t(ch)) * size_t(h) * size_t(w);
    }
    static const T* plane(const Tensor<T>& t, int i, int ch, int h, int w) {
        return t.ptr() + (size_t(i) * size_t(t.dim(1)) + size_t(ch)) * size_t(h) * size_t(w);
    }

    int channels_ = 0;
    int n_ = 0, h_ = 0, w_ = 0;
    bool train_mode_ = false;
    double eps_ = 1e-5;
    double momentum_ = 0.1;
    Tensor<T> xhat_;
    std::vector<T> invstd_;
};

// ---------------------------------------------------------------------------

template <class T>
class ReLU {
public:
    Tensor<T> forward(const Tensor<T>& x, bool train) {
        Tensor<T> out(x.shape);
        for (size_t i = 0; i < x.data.size(); ++i)
            out.data[i] = x.data[i] > T(0) ? x.data[i] : T(0);
        if (train) mask_ = out; // positive where active
        return out;
    }

    Tensor<T> backward(const Tensor<T>& gout) {
        Tensor<T> gin(gout.shape);
        for (size_t i = 0; i < gout.data.size(); ++i)
            gin.data[i] = mask_.data[i] > T(0) ? gout.data[i] : T(0);
        return gin;
    }

private:
    Tensor<T> mask_;
};

// ---------------------------------------------------------------------------

template <class T>
class Linear {
public:
    Linear() = default;
    Linear(int in_features, int out_features) : in_(in_features), out_(out_features) {
        weight = Tensor<T>({out_features, in_features});
        bias = Tensor<T>({out_features});
        wgrad = Tensor<T>({out_features, in_features});
        bgrad = Tensor<T>({out_features});
    }

    void init(RngStream& rng) {
        uniform_fan_init(weight, in_, rng);
        uniform_fan_init(bias, in_, rng);
    }

    Tensor<T> forward(const Tensor<T>& x, bool train) {
        const int n = x.dim(0);
        if (train) input_ = x;
        Tensor<T> out({n, out_});
        gemm_nt(x.ptr(), weight.ptr(), out.ptr(), n, in_, out_, false);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < out_; ++j)
                out.ptr()[size_t(i) * size_t(out_) + size_t(j)] += bias.data[size_t(j)];
        return out;
    }

    Tensor<T> backward(const Tensor<T>& gout) {
        const int n = gout.dim(0);
        // dW += gout^T * x ; db += colsum gout ; dx = gout * W
        gemm_tn(gout.ptr(), input_.ptr(), wgrad.ptr(), out_, n, in_, true);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < out_; ++j)
                bgrad.data[size_t(j)] += gout.ptr()[size_t(i) * size_t(out_) + size_t(j)];
        Tensor<T> gin({n, in_});
        gemm_nn(gout.ptr(), weight.ptr(), gin.ptr(), n, out_, in_, false);
        return gin;
    }

    void collect_params(const std::string& prefix, std::vector<ParamRef<T>>& out) {
        out.push_back({prefix + ".weight", &weight, &wgrad});
        out.push_back({prefix + ".bias", &bias, &bgrad});
    }

    Tensor<T> weight, bias, wgrad, bgrad;

private:
    int in_ = 0, out_ = 0;
    Tensor<T> input_;
};

// ---------------------------------------------------------------------------

/// Non-overlapping average pooling, kernel == stride.
template <class T>
class AvgPool2d {
public:
    explicit AvgPool2d(int kernel = 2) : k_(kernel) {}

    void set_kernel(int k) { k_ = k; }

    Tensor<T> forward(const Tensor<T>& x, bool) {
        const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
        const int oh = h / k_, ow = w / k_;
        in_h_ = h; in_w_ = w;
        Tensor<T> out({n, c, oh, ow});
        const T inv = T(1) / T(k_ * k_);
        for (int i = 0; i < n; ++i)
            for (int ch = 0; ch < c; ++ch) {
                const T* src = x.ptr() + (size_t(i) * size_t(c) + size_t(ch)) * size_t(h) * size_t(w);
                T* dst = out.ptr() + (size_t(i) * size_t(c) + size_t(ch)) * size_t(oh) * size_t(ow);
                for (int oy = 0; oy < oh; ++oy)
                    for (int ox = 0; ox < ow; ++ox) {
                        T acc = T(0);
                        for (int ky = 0; ky < k_; ++ky)
                            for (int kx = 0; kx < k_; ++kx)
                                acc += src[size_t(oy * k_ + ky) * size_t(w) + size_t(ox * k_ + kx)];
                        dst[size_t(oy) * size_t(ow) + size_t(ox)] = acc * inv;
                    }
            }
        return out;
    }

    Tensor<T> backward(const Tensor<T>& gout) {
        const int n = gout.dim(0), c = gout.dim(1), oh = gout.dim(2), ow = gout.dim(3);
        Tensor<T> gin({n, c, in_h_, in_w_});
        const T inv = T(1) / T(k_ * k_);
        for (int i = 0; i < n; ++i)
            for (int ch = 0; ch < c; ++ch) {
                const T* g = gout.ptr() + (size_t(i) * size_t(c) + size_t(ch)) * size_t(oh) * size_t(ow);
                T* gi = gin.ptr() + (size_t(i) * size_t(c) + size_t(ch)) * size_t(in_h_) * size_t(in_w_);
                for (int oy = 0; oy < oh; ++oy)
                    for (int ox = 0; ox < ow; ++ox) {
                        const T v = g[size_t(oy) * size_t(ow) + size_t(ox)] * inv;
                        for (int ky = 0; ky < k_; ++ky)
                            for (int kx = 0; kx < k_; ++kx)
                                gi[size_t(oy * k_ + ky) * size_t(in_w_) + size_t(ox * k_ + kx)] = v;
                    }
            }
        return gin;
    }

private:
    int k_ = 2;
    int in_h_ = 0, in_w_ = 0;
};

// ---------------------------------------------------------------------------

/// Bilinear spatial resize (NCHW), half-pixel centers, used by the decouple
/// stage to enlarge feature maps. Backward distributes gradients with the
/// transposed interpolation weights.
template <class T>
class BilinearUpsample {
public:
    Tensor<T> forward(const Tensor<T>& x, int out_h, int out_w) {
        const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
        in_h_ = h; in_w_ = w; out_h_ = out_h; out_w_ = out_w;
        if (h == out_h && w == out_w) return x;
        Tensor<T> out({n, c, out_h, out_w});
        build_weights(h, w, out_h, out_w);
        for (int i = 0; i < n; ++i)
            for (int ch = 0; ch < c; ++ch) {
                const T* src = x.ptr() + (size_t(i) * size_t(c) + size_t(ch)) * size_t(h) * size_t(w);
                T* dst = out.ptr() + (size_t(i) * size_t(c) + size_t(ch)) * size_t(out_h) * size_t(out_w);
                for (int oy = 0; oy < out_h; ++oy) {
                    const auto& ry = rows_[size_t(oy)];
                    for (int ox = 0; ox < out_w; ++ox) {
                        const auto& rx = cols_[size_t(ox)];
                        const T top = T(1 - rx.frac) * src[size_t(ry.lo) * size_t(w) + size_t(rx.lo)] +
                                      T(rx.frac) * src[size_t(ry.lo) * size_t(w) + size_t(rx.hi)];
                        const T bot = T(1 - rx.frac) * src[size_t(ry.hi) * size_t(w) + size_t(rx.lo)] +
                                      T(rx.frac) * src[size_t(ry.hi) * size_t(w) + size_t(rx.hi)];
                        dst[size_t(oy) * size_t(out_w) + size_t(ox)] =
                            T(1 - ry.frac) * top + T(ry.frac) * bot;
                    }
                }
            }
        return out;
    }

    Tensor<T> backward(const Tensor<T>& gout) {
        const int n = gout.dim(0), c = gout.dim(1);
        if (in_h_ == out_h_ && in_w_ == out_w_) return gout;
        Tensor<T> gin({n, c, in_h_, in_w_});
        for (int i = 0; i < n; ++i)
            for (int ch = 0; ch < c; ++ch) {
                const T* g = gout.ptr() + (size_t(i) * size_t(c) + size_t(ch)) * size_t(out_h_) * size_t(out_w_);
                T* gi = gin.ptr() + (size_t(i) * size_t(c) + size_t(ch)) * size_t(in_h_) * size_t(in_w_);
                for (int oy = 0; oy < out_h_; ++oy) {
                    const auto& ry = rows_[size_t(oy)];
                    for (int ox = 0; ox < out_w_; ++ox) {
                        const auto& rx = cols_[size_t(ox)];
                        const T v = g[size_t(oy) * size_t(out_w_) + size_t(ox)];
                        gi[size_t(ry.lo) * size_t(in_w_) + size_t(rx.lo)] += T((1 - ry.frac) * (1 - rx.frac)) * v;
                        gi[size_t(ry.lo) * size_t(in_w_) + size_t(rx.hi)] += T((1 - ry.frac) * rx.frac) * v;
                        gi[size_t(ry.hi) * size_t(in_w_) + size_t(rx.lo)] += T(ry.frac * (1 - rx.frac)) * v;
                        gi[size_t(ry.hi) * size_t(in_w_) + size_t(rx.hi)] += T(ry.frac * rx.frac) * v;
                    }
                }
            }
        return gin;
    }

private:
    struct Taps {
        int lo, hi;
        double frac;
    };

    static std::vector<Taps> axis_weights(int in, int out) {
        std::vector<Taps> taps(static_cast<size_t>(out));
        const double scale = double(in) / double(out);
        for (int o = 0; o < out; ++o) {
            double f = (o + 0.5) * scale - 0.5;
            int lo = int(std::floor(f));
            double frac = f - lo;
            int hi = std::min(lo + 1, in - 1);
            lo = std::clamp(lo, 0, in - 1);
            if (lo == hi) frac = 0.0;
            taps[size_t(o)] = {lo, hi, frac};
        }
        return taps;
    }

    void build_weights(int h, int w, int oh, int ow) {
        rows_ = axis_weights(h, oh);
        cols_ = axis_weights(w, ow);
    }

    int in_h_ = 0, in_w_ = 0, out_h_ = 0, out_w_ = 0;
    std::vector<Taps> rows_, cols_;
};

// ---------------------------------------------------------------------------

template <class T>
class GlobalAvgPool {
public:
    Tensor<T> forward(const Tensor<T>& x, bool) {
        const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
        in_h_ = h; in_w_ = w;
        Tensor<T> out({n, c});
        const T inv = T(1) / T(h * w);
        for (int i = 0; i < n; ++i)
            for (int ch = 0; ch < c; ++ch) {
                const T* src = x.ptr() + (size_t(i) * size_t(c) + size_t(ch)) * size_t(h) * size_t(w);
                T acc = T(0);
                for (int64_t j = 0; j < int64_t(h) * w; ++j) acc += src[j];
                out.ptr()[size_t(i) * size_t(c) + size_t(ch)] = acc * inv;
            }
        return out;
    }

    Tensor<T> backward(const Tensor<T>& gout) {
        const int n = gout.dim(0), c = gout.dim(1);
        Tensor<T> gin({n, c, in_h_, in_w_});
        const T inv = T(1) / T(in_h_ * in_w_);
        for (int i = 0; i < n; ++i)
            for (int ch = 0; ch < c; ++ch) {
                const T v = gout.ptr()[size_t(i) * size_t(c) + size_t(ch)] * inv;
                T* gi = gin.ptr() + (size_t(i) * size_t(c) + size_t(ch)) * size_t(in_h_) * size_t(in_w_);
                for (int64_t j = 0; j < int64_t(in_h_) * in_w_; ++j) gi[j] = v;
            }
        return gin;
    }

private:
    int in_h_ = 0, in_w_ = 0;
};

} // namespace jigclu
