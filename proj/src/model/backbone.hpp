#pragma once

#include <memory>
#include <string>
#include <vector>

#include "nn/layers.hpp"

namespace jigclu {

/// Static description of a backbone: for an input of side L it produces a
/// square feature map of side ceil(L / stride) with `channels` channels.
struct BackboneSpec {
    std::string name;
    int channels = 0;
    int stride = 1;

    int map_side(int input_side) const { return (input_side + stride - 1) / stride; }
};

/// Pluggable feature extractor. Any architecture satisfying this contract
/// can sit behind the decouple module.
template <class T>
class Backbone {
public:
    virtual ~Backbone() = default;
    virtual Tensor<T> forward(const Tensor<T>& x, bool train) = 0;
    virtual Tensor<T> backward(const Tensor<T>& gout) = 0;
    virtual void init(RngStream& rng) = 0;
    virtual void collect_params(const std::string& prefix,
                                std::vector<ParamRef<T>>& out) = 0;
    virtual void collect_buffers(const std::string& prefix,
                                 std::vector<BufferRef<T>>& out) = 0;
    virtual BackboneSpec spec() const = 0;
};

// ---------------------------------------------------------------------------

/// conv-bn-relu-conv-bn + identity (or 1x1 projection) + relu
template <class T>
class ResidualBlock {
public:
    ResidualBlock() = default;
    ResidualBlock(int in_ch, int out_ch, int stride)
        : conv1_(in_ch, out_ch, 3, stride, 1),
          bn1_(out_ch),
          conv2_(out_ch, out_ch, 3, 1, 1),
          bn2_(out_ch),
          project_(stride != 1 || in_ch != out_ch) {
        if (project_) {
            proj_conv_ = Conv2d<T>(in_ch, out_ch, 1, stride, 0);
            proj_bn_ = BatchNorm2d<T>(out_ch);
        }
    }

    void init(RngStream& rng) {
        conv1_.init(rng);
        conv2_.init(rng);
        if (project_) proj_conv_.init(rng);
    }

    Tensor<T> forward(const Tensor<T>& x, bool train) {
        Tensor<T> y = relu1_.forward(bn1_.forward(conv1_.forward(x, train), train), train);
        y = bn2_.forward(conv2_.forward(y, train), train);
        Tensor<T> skip = project_ ? proj_bn_.forward(proj_conv_.forward(x, train), train) : x;
        for (size_t i = 0; i < y.data.size(); ++i) y.data[i] += skip.data[i];
        return relu2_.forward(y, train);
    }

    Tensor<T> backward(const Tensor<T>& gout) {
        Tensor<T> g = relu2_.backward(gout);
        Tensor<T> g_main = bn2_.backward(g); // branch grad; g is also the skip grad
        g_main = conv1_.backward(bn1_.backward(relu1_.backward(conv2_.backward(g_main))));
        Tensor<T> g_skip = project_ ? proj_conv_.backward(proj_bn_.backward(g)) : g;
        for (size_t i = 0; i < g_main.data.size(); ++i) g_main.data[i] += g_skip.data[i];
        return g_main;
    }

    void collect_params(const std::string& prefix, std::vector<ParamRef<T>>& out) {
        conv1_.collect_params(prefix + ".conv1", out);
        bn1_.collect_params(prefix + ".bn1", out);
        conv2_.collect_params(prefix + ".conv2", out);
        bn2_.collect_params(prefix + ".bn2", out);
        if (project_) {
            proj_conv_.collect_params(prefix + ".proj.conv", out);
            proj_bn_.collect_params(prefix + ".proj.bn", out);
        }
    }

    void collect_buffers(const std::string& prefix, std::vector<BufferRef<T>>& out) {
        bn1_.collect_buffers(prefix + ".bn1", out);
        bn2_.collect_buffers(prefix + ".bn2", out);
        if (project_) proj_bn_.collect_buffers(prefix + ".proj.bn", out);
    }

private:
    Conv2d<T> conv1_;
    BatchNorm2d<T> bn1_;
    Conv2d<T> conv2_;
    BatchNorm2d<T> bn2_;
    ReLU<T> relu1_, relu2_;
    bool project_ = false;
    Conv2d<T> proj_conv_;
    BatchNorm2d<T> proj_bn_;
};

/// Residual network for small images: 3x3 stem at full resolution, three
/// stages with strides {1,2,2} (output stride 4). With two blocks per stage
/// and widths {16,32,64} this is the desk-scale default ("resnet14", 64
/// output channels, 8x8 map for 32x32 inputs).
template <class T>
class SmallResNet : public Backbone<T> {
public:
    SmallResNet(std::string name, std::vector<int> widths, std::vector<int> blocks)
        : name_(std::move(name)), widths_(std::move(widths)) {
        stem_conv_ = Conv2d<T>(3, widths_[0], 3, 1, 1);
        stem_bn_ = BatchNorm2d<T>(widths_[0]);
        int in_ch = widths_[0];
        for (size_t s = 0; s < widths_.size(); ++s) {
            const int stride = s == 0 ? 1 : 2;
            for (int b = 0; b < blocks[s]; ++b) {
                blocks_.emplace_back(in_ch, widths_[s], b == 0 ? stride : 1);
                in_ch = widths_[s];
            }
        }
    }

    void init(RngStream& rng) override {
        stem_conv_.init(rng);
        for (auto& b : blocks_) b.init(rng);
    }

    Tensor<T> forward(const Tensor<T>& x, bool train) override {
        Tensor<T> y = stem_relu_.forward(stem_bn_.forward(stem_conv_.forward(x, train), train), train);
        for (auto& b : blocks_) y = b.forward(y, train);
        return y;
    }

    Tensor<T> backward(const Tensor<T>& gout) override {
        Tensor<T> g = gout;
        for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it) g = it->backward(g);
        return stem_conv_.backward(stem_bn_.backward(stem_relu_.backward(g)));
    }

    void collect_params(const std::string& prefix, std::vector<ParamRef<T>>& out) override {
        stem_conv_.collect_params(prefix + ".stem.conv", out);
        stem_bn_.collect_params(prefix + ".stem.bn", out);
        for (size_t i = 0; i < blocks_.size(); ++i)
            blocks_[i].collect_params(prefix + ".block" + std::to_string(i), out);
    }

    void collect_buffers(const std::string& prefix, std::vector<BufferRef<T>>& out) override {
        stem_bn_.collect_buffers(prefix + ".stem.bn", out);
        for (size_t i = 0; i < blocks_.size(); ++i)
            blocks_[i].collect_buffers(prefix + ".block" + std::to_string(i), out);
    }

    BackboneSpec spec() const override {
        return {name_, widths_.back(), 1 << int(widths_.size() - 1)};
    }

private:
    std::string name_;
    std::vector<int> widths_;
    Conv2d<T> stem_conv_;
    BatchNorm2d<T> stem_bn_;
    ReLU<T> stem_relu_;
    std::vector<ResidualBlock<T>> blocks_;
};

/// Two-conv toy backbone for tests: conv-bn-relu, avg-pool down to the
/// declared stride, then a final conv. Zeroing the final conv weights gives a
/// constant (all-zero) map.
template <class T>
class ToyBackbone : public Backbone<T> {
public:
    ToyBackbone(int channels, int stride) : channels_(channels), stride_(stride) {
        conv1_ = Conv2d<T>(3, channels, 3, 1, 1);
        bn1_ = BatchNorm2d<T>(channels);
        conv2_ = Conv2d<T>(channels, channels, 3, 1, 1);
        int s = stride;
        while (s > 1) {
            pools_.emplace_back(2);
            s /= 2;
        }
    }

    void init(RngStream& rng) override {
        conv1_.init(rng);
        conv2_.init(rng);
    }

    Tensor<T> forward(const Tensor<T>& x, bool train) override {
        Tensor<T> y = relu_.forward(bn1_.forward(conv1_.forward(x, train), train), train);
        for (auto& p : pools_) y = p.forward(y, train);
        return conv2_.forward(y, train);
    }

    Tensor<T> backward(const Tensor<T>& gout) override {
        Tensor<T> g = conv2_.backward(gout);
        for (auto it = pools_.rbegin(); it != pools_.rend(); ++it) g = it->backward(g);
        return conv1_.backward(bn1_.backward(relu_.backward(g)));
    }

    void collect_params(const std::string& prefix, std::vector<ParamRef<T>>& out) override {
        conv1_.collect_params(prefix + ".conv1", out);
        bn1_.collect_params(prefix + ".bn1", out);
        conv2_.collect_params(prefix + ".conv2", out);
    }

    void collect_buffers(const std::string& prefix, std::vector<BufferRef<T>>& out) override {
        bn1_.collect_buffers(prefix + ".bn1", out);
    }

    BackboneSpec spec() const override {
        return {"toy_c" + std::to_string(channels_) + "_s" + std::to_string(stride_),
                channels_, stride_};
    }

    Conv2d<T>& final_conv() { return conv2_; }

private:
    int channels_ = 0, stride_ = 1;
    Conv2d<T> conv1_;
    BatchNorm2d<T> bn1_;
    ReLU<T> relu_;
    Conv2d<T> conv2_;
    std::vector<AvgPool2d<T>> pools_;
};

/// Backbone factory. Known names: "resnet14" (widths 16/32/64, 2 blocks per
/// stage), "resnet8" (1 block per stage), "toy_c<C>_s<S>".
template <class T>
std::unique_ptr<Backbone<T>> make_backbone(const std::string& name) {
    if (name == "resnet14")
        return std::make_unique<SmallResNet<T>>(name, std::vector<int>{16, 32, 64},
                                                std::vector<int>{2, 2, 2});
    if (name == "resnet8")
        return std::make_unique<SmallResNet<T>>(name, std::vector<int>{16, 32, 64},
                                                std::vector<int>{1, 1, 1});
    if (name.rfind("toy_c", 0) == 0) {
        auto spos = name.find("_s");
        if (spos != std::string::npos) {
            int channels = std::stoi(name.substr(5, spos - 5));
            int stride = std::stoi(name.substr(spos + 2));
            bool pow2 = stride > 0 && (stride & (stride - 1)) == 0;
            require_config(pow2 && channels > 0, "backbone: bad toy spec: " + name);
            return std::make_unique<ToyBackbone<T>>(channels, stride);
        }
    }
    throw ConfigError("unknown backbone: " + name);
}

} // namespace jigclu
