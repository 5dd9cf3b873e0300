#pragma once

#include <string>
#include <unordered_map>

#include "nn/tensor.hpp"

namespace jigclu {

/// SGD with classic momentum and decoupled-from-nothing L2:
///   v <- momentum * v + grad + wd * param
///   param <- param - lr * v
/// Momentum buffers are lazily created per parameter name and are part of the
/// checkpoint state.
template <class T>
class SgdOptimizer {
public:
    void step(const std::vector<ParamRef<T>>& params, double lr, double momentum,
              double weight_decay) {
        for (const auto& p : params) {
            Tensor<T>& v = buffer(p.name, p.value->shape);
            T* vel = v.ptr();
            T* val = p.value->ptr();
            const T* grad = p.grad->ptr();
            const T mu = T(momentum), wd = T(weight_decay), step_size = T(lr);
            const int64_t n = p.value->numel();
            for (int64_t i = 0; i < n; ++i) {
                vel[i] = mu * vel[i] + grad[i] + wd * val[i];
                val[i] -= step_size * vel[i];
            }
        }
    }

    Tensor<T>& buffer(const std::string& name, const std::vector<int>& shape) {
        auto it = buffers_.find(name);
        if (it == buffers_.end()) it = buffers_.emplace(name, Tensor<T>(shape)).first;
        return it->second;
    }

    bool has_buffer(const std::string& name) const { return buffers_.count(name) > 0; }

private:
    std::unordered_map<std::string, Tensor<T>> buffers_;
};

} // namespace jigclu
