#pragma once

#include <cmath>

#include "core/error.hpp"

namespace jigclu {

/// Cosine decay, computed per step: lr = 0.5 * lr0 * (1 + cos(pi * t / T)).
/// lr(0) = lr0, lr(T/2) = lr0/2, lr(T) = 0.
inline double cosine_lr(int64_t step, int64_t total_steps, double lr0) {
    require(step >= 0 && step <= total_steps, "cosine_lr: step outside [0, total]");
    if (total_steps == 0) return lr0;
    return 0.5 * lr0 * (1.0 + std::cos(M_PI * double(step) / double(total_steps)));
}

} // namespace jigclu
