#include "pipeline/grid.hpp"

#include <cmath>
#include <string>

#include "core/error.hpp"

namespace jigclu {

GridSpec compute_grid(int image_side, int m, double overlap_ratio) {
    require_config(m >= 2, "grid: m must be >= 2, got " + std::to_string(m));
    require_config(overlap_ratio >= 0.0 && overlap_ratio < 1.0,
                   "grid: overlap_ratio must be in [0,1), got " +
                       std::to_string(overlap_ratio));
    require_config(image_side % m == 0,
                   "grid: image side " + std::to_string(image_side) +
                       " not divisible by m=" + std::to_string(m));
    require_config(image_side >= 4 * m,
                   "grid: image side " + std::to_string(image_side) +
                       " too small for m=" + std::to_string(m) +
                       " (every slot needs >= 4 px)");

    GridSpec g;
    g.m = m;
    g.image_side = image_side;
    g.slot_side = image_side / m;
    g.overlap = int(std::lround(overlap_ratio * image_side));
    g.patch_side = int(std::ceil(double(image_side + (m - 1) * g.overlap) / m));
    require_config(g.patch_side < image_side,
                   "grid: overlap_ratio " + std::to_string(overlap_ratio) +
                       " too large for m=" + std::to_string(m) +
                       " (patch side would reach image side)");

    g.starts.resize(size_t(m));
    for (int i = 0; i < m; ++i)
        g.starts[size_t(i)] =
            int(std::lround(double(i) * double(image_side - g.patch_side) / double(m - 1)));

    for (int i = 0; i + 1 < m; ++i)
        require_config(g.starts[size_t(i)] < g.starts[size_t(i) + 1],
                       "grid: degenerate geometry, starts not strictly increasing");
    return g;
}

} // namespace jigclu
