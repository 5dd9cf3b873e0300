#pragma once

#include <vector>

namespace jigclu {

/// Integer split geometry for the m x m patch grid of an L x L image.
/// Adjacent patches overlap by roughly round(ratio * L) pixels; the montage
/// slot side is L / m.
struct GridSpec {
    int m = 0;          // patches per side
    int image_side = 0; // L
    int overlap = 0;    // o, px
    int patch_side = 0; // s, px
    int slot_side = 0;  // L / m, px
    std::vector<int> starts; // m offsets, starts[0]=0, starts[m-1]=L-s
};

/// Derives the grid: o = round(ratio*L), s = ceil((L+(m-1)*o)/m),
/// starts[i] = round(i*(L-s)/(m-1)). The rounding combination guarantees the
/// last patch ends exactly at L. Throws ConfigError when L is not divisible
/// by m or the ratio makes patches as large as the image.
GridSpec compute_grid(int image_side, int m, double overlap_ratio);

} // namespace jigclu
