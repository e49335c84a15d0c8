#pragma once

#include <vector>

#include "kfnns/image.hpp"

namespace kfnns {

// Per-pixel perturbation cost, one plane per channel. Values lie in (0, T];
// pixels whose raw cost exceeded t are pinned to exactly T.
struct CostMatrix {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> data;

    CostMatrix() = default;
    CostMatrix(int c, int h, int w, double fill = 1.0)
        : channels(c), height(h), width(w),
          data(static_cast<std::size_t>(c) * h * w, fill) {}
};

// Same-size correlation-style convolution with mirrored (symmetric)
// boundary padding. Kernel dimensions must be odd.
std::vector<double> convolve2d(const std::vector<double>& plane, int height,
                               int width, const std::vector<double>& kernel,
                               int kh, int kw);

// Content-adaptive cost: per channel, on the 0-255 intensity scale
// (the thresholds t and T assume 8-bit pixel values),
//   residual = |plane (x) F_h| (x) F_l1      (F_h below, F_l1 = 3x3 mean)
//   cost     = (1 / (residual + eps)) (x) F_l2   (F_l2 = 15x15 mean)
//   cost     = T wherever cost > t, unchanged otherwise
// with F_h = [[-1,2,-1],[2,-4,2],[-1,2,-1]]. Smooth regions end up at the
// ceiling T, textured regions keep a small finite cost.
CostMatrix hill_cost(const ImageTensor& cover, double t = 0.5, double T = 3.0,
                     double eps = 1e-10);

}  // namespace kfnns
