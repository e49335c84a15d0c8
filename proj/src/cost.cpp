#include "kfnns/cost.hpp"

#include <cmath>
#include <stdexcept>

namespace kfnns {

namespace {

// Mirror index about the array edges, edge sample included
// (..., a[1], a[0] | a[0], a[1], ..., a[n-1] | a[n-1], a[n-2], ...).
inline int mirror(int j, int n) {
    while (j < 0 || j >= n) {
        if (j < 0) j = -1 - j;
        if (j >= n) j = 2 * n - 1 - j;
    }
    return j;
}

std::vector<double> mean_kernel(int k) {
    return std::vector<double>(static_cast<std::size_t>(k) * k,
                               1.0 / (static_cast<double>(k) * k));
}

const std::vector<double> kHighPass = {-1, 2, -1, 2, -4, 2, -1, 2, -1};

}  // namespace

std::vector<double> convolve2d(const std::vector<double>& plane, int height,
                               int width, const std::vector<double>& kernel,
                               int kh, int kw) {
    if (kh % 2 == 0 || kw % 2 == 0)
        throw std::invalid_argument("convolve2d: kernel dimensions must be odd");
    if (plane.size() != static_cast<std::size_t>(height) * width)
        throw std::invalid_argument("convolve2d: plane size mismatch");

    const int cy = kh / 2;
    const int cx = kw / 2;

    // Precomputed mirrored index tables keep the inner loop branch-free.
    std::vector<int> ys(static_cast<std::size_t>(height) * kh);
    for (int y = 0; y < height; ++y)
        for (int ky = 0; ky < kh; ++ky)
            ys[static_cast<std::size_t>(y) * kh + ky] = mirror(y + ky - cy, height);
    std::vector<int> xs(static_cast<std::size_t>(width) * kw);
    for (int x = 0; x < width; ++x)
        for (int kx = 0; kx < kw; ++kx)
            xs[static_cast<std::size_t>(x) * kw + kx] = mirror(x + kx - cx, width);

    std::vector<double> out(plane.size(), 0.0);
    for (int y = 0; y < height; ++y) {
        const int* yrow = ys.data() + static_cast<std::size_t>(y) * kh;
        for (int x = 0; x < width; ++x) {
            const int* xrow = xs.data() + static_cast<std::size_t>(x) * kw;
            double acc = 0.0;
            for (int ky = 0; ky < kh; ++ky) {
                const double* src = plane.data() + static_cast<std::size_t>(yrow[ky]) * width;
                const double* krow = kernel.data() + static_cast<std::size_t>(ky) * kw;
                for (int kx = 0; kx < kw; ++kx) acc += krow[kx] * src[xrow[kx]];
            }
            out[static_cast<std::size_t>(y) * width + x] = acc;
        }
    }
    return out;
}

CostMatrix hill_cost(const ImageTensor& cover, double t, double T, double eps) {
    if (t <= 0.0 || T < t || eps <= 0.0)
        throw std::invalid_argument("hill_cost: need t > 0, T >= t, eps > 0");

    const int h = cover.height;
    const int w = cover.width;
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    const std::vector<double> low3 = mean_kernel(3);
    const std::vector<double> low15 = mean_kernel(15);

    CostMatrix cost(cover.channels, h, w);
    for (int c = 0; c < cover.channels; ++c) {
        // Residuals are taken on the 0-255 intensity scale; the truncation
        // thresholds t and T are calibrated for 8-bit pixel values.
        std::vector<double> p(plane);
        for (std::size_t i = 0; i < plane; ++i)
            p[i] = 255.0 * cover.data[c * plane + i];
        std::vector<double> r = convolve2d(p, h, w, kHighPass, 3, 3);
        for (double& v : r) v = std::abs(v);
        r = convolve2d(r, h, w, low3, 3, 3);
        for (double& v : r) v = 1.0 / (v + eps);
        r = convolve2d(r, h, w, low15, 15, 15);
        for (std::size_t i = 0; i < plane; ++i)
            cost.data[c * plane + i] = r[i] > t ? T : r[i];
    }
    return cost;
}

}  // namespace kfnns
