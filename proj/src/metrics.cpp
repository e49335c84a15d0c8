#include "kfnns/metrics.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace kfnns {

double ber(const MessageTensor& a, const MessageTensor& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("ber: shape mismatch");
    std::size_t errors = 0;
    for (std::size_t i = 0; i < a.bits.size(); ++i)
        if (a.bits[i] != b.bits[i]) ++errors;
    return static_cast<double>(errors) / static_cast<double>(a.bits.size());
}

double psnr(const QuantizedImage& a, const QuantizedImage& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("psnr: shape mismatch");
    double sq = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double diff = static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]);
        sq += diff * diff;
    }
    if (sq == 0.0) return std::numeric_limits<double>::infinity();
    const double mse = sq / static_cast<double>(a.data.size());
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

namespace {

constexpr int kWindow = 11;

std::array<double, kWindow> gaussian_taps() {
    std::array<double, kWindow> g{};
    const double sigma = 1.5;
    double sum = 0.0;
    for (int i = 0; i < kWindow; ++i) {
        const double d = i - (kWindow - 1) / 2.0;
        g[i] = std::exp(-d * d / (2.0 * sigma * sigma));
        sum += g[i];
    }
    for (double& v : g) v /= sum;
    return g;
}

// Separable valid-mode Gaussian filter: (h x w) -> (h-10 x w-10).
std::vector<double> gaussian_valid(const std::vector<double>& plane, int h, int w) {
    static const std::array<double, kWindow> g = gaussian_taps();
    const int wv = w - kWindow + 1;
    const int hv = h - kWindow + 1;
    std::vector<double> rows(static_cast<std::size_t>(h) * wv);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < wv; ++x) {
            double acc = 0.0;
            const double* src = plane.data() + static_cast<std::size_t>(y) * w + x;
            for (int k = 0; k < kWindow; ++k) acc += g[k] * src[k];
            rows[static_cast<std::size_t>(y) * wv + x] = acc;
        }
    std::vector<double> out(static_cast<std::size_t>(hv) * wv);
    for (int y = 0; y < hv; ++y)
        for (int x = 0; x < wv; ++x) {
            double acc = 0.0;
            for (int k = 0; k < kWindow; ++k)
                acc += g[k] * rows[static_cast<std::size_t>(y + k) * wv + x];
            out[static_cast<std::size_t>(y) * wv + x] = acc;
        }
    return out;
}

}  // namespace

double ssim(const QuantizedImage& a, const QuantizedImage& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("ssim: shape mismatch");
    if (a.height < kWindow || a.width < kWindow)
        throw std::invalid_argument("ssim: image smaller than the 11x11 window");

    const double c1 = (0.01 * 255.0) * (0.01 * 255.0);
    const double c2 = (0.03 * 255.0) * (0.03 * 255.0);
    const int h = a.height;
    const int w = a.width;
    const std::size_t plane = static_cast<std::size_t>(h) * w;

    double channel_sum = 0.0;
    for (int c = 0; c < a.channels; ++c) {
        std::vector<double> x(plane), y(plane), xx(plane), yy(plane), xy(plane);
        for (std::size_t i = 0; i < plane; ++i) {
            const double xv = a.data[c * plane + i];
            const double yv = b.data[c * plane + i];
            x[i] = xv;
            y[i] = yv;
            xx[i] = xv * xv;
            yy[i] = yv * yv;
            xy[i] = xv * yv;
        }
        const std::vector<double> mx = gaussian_valid(x, h, w);
        const std::vector<double> my = gaussian_valid(y, h, w);
        const std::vector<double> mxx = gaussian_valid(xx, h, w);
        const std::vector<double> myy = gaussian_valid(yy, h, w);
        const std::vector<double> mxy = gaussian_valid(xy, h, w);

        double map_sum = 0.0;
        for (std::size_t i = 0; i < mx.size(); ++i) {
            const double mu_x = mx[i];
            const double mu_y = my[i];
            const double var_x = mxx[i] - mu_x * mu_x;
            const double var_y = myy[i] - mu_y * mu_y;
            const double cov = mxy[i] - mu_x * mu_y;
            map_sum += ((2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2)) /
                       ((mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2));
        }
        channel_sum += map_sum / static_cast<double>(mx.size());
    }
    return channel_sum / a.channels;
}

}  // namespace kfnns
