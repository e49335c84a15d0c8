#pragma once

// Independent brute-force reference implementations used as oracles. These
// intentionally share no code with the library: per-pixel loops, while-loop
// index mirroring, long-double accumulation.

#include <cmath>
#include <vector>

#include "kfnns/decoder.hpp"
#include "kfnns/image.hpp"

namespace oracle {

// Zero-padded same-size correlation of one plane, per-pixel loops.
inline std::vector<double> conv_zero_naive(const std::vector<double>& in, int h, int w,
                                           const std::vector<double>& k, int kh, int kw) {
    std::vector<double> out(in.size(), 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int ky = 0; ky < kh; ++ky)
                for (int kx = 0; kx < kw; ++kx) {
                    const int yy = y + ky - kh / 2;
                    const int xx = x + kx - kw / 2;
                    if (yy < 0 || yy >= h || xx < 0 || xx >= w) continue;
                    acc += k[ky * kw + kx] * in[yy * w + xx];
                }
            out[y * w + x] = acc;
        }
    return out;
}

// Full decoder forward pass re-derived from the layer list: multi-channel
// zero-padded convolutions with LeakyReLU between layers.
inline kfnns::LogitTensor decoder_forward_naive(const kfnns::FixedDecoder& dec,
                                                const kfnns::ImageTensor& img) {
    const int h = img.height;
    const int w = img.width;
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    std::vector<double> act = img.data;

    const auto& layers = dec.layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& spec = layers[l];
        const std::vector<double>& kern = dec.kernel(static_cast<int>(l));
        std::vector<double> next(plane * spec.out_ch, 0.0);
        for (int o = 0; o < spec.out_ch; ++o)
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    double acc = 0.0;
                    for (int i = 0; i < spec.in_ch; ++i)
                        for (int ky = 0; ky < spec.kh; ++ky)
                            for (int kx = 0; kx < spec.kw; ++kx) {
                                const int yy = y + ky - spec.kh / 2;
                                const int xx = x + kx - spec.kw / 2;
                                if (yy < 0 || yy >= h || xx < 0 || xx >= w) continue;
                                acc += kern[((static_cast<std::size_t>(o) * spec.in_ch + i) *
                                                 spec.kh +
                                             ky) *
                                                spec.kw +
                                            kx] *
                                       act[i * plane + yy * w + xx];
                            }
                    next[o * plane + y * w + x] = acc;
                }
        if (l + 1 < layers.size())
            for (double& v : next)
                if (v < 0.0) v *= dec.leaky_slope();
        act.swap(next);
    }

    kfnns::LogitTensor logits(layers.back().out_ch, h, w);
    logits.data = std::move(act);
    return logits;
}

inline int mirror_naive(int j, int n) {
    while (j < 0 || j >= n) {
        if (j < 0) j = -1 - j;
        if (j >= n) j = 2 * n - 1 - j;
    }
    return j;
}

// Mirror-padded same-size correlation, per-pixel loops.
inline std::vector<double> conv_mirror_naive(const std::vector<double>& in, int h, int w,
                                             const std::vector<double>& k, int kh, int kw) {
    std::vector<double> out(in.size(), 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int ky = 0; ky < kh; ++ky)
                for (int kx = 0; kx < kw; ++kx) {
                    const int yy = mirror_naive(y + ky - kh / 2, h);
                    const int xx = mirror_naive(x + kx - kw / 2, w);
                    acc += k[ky * kw + kx] * in[yy * w + xx];
                }
            out[y * w + x] = acc;
        }
    return out;
}

// The whole cost pipeline re-derived step by step.
inline std::vector<double> hill_naive(const kfnns::ImageTensor& cover, double t, double T,
                                      double eps) {
    const int h = cover.height;
    const int w = cover.width;
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    const std::vector<double> fh = {-1, 2, -1, 2, -4, 2, -1, 2, -1};
    const std::vector<double> l3(9, 1.0 / 9.0);
    const std::vector<double> l15(225, 1.0 / 225.0);

    std::vector<double> out(cover.data.size());
    for (int c = 0; c < cover.channels; ++c) {
        std::vector<double> p(plane);
        for (std::size_t i = 0; i < plane; ++i)
            p[i] = 255.0 * cover.data[c * plane + i];  // 8-bit intensity scale
        std::vector<double> r = conv_mirror_naive(p, h, w, fh, 3, 3);
        for (double& v : r) v = std::fabs(v);
        r = conv_mirror_naive(r, h, w, l3, 3, 3);
        for (double& v : r) v = 1.0 / (v + eps);
        r = conv_mirror_naive(r, h, w, l15, 15, 15);
        for (std::size_t i = 0; i < plane; ++i) out[c * plane + i] = r[i] > t ? T : r[i];
    }
    return out;
}

// Direct BCE formula in long double, no log-sum-exp rearrangement.
inline double bce_naive(const kfnns::LogitTensor& logits, const kfnns::MessageTensor& m) {
    long double sum = 0.0L;
    for (std::size_t i = 0; i < logits.data.size(); ++i) {
        const long double z = logits.data[i];
        const long double sig = 1.0L / (1.0L + std::exp(-z));
        const long double mi = m.bits[i];
        sum -= mi * std::log(sig) + (1.0L - mi) * std::log(1.0L - sig);
    }
    return static_cast<double>(sum / static_cast<long double>(logits.data.size()));
}

// PSNR straight from the definition in long double.
inline double psnr_naive(const kfnns::QuantizedImage& a, const kfnns::QuantizedImage& b) {
    long double sq = 0.0L;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const long double d = static_cast<long double>(a.data[i]) - b.data[i];
        sq += d * d;
    }
    const long double mse = sq / static_cast<long double>(a.data.size());
    return static_cast<double>(10.0L * std::log10(255.0L * 255.0L / mse));
}

// SSIM with explicit per-window sums over the valid positions.
inline double ssim_naive(const kfnns::QuantizedImage& a, const kfnns::QuantizedImage& b) {
    const int win = 11;
    const double sigma = 1.5;
    std::vector<double> wgt(static_cast<std::size_t>(win) * win);
    double wsum = 0.0;
    for (int y = 0; y < win; ++y)
        for (int x = 0; x < win; ++x) {
            const double dy = y - 5.0, dx = x - 5.0;
            wgt[y * win + x] = std::exp(-(dy * dy + dx * dx) / (2.0 * sigma * sigma));
            wsum += wgt[y * win + x];
        }
    for (double& v : wgt) v /= wsum;

    const double c1 = 6.5025;   // (0.01*255)^2
    const double c2 = 58.5225;  // (0.03*255)^2
    const int h = a.height, w = a.width;
    const std::size_t plane = static_cast<std::size_t>(h) * w;

    double channel_sum = 0.0;
    for (int c = 0; c < a.channels; ++c) {
        double map_sum = 0.0;
        int count = 0;
        for (int y = 0; y + win <= h; ++y)
            for (int x = 0; x + win <= w; ++x) {
                double mx = 0, my = 0, mxx = 0, myy = 0, mxy = 0;
                for (int wy = 0; wy < win; ++wy)
                    for (int wx = 0; wx < win; ++wx) {
                        const double g = wgt[wy * win + wx];
                        const double xv = a.data[c * plane + (y + wy) * w + (x + wx)];
                        const double yv = b.data[c * plane + (y + wy) * w + (x + wx)];
                        mx += g * xv;
                        my += g * yv;
                        mxx += g * xv * xv;
                        myy += g * yv * yv;
                        mxy += g * xv * yv;
                    }
                const double vx = mxx - mx * mx;
                const double vy = myy - my * my;
                const double cov = mxy - mx * my;
                map_sum += ((2 * mx * my + c1) * (2 * cov + c2)) /
                           ((mx * mx + my * my + c1) * (vx + vy + c2));
                ++count;
            }
        channel_sum += map_sum / count;
    }
    return channel_sum / a.channels;
}

}  // namespace oracle
