#pragma once

#include "kfnns/image.hpp"

namespace kfnns {

struct QualityReport {
    double ber = 0.0;   // fraction in [0,1]
    double psnr = 0.0;  // dB, +infinity for identical images
    double ssim = 0.0;  // in [-1,1]
};

// Hamming distance / bit count.
double ber(const MessageTensor& a, const MessageTensor& b);

// 10*log10(255^2 / MSE) over all channels of 8-bit images.
double psnr(const QuantizedImage& a, const QuantizedImage& b);

// Single-scale SSIM: 11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03,
// dynamic range 255, computed per channel over valid window positions and
// averaged. Requires height and width >= 11.
double ssim(const QuantizedImage& a, const QuantizedImage& b);

}  // namespace kfnns
