#include "kfnns/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kfnns {

ImageTensor clip01(ImageTensor img) {
    for (double& v : img.data) v = std::min(1.0, std::max(0.0, v));
    return img;
}

QuantizedImage quantize(const ImageTensor& img) {
    QuantizedImage q(img.channels, img.height, img.width);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        // llround rounds halfway cases away from zero, which keeps the
        // quantizer bit-exact across platforms.
        long long level = std::llround(img.data[i] * 255.0);
        level = std::min(255LL, std::max(0LL, level));
        q.data[i] = static_cast<std::uint8_t>(level);
    }
    return q;
}

ImageTensor dequantize(const QuantizedImage& img) {
    ImageTensor t(img.channels, img.height, img.width);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        t.data[i] = img.data[i] / 255.0;
    return t;
}

ImageTensor residual(const ImageTensor& a, const ImageTensor& b, double gain) {
    if (!a.same_shape(b))
        throw std::invalid_argument("residual: shape mismatch");
    ImageTensor r(a.channels, a.height, a.width);
    for (std::size_t i = 0; i < a.data.size(); ++i)
        r.data[i] = gain * std::abs(a.data[i] - b.data[i]);
    return clip01(std::move(r));
}

}  // namespace kfnns
