#pragma once

#include <cstdint>
#include <vector>

namespace kfnns {

// Planar real-valued image: channel-major, row-major within each channel.
// Intensities are nominally in [0,1]; intermediate results (encrypted
// images, gradients) may leave that range.
struct ImageTensor {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> data;

    ImageTensor() = default;
    ImageTensor(int c, int h, int w, double fill = 0.0)
        : channels(c), height(h), width(w),
          data(static_cast<std::size_t>(c) * h * w, fill) {}

    std::size_t size() const { return data.size(); }
    double& at(int c, int y, int x) {
        return data[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
    double at(int c, int y, int x) const {
        return data[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
    bool same_shape(const ImageTensor& o) const {
        return channels == o.channels && height == o.height && width == o.width;
    }
};

// 8-bit image, same planar layout, values in {0..255}.
struct QuantizedImage {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> data;

    QuantizedImage() = default;
    QuantizedImage(int c, int h, int w, std::uint8_t fill = 0)
        : channels(c), height(h), width(w),
          data(static_cast<std::size_t>(c) * h * w, fill) {}

    bool same_shape(const QuantizedImage& o) const {
        return channels == o.channels && height == o.height && width == o.width;
    }
    bool operator==(const QuantizedImage& o) const = default;
};

// Binary payload tensor, depth (bits per pixel) x height x width.
// Elements are 0 or 1.
struct MessageTensor {
    int depth = 0;
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> bits;

    MessageTensor() = default;
    MessageTensor(int d, int h, int w)
        : depth(d), height(h), width(w),
          bits(static_cast<std::size_t>(d) * h * w, 0) {}

    std::size_t size() const { return bits.size(); }
    bool same_shape(const MessageTensor& o) const {
        return depth == o.depth && height == o.height && width == o.width;
    }
    bool operator==(const MessageTensor& o) const = default;
};

// Clamp every element to [0,1].
ImageTensor clip01(ImageTensor img);

// Round to 255 intensity levels, half away from zero.
QuantizedImage quantize(const ImageTensor& img);

// Map integer levels back to [0,1] as q/255.
ImageTensor dequantize(const QuantizedImage& img);

// clip01(gain * |a - b|); throws std::invalid_argument on shape mismatch.
ImageTensor residual(const ImageTensor& a, const ImageTensor& b, double gain);

}  // namespace kfnns
