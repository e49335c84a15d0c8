#pragma once

#include <string>
#include <vector>

#include "kfnns/image.hpp"
#include "kfnns/keystream.hpp"

namespace kfnns {

// Per-pixel decoder output, depth x height x width, unbounded reals.
struct LogitTensor {
    int depth = 0;
    int height = 0;
    int width = 0;
    std::vector<double> data;

    LogitTensor() = default;
    LogitTensor(int d, int h, int w)
        : depth(d), height(h), width(w),
          data(static_cast<std::size_t>(d) * h * w, 0.0) {}
};

struct ConvLayerSpec {
    int in_ch = 0;
    int out_ch = 0;
    int kh = 0;
    int kw = 0;
};

// Frozen fully-convolutional decoder: stride 1, zero padding, LeakyReLU
// between layers, no biases, no normalization. Weights are immutable after
// construction; forward and gradients never touch them.
class FixedDecoder {
public:
    // Reference architecture: conv 3->32 -> LReLU(0.2) -> conv 32->32
    // -> LReLU -> conv 32->32 -> LReLU -> conv 32->payload_depth, all 3x3.
    // Weights are He-uniform (std = sqrt(2/fan_in)) from the keystream PRNG.
    // The slope parameter exists for linear-case gradient tests.
    static FixedDecoder build_seeded(const StegoKey& seed, int payload_depth,
                                     double leaky_slope = 0.2);

    static FixedDecoder load_weights(const std::string& path);
    void save_weights(const std::string& path) const;

    int payload_depth() const { return specs_.back().out_ch; }
    double leaky_slope() const { return slope_; }
    const std::vector<ConvLayerSpec>& layers() const { return specs_; }
    // Kernel of one layer, (out, in, kh, kw) row-major.
    const std::vector<double>& kernel(int layer) const { return kernels_[layer]; }

    LogitTensor forward(const ImageTensor& img) const;

    // Saved activations from one forward pass: acts[0] is the input image
    // planes, acts[l] the post-activation input of layer l.
    struct Tape {
        std::vector<std::vector<double>> acts;
        int height = 0;
        int width = 0;
    };
    LogitTensor forward(const ImageTensor& img, Tape& tape) const;

    // dLoss/dInput for the scalar loss whose dLoss/dLogits is `loss_grad`.
    ImageTensor input_gradient(const ImageTensor& img, const LogitTensor& loss_grad) const;
    // Same, reusing the activations of a previous forward call.
    ImageTensor backward(const Tape& tape, const LogitTensor& loss_grad) const;

private:
    FixedDecoder() = default;

    std::vector<ConvLayerSpec> specs_;
    std::vector<std::vector<double>> kernels_;  // per layer, (out,in,kh,kw)
    double slope_ = 0.2;
};

// bit = 1 iff logit > 0 (an exact zero decodes to 0).
MessageTensor decode_bits(const LogitTensor& logits);

}  // namespace kfnns
