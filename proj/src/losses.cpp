#include "kfnns/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace kfnns {

namespace {

inline double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

void check_bce_shapes(const LogitTensor& logits, const MessageTensor& target) {
    if (logits.depth != target.depth || logits.height != target.height ||
        logits.width != target.width)
        throw std::invalid_argument("bce_with_logits: shape mismatch");
}

}  // namespace

std::pair<double, ImageTensor> distortion_loss(const ImageTensor& cover,
                                               const ImageTensor& stego,
                                               const CostMatrix& w) {
    if (!cover.same_shape(stego))
        throw std::invalid_argument("distortion_loss: cover/stego shape mismatch");
    if (w.channels != cover.channels || w.height != cover.height ||
        w.width != cover.width)
        throw std::invalid_argument("distortion_loss: cost matrix shape mismatch");

    const std::size_t n = cover.data.size();
    double weighted_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double diff = cover.data[i] - stego.data[i];
        weighted_sq += w.data[i] * diff * diff;
    }
    const double value = std::sqrt(weighted_sq / static_cast<double>(n));

    ImageTensor grad(cover.channels, cover.height, cover.width);
    if (value > 0.0) {
        const double scale = 1.0 / (static_cast<double>(n) * value);
        for (std::size_t i = 0; i < n; ++i)
            grad.data[i] = scale * w.data[i] * (stego.data[i] - cover.data[i]);
    }
    return {value, std::move(grad)};
}

double bce_value(const LogitTensor& logits, const MessageTensor& target) {
    check_bce_shapes(logits, target);
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.data.size(); ++i) {
        const double z = logits.data[i];
        const double m = target.bits[i];
        sum += std::max(z, 0.0) - z * m + std::log1p(std::exp(-std::abs(z)));
    }
    return sum / static_cast<double>(logits.data.size());
}

std::pair<double, std::vector<double>> bce_with_logits(const LogitTensor& logits,
                                                       const MessageTensor& target) {
    const double value = bce_value(logits, target);
    const double inv_n = 1.0 / static_cast<double>(logits.data.size());
    std::vector<double> grad(logits.data.size());
    for (std::size_t i = 0; i < logits.data.size(); ++i)
        grad[i] = (sigmoid(logits.data[i]) - target.bits[i]) * inv_n;
    return {value, std::move(grad)};
}

namespace {

// Shared body of the three decoding losses: BCE(F(stego + mask), msg) with
// the gradient chained through the decoder. The additive mask has identity
// Jacobian, so the gradient w.r.t. the encrypted input is the gradient
// w.r.t. stego.
std::pair<double, ImageTensor> decoding_loss(const ImageTensor& input,
                                             const MessageTensor& msg,
                                             const FixedDecoder& decoder) {
    FixedDecoder::Tape tape;
    const LogitTensor logits = decoder.forward(input, tape);
    auto [value, dlogits] = bce_with_logits(logits, msg);
    LogitTensor g(logits.depth, logits.height, logits.width);
    g.data = std::move(dlogits);
    return {value, decoder.backward(tape, g)};
}

}  // namespace

std::pair<double, ImageTensor> type1_loss(const ImageTensor& stego,
                                          const StegoKey& key,
                                          const MessageTensor& msg,
                                          const FixedDecoder& decoder) {
    return decoding_loss(encrypt(stego, key), msg, decoder);
}

std::pair<double, ImageTensor> type2_loss(const ImageTensor& stego,
                                          const MessageTensor& msg,
                                          const FixedDecoder& decoder) {
    return decoding_loss(stego, msg, decoder);
}

std::pair<double, ImageTensor> type3_loss(const ImageTensor& stego,
                                          const std::vector<StegoKey>& wrong_keys,
                                          const MessageTensor& msg,
                                          const FixedDecoder& decoder) {
    if (wrong_keys.empty())
        throw std::invalid_argument("type3_loss: wrong-key set is empty");
    double value = 0.0;
    ImageTensor grad(stego.channels, stego.height, stego.width);
    for (const StegoKey& k : wrong_keys) {
        auto [v, g] = decoding_loss(encrypt(stego, k), msg, decoder);
        value += v;
        for (std::size_t i = 0; i < grad.data.size(); ++i) grad.data[i] += g.data[i];
    }
    return {value, std::move(grad)};
}

LossReport total_loss(const ImageTensor& cover, const ImageTensor& stego,
                      const CostMatrix& w, const StegoKey& key,
                      const std::vector<StegoKey>& wrong_keys,
                      const MessageTensor& msg, const FixedDecoder& decoder,
                      const LossWeights& weights, int stage) {
    if (stage != 1 && stage != 2)
        throw std::invalid_argument("total_loss: stage must be 1 or 2");

    LossReport report;
    auto [ld, gd] = distortion_loss(cover, stego, w);
    auto [l1, g1] = type1_loss(stego, key, msg, decoder);
    report.d = ld;
    report.type1 = l1;

    report.gradient = ImageTensor(stego.channels, stego.height, stego.width);
    for (std::size_t i = 0; i < report.gradient.data.size(); ++i)
        report.gradient.data[i] =
            weights.lambda_d * gd.data[i] + weights.lambda_1 * g1.data[i];

    if (stage == 2) {
        auto [l2, g2] = type2_loss(stego, msg, decoder);
        auto [l3, g3] = type3_loss(stego, wrong_keys, msg, decoder);
        report.type2 = std::min(l2, kMaximizedLossClamp);
        report.type3 = std::min(l3, kMaximizedLossClamp);
        const double f2 = l2 < kMaximizedLossClamp ? 1.0 : 0.0;
        const double f3 = l3 < kMaximizedLossClamp ? 1.0 : 0.0;
        for (std::size_t i = 0; i < report.gradient.data.size(); ++i)
            report.gradient.data[i] -= weights.lambda_2 * f2 * g2.data[i] +
                                       weights.lambda_3 * f3 * g3.data[i];
    }

    report.total = weights.lambda_d * report.d + weights.lambda_1 * report.type1 -
                   weights.lambda_2 * report.type2 - weights.lambda_3 * report.type3;
    return report;
}

}  // namespace kfnns
