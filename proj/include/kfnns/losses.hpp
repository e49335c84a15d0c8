#pragma once

#include <utility>
#include <vector>

#include "kfnns/cost.hpp"
#include "kfnns/decoder.hpp"
#include "kfnns/image.hpp"
#include "kfnns/keystream.hpp"

namespace kfnns {

struct LossWeights {
    double lambda_d = 40.0;
    double lambda_1 = 5.0;
    double lambda_2 = 0.05;
    double lambda_3 = 0.05;

    bool operator==(const LossWeights&) const = default;
};

// Ceiling on the maximized (negated) decoding losses. -lambda*BCE is
// unbounded below; past this value the term contributes a constant and a
// zero gradient.
constexpr double kMaximizedLossClamp = 10.0;

struct LossReport {
    double total = 0.0;
    double d = 0.0;
    double type1 = 0.0;
    double type2 = 0.0;  // clamped value as it enters the total
    double type3 = 0.0;  // clamped value as it enters the total
    ImageTensor gradient;
};

// Cost-weighted RMS distance sqrt(sum_i w_i (cover_i - stego_i)^2 / N) and
// its gradient with respect to stego (zero at the exact zero-difference
// point).
std::pair<double, ImageTensor> distortion_loss(const ImageTensor& cover,
                                               const ImageTensor& stego,
                                               const CostMatrix& w);

// Mean binary cross-entropy over all bits, evaluated in the stable
// log-sum-exp form. Gradient per logit is (sigmoid(z) - m) / bit_count.
std::pair<double, std::vector<double>> bce_with_logits(const LogitTensor& logits,
                                                       const MessageTensor& target);
double bce_value(const LogitTensor& logits, const MessageTensor& target);

// Correct-key decoding loss: BCE(F(stego + Rand(key)), msg).
std::pair<double, ImageTensor> type1_loss(const ImageTensor& stego,
                                          const StegoKey& key,
                                          const MessageTensor& msg,
                                          const FixedDecoder& decoder);

// No-key decoding loss: BCE(F(stego), msg). Enters the total negatively.
std::pair<double, ImageTensor> type2_loss(const ImageTensor& stego,
                                          const MessageTensor& msg,
                                          const FixedDecoder& decoder);

// Wrong-key decoding loss, summed over the wrong-key set. Enters the total
// negatively.
std::pair<double, ImageTensor> type3_loss(const ImageTensor& stego,
                                          const std::vector<StegoKey>& wrong_keys,
                                          const MessageTensor& msg,
                                          const FixedDecoder& decoder);

// Stage 1: lambda_d*L_d + lambda_1*L_1.
// Stage 2: lambda_d*L_d + lambda_1*L_1 - lambda_2*clamp(L_2) - lambda_3*clamp(L_3).
LossReport total_loss(const ImageTensor& cover, const ImageTensor& stego,
                      const CostMatrix& w, const StegoKey& key,
                      const std::vector<StegoKey>& wrong_keys,
                      const MessageTensor& msg, const FixedDecoder& decoder,
                      const LossWeights& weights, int stage);

}  // namespace kfnns
