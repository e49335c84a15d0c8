#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "kfnns/decoder.hpp"
#include "kfnns/image.hpp"
#include "kfnns/keystream.hpp"
#include "kfnns/losses.hpp"

namespace kfnns {

struct EmbedConfig {
    double alpha = 0.10;      // line-search starting step
    int epochs = 100;         // E
    int st1 = 15;             // stage-1 optimizer steps per epoch
    int st2 = 15;             // stage-2 optimizer steps per epoch
    LossWeights weights;
    int n_wrong = 3;          // wrong keys entering the type-3 loss
    int lbfgs_memory = 10;
    bool two_stage = true;
    bool iterative_quantize = true;  // quantize the iterate every epoch
    bool use_cost = true;            // content-adaptive cost vs plain L2
    bool early_exit = true;          // stop once decoding is exact and stable

    bool operator==(const EmbedConfig&) const = default;
};

struct TraceRecord {
    int epoch = 0;
    int stage = 0;
    double total = 0.0;
    double d = 0.0;
    double type1 = 0.0;
    double type2 = 0.0;
    double type3 = 0.0;
};

struct EmbedResult {
    QuantizedImage stego;
    double ber_correct = 0.0;
    double ber_nokey = 0.0;
    std::vector<double> ber_wrong;  // per wrong key, in wrong_key_set order
    double ber_wrong_mean = 0.0;
    double psnr = 0.0;
    double ssim = 0.0;
    std::vector<TraceRecord> trace;
    int epochs_run = 0;
};

// Thrown when the optimization hits a non-finite loss; carries the trace
// collected so far.
struct EmbedError : std::runtime_error {
    EmbedError(const std::string& msg, std::vector<TraceRecord> t)
        : std::runtime_error(msg), trace(std::move(t)) {}
    std::vector<TraceRecord> trace;
};

// Two-stage box-constrained embedding: per epoch, st1 optimizer steps on
// lambda_d*L_d + lambda_1*L_1, then (if two_stage) st2 steps on the full
// signed total; the iterate is clipped to [0,1] and, if iterative_quantize,
// rounded through the 8-bit grid. May stop early once the correct-key BER
// is zero and the quantized bytes are unchanged for three consecutive
// epochs (disable via cfg.early_exit).
EmbedResult embed(const ImageTensor& cover, const MessageTensor& msg,
                  const StegoKey& key, const FixedDecoder& decoder,
                  const EmbedConfig& cfg);

// Decoded bits of a stego image: with a key, F(dequantize(stego) + Rand(key));
// without, F(dequantize(stego)).
MessageTensor extract(const QuantizedImage& stego, const StegoKey& key,
                      const FixedDecoder& decoder);
MessageTensor extract(const QuantizedImage& stego, const FixedDecoder& decoder);

}  // namespace kfnns
