#include "kfnns/embedder.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <optional>

#include "kfnns/cost.hpp"
#include "kfnns/lbfgs.hpp"
#include "kfnns/metrics.hpp"

namespace kfnns {

namespace {

// The optimizer's view of the distortion term adds a tiny epsilon inside
// the square root. The exact root has infinite curvature at the zero
// perturbation, which makes the cover a strict local minimum of the staged
// objective: no monotone line search can leave the initialization point of
// the algorithm. The smoothed surrogate agrees with the exact value to
// within eps/(2*sqrt(S)) away from zero and reports 0 at zero.
constexpr double kDistortionEps = 1e-4;

// Staged objective over the flattened stego iterate. Decoder branches
// (correct key, no key, each wrong key) keep their forward tapes from the
// last value() call so a following gradient request only runs the backward
// passes. Branch results are combined in a fixed order, which keeps every
// evaluation bit-deterministic.
class StageObjective {
public:
    StageObjective(const ImageTensor& cover, const CostMatrix& cost,
                   const std::vector<EncryptionMask>& masks,  // [0]=correct, rest wrong
                   const MessageTensor& msg, const FixedDecoder& decoder,
                   const LossWeights& weights, int stage)
        : cover_(cover), cost_(cost), masks_(masks), msg_(msg), decoder_(decoder),
          weights_(weights), stage_(stage) {
        branch_count_ = stage_ == 1 ? 1 : 2 + static_cast<int>(masks_.size()) - 1;
        tapes_.resize(branch_count_);
        logits_.resize(branch_count_);
        bce_.resize(branch_count_);
    }

    double value(const std::vector<double>& x) {
        if (!cached_ || cached_x_ != x) evaluate(x);
        return total_;
    }

    double value_and_grad(const std::vector<double>& x, std::vector<double>& grad) {
        if (!cached_ || cached_x_ != x) evaluate(x);
        grad.assign(x.size(), 0.0);

        // Distortion gradient of the smoothed root.
        const std::size_t n = x.size();
        const double scale =
            weights_.lambda_d / (static_cast<double>(n) * dist_root_);
        for (std::size_t i = 0; i < n; ++i)
            grad[i] += scale * cost_.data[i] * (x[i] - cover_.data[i]);

        // Decoder branches, fixed order: correct key, no key, wrong keys.
        for (int b = 0; b < branch_count_; ++b) {
            const double factor = branch_factor(b);
            if (factor == 0.0) continue;
            LogitTensor dlogits(msg_.depth, msg_.height, msg_.width);
            const double inv_bits = 1.0 / static_cast<double>(msg_.bits.size());
            for (std::size_t i = 0; i < dlogits.data.size(); ++i)
                dlogits.data[i] =
                    (sigmoid(logits_[b].data[i]) - msg_.bits[i]) * inv_bits;
            const ImageTensor g = decoder_.backward(tapes_[b], dlogits);
            for (std::size_t i = 0; i < n; ++i) grad[i] += factor * g.data[i];
        }
        return total_;
    }

    // Loss components at the last evaluated point (for the trace).
    TraceRecord record(int epoch) const {
        TraceRecord r;
        r.epoch = epoch;
        r.stage = stage_;
        r.total = total_;
        r.d = dist_;
        r.type1 = bce_[0];
        if (stage_ == 2) {
            r.type2 = std::min(bce_[1], kMaximizedLossClamp);
            r.type3 = std::min(type3_raw_, kMaximizedLossClamp);
        }
        return r;
    }

private:
    static double sigmoid(double z) {
        if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
        const double e = std::exp(z);
        return e / (1.0 + e);
    }

    // Signed weight applied to branch b's BCE gradient.
    double branch_factor(int b) const {
        if (b == 0) return weights_.lambda_1;
        if (b == 1)
            return bce_[1] < kMaximizedLossClamp ? -weights_.lambda_2 : 0.0;
        return type3_raw_ < kMaximizedLossClamp ? -weights_.lambda_3 : 0.0;
    }

    void evaluate(const std::vector<double>& x) {
        const std::size_t n = x.size();
        double weighted_sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double diff = cover_.data[i] - x[i];
            weighted_sq += cost_.data[i] * diff * diff;
        }
        dist_root_ = std::sqrt(weighted_sq / static_cast<double>(n) + kDistortionEps);
        dist_ = dist_root_ - std::sqrt(kDistortionEps);

        ImageTensor input(cover_.channels, cover_.height, cover_.width);
        for (int b = 0; b < branch_count_; ++b) {
            input.data = x;
            if (const EncryptionMask* mask = branch_mask(b))
                for (std::size_t i = 0; i < n; ++i) input.data[i] += mask->data[i];
            logits_[b] = decoder_.forward(input, tapes_[b]);
            bce_[b] = bce_value(logits_[b], msg_);
        }

        total_ = weights_.lambda_d * dist_ + weights_.lambda_1 * bce_[0];
        if (stage_ == 2) {
            type3_raw_ = 0.0;
            for (int b = 2; b < branch_count_; ++b) type3_raw_ += bce_[b];
            total_ -= weights_.lambda_2 * std::min(bce_[1], kMaximizedLossClamp);
            total_ -= weights_.lambda_3 * std::min(type3_raw_, kMaximizedLossClamp);
        }
        cached_x_ = x;
        cached_ = true;
    }

    // nullptr means the branch feeds the decoder unencrypted.
    const EncryptionMask* branch_mask(int b) const {
        if (b == 0) return &masks_[0];
        if (b == 1) return nullptr;
        return &masks_[b - 1];
    }

    const ImageTensor& cover_;
    const CostMatrix& cost_;
    const std::vector<EncryptionMask>& masks_;
    const MessageTensor& msg_;
    const FixedDecoder& decoder_;
    LossWeights weights_;
    int stage_;
    int branch_count_ = 1;

    std::vector<FixedDecoder::Tape> tapes_;
    std::vector<LogitTensor> logits_;
    std::vector<double> bce_;
    double type3_raw_ = 0.0;
    double dist_ = 0.0;       // reported value (0 at zero perturbation)
    double dist_root_ = 0.0;  // smoothed root used by the gradient
    double total_ = 0.0;
    std::vector<double> cached_x_;
    bool cached_ = false;
};

LbfgsObjective as_lbfgs(StageObjective& obj) {
    LbfgsObjective wrapper;
    wrapper.value = [&obj](const std::vector<double>& x) { return obj.value(x); };
    wrapper.value_and_grad = [&obj](const std::vector<double>& x,
                                    std::vector<double>& g) {
        return obj.value_and_grad(x, g);
    };
    return wrapper;
}

}  // namespace

EmbedResult embed(const ImageTensor& cover, const MessageTensor& msg,
                  const StegoKey& key, const FixedDecoder& decoder,
                  const EmbedConfig& cfg) {
    if (cover.channels != 3)
        throw std::invalid_argument("embed: cover must have 3 channels");
    if (msg.height != cover.height || msg.width != cover.width)
        throw std::invalid_argument("embed: message spatial size must match the cover");
    if (decoder.payload_depth() != msg.depth)
        throw std::invalid_argument("embed: decoder payload depth " +
                                    std::to_string(decoder.payload_depth()) +
                                    " does not match message depth " +
                                    std::to_string(msg.depth));
    for (double v : cover.data)
        if (v < 0.0 || v > 1.0)
            throw std::invalid_argument("embed: cover values must lie in [0,1]");
    if (cfg.epochs < 1 || cfg.st1 < 1 || cfg.n_wrong < 1 || cfg.lbfgs_memory < 1)
        throw std::invalid_argument("embed: counts must be >= 1");
    if (cfg.two_stage && cfg.st2 < 1)
        throw std::invalid_argument("embed: st2 must be >= 1 when two_stage is set");

    const CostMatrix cost = cfg.use_cost
                                ? hill_cost(cover)
                                : CostMatrix(cover.channels, cover.height,
                                             cover.width, 1.0);

    // Wrong keys are fixed for the whole run, derived from the correct key.
    const std::vector<StegoKey> wrong = wrong_key_set(key, cfg.n_wrong);
    std::vector<EncryptionMask> masks;
    masks.push_back(derive_mask(key, cover.channels, cover.height, cover.width));
    for (const StegoKey& k : wrong)
        masks.push_back(derive_mask(k, cover.channels, cover.height, cover.width));

    EmbedResult result;
    std::vector<double> x = cover.data;
    ImageTensor iterate(cover.channels, cover.height, cover.width);
    std::vector<std::uint8_t> prev_bytes;
    int stable_count = 0;

    LbfgsOptions opt;
    opt.alpha = cfg.alpha;
    opt.memory = cfg.lbfgs_memory;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        result.epochs_run = epoch;
        try {
            StageObjective stage1(cover, cost, masks, msg, decoder, cfg.weights, 1);
            opt.steps = cfg.st1;
            x = lbfgs_minimize(as_lbfgs(stage1), std::move(x), opt);
            stage1.value(x);  // refresh components at the returned iterate
            result.trace.push_back(stage1.record(epoch));

            if (cfg.two_stage) {
                StageObjective stage2(cover, cost, masks, msg, decoder, cfg.weights, 2);
                opt.steps = cfg.st2;
                x = lbfgs_minimize(as_lbfgs(stage2), std::move(x), opt);
                stage2.value(x);
                result.trace.push_back(stage2.record(epoch));
            }
        } catch (const std::runtime_error& e) {
            throw EmbedError(std::string("embed aborted: ") + e.what(),
                             std::move(result.trace));
        }

        for (double& v : x) v = std::min(1.0, std::max(0.0, v));
        iterate.data = x;
        const QuantizedImage q = quantize(iterate);
        if (cfg.iterative_quantize)
            for (std::size_t i = 0; i < x.size(); ++i) x[i] = q.data[i] / 255.0;

        const double ber_now = ber(extract(q, key, decoder), msg);
        const bool unchanged = !prev_bytes.empty() && q.data == prev_bytes;
        prev_bytes = q.data;
        stable_count = (ber_now == 0.0 && unchanged) ? stable_count + 1 : 0;
        if (cfg.early_exit && stable_count >= 3) break;
    }

    for (double& v : x) v = std::min(1.0, std::max(0.0, v));
    iterate.data = std::move(x);
    result.stego = quantize(iterate);

    result.ber_correct = ber(extract(result.stego, key, decoder), msg);
    result.ber_nokey = ber(extract(result.stego, decoder), msg);
    for (const StegoKey& k : wrong)
        result.ber_wrong.push_back(ber(extract(result.stego, k, decoder), msg));
    for (double b : result.ber_wrong) result.ber_wrong_mean += b;
    result.ber_wrong_mean /= static_cast<double>(result.ber_wrong.size());

    const QuantizedImage cover_q = quantize(cover);
    result.psnr = psnr(cover_q, result.stego);
    result.ssim = ssim(cover_q, result.stego);
    return result;
}

MessageTensor extract(const QuantizedImage& stego, const StegoKey& key,
                      const FixedDecoder& decoder) {
    if (stego.channels != 3)
        throw std::invalid_argument("extract: stego must have 3 channels");
    return decode_bits(decoder.forward(encrypt(dequantize(stego), key)));
}

MessageTensor extract(const QuantizedImage& stego, const FixedDecoder& decoder) {
    if (stego.channels != 3)
        throw std::invalid_argument("extract: stego must have 3 channels");
    return decode_bits(decoder.forward(dequantize(stego)));
}

}  // namespace kfnns
