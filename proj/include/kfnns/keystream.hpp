#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "kfnns/image.hpp"

namespace kfnns {

// 256-bit key. Two keys are equal iff their seed bytes are equal.
// The all-zero seed is reserved as a test-only "null key": its encryption
// mask is forced to zero so that encrypt() becomes the identity.
struct StegoKey {
    std::array<std::uint8_t, 32> seed{};

    static StegoKey from_hex(std::string_view hex64);       // 64 hex digits
    static StegoKey from_passphrase(std::string_view text); // SHA-256 of text
    static StegoKey null_key() { return StegoKey{}; }

    bool is_null() const;
    std::string to_hex() const;
    bool operator==(const StegoKey&) const = default;
};

// Key-derived additive mask, same planar layout as ImageTensor,
// elements in [-1,1).
struct EncryptionMask {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> data;
};

// SplitMix64 step: advances state and returns the mixed output.
std::uint64_t splitmix64_next(std::uint64_t& state);

// xoshiro256** seeded from a 256-bit key. The four state lanes come from a
// SplitMix64 chain over the key's little-endian 64-bit words, prefixed with
// a domain tag so that masks, messages, wrong keys and decoder weights draw
// from disjoint streams of the same key.
class Xoshiro256ss {
public:
    enum class Domain : std::uint64_t {
        mask = 1,
        message = 2,
        wrong_keys = 3,
        weights = 4,
    };

    Xoshiro256ss(const StegoKey& key, Domain domain);

    std::uint64_t next();
    // Top 53 bits as a double in [0,1).
    double next_unit();
    // Uniform in [-1,1).
    double next_symmetric() { return 2.0 * next_unit() - 1.0; }

private:
    std::array<std::uint64_t, 4> s_;
};

// Deterministic mask Rand(K) with elements uniform in [-1,1).
// The null key yields the all-zero mask.
EncryptionMask derive_mask(const StegoKey& key, int channels, int height, int width);

// img + derive_mask(key, shape), element-wise. The result is intentionally
// NOT clipped: it feeds the decoder, and clipping would kill the gradient
// through saturated pixels.
ImageTensor encrypt(const ImageTensor& img, const StegoKey& key);

// Deterministic Bernoulli(0.5) bit tensor.
MessageTensor random_message(const StegoKey& seed, int depth, int height, int width);

// n pairwise-distinct keys, each different from `correct`, deterministic
// given (correct, n).
std::vector<StegoKey> wrong_key_set(const StegoKey& correct, int n);

}  // namespace kfnns
