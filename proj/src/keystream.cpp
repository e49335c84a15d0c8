#include "kfnns/keystream.hpp"

#include <algorithm>
#include <stdexcept>

#include "kfnns/errors.hpp"
#include "kfnns/sha256.hpp"

namespace kfnns {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

inline std::uint64_t word_le(const std::array<std::uint8_t, 32>& seed, int i) {
    std::uint64_t w = 0;
    for (int b = 7; b >= 0; --b) w = (w << 8) | seed[8 * i + b];
    return w;
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += kGolden);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

StegoKey StegoKey::from_hex(std::string_view hex64) {
    if (hex64.size() != 64)
        throw UserError("key must be exactly 64 hex digits, got " +
                        std::to_string(hex64.size()));
    StegoKey k;
    for (int i = 0; i < 32; ++i) {
        const int hi = hex_value(hex64[2 * i]);
        const int lo = hex_value(hex64[2 * i + 1]);
        if (hi < 0 || lo < 0)
            throw UserError("key contains a non-hex character");
        k.seed[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    return k;
}

StegoKey StegoKey::from_passphrase(std::string_view text) {
    StegoKey k;
    k.seed = sha256(text);
    return k;
}

bool StegoKey::is_null() const {
    return std::all_of(seed.begin(), seed.end(), [](std::uint8_t b) { return b == 0; });
}

std::string StegoKey::to_hex() const {
    static const char* digits = "0123456789abcdef";
    std::string s(64, '0');
    for (int i = 0; i < 32; ++i) {
        s[2 * i] = digits[seed[i] >> 4];
        s[2 * i + 1] = digits[seed[i] & 0xF];
    }
    return s;
}

Xoshiro256ss::Xoshiro256ss(const StegoKey& key, Domain domain) {
    std::uint64_t state = static_cast<std::uint64_t>(domain);
    for (int i = 0; i < 4; ++i) {
        state ^= word_le(key.seed, i);
        s_[i] = splitmix64_next(state);
    }
    if (s_[0] == 0 && s_[1] == 0 && s_[2] == 0 && s_[3] == 0)
        s_[0] = kGolden;  // xoshiro state must not be all zero
}

std::uint64_t Xoshiro256ss::next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Xoshiro256ss::next_unit() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

EncryptionMask derive_mask(const StegoKey& key, int channels, int height, int width) {
    if (channels <= 0 || height <= 0 || width <= 0)
        throw std::invalid_argument("derive_mask: shape must be positive");
    EncryptionMask mask;
    mask.channels = channels;
    mask.height = height;
    mask.width = width;
    mask.data.assign(static_cast<std::size_t>(channels) * height * width, 0.0);
    if (key.is_null()) return mask;

    Xoshiro256ss rng(key, Xoshiro256ss::Domain::mask);
    for (double& v : mask.data) v = rng.next_symmetric();
    return mask;
}

ImageTensor encrypt(const ImageTensor& img, const StegoKey& key) {
    const EncryptionMask mask = derive_mask(key, img.channels, img.height, img.width);
    ImageTensor out = img;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += mask.data[i];
    return out;
}

MessageTensor random_message(const StegoKey& seed, int depth, int height, int width) {
    if (depth <= 0 || height <= 0 || width <= 0)
        throw std::invalid_argument("random_message: shape must be positive");
    MessageTensor msg(depth, height, width);
    Xoshiro256ss rng(seed, Xoshiro256ss::Domain::message);
    for (auto& bit : msg.bits) bit = static_cast<std::uint8_t>(rng.next() >> 63);
    return msg;
}

std::vector<StegoKey> wrong_key_set(const StegoKey& correct, int n) {
    if (n < 1) throw std::invalid_argument("wrong_key_set: n must be >= 1");
    Xoshiro256ss rng(correct, Xoshiro256ss::Domain::wrong_keys);
    std::vector<StegoKey> keys;
    keys.reserve(n);
    while (static_cast<int>(keys.size()) < n) {
        StegoKey k;
        for (int w = 0; w < 4; ++w) {
            const std::uint64_t v = rng.next();
            for (int b = 0; b < 8; ++b)
                k.seed[8 * w + b] = static_cast<std::uint8_t>(v >> (8 * b));
        }
        if (k == correct || k.is_null()) continue;
        if (std::find(keys.begin(), keys.end(), k) != keys.end()) continue;
        keys.push_back(k);
    }
    return keys;
}

}  // namespace kfnns
