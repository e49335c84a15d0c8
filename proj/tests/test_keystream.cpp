#include <doctest.h>

#include <cmath>
#include <set>

#include "kfnns/errors.hpp"
#include "kfnns/keystream.hpp"
#include "kfnns/metrics.hpp"
#include "kfnns/sha256.hpp"
#include "testutil.hpp"

using namespace kfnns;

namespace {

std::string hex_of(const std::array<std::uint8_t, 32>& d) {
    std::string s;
    for (auto b : d) {
        static const char* h = "0123456789abcdef";
        s += h[b >> 4];
        s += h[b & 0xF];
    }
    return s;
}

}  // namespace

TEST_CASE("sha256 matches the FIPS vectors") {
    CHECK(hex_of(sha256("")) ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(hex_of(sha256("abc")) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    // Long input crossing several blocks.
    std::string million(1000, 'a');
    auto d1 = sha256(million);
    auto d2 = sha256(million);
    CHECK(d1 == d2);
}

TEST_CASE("splitmix64 golden outputs") {
    std::uint64_t state = 0;
    CHECK(splitmix64_next(state) == 0xE220A8397B1DCDAFULL);
    CHECK(splitmix64_next(state) == 0x6E789E6AA1B965F4ULL);
    CHECK(splitmix64_next(state) == 0x06C45D188009454FULL);
}

TEST_CASE("keystream golden fixtures pin cross-platform bit-exactness") {
    const StegoKey key = StegoKey::from_passphrase("golden");
    CHECK(key.to_hex() ==
          "dd56de4137951d9c92681b03416ec15f886b4482a27e3a517d32f085244cbe5d");

    Xoshiro256ss raw(key, Xoshiro256ss::Domain::mask);
    CHECK(raw.next() == 0x410C32692BF5F79CULL);
    CHECK(raw.next() == 0x8A6990806280E57CULL);
    CHECK(raw.next() == 0x3BC455AAB475F7F5ULL);
    CHECK(raw.next() == 0x468C1FF47AB91430ULL);

    Xoshiro256ss sym(key, Xoshiro256ss::Domain::mask);
    CHECK(sym.next_symmetric() == doctest::Approx(-0.49181527962362326).epsilon(1e-15));
    CHECK(sym.next_symmetric() == doctest::Approx(0.081346571624641761).epsilon(1e-15));
    CHECK(sym.next_symmetric() == doctest::Approx(-0.53307084240721325).epsilon(1e-15));

    const MessageTensor msg = random_message(key, 1, 4, 4);
    const std::vector<std::uint8_t> expected = {0, 0, 1, 1, 1, 0, 1, 0,
                                                1, 0, 0, 1, 1, 1, 0, 0};
    CHECK(msg.bits == expected);
}

TEST_CASE("StegoKey hex parsing") {
    const std::string hx =
        "00112233445566778899aabbccddeeff00112233445566778899AABBCCDDEEFF";
    const StegoKey k = StegoKey::from_hex(hx);
    CHECK(k.seed[0] == 0x00);
    CHECK(k.seed[1] == 0x11);
    CHECK(k.seed[31] == 0xFF);
    CHECK(StegoKey::from_hex(k.to_hex()) == k);

    CHECK_THROWS_AS(StegoKey::from_hex("abcd"), UserError);
    CHECK_THROWS_AS(StegoKey::from_hex(std::string(64, 'g')), UserError);
}

TEST_CASE("derive_mask is deterministic and in range") {
    const StegoKey key = StegoKey::from_passphrase("mask determinism");
    const EncryptionMask a = derive_mask(key, 3, 32, 32);
    const EncryptionMask b = derive_mask(key, 3, 32, 32);
    CHECK(a.data == b.data);

    double mn = 1e9, mx = -1e9;
    for (double v : a.data) {
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    CHECK(mn >= -1.0);
    CHECK(mx <= 1.0);
    CHECK_THROWS_AS(derive_mask(key, 0, 4, 4), std::invalid_argument);
}

TEST_CASE("one-bit key changes decorrelate the mask") {
    // Ten key pairs differing in a single seed bit; masks must differ in
    // more than 99% of elements (equality tolerance 1e-6).
    for (int pair = 0; pair < 10; ++pair) {
        StegoKey a = StegoKey::from_passphrase("bitflip-" + std::to_string(pair));
        StegoKey b = a;
        b.seed[pair % 32] ^= std::uint8_t(1u << (pair % 8));
        const EncryptionMask ma = derive_mask(a, 3, 64, 64);
        const EncryptionMask mb = derive_mask(b, 3, 64, 64);
        std::size_t same = 0;
        for (std::size_t i = 0; i < ma.data.size(); ++i)
            if (std::abs(ma.data[i] - mb.data[i]) < 1e-6) ++same;
        CHECK(static_cast<double>(same) / ma.data.size() < 0.01);
    }
}

TEST_CASE("null key gives the zero mask and identity encryption") {
    const StegoKey null = StegoKey::null_key();
    CHECK(null.is_null());
    const EncryptionMask m = derive_mask(null, 3, 8, 8);
    for (double v : m.data) CHECK(v == 0.0);

    const ImageTensor img = testutil::make_cover(7, 16, 16);
    const ImageTensor enc = encrypt(img, null);
    CHECK(enc.data == img.data);
}

TEST_CASE("encrypt adds the mask exactly and never clips") {
    const StegoKey key = StegoKey::from_passphrase("no clipping");
    ImageTensor img(3, 16, 16, 0.9);
    const ImageTensor enc = encrypt(img, key);
    const EncryptionMask mask = derive_mask(key, 3, 16, 16);

    double max_seen = -1e9;
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        CHECK(enc.data[i] == img.data[i] + mask.data[i]);
        max_seen = std::max(max_seen, enc.data[i]);
    }
    // With 768 uniform draws some element exceeds 1; it must be retained.
    CHECK(max_seen > 1.0);
}

TEST_CASE("random_message is Bernoulli(0.5)-like and deterministic") {
    const StegoKey seed = StegoKey::from_passphrase("message stats");
    const MessageTensor a = random_message(seed, 1, 64, 64);
    const MessageTensor b = random_message(seed, 1, 64, 64);
    CHECK(a == b);

    double mean = 0.0;
    for (auto bit : a.bits) mean += bit;
    mean /= a.bits.size();
    CHECK(mean >= 0.45);
    CHECK(mean <= 0.55);

    const MessageTensor c =
        random_message(StegoKey::from_passphrase("another seed"), 1, 64, 64);
    const double dist = ber(a, c);
    CHECK(dist >= 0.45);
    CHECK(dist <= 0.55);
}

TEST_CASE("wrong_key_set gives distinct keys different from the correct one") {
    const StegoKey correct = StegoKey::from_passphrase("correct");

    const std::vector<StegoKey> three = wrong_key_set(correct, 3);
    CHECK(three.size() == 3);
    std::set<std::string> uniq;
    for (const StegoKey& k : three) {
        CHECK_FALSE(k == correct);
        uniq.insert(k.to_hex());
    }
    CHECK(uniq.size() == 3);

    CHECK(wrong_key_set(correct, 1).size() == 1);
    CHECK_FALSE(wrong_key_set(correct, 1)[0] == correct);
    CHECK(wrong_key_set(correct, 3) == three);
    CHECK_THROWS_AS(wrong_key_set(correct, 0), std::invalid_argument);
}

TEST_CASE("masks of distinct keys agree on fewer than 1% of elements") {
    const StegoKey a = StegoKey::from_passphrase("key A");
    const StegoKey b = StegoKey::from_passphrase("key B");
    const EncryptionMask ma = derive_mask(a, 3, 64, 64);
    const EncryptionMask mb = derive_mask(b, 3, 64, 64);
    std::size_t same = 0;
    for (std::size_t i = 0; i < ma.data.size(); ++i)
        if (std::abs(ma.data[i] - mb.data[i]) < 1e-6) ++same;
    CHECK(static_cast<double>(same) / ma.data.size() < 0.01);
}
