#include <doctest.h>

#include <cmath>
#include <random>

#include "kfnns/steganalysis.hpp"
#include "testutil.hpp"

using namespace kfnns;

namespace {

// Randomize every LSB (full-rate embedding simulation).
QuantizedImage lsb_randomize(QuantizedImage img, unsigned seed) {
    std::mt19937 rng(seed);
    for (auto& v : img.data) v = static_cast<std::uint8_t>((v & 0xFE) | (rng() & 1));
    return img;
}

// Flip LSBs of a fraction `rate/2` of samples (rate = embedding rate).
QuantizedImage lsb_embed(QuantizedImage img, double rate, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (auto& v : img.data)
        if (uni(rng) < rate / 2.0) v = static_cast<std::uint8_t>(v ^ 1);
    return img;
}

}  // namespace

TEST_CASE("chi-square attack anchors") {
    // Equalized pairs-of-values: 32 values 0..31, equal counts per value.
    QuantizedImage eq(3, 16, 16);
    for (std::size_t i = 0; i < eq.data.size(); ++i)
        eq.data[i] = static_cast<std::uint8_t>(i % 32);
    CHECK(chi_square_attack(eq) > 0.99);

    // Constant image: degenerate histogram.
    CHECK(chi_square_attack(QuantizedImage(3, 16, 16, 128)) == 0.0);

    CHECK_THROWS_AS(chi_square_attack(QuantizedImage(3, 8, 8)), std::invalid_argument);
}

TEST_CASE("chi-square attack on a natural-cover corpus") {
    int below = 0;
    double cover_mean = 0.0, stego_mean = 0.0;
    const int n = 100;
    for (int i = 0; i < n; ++i) {
        const QuantizedImage cover = quantize(testutil::make_cover(1000 + i, 64, 64));
        const double sc = chi_square_attack(cover);
        cover_mean += sc;
        if (sc < kFusedThreshold) ++below;
        stego_mean += chi_square_attack(lsb_randomize(cover, 555 + i));
    }
    CHECK(below >= 80);  // most covers stay below the fused threshold
    CHECK(stego_mean / n > cover_mean / n);
}

TEST_CASE("rs and sample-pairs basics") {
    CHECK(rs_analysis(QuantizedImage(3, 16, 16, 77)) == 0.0);
    CHECK(sample_pairs(QuantizedImage(3, 16, 16, 77)) == 0.0);

    const QuantizedImage img = quantize(testutil::make_cover(2000, 64, 64));
    CHECK(rs_analysis(img) == rs_analysis(img));
    CHECK(sample_pairs(img) == sample_pairs(img));

    for (int i = 0; i < 10; ++i) {
        const QuantizedImage c = quantize(testutil::make_cover(2100 + i, 64, 64));
        const QuantizedImage s = lsb_randomize(c, 2200 + i);
        for (double v : {rs_analysis(c), rs_analysis(s), sample_pairs(c),
                         sample_pairs(s), chi_square_attack(c), chi_square_attack(s)}) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("rs and sample-pairs track the embedding rate") {
    double rs_cover = 0.0, rs_full = 0.0, sp_cover = 0.0, sp_full = 0.0;
    double rs_half = 0.0, sp_half = 0.0;
    const int n = 20;
    for (int i = 0; i < n; ++i) {
        const QuantizedImage c = quantize(testutil::make_cover(3000 + i, 64, 64));
        rs_cover += rs_analysis(c) / n;
        sp_cover += sample_pairs(c) / n;
        const QuantizedImage h = lsb_embed(c, 0.5, 3100 + i);
        rs_half += rs_analysis(h) / n;
        sp_half += sample_pairs(h) / n;
        const QuantizedImage f = lsb_embed(c, 1.0, 3200 + i);
        rs_full += rs_analysis(f) / n;
        sp_full += sample_pairs(f) / n;
    }
    // Mean estimates are near the true rates and strictly ordered.
    CHECK(rs_cover < 0.15);
    CHECK(sp_cover < 0.15);
    CHECK(rs_half > rs_cover + 0.1);
    CHECK(sp_half > sp_cover + 0.1);
    CHECK(rs_full > rs_half + 0.1);
    CHECK(sp_full > sp_half + 0.1);
    CHECK(rs_full > 0.6);
    CHECK(sp_full > 0.6);
}

TEST_CASE("fused score is the detector mean") {
    const QuantizedImage img = quantize(testutil::make_cover(4000, 64, 64));
    const DetectorScore s = analyze(img);
    CHECK(s.fused ==
          doctest::Approx((s.chi_square + s.rs + s.sample_pairs) / 3.0).epsilon(1e-15));
    CHECK(s.fused >= 0.0);
    CHECK(s.fused <= 1.0);
}

TEST_CASE("roc anchors") {
    // Perfect separation.
    const RocCurve perfect = roc({0.1, 0.2, 0.15}, {0.8, 0.9, 0.7});
    CHECK(perfect.auc == doctest::Approx(1.0).epsilon(1e-15));

    // Identical distributions sit on the diagonal.
    const std::vector<double> same = {0.1, 0.3, 0.5, 0.7, 0.2, 0.4};
    const RocCurve diag = roc(same, same);
    CHECK(std::abs(diag.auc - 0.5) <= 1e-12);

    // Hand-built four-point case: trapezoid area 0.75.
    const RocCurve hand = roc({0.1, 0.4}, {0.3, 0.6});
    CHECK(hand.auc == doctest::Approx(0.75).epsilon(1e-12));

    CHECK_THROWS_AS(roc({}, {0.5}), std::invalid_argument);
    CHECK_THROWS_AS(roc({0.5}, {}), std::invalid_argument);
}

TEST_CASE("roc is invariant under monotone rescaling") {
    std::mt19937 rng(51);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<double> covers(40), stegos(40);
    for (auto& v : covers) v = uni(rng) * 0.7;
    for (auto& v : stegos) v = 0.2 + uni(rng) * 0.8;

    const RocCurve base = roc(covers, stegos);
    auto cube = [](std::vector<double> v) {
        for (double& x : v) x = x * x * x;
        return v;
    };
    const RocCurve scaled = roc(cube(covers), cube(stegos));
    CHECK(scaled.auc == doctest::Approx(base.auc).epsilon(1e-12));
    CHECK(scaled.points.size() == base.points.size());
}

TEST_CASE("roc points are monotone in fpr") {
    std::mt19937 rng(52);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<double> covers(25), stegos(25);
    for (auto& v : covers) v = uni(rng);
    for (auto& v : stegos) v = uni(rng);
    const RocCurve c = roc(covers, stegos);
    for (std::size_t i = 1; i < c.points.size(); ++i) {
        CHECK(c.points[i].fpr >= c.points[i - 1].fpr);
        CHECK(c.points[i].tpr >= c.points[i - 1].tpr);
    }
    CHECK(c.points.front().fpr == 0.0);
    CHECK(c.points.back().fpr == 1.0);
}
