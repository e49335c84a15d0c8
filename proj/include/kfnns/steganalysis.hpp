#pragma once

#include <vector>

#include "kfnns/image.hpp"

namespace kfnns {

struct DetectorScore {
    double chi_square = 0.0;
    double rs = 0.0;
    double sample_pairs = 0.0;
    double fused = 0.0;  // arithmetic mean of the three
};

// Default decision threshold on the fused score.
constexpr double kFusedThreshold = 0.2;

// Pairs-of-values chi-square attack: p-value of the observed LSB pair
// histogram, averaged over channels. Near 1 when value pairs are equalized
// (heavy LSB embedding), near 0 on clean natural content. A degenerate
// histogram scores 0. Requires at least 256 pixels.
double chi_square_attack(const QuantizedImage& img);

// RS analysis with mask [0,1,1,0]; returns the estimated embedding rate
// clamped to [0,1], averaged over channels.
double rs_analysis(const QuantizedImage& img);

// Sample-pairs estimate of the embedding rate, clamped to [0,1].
double sample_pairs(const QuantizedImage& img);

DetectorScore analyze(const QuantizedImage& img);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points;  // monotone in fpr, (0,0) .. (1,1)
    double auc = 0.0;
};

// Threshold sweep over all distinct scores ("score >= threshold" flags an
// image as stego); AUC is the trapezoidal integral.
RocCurve roc(const std::vector<double>& cover_scores,
             const std::vector<double>& stego_scores);

}  // namespace kfnns
