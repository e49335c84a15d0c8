#include "kfnns/steganalysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace kfnns {

namespace {

// Regularized upper incomplete gamma Q(a,x): series for small x, Lentz
// continued fraction otherwise.
double gamma_q(double a, double x) {
    if (x <= 0.0) return 1.0;
    if (x < a + 1.0) {
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-15) break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    double b = x + 1.0 - a;
    double c = 1e300;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double chi_square_channel(const std::uint8_t* plane, std::size_t n) {
    std::array<std::size_t, 256> hist{};
    for (std::size_t i = 0; i < n; ++i) ++hist[plane[i]];

    double chi = 0.0;
    int dof = -1;  // categories minus one
    for (int k = 0; k < 128; ++k) {
        const double a = static_cast<double>(hist[2 * k]);
        const double b = static_cast<double>(hist[2 * k + 1]);
        const double expected = (a + b) / 2.0;
        if (expected <= 0.0) continue;
        chi += (a - expected) * (a - expected) / expected +
               (b - expected) * (b - expected) / expected;
        ++dof;
    }
    if (dof < 1) return 0.0;  // degenerate histogram
    return gamma_q(dof / 2.0, chi / 2.0);  // p-value: high when pairs equalized
}

inline int flip_lsb(int v) { return v ^ 1; }
// Shifted flip -1<->0, 1<->2, ..., 255<->256.
inline int flip_shifted(int v) { return (v & 1) ? v + 1 : v - 1; }

// Smoothness of a 4-sample group.
inline int group_f(const int g[4]) {
    return std::abs(g[1] - g[0]) + std::abs(g[2] - g[1]) + std::abs(g[3] - g[2]);
}

struct RsCounts {
    double d = 0.0;       // (R - S) / groups under the mask
    double d_neg = 0.0;   // same under the negative mask
};

// Regular/singular group statistics with mask [0,1,1,0], over
// non-overlapping horizontal groups of four. lsb_flipped selects the
// statistics of the fully LSB-flipped image.
RsCounts rs_counts(const std::uint8_t* plane, int h, int w, bool lsb_flipped) {
    static const int mask[4] = {0, 1, 1, 0};
    long r = 0, s = 0, rn = 0, sn = 0, groups = 0;
    for (int y = 0; y < h; ++y) {
        const std::uint8_t* row = plane + static_cast<std::size_t>(y) * w;
        for (int x = 0; x + 3 < w; x += 4) {
            int g[4], gm[4], gn[4];
            for (int i = 0; i < 4; ++i) {
                g[i] = row[x + i];
                if (lsb_flipped) g[i] = flip_lsb(g[i]);
                gm[i] = mask[i] ? flip_lsb(g[i]) : g[i];
                gn[i] = mask[i] ? flip_shifted(g[i]) : g[i];
            }
            const int base = group_f(g);
            const int fm = group_f(gm);
            const int fn = group_f(gn);
            if (fm > base) ++r;
            if (fm < base) ++s;
            if (fn > base) ++rn;
            if (fn < base) ++sn;
            ++groups;
        }
    }
    RsCounts out;
    if (groups > 0) {
        out.d = static_cast<double>(r - s) / groups;
        out.d_neg = static_cast<double>(rn - sn) / groups;
    }
    return out;
}

double rs_channel(const std::uint8_t* plane, int h, int w) {
    const RsCounts at_p = rs_counts(plane, h, w, false);
    const RsCounts at_1mp = rs_counts(plane, h, w, true);

    const double d0 = at_p.d;
    const double dn0 = at_p.d_neg;
    const double d1 = at_1mp.d;
    const double dn1 = at_1mp.d_neg;

    const double a = 2.0 * (d1 + d0);
    const double b = dn0 - dn1 - d1 - 3.0 * d0;
    const double c = d0 - dn0;

    double z;
    if (std::abs(a) < 1e-12) {
        if (std::abs(b) < 1e-12) return 0.0;
        z = -c / b;
    } else {
        const double disc = b * b - 4.0 * a * c;
        if (disc < 0.0) return 0.0;
        const double root1 = (-b + std::sqrt(disc)) / (2.0 * a);
        const double root2 = (-b - std::sqrt(disc)) / (2.0 * a);
        z = std::abs(root1) <= std::abs(root2) ? root1 : root2;
    }
    if (!std::isfinite(z) || std::abs(z - 0.5) < 1e-12) return 0.0;
    const double p = z / (z - 0.5);
    return std::clamp(p, 0.0, 1.0);
}

double spa_channel(const std::uint8_t* plane, int h, int w) {
    // Adjacent horizontal pairs (u,v), split sample-pairs style: Z equal
    // pairs, W unequal pairs sharing an LSB trace, X / Y unequal pairs by
    // the parity of v and the order (trace pairs fall in Y). Covers are
    // assumed to satisfy E[X] = E[Y]; the rate estimate solves
    //   0.5(W+Z) b^2 + (2X-P) b + (Y-X) = 0.
    long x_cnt = 0, y_cnt = 0, z_cnt = 0, w_cnt = 0, total = 0;
    for (int yy = 0; yy < h; ++yy) {
        const std::uint8_t* row = plane + static_cast<std::size_t>(yy) * w;
        for (int xx = 0; xx + 1 < w; ++xx) {
            const int u = row[xx];
            const int v = row[xx + 1];
            ++total;
            if (u == v) {
                ++z_cnt;
                continue;
            }
            if ((u >> 1) == (v >> 1)) ++w_cnt;
            if ((v % 2 == 0 && u < v) || (v % 2 == 1 && u > v))
                ++x_cnt;
            else
                ++y_cnt;
        }
    }
    if (total == 0) return 0.0;

    const double a = 0.5 * (w_cnt + z_cnt);
    const double b = 2.0 * x_cnt - total;
    const double c = static_cast<double>(y_cnt) - static_cast<double>(x_cnt);

    double beta;
    if (std::abs(a) < 1e-12) {
        if (std::abs(b) < 1e-12) return 0.0;
        beta = -c / b;
    } else {
        const double disc = b * b - 4.0 * a * c;
        if (disc < 0.0) return 0.0;
        beta = (-b - std::sqrt(disc)) / (2.0 * a);
        const double other = (-b + std::sqrt(disc)) / (2.0 * a);
        if (std::abs(other) < std::abs(beta)) beta = other;
    }
    if (!std::isfinite(beta)) return 0.0;
    return std::clamp(beta, 0.0, 1.0);
}

}  // namespace

double chi_square_attack(const QuantizedImage& img) {
    if (static_cast<std::size_t>(img.height) * img.width < 256)
        throw std::invalid_argument("chi_square_attack: need at least 256 pixels");
    const std::size_t plane = static_cast<std::size_t>(img.height) * img.width;
    double sum = 0.0;
    for (int c = 0; c < img.channels; ++c)
        sum += chi_square_channel(img.data.data() + c * plane, plane);
    return sum / img.channels;
}

double rs_analysis(const QuantizedImage& img) {
    const std::size_t plane = static_cast<std::size_t>(img.height) * img.width;
    double sum = 0.0;
    for (int c = 0; c < img.channels; ++c)
        sum += rs_channel(img.data.data() + c * plane, img.height, img.width);
    return sum / img.channels;
}

double sample_pairs(const QuantizedImage& img) {
    const std::size_t plane = static_cast<std::size_t>(img.height) * img.width;
    double sum = 0.0;
    for (int c = 0; c < img.channels; ++c)
        sum += spa_channel(img.data.data() + c * plane, img.height, img.width);
    return sum / img.channels;
}

DetectorScore analyze(const QuantizedImage& img) {
    DetectorScore s;
    s.chi_square = chi_square_attack(img);
    s.rs = rs_analysis(img);
    s.sample_pairs = sample_pairs(img);
    s.fused = (s.chi_square + s.rs + s.sample_pairs) / 3.0;
    return s;
}

RocCurve roc(const std::vector<double>& cover_scores,
             const std::vector<double>& stego_scores) {
    if (cover_scores.empty() || stego_scores.empty())
        throw std::invalid_argument("roc: score lists must be non-empty");

    std::vector<double> thresholds;
    thresholds.reserve(cover_scores.size() + stego_scores.size());
    thresholds.insert(thresholds.end(), cover_scores.begin(), cover_scores.end());
    thresholds.insert(thresholds.end(), stego_scores.begin(), stego_scores.end());
    std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                     thresholds.end());

    RocCurve curve;
    curve.points.push_back({0.0, 0.0});
    for (double th : thresholds) {
        const auto frac_at_least = [th](const std::vector<double>& scores) {
            std::size_t n = 0;
            for (double s : scores)
                if (s >= th) ++n;
            return static_cast<double>(n) / scores.size();
        };
        curve.points.push_back({frac_at_least(cover_scores), frac_at_least(stego_scores)});
    }
    if (curve.points.back().fpr != 1.0 || curve.points.back().tpr != 1.0)
        curve.points.push_back({1.0, 1.0});

    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const RocPoint& p0 = curve.points[i - 1];
        const RocPoint& p1 = curve.points[i];
        curve.auc += (p1.fpr - p0.fpr) * (p0.tpr + p1.tpr) / 2.0;
    }
    return curve;
}

}  // namespace kfnns
