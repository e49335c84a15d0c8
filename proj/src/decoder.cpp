#include "kfnns/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "kfnns/errors.hpp"

namespace kfnns {

namespace {

constexpr char kMagic[5] = {'K', 'F', 'N', 'N', '1'};
constexpr int kHiddenChannels = 32;
// Extra gain on the final convolution of the seeded decoder. He-scaled
// random weights produce logits of magnitude well below 1, where the
// message loss is far too flat for the reference loss weights: a trained
// decoder emits confident (saturated) logits, and the embedding only
// balances against the distortion weight when the seeded stand-in does
// the same.
constexpr double kLogitGain = 40.0;

// dst[y][x] += w * src[y+dy][x+dx] wherever the shifted index is in range.
// Zero padding outside. The contiguous inner loop is what the optimizer
// spends nearly all its time in.
inline void axpy_shifted(double* dst, const double* src, int h, int w,
                         int dy, int dx, double weight) {
    const int y0 = std::max(0, -dy);
    const int y1 = std::min(h, h - dy);
    const int x0 = std::max(0, -dx);
    const int x1 = std::min(w, w - dx);
    for (int y = y0; y < y1; ++y) {
        double* d = dst + static_cast<std::size_t>(y) * w;
        const double* s = src + static_cast<std::size_t>(y + dy) * w + dx;
        for (int x = x0; x < x1; ++x) d[x] += weight * s[x];
    }
}

// out (out_ch planes) = conv(in, kernel), zero padding, same size.
void conv_forward(const double* in, int in_ch, double* out, int out_ch,
                  int h, int w, const double* kernel, int kh, int kw) {
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    std::fill(out, out + plane * out_ch, 0.0);
    const int cy = kh / 2;
    const int cx = kw / 2;
    for (int o = 0; o < out_ch; ++o) {
        double* out_plane = out + o * plane;
        for (int i = 0; i < in_ch; ++i) {
            const double* in_plane = in + i * plane;
            const double* k = kernel + (static_cast<std::size_t>(o) * in_ch + i) * kh * kw;
            for (int ky = 0; ky < kh; ++ky)
                for (int kx = 0; kx < kw; ++kx)
                    axpy_shifted(out_plane, in_plane, h, w, ky - cy, kx - cx,
                                 k[ky * kw + kx]);
        }
    }
}

// d_in (in_ch planes) = transposed conv of d_out with the same kernel.
void conv_backward(const double* d_out, int out_ch, double* d_in, int in_ch,
                   int h, int w, const double* kernel, int kh, int kw) {
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    std::fill(d_in, d_in + plane * in_ch, 0.0);
    const int cy = kh / 2;
    const int cx = kw / 2;
    for (int i = 0; i < in_ch; ++i) {
        double* din_plane = d_in + i * plane;
        for (int o = 0; o < out_ch; ++o) {
            const double* dout_plane = d_out + o * plane;
            const double* k = kernel + (static_cast<std::size_t>(o) * in_ch + i) * kh * kw;
            for (int ky = 0; ky < kh; ++ky)
                for (int kx = 0; kx < kw; ++kx)
                    axpy_shifted(din_plane, dout_plane, h, w, cy - ky, cx - kx,
                                 k[ky * kw + kx]);
        }
    }
}

inline void leaky_relu_inplace(std::vector<double>& v, double slope) {
    for (double& x : v)
        if (x < 0.0) x *= slope;
}

void write_u32(std::ostream& os, std::uint32_t v) {
    std::uint8_t b[4] = {static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v >> 8),
                         static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& is, const std::string& what) {
    std::uint8_t b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4))
        throw UserError("weight file truncated while reading " + what);
    return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) |
           (std::uint32_t(b[2]) << 16) | (std::uint32_t(b[3]) << 24);
}

}  // namespace

FixedDecoder FixedDecoder::build_seeded(const StegoKey& seed, int payload_depth,
                                        double leaky_slope) {
    if (payload_depth < 1)
        throw std::invalid_argument("build_seeded: payload depth must be >= 1");

    FixedDecoder f;
    f.slope_ = leaky_slope;
    f.specs_ = {{3, kHiddenChannels, 3, 3},
                {kHiddenChannels, kHiddenChannels, 3, 3},
                {kHiddenChannels, kHiddenChannels, 3, 3},
                {kHiddenChannels, payload_depth, 3, 3}};

    Xoshiro256ss rng(seed, Xoshiro256ss::Domain::weights);
    for (std::size_t l = 0; l < f.specs_.size(); ++l) {
        const ConvLayerSpec& spec = f.specs_[l];
        const int fan_in = spec.in_ch * spec.kh * spec.kw;
        double bound = std::sqrt(6.0 / fan_in);  // uniform with std sqrt(2/fan_in)
        if (l + 1 == f.specs_.size()) bound *= kLogitGain;
        std::vector<double> k(static_cast<std::size_t>(spec.out_ch) * spec.in_ch *
                              spec.kh * spec.kw);
        for (double& w : k) w = bound * rng.next_symmetric();
        f.kernels_.push_back(std::move(k));
    }
    return f;
}

LogitTensor FixedDecoder::forward(const ImageTensor& img) const {
    Tape tape;
    return forward(img, tape);
}

LogitTensor FixedDecoder::forward(const ImageTensor& img, Tape& tape) const {
    if (img.channels != specs_.front().in_ch)
        throw std::invalid_argument("decoder forward: expected " +
                                    std::to_string(specs_.front().in_ch) +
                                    "-channel input");
    const int h = img.height;
    const int w = img.width;
    const std::size_t plane = static_cast<std::size_t>(h) * w;

    tape.height = h;
    tape.width = w;
    tape.acts.assign(specs_.size(), {});
    tape.acts[0] = img.data;

    std::vector<double> out;
    for (std::size_t l = 0; l < specs_.size(); ++l) {
        const ConvLayerSpec& spec = specs_[l];
        out.assign(plane * spec.out_ch, 0.0);
        conv_forward(tape.acts[l].data(), spec.in_ch, out.data(), spec.out_ch,
                     h, w, kernels_[l].data(), spec.kh, spec.kw);
        if (l + 1 < specs_.size()) {
            leaky_relu_inplace(out, slope_);
            tape.acts[l + 1] = out;
        }
    }

    LogitTensor logits(specs_.back().out_ch, h, w);
    logits.data = std::move(out);
    return logits;
}

ImageTensor FixedDecoder::backward(const Tape& tape, const LogitTensor& loss_grad) const {
    if (loss_grad.depth != specs_.back().out_ch ||
        loss_grad.height != tape.height || loss_grad.width != tape.width)
        throw std::invalid_argument("decoder backward: loss gradient shape mismatch");

    const int h = tape.height;
    const int w = tape.width;
    std::vector<double> d = loss_grad.data;
    std::vector<double> d_in;
    for (int l = static_cast<int>(specs_.size()) - 1; l >= 0; --l) {
        const ConvLayerSpec& spec = specs_[l];
        d_in.assign(static_cast<std::size_t>(spec.in_ch) * h * w, 0.0);
        conv_backward(d.data(), spec.out_ch, d_in.data(), spec.in_ch, h, w,
                      kernels_[l].data(), spec.kh, spec.kw);
        if (l > 0) {
            // acts[l] holds post-activation values; slope > 0 keeps their
            // sign equal to the pre-activation sign.
            const std::vector<double>& a = tape.acts[l];
            for (std::size_t i = 0; i < d_in.size(); ++i)
                if (a[i] <= 0.0) d_in[i] *= slope_;
        }
        d = std::move(d_in);
    }

    ImageTensor grad(specs_.front().in_ch, h, w);
    grad.data = std::move(d);
    return grad;
}

ImageTensor FixedDecoder::input_gradient(const ImageTensor& img,
                                         const LogitTensor& loss_grad) const {
    Tape tape;
    forward(img, tape);
    return backward(tape, loss_grad);
}

void FixedDecoder::save_weights(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw UserError("cannot open '" + path + "' for writing");
    os.write(kMagic, sizeof(kMagic));
    write_u32(os, static_cast<std::uint32_t>(specs_.size()));
    for (const ConvLayerSpec& s : specs_) {
        write_u32(os, static_cast<std::uint32_t>(s.in_ch));
        write_u32(os, static_cast<std::uint32_t>(s.out_ch));
        write_u32(os, static_cast<std::uint32_t>(s.kh));
        write_u32(os, static_cast<std::uint32_t>(s.kw));
    }
    for (const auto& k : kernels_)
        os.write(reinterpret_cast<const char*>(k.data()),
                 static_cast<std::streamsize>(k.size() * sizeof(double)));
    if (!os) throw UserError("write failure on '" + path + "'");
}

FixedDecoder FixedDecoder::load_weights(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw UserError("cannot open weight file '" + path + "'");

    char magic[5];
    if (!is.read(magic, 5) || std::memcmp(magic, kMagic, 5) != 0)
        throw UserError("'" + path + "' is not a KFNN1 weight file");

    const std::uint32_t n_layers = read_u32(is, "layer count");
    if (n_layers < 1 || n_layers > 64)
        throw UserError("weight file has implausible layer count " +
                        std::to_string(n_layers));

    FixedDecoder f;
    for (std::uint32_t l = 0; l < n_layers; ++l) {
        ConvLayerSpec s;
        s.in_ch = static_cast<int>(read_u32(is, "layer shape"));
        s.out_ch = static_cast<int>(read_u32(is, "layer shape"));
        s.kh = static_cast<int>(read_u32(is, "layer shape"));
        s.kw = static_cast<int>(read_u32(is, "layer shape"));
        if (s.in_ch < 1 || s.out_ch < 1 || s.kh < 1 || s.kw < 1 ||
            s.kh % 2 == 0 || s.kw % 2 == 0)
            throw UserError("weight file layer " + std::to_string(l) +
                            " has an invalid shape");
        if (l == 0 && s.in_ch != 3)
            throw UserError("weight file first layer must take 3 channels");
        if (l > 0 && s.in_ch != f.specs_.back().out_ch)
            throw UserError("weight file layer " + std::to_string(l) +
                            " input channels do not chain");
        f.specs_.push_back(s);
    }
    for (const ConvLayerSpec& s : f.specs_) {
        std::vector<double> k(static_cast<std::size_t>(s.out_ch) * s.in_ch * s.kh * s.kw);
        if (!is.read(reinterpret_cast<char*>(k.data()),
                     static_cast<std::streamsize>(k.size() * sizeof(double))))
            throw UserError("weight file truncated inside kernel data");
        f.kernels_.push_back(std::move(k));
    }
    char extra;
    if (is.read(&extra, 1))
        throw UserError("weight file has trailing bytes");
    return f;
}

MessageTensor decode_bits(const LogitTensor& logits) {
    MessageTensor msg(logits.depth, logits.height, logits.width);
    for (std::size_t i = 0; i < logits.data.size(); ++i)
        msg.bits[i] = logits.data[i] > 0.0 ? 1 : 0;
    return msg;
}

}  // namespace kfnns
