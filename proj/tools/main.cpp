// kfnns: key-based fixed-network steganography tool.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include "kfnns/config.hpp"
#include "kfnns/cost.hpp"
#include "kfnns/decoder.hpp"
#include "kfnns/embedder.hpp"
#include "kfnns/errors.hpp"
#include "kfnns/keystream.hpp"
#include "kfnns/lbfgs.hpp"
#include "kfnns/losses.hpp"
#include "kfnns/metrics.hpp"
#include "kfnns/png_io.hpp"
#include "kfnns/steganalysis.hpp"

namespace fs = std::filesystem;
using namespace kfnns;

namespace {

FixedDecoder make_decoder(const RunConfig& rc) {
    if (!rc.weights_path.empty()) return FixedDecoder::load_weights(rc.weights_path);
    return FixedDecoder::build_seeded(rc.resolve_model_seed(), rc.bpp);
}

// Payload tensor for one embedding: either pure seeded random bits, or a
// file framed as a 32-bit big-endian byte count followed by the payload
// bits MSB-first, with the remaining bits drawn from the message stream.
MessageTensor build_payload(const RunConfig& rc, const StegoKey& msg_seed,
                            int height, int width) {
    MessageTensor msg = random_message(msg_seed, rc.bpp, height, width);
    if (rc.payload == "random") return msg;
    if (rc.payload != "file")
        throw UserError("--payload must be 'random' or 'file'");
    if (rc.payload_file.empty())
        throw UserError("--payload file requires --payload-file");

    std::ifstream is(rc.payload_file, std::ios::binary);
    if (!is) throw UserError("cannot open payload file '" + rc.payload_file + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)),
                                    std::istreambuf_iterator<char>());
    const std::size_t need = 32 + 8 * bytes.size();
    if (need > msg.bits.size())
        throw UserError("payload of " + std::to_string(bytes.size()) +
                        " bytes does not fit: capacity is " +
                        std::to_string((msg.bits.size() - 32) / 8) + " bytes");

    const std::uint32_t len = static_cast<std::uint32_t>(bytes.size());
    for (int i = 0; i < 32; ++i) msg.bits[i] = (len >> (31 - i)) & 1;
    for (std::size_t b = 0; b < bytes.size(); ++b)
        for (int i = 0; i < 8; ++i)
            msg.bits[32 + 8 * b + i] = (bytes[b] >> (7 - i)) & 1;
    return msg;
}

std::vector<std::uint8_t> pack_bits(const std::vector<std::uint8_t>& bits,
                                    std::size_t offset, std::size_t count) {
    std::vector<std::uint8_t> bytes((count + 7) / 8, 0);
    for (std::size_t i = 0; i < count; ++i)
        if (bits[offset + i]) bytes[i / 8] |= 1u << (7 - i % 8);
    return bytes;
}

void write_trace_csv(const std::string& path, const std::vector<TraceRecord>& trace) {
    std::ofstream os(path);
    if (!os) throw UserError("cannot write trace file '" + path + "'");
    os << "iteration,stage,total,d,type1,type2,type3\n";
    for (const TraceRecord& r : trace)
        os << r.epoch << ',' << r.stage << ',' << r.total << ',' << r.d << ','
           << r.type1 << ',' << r.type2 << ',' << r.type3 << '\n';
}

std::vector<fs::path> list_pngs(const std::string& dir) {
    if (!fs::is_directory(dir)) throw UserError("'" + dir + "' is not a directory");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".png")
            files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw UserError("no .png files in '" + dir + "'");
    return files;
}

void run_jobs(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
    const int workers = std::max(1, jobs);
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1))
                    fn(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------- embed --

int cmd_embed(const RunConfig& rc, const std::string& save_config) {
    if (rc.cover.empty() || rc.out.empty())
        throw UserError("embed requires --cover and --out");

    const ImageTensor cover = load_png(rc.cover);
    const StegoKey key = rc.resolve_key();
    const FixedDecoder decoder = make_decoder(rc);
    const MessageTensor msg =
        build_payload(rc, rc.resolve_message_seed(), cover.height, cover.width);

    const EmbedResult result = embed(cover, msg, key, decoder, rc.embed);
    save_png(result.stego, rc.out);

    if (!rc.trace_path.empty()) write_trace_csv(rc.trace_path, result.trace);
    if (!save_config.empty()) rc.save(save_config);

    std::cout << "stego: " << rc.out << "\n"
              << "epochs run: " << result.epochs_run << "\n"
              << "ber (correct key): " << result.ber_correct << "\n"
              << "ber (no key):      " << result.ber_nokey << "\n"
              << "ber (wrong keys):  " << result.ber_wrong_mean << "\n"
              << "psnr: " << result.psnr << " dB\n"
              << "ssim: " << result.ssim << "\n";
    return 0;
}

// -------------------------------------------------------------- extract --

int cmd_extract(const RunConfig& rc, const std::string& stego_path,
                const std::string& out_path, bool have_key, bool framed) {
    const QuantizedImage stego = load_png_quantized(stego_path);
    const FixedDecoder decoder = make_decoder(rc);
    const MessageTensor bits = have_key
                                   ? extract(stego, rc.resolve_key(), decoder)
                                   : extract(stego, decoder);

    std::vector<std::uint8_t> bytes;
    if (framed) {
        if (bits.size() < 32) throw UserError("message too short for framing");
        std::uint32_t len = 0;
        for (int i = 0; i < 32; ++i) len = (len << 1) | bits.bits[i];
        if (32 + 8ull * len > bits.size())
            throw UserError("framed length " + std::to_string(len) +
                            " exceeds message capacity (wrong key?)");
        bytes = pack_bits(bits.bits, 32, 8ull * len);
    } else {
        bytes = pack_bits(bits.bits, 0, bits.size());
    }

    std::ofstream os(out_path, std::ios::binary);
    if (!os) throw UserError("cannot write '" + out_path + "'");
    os.write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
    std::cout << "wrote " << bytes.size() << " bytes to " << out_path << "\n";
    return 0;
}

// ------------------------------------------------------------- evaluate --

int cmd_evaluate(const RunConfig& rc, const std::string& covers_dir,
                 const std::string& csv_path, int jobs) {
    const std::vector<fs::path> files = list_pngs(covers_dir);
    const StegoKey key = rc.resolve_key();
    const FixedDecoder decoder = make_decoder(rc);

    struct Row {
        std::string name;
        EmbedResult result;
    };
    std::vector<Row> rows(files.size());

    run_jobs(files.size(), jobs, [&](std::size_t i) {
        const ImageTensor cover = load_png(files[i].string());
        const StegoKey msg_seed = StegoKey::from_passphrase(
            rc.message_seed + ":" + files[i].filename().string());
        const MessageTensor msg =
            random_message(msg_seed, rc.bpp, cover.height, cover.width);
        rows[i].name = files[i].filename().string();
        rows[i].result = embed(cover, msg, key, decoder, rc.embed);
        std::fprintf(stderr, "done %s (ber %.4g, psnr %.2f)\n", rows[i].name.c_str(),
                     rows[i].result.ber_correct, rows[i].result.psnr);
    });

    std::ofstream os(csv_path);
    if (!os) throw UserError("cannot write '" + csv_path + "'");
    os << "image,bpp,ber_correct,ber_nokey,ber_wrong,psnr,ssim\n";
    for (const Row& r : rows)
        os << r.name << ',' << rc.bpp << ',' << r.result.ber_correct << ','
           << r.result.ber_nokey << ',' << r.result.ber_wrong_mean << ','
           << r.result.psnr << ',' << r.result.ssim << '\n';
    std::cout << "wrote " << rows.size() << " rows to " << csv_path << "\n";
    return 0;
}

// ------------------------------------------------------------- cost-map --

int cmd_costmap(const std::string& cover_path, const std::string& out_png,
                const std::string& out_raw) {
    const ImageTensor cover = load_png(cover_path);
    const CostMatrix cost = hill_cost(cover);

    if (!out_raw.empty()) {
        std::ofstream os(out_raw, std::ios::binary);
        if (!os) throw UserError("cannot write '" + out_raw + "'");
        os.write(reinterpret_cast<const char*>(cost.data.data()),
                 static_cast<std::streamsize>(cost.data.size() * sizeof(double)));
    }

    if (!out_png.empty()) {
        // Channel-averaged cost, min-max normalized for inspection.
        const std::size_t plane = static_cast<std::size_t>(cost.height) * cost.width;
        std::vector<double> gray(plane, 0.0);
        for (int c = 0; c < cost.channels; ++c)
            for (std::size_t i = 0; i < plane; ++i)
                gray[i] += cost.data[c * plane + i] / cost.channels;
        const auto [mn, mx] = std::minmax_element(gray.begin(), gray.end());
        ImageTensor vis(3, cost.height, cost.width);
        for (std::size_t i = 0; i < plane; ++i) {
            const double v = *mx > *mn ? (gray[i] - *mn) / (*mx - *mn) : 0.0;
            vis.data[i] = vis.data[plane + i] = vis.data[2 * plane + i] = v;
        }
        save_png(quantize(vis), out_png);
    }
    std::cout << "cost map written\n";
    return 0;
}

// ----------------------------------------------------------- steganalyze --

int cmd_steganalyze(const std::string& covers_dir, const std::string& stegos_dir,
                    const std::string& csv_path, const std::string& gnuplot_path,
                    const std::string& scores_path, int jobs) {
    const std::vector<fs::path> covers = list_pngs(covers_dir);
    const std::vector<fs::path> stegos = list_pngs(stegos_dir);

    std::vector<double> cover_scores(covers.size()), stego_scores(stegos.size());
    run_jobs(covers.size() + stegos.size(), jobs, [&](std::size_t i) {
        if (i < covers.size())
            cover_scores[i] = analyze(load_png_quantized(covers[i].string())).fused;
        else
            stego_scores[i - covers.size()] =
                analyze(load_png_quantized(stegos[i - covers.size()].string())).fused;
    });

    const RocCurve curve = roc(cover_scores, stego_scores);

    std::ofstream os(csv_path);
    if (!os) throw UserError("cannot write '" + csv_path + "'");
    os << "fpr,tpr\n";
    for (const RocPoint& p : curve.points) os << p.fpr << ',' << p.tpr << '\n';
    os << "# auc," << curve.auc << '\n';

    if (!gnuplot_path.empty()) {
        std::ofstream gp(gnuplot_path);
        if (!gp) throw UserError("cannot write '" + gnuplot_path + "'");
        gp << "# ROC curve (auc = " << curve.auc << ")\n# fpr tpr\n";
        for (const RocPoint& p : curve.points) gp << p.fpr << ' ' << p.tpr << '\n';
    }
    if (!scores_path.empty()) {
        std::ofstream sc(scores_path);
        if (!sc) throw UserError("cannot write '" + scores_path + "'");
        sc << "image,kind,fused\n";
        for (std::size_t i = 0; i < covers.size(); ++i)
            sc << covers[i].filename().string() << ",cover," << cover_scores[i] << '\n';
        for (std::size_t i = 0; i < stegos.size(); ++i)
            sc << stegos[i].filename().string() << ",stego," << stego_scores[i] << '\n';
    }

    std::cout << "covers: " << covers.size() << ", stegos: " << stegos.size()
              << ", AUC = " << curve.auc << "\n";
    return 0;
}

// -------------------------------------------------------------- selftest --

#define SELF_CHECK(cond, what)                                   \
    do {                                                         \
        if (!(cond)) {                                           \
            std::cout << "FAIL " << what << "\n";                \
            return 2;                                            \
        }                                                        \
        std::cout << "ok   " << what << "\n";                    \
    } while (0)

int cmd_selftest() {
    // Keystream determinism and range.
    {
        const StegoKey k = StegoKey::from_passphrase("selftest");
        const EncryptionMask m1 = derive_mask(k, 3, 16, 16);
        const EncryptionMask m2 = derive_mask(k, 3, 16, 16);
        bool in_range = true;
        for (double v : m1.data) in_range &= (v >= -1.0 && v <= 1.0);
        SELF_CHECK(m1.data == m2.data && in_range, "keystream mask determinism/range");
    }
    // Quantizer endpoints and round-trip bound.
    {
        ImageTensor t(1, 1, 3);
        t.data = {0.0, 0.5, 1.0};
        const QuantizedImage q = quantize(t);
        SELF_CHECK(q.data[0] == 0 && q.data[1] == 128 && q.data[2] == 255,
                   "quantizer endpoints");
    }
    // Decoder forward vs direct convolution at one pixel.
    {
        const StegoKey seed = StegoKey::from_passphrase("selftest-decoder");
        const FixedDecoder dec = FixedDecoder::build_seeded(seed, 1);
        ImageTensor img(3, 8, 8);
        Xoshiro256ss rng(seed, Xoshiro256ss::Domain::message);
        for (double& v : img.data) v = rng.next_unit();
        // Gradient against central finite differences on a BCE loss.
        const MessageTensor msg = random_message(seed, 1, 8, 8);
        auto loss = [&](const ImageTensor& x) {
            return bce_value(dec.forward(x), msg);
        };
        auto [v0, dl] = bce_with_logits(dec.forward(img), msg);
        LogitTensor lg(1, 8, 8);
        lg.data = dl;
        const ImageTensor analytic = dec.input_gradient(img, lg);
        // Activation sign pattern; probes that cross a LeakyReLU kink are
        // outside the smoothness assumption of central differences.
        const auto pattern = [&](const ImageTensor& x) {
            FixedDecoder::Tape t;
            dec.forward(x, t);
            std::vector<bool> signs;
            for (std::size_t l = 1; l < t.acts.size(); ++l)
                for (double a : t.acts[l]) signs.push_back(a > 0.0);
            return signs;
        };
        double max_rel = 0.0;
        const double h = 1e-3;
        for (std::size_t i = 0; i < img.data.size(); i += 17) {
            ImageTensor p = img, m = img;
            p.data[i] += h;
            m.data[i] -= h;
            if (pattern(p) != pattern(m)) continue;
            const double fd = (loss(p) - loss(m)) / (2.0 * h);
            const double denom = std::max({std::abs(fd), std::abs(analytic.data[i]), 1e-8});
            max_rel = std::max(max_rel, std::abs(fd - analytic.data[i]) / denom);
        }
        SELF_CHECK(max_rel < 1e-4, "decoder input gradient vs finite differences");
    }
    // L-BFGS on a convex quadratic.
    {
        std::vector<double> center(12);
        for (std::size_t i = 0; i < center.size(); ++i) center[i] = 0.1 * i - 0.4;
        auto obj = make_objective([&](const std::vector<double>& x, std::vector<double>& g) {
            g.assign(x.size(), 0.0);
            double f = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                f += (x[i] - center[i]) * (x[i] - center[i]);
                g[i] = 2.0 * (x[i] - center[i]);
            }
            return f;
        });
        const std::vector<double> sol =
            lbfgs_minimize(obj, std::vector<double>(12, 0.0), 50, 1.0);
        double err = 0.0;
        for (std::size_t i = 0; i < sol.size(); ++i)
            err = std::max(err, std::abs(sol[i] - center[i]));
        SELF_CHECK(err < 1e-8, "lbfgs convex quadratic");
    }
    // PNG round-trip through a temp file.
    {
        const fs::path tmp = fs::temp_directory_path() / "kfnns_selftest.png";
        QuantizedImage img(3, 5, 7);
        for (std::size_t i = 0; i < img.data.size(); ++i)
            img.data[i] = static_cast<std::uint8_t>((37 * i) % 256);
        save_png(img, tmp.string());
        const QuantizedImage back = load_png_quantized(tmp.string());
        fs::remove(tmp);
        SELF_CHECK(back == img, "png byte round-trip");
    }
    std::cout << "selftest passed\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"key-based fixed-network image steganography"};
    app.require_subcommand(1);

    // Shared option state; each subcommand binds what it needs.
    RunConfig rc;
    std::string config_path, save_config, preset;
    std::string stego_path, out_path, covers_dir, stegos_dir, csv_path;
    std::string gnuplot_path, scores_path, raw_path;
    bool framed = false;
    int jobs = static_cast<int>(std::thread::hardware_concurrency());
    bool no_two_stage = false, no_iter_quant = false, no_cost = false,
         no_early_exit = false;

    const auto add_common = [&](CLI::App* cmd, bool with_embed_params) {
        cmd->add_option("--key", rc.key_hex, "64-hex stego key");
        cmd->add_option("--passphrase", rc.passphrase, "passphrase hashed to the key");
        cmd->add_option("--model-seed", rc.model_seed,
                        "decoder seed (64-hex or passphrase)");
        cmd->add_option("--weights", rc.weights_path, "decoder weight file (KFNN1)");
        cmd->add_option("--bpp", rc.bpp, "payload depth D (bits per pixel)")
            ->check(CLI::PositiveNumber);
        if (!with_embed_params) return;
        cmd->add_option("--config", config_path, "config file with key = value lines");
        cmd->add_option("--preset", preset, "'paper' restores the reference defaults");
        cmd->add_option("--alpha", rc.embed.alpha, "optimizer step size");
        cmd->add_option("--epochs", rc.embed.epochs, "optimization epochs E");
        cmd->add_option("--st1", rc.embed.st1, "stage-1 steps per epoch");
        cmd->add_option("--st2", rc.embed.st2, "stage-2 steps per epoch");
        cmd->add_option("--lambda-d", rc.embed.weights.lambda_d, "distortion weight");
        cmd->add_option("--lambda-1", rc.embed.weights.lambda_1, "correct-key weight");
        cmd->add_option("--lambda-2", rc.embed.weights.lambda_2, "no-key weight");
        cmd->add_option("--lambda-3", rc.embed.weights.lambda_3, "wrong-key weight");
        cmd->add_option("--n-wrong", rc.embed.n_wrong, "wrong keys in the type-3 loss");
        cmd->add_option("--lbfgs-memory", rc.embed.lbfgs_memory, "L-BFGS history size");
        cmd->add_flag("--no-two-stage", no_two_stage, "single-stage update");
        cmd->add_flag("--no-iterative-quantize", no_iter_quant,
                      "quantize only after the final epoch");
        cmd->add_flag("--no-cost", no_cost, "plain L2 distortion instead of the cost map");
        cmd->add_flag("--no-early-exit", no_early_exit, "always run all E epochs");
        cmd->add_option("--message-seed", rc.message_seed,
                        "seed for random payload bits");
    };

    CLI::App* embed_cmd = app.add_subcommand("embed", "embed a payload into a cover");
    embed_cmd->add_option("--cover", rc.cover, "cover PNG")->required();
    embed_cmd->add_option("--out", rc.out, "output stego PNG")->required();
    embed_cmd->add_option("--payload", rc.payload, "'random' or 'file'");
    embed_cmd->add_option("--payload-file", rc.payload_file, "payload bytes for --payload file");
    embed_cmd->add_option("--trace", rc.trace_path, "per-iteration loss CSV");
    embed_cmd->add_option("--save-config", save_config, "write the merged config");
    add_common(embed_cmd, true);

    CLI::App* extract_cmd = app.add_subcommand("extract", "decode a stego image");
    extract_cmd->add_option("--stego", stego_path, "stego PNG")->required();
    extract_cmd->add_option("--out", out_path, "output bit/byte file")->required();
    extract_cmd->add_flag("--framed", framed, "parse the 32-bit length framing");
    add_common(extract_cmd, false);

    CLI::App* eval_cmd = app.add_subcommand("evaluate", "batch embed over a directory");
    eval_cmd->add_option("--covers", covers_dir, "directory of cover PNGs")->required();
    eval_cmd->add_option("--out", csv_path, "output CSV")->required();
    eval_cmd->add_option("--jobs", jobs, "parallel jobs");
    add_common(eval_cmd, true);

    CLI::App* cost_cmd = app.add_subcommand("cost-map", "perturbation cost of a cover");
    std::string cost_cover, cost_png;
    cost_cmd->add_option("--cover", cost_cover, "cover PNG")->required();
    cost_cmd->add_option("--out-png", cost_png, "normalized grayscale visualization");
    cost_cmd->add_option("--out-raw", raw_path, "raw little-endian doubles");

    CLI::App* steg_cmd = app.add_subcommand("steganalyze", "ROC of fused LSB detectors");
    steg_cmd->add_option("--covers", covers_dir, "directory of cover PNGs")->required();
    steg_cmd->add_option("--stegos", stegos_dir, "directory of stego PNGs")->required();
    steg_cmd->add_option("--out", csv_path, "ROC CSV")->required();
    steg_cmd->add_option("--gnuplot", gnuplot_path, "gnuplot-friendly ROC data");
    steg_cmd->add_option("--scores", scores_path, "per-image fused scores CSV");
    steg_cmd->add_option("--jobs", jobs, "parallel jobs");

    app.add_subcommand("selftest", "run the built-in oracle checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        CLI::App* cmd = app.get_subcommands().front();
        const std::string name = cmd->get_name();

        if (name == "embed" || name == "evaluate") {
            // Precedence: defaults < config file < preset < explicit flags.
            if (!config_path.empty()) {
                RunConfig file_cfg = RunConfig::load(config_path);
                // Re-apply paths/flags given on the command line on top.
                const RunConfig cli_cfg = rc;
                rc = file_cfg;
                const auto keep = [&](const CLI::App* c, const std::string& opt, auto member) {
                    if (c->count(opt) > 0) rc.*member = cli_cfg.*member;
                };
                keep(cmd, "--key", &RunConfig::key_hex);
                keep(cmd, "--passphrase", &RunConfig::passphrase);
                keep(cmd, "--model-seed", &RunConfig::model_seed);
                keep(cmd, "--weights", &RunConfig::weights_path);
                keep(cmd, "--bpp", &RunConfig::bpp);
                keep(cmd, "--message-seed", &RunConfig::message_seed);
                if (cmd->count("--cover")) rc.cover = cli_cfg.cover;
                if (cmd->count("--out")) rc.out = cli_cfg.out;
                if (cmd->count("--payload")) rc.payload = cli_cfg.payload;
                if (cmd->count("--payload-file")) rc.payload_file = cli_cfg.payload_file;
                if (cmd->count("--trace")) rc.trace_path = cli_cfg.trace_path;
                if (cmd->count("--alpha")) rc.embed.alpha = cli_cfg.embed.alpha;
                if (cmd->count("--epochs")) rc.embed.epochs = cli_cfg.embed.epochs;
                if (cmd->count("--st1")) rc.embed.st1 = cli_cfg.embed.st1;
                if (cmd->count("--st2")) rc.embed.st2 = cli_cfg.embed.st2;
                if (cmd->count("--lambda-d")) rc.embed.weights.lambda_d = cli_cfg.embed.weights.lambda_d;
                if (cmd->count("--lambda-1")) rc.embed.weights.lambda_1 = cli_cfg.embed.weights.lambda_1;
                if (cmd->count("--lambda-2")) rc.embed.weights.lambda_2 = cli_cfg.embed.weights.lambda_2;
                if (cmd->count("--lambda-3")) rc.embed.weights.lambda_3 = cli_cfg.embed.weights.lambda_3;
                if (cmd->count("--n-wrong")) rc.embed.n_wrong = cli_cfg.embed.n_wrong;
                if (cmd->count("--lbfgs-memory")) rc.embed.lbfgs_memory = cli_cfg.embed.lbfgs_memory;
            }
            if (preset == "paper") {
                const EmbedConfig defaults;
                rc.embed.alpha = defaults.alpha;
                rc.embed.epochs = defaults.epochs;
                rc.embed.st1 = defaults.st1;
                rc.embed.st2 = defaults.st2;
                rc.embed.weights = defaults.weights;
                rc.embed.n_wrong = defaults.n_wrong;
                rc.embed.lbfgs_memory = defaults.lbfgs_memory;
                rc.embed.two_stage = defaults.two_stage;
                rc.embed.iterative_quantize = defaults.iterative_quantize;
                rc.embed.use_cost = defaults.use_cost;
            } else if (!preset.empty()) {
                throw UserError("unknown preset '" + preset + "'");
            }
            if (no_two_stage) rc.embed.two_stage = false;
            if (no_iter_quant) rc.embed.iterative_quantize = false;
            if (no_cost) rc.embed.use_cost = false;
            if (no_early_exit) rc.embed.early_exit = false;
        }

        if (name == "embed") return cmd_embed(rc, save_config);
        if (name == "extract")
            return cmd_extract(rc, stego_path, out_path,
                               extract_cmd->count("--key") > 0 ||
                                   extract_cmd->count("--passphrase") > 0 ||
                                   std::getenv("KFNNS_KEY") != nullptr,
                               framed);
        if (name == "evaluate") return cmd_evaluate(rc, covers_dir, csv_path, jobs);
        if (name == "cost-map") return cmd_costmap(cost_cover, cost_png, raw_path);
        if (name == "steganalyze")
            return cmd_steganalyze(covers_dir, stegos_dir, csv_path, gnuplot_path,
                                   scores_path, jobs);
        if (name == "selftest") return cmd_selftest();
        return 1;
    } catch (const UserError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}
