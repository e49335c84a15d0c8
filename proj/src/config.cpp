#include "kfnns/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "kfnns/errors.hpp"

namespace kfnns {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw UserError("config: bad numeric value '" + v + "' for " + key);
    }
}

int parse_int(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const int i = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw UserError("config: bad integer value '" + v + "' for " + key);
    }
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw UserError("config: bad boolean value '" + v + "' for " + key);
}

bool is_hex64(const std::string& s) {
    if (s.size() != 64) return false;
    for (char c : s)
        if (!std::isxdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

}  // namespace

StegoKey key_from_string(const std::string& s) {
    return is_hex64(s) ? StegoKey::from_hex(s) : StegoKey::from_passphrase(s);
}

std::string RunConfig::serialize() const {
    std::ostringstream os;
    os << "alpha = " << fmt_double(embed.alpha) << '\n'
       << "epochs = " << embed.epochs << '\n'
       << "st1 = " << embed.st1 << '\n'
       << "st2 = " << embed.st2 << '\n'
       << "lambda_d = " << fmt_double(embed.weights.lambda_d) << '\n'
       << "lambda_1 = " << fmt_double(embed.weights.lambda_1) << '\n'
       << "lambda_2 = " << fmt_double(embed.weights.lambda_2) << '\n'
       << "lambda_3 = " << fmt_double(embed.weights.lambda_3) << '\n'
       << "n_wrong = " << embed.n_wrong << '\n'
       << "lbfgs_memory = " << embed.lbfgs_memory << '\n'
       << "two_stage = " << (embed.two_stage ? "true" : "false") << '\n'
       << "iterative_quantize = " << (embed.iterative_quantize ? "true" : "false") << '\n'
       << "use_cost = " << (embed.use_cost ? "true" : "false") << '\n'
       << "early_exit = " << (embed.early_exit ? "true" : "false") << '\n'
       << "bpp = " << bpp << '\n'
       << "key_hex = " << key_hex << '\n'
       << "passphrase = " << passphrase << '\n'
       << "model_seed = " << model_seed << '\n'
       << "weights_path = " << weights_path << '\n'
       << "payload = " << payload << '\n'
       << "payload_file = " << payload_file << '\n'
       << "message_seed = " << message_seed << '\n'
       << "cover = " << cover << '\n'
       << "out = " << out << '\n'
       << "trace = " << trace_path << '\n';
    return os.str();
}

RunConfig RunConfig::parse(const std::string& text) {
    RunConfig cfg;
    const std::map<std::string, std::function<void(const std::string&)>> setters = {
        {"alpha", [&](const std::string& v) { cfg.embed.alpha = parse_double(v, "alpha"); }},
        {"epochs", [&](const std::string& v) { cfg.embed.epochs = parse_int(v, "epochs"); }},
        {"st1", [&](const std::string& v) { cfg.embed.st1 = parse_int(v, "st1"); }},
        {"st2", [&](const std::string& v) { cfg.embed.st2 = parse_int(v, "st2"); }},
        {"lambda_d", [&](const std::string& v) { cfg.embed.weights.lambda_d = parse_double(v, "lambda_d"); }},
        {"lambda_1", [&](const std::string& v) { cfg.embed.weights.lambda_1 = parse_double(v, "lambda_1"); }},
        {"lambda_2", [&](const std::string& v) { cfg.embed.weights.lambda_2 = parse_double(v, "lambda_2"); }},
        {"lambda_3", [&](const std::string& v) { cfg.embed.weights.lambda_3 = parse_double(v, "lambda_3"); }},
        {"n_wrong", [&](const std::string& v) { cfg.embed.n_wrong = parse_int(v, "n_wrong"); }},
        {"lbfgs_memory", [&](const std::string& v) { cfg.embed.lbfgs_memory = parse_int(v, "lbfgs_memory"); }},
        {"two_stage", [&](const std::string& v) { cfg.embed.two_stage = parse_bool(v, "two_stage"); }},
        {"iterative_quantize", [&](const std::string& v) { cfg.embed.iterative_quantize = parse_bool(v, "iterative_quantize"); }},
        {"use_cost", [&](const std::string& v) { cfg.embed.use_cost = parse_bool(v, "use_cost"); }},
        {"early_exit", [&](const std::string& v) { cfg.embed.early_exit = parse_bool(v, "early_exit"); }},
        {"bpp", [&](const std::string& v) { cfg.bpp = parse_int(v, "bpp"); }},
        {"key_hex", [&](const std::string& v) { cfg.key_hex = v; }},
        {"passphrase", [&](const std::string& v) { cfg.passphrase = v; }},
        {"model_seed", [&](const std::string& v) { cfg.model_seed = v; }},
        {"weights_path", [&](const std::string& v) { cfg.weights_path = v; }},
        {"payload", [&](const std::string& v) { cfg.payload = v; }},
        {"payload_file", [&](const std::string& v) { cfg.payload_file = v; }},
        {"message_seed", [&](const std::string& v) { cfg.message_seed = v; }},
        {"cover", [&](const std::string& v) { cfg.cover = v; }},
        {"out", [&](const std::string& v) { cfg.out = v; }},
        {"trace", [&](const std::string& v) { cfg.trace_path = v; }},
    };

    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw UserError("config line " + std::to_string(lineno) +
                            ": expected 'key = value'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end())
            throw UserError("config line " + std::to_string(lineno) +
                            ": unknown key '" + key + "'");
        it->second(value);
    }
    return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw UserError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse(buf.str());
}

void RunConfig::save(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw UserError("cannot write config file '" + path + "'");
    os << serialize();
}

StegoKey RunConfig::resolve_key(bool required) const {
    if (!key_hex.empty()) return StegoKey::from_hex(key_hex);
    if (!passphrase.empty()) return StegoKey::from_passphrase(passphrase);
    if (const char* env = std::getenv("KFNNS_KEY"); env && *env)
        return key_from_string(env);
    if (required)
        throw UserError("no key given: use --key, --passphrase or $KFNNS_KEY");
    return StegoKey::null_key();
}

StegoKey RunConfig::resolve_model_seed() const {
    return key_from_string(model_seed);
}

StegoKey RunConfig::resolve_message_seed() const {
    return key_from_string(message_seed);
}

}  // namespace kfnns
