#pragma once

#include <string>

#include "kfnns/embedder.hpp"
#include "kfnns/keystream.hpp"

namespace kfnns {

// Merged run settings: embedding parameters plus key, model, payload and
// path sources. Serializes to a plain `key = value` config file and parses
// back losslessly.
struct RunConfig {
    EmbedConfig embed;
    int bpp = 1;

    // Key source: 64-hex key, or passphrase, or the KFNNS_KEY environment
    // variable (hex or passphrase, decided by shape).
    std::string key_hex;
    std::string passphrase;

    // Decoder source: a seed string (64-hex, otherwise hashed as a
    // passphrase), or a weight file which takes precedence.
    std::string model_seed = "kfnns.default-decoder.v1";
    std::string weights_path;

    // Payload: "random" (seeded bits) or "file" (framed bytes).
    std::string payload = "random";
    std::string payload_file;
    std::string message_seed = "kfnns.default-message.v1";

    std::string cover;
    std::string out;
    std::string trace_path;

    bool operator==(const RunConfig&) const = default;

    std::string serialize() const;
    static RunConfig parse(const std::string& text);  // UserError on unknown keys
    static RunConfig load(const std::string& path);
    void save(const std::string& path) const;

    // Resolution helpers. resolve_key falls back to $KFNNS_KEY and throws
    // a UserError when required and absent.
    StegoKey resolve_key(bool required = true) const;
    StegoKey resolve_model_seed() const;
    StegoKey resolve_message_seed() const;
};

// 64 hex digits -> from_hex, anything else -> passphrase hash.
StegoKey key_from_string(const std::string& s);

}  // namespace kfnns
