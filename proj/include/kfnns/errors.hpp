#pragma once

#include <stdexcept>
#include <string>

namespace kfnns {

// Problems caused by the caller's input (bad file, bad flag value).
// The CLI maps these to exit code 1; anything else is exit code 2.
struct UserError : std::runtime_error {
    explicit UserError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace kfnns
