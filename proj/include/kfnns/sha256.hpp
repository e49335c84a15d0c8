#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace kfnns {

std::array<std::uint8_t, 32> sha256(const void* data, std::size_t len);
std::array<std::uint8_t, 32> sha256(std::string_view s);

}  // namespace kfnns
