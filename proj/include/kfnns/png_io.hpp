#pragma once

#include <string>

#include "kfnns/image.hpp"

namespace kfnns {

// Reads an 8-bit RGB or RGBA PNG (alpha dropped). Grayscale and 16-bit
// files are rejected with a UserError describing why.
QuantizedImage load_png_quantized(const std::string& path);

// Same file contract, scaled to [0,1] as byte/255.
ImageTensor load_png(const std::string& path);

// Writes an 8-bit RGB PNG whose decoded bytes equal img.data exactly.
void save_png(const QuantizedImage& img, const std::string& path);

}  // namespace kfnns
