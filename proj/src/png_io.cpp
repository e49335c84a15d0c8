#include "kfnns/png_io.hpp"

#include <png.h>

#include <cstring>
#include <vector>

#include "kfnns/errors.hpp"

namespace kfnns {

QuantizedImage load_png_quantized(const std::string& path) {
    png_image png;
    std::memset(&png, 0, sizeof(png));
    png.version = PNG_IMAGE_VERSION;

    if (!png_image_begin_read_from_file(&png, path.c_str())) {
        std::string msg = "cannot read PNG '" + path + "': " + png.message;
        png_image_free(&png);
        throw UserError(msg);
    }
    if (png.format & PNG_FORMAT_FLAG_LINEAR) {
        png_image_free(&png);
        throw UserError("'" + path + "': 16-bit PNG not supported, expected 8-bit RGB");
    }
    if (!(png.format & PNG_FORMAT_FLAG_COLOR) &&
        !(png.format & PNG_FORMAT_FLAG_COLORMAP)) {
        png_image_free(&png);
        throw UserError("'" + path + "': grayscale PNG not supported, expected RGB");
    }

    // Request RGBA and drop the alpha plane ourselves; asking libpng for RGB
    // would composite alpha against a background instead.
    png.format = PNG_FORMAT_RGBA;
    const int w = static_cast<int>(png.width);
    const int h = static_cast<int>(png.height);
    std::vector<std::uint8_t> row_data(static_cast<std::size_t>(w) * h * 4);
    if (!png_image_finish_read(&png, nullptr, row_data.data(), 0, nullptr)) {
        std::string msg = "cannot decode PNG '" + path + "': " + png.message;
        png_image_free(&png);
        throw UserError(msg);
    }

    QuantizedImage img(3, h, w);
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    for (int y = 0; y < h; ++y) {
        const std::uint8_t* row = row_data.data() + static_cast<std::size_t>(y) * w * 4;
        for (int x = 0; x < w; ++x) {
            const std::size_t p = static_cast<std::size_t>(y) * w + x;
            img.data[p] = row[x * 4 + 0];
            img.data[plane + p] = row[x * 4 + 1];
            img.data[2 * plane + p] = row[x * 4 + 2];
        }
    }
    return img;
}

ImageTensor load_png(const std::string& path) {
    return dequantize(load_png_quantized(path));
}

void save_png(const QuantizedImage& img, const std::string& path) {
    if (img.channels != 3 || img.height <= 0 || img.width <= 0)
        throw UserError("save_png: expected a 3-channel image");

    const int w = img.width;
    const int h = img.height;
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    std::vector<std::uint8_t> row_data(plane * 3);
    for (int y = 0; y < h; ++y) {
        std::uint8_t* row = row_data.data() + static_cast<std::size_t>(y) * w * 3;
        for (int x = 0; x < w; ++x) {
            const std::size_t p = static_cast<std::size_t>(y) * w + x;
            row[x * 3 + 0] = img.data[p];
            row[x * 3 + 1] = img.data[plane + p];
            row[x * 3 + 2] = img.data[2 * plane + p];
        }
    }

    png_image png;
    std::memset(&png, 0, sizeof(png));
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(w);
    png.height = static_cast<png_uint_32>(h);
    png.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&png, path.c_str(), 0, row_data.data(), 0, nullptr)) {
        std::string msg = "cannot write PNG '" + path + "': " + png.message;
        png_image_free(&png);
        throw UserError(msg);
    }
}

}  // namespace kfnns
