#include "a11y/png_io.hpp"

#include <png.h>

#include <openssl/evp.h>

#include <cstring>
#include <fstream>
#include <memory>

namespace a11y {

namespace {

struct PngImage {
    png_image image{};
    PngImage() {
        image.version = PNG_IMAGE_VERSION;
    }
    ~PngImage() { png_image_free(&image); }
    PngImage(const PngImage&) = delete;
    PngImage& operator=(const PngImage&) = delete;
};

Raster finish_read(PngImage& png, const std::string& what) {
    png.image.format = PNG_FORMAT_RGB;
    Raster out(static_cast<int>(png.image.width), static_cast<int>(png.image.height));
    if (!png_image_finish_read(&png.image, nullptr, out.bytes().data(), 0, nullptr))
        throw ImageIoError(what + ": " + png.image.message);
    return out;
}

}  // namespace

Raster read_png(const std::filesystem::path& path) {
    PngImage png;
    if (!png_image_begin_read_from_file(&png.image, path.string().c_str()))
        throw ImageIoError("cannot read PNG " + path.string() + ": " + png.image.message);
    return finish_read(png, "cannot decode PNG " + path.string());
}

Raster decode_png(std::span<const std::uint8_t> bytes) {
    PngImage png;
    if (!png_image_begin_read_from_memory(&png.image, bytes.data(), bytes.size()))
        throw ImageIoError(std::string("cannot decode PNG buffer: ") + png.image.message);
    return finish_read(png, "cannot decode PNG buffer");
}

std::vector<std::uint8_t> encode_png(const Raster& img) {
    PngImage png;
    png.image.width = static_cast<png_uint_32>(img.width());
    png.image.height = static_cast<png_uint_32>(img.height());
    png.image.format = PNG_FORMAT_RGB;
    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&png.image, nullptr, &size, 0, img.bytes().data(), 0, nullptr))
        throw ImageIoError(std::string("cannot size PNG: ") + png.image.message);
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&png.image, out.data(), &size, 0, img.bytes().data(), 0, nullptr))
        throw ImageIoError(std::string("cannot encode PNG: ") + png.image.message);
    out.resize(size);
    return out;
}

void write_png(const Raster& img, const std::filesystem::path& path) {
    const auto bytes = encode_png(img);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ImageIoError("cannot open " + path.string() + " for writing");
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw ImageIoError("cannot write " + path.string());
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr))
        throw std::runtime_error("sha256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
    std::string out(4 * ((bytes.size() + 2) / 3) + 1, '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                  static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
    if (text.size() % 4 != 0) throw std::runtime_error("base64: length not a multiple of 4");
    std::vector<std::uint8_t> out(3 * text.size() / 4 + 1);
    const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                  static_cast<int>(text.size()));
    if (n < 0) throw std::runtime_error("base64: invalid input");
    std::size_t len = static_cast<std::size_t>(n);
    // EVP_DecodeBlock keeps the zero bytes produced by '=' padding.
    if (!text.empty() && text.back() == '=') --len;
    if (text.size() >= 2 && text[text.size() - 2] == '=') --len;
    out.resize(len);
    return out;
}

}  // namespace a11y
