#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "a11y/raster.hpp"

namespace a11y {

class ImageIoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Raster read_png(const std::filesystem::path& path);
Raster decode_png(std::span<const std::uint8_t> bytes);
void write_png(const Raster& img, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_png(const Raster& img);

std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(const std::string& text);

}  // namespace a11y
