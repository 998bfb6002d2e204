// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace oodeval {

/// Encodes interleaved 8-bit RGB rows as a non-interlaced PNG. Identical
/// input always yields identical bytes.
std::vector<uint8_t> encode_png_rgb8(const std::vector<uint8_t>& rgb, int width,
                                     int height);

struct DecodedPng {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> rgb;  // 3 * width * height
};

/// Decodes any readable PNG to 8-bit RGB (palette expanded, 16-bit
/// stripped, grayscale promoted, alpha dropped). DataError otherwise.
DecodedPng decode_png_rgb8(const std::string& path);

void write_file(const std::string& path, const std::vector<uint8_t>& bytes);
std::vector<uint8_t> read_file(const std::string& path);

std::string sha256_hex(const std::vector<uint8_t>& bytes);

}  // namespace oodeval
