// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

namespace oodeval {

/// Row-major RGB image with real-valued channels. Recipes keep values in
/// [0,1] via a final clip before quantization.
struct ImageBuffer {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;  // 3 * width * height, interleaved RGB

  static ImageBuffer filled(int width, int height, double value) {
    ImageBuffer img;
    img.width = width;
    img.height = height;
    img.pixels.assign(static_cast<std::size_t>(3) * width * height, value);
    return img;
  }

  double& at(int x, int y, int channel) {
    return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + channel];
  }
  double at(int x, int y, int channel) const {
    return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + channel];
  }
};

/// Separable Gaussian filter with standard deviation sigma, kernel
/// truncated at radius ceil(4*sigma), reflect boundary handling (edge
/// sample duplicated, periodic extension for radii beyond the image).
/// Horizontal pass first, then vertical.
void gaussian_blur(ImageBuffer& img, double sigma);

void clip01(ImageBuffer& img);

ImageBuffer center_crop_square(const ImageBuffer& img);

/// Bilinear resize with pixel-center alignment, edges clamped.
ImageBuffer resize_bilinear(const ImageBuffer& img, int width, int height);

/// Channel byte = round(255*v) half away from zero, clamped to [0,255].
std::vector<uint8_t> quantize_rgb8(const ImageBuffer& img);

}  // namespace oodeval
