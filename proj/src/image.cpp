// SPDX-License-Identifier: Apache-2.0
#include "oodeval/image.hpp"

#include <algorithm>
#include <cmath>

namespace oodeval {

namespace {

/// Fold an out-of-range index into [0, n) by repeated mirroring with edge
/// duplication: ..., 2, 1, 0 | 0, 1, ..., n-1 | n-1, n-2, ...
int reflect_index(long i, long n) {
  if (n == 1) return 0;
  const long period = 2 * n;
  long m = i % period;
  if (m < 0) m += period;
  return static_cast<int>(m < n ? m : period - 1 - m);
}

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(4.0 * sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double total = 0.0;
  for (int t = -radius; t <= radius; ++t) {
    const double w = std::exp(-0.5 * (t / sigma) * (t / sigma));
    kernel[static_cast<std::size_t>(t + radius)] = w;
    total += w;
  }
  for (double& w : kernel) w /= total;
  return kernel;
}

/// 1-D convolution of a length-n line, writing to stride-aware output.
void convolve_line(const double* src, int n, int stride,
                   const std::vector<double>& kernel,
                   std::vector<double>& padded, double* dst) {
  const int radius = (static_cast<int>(kernel.size()) - 1) / 2;
  padded.resize(static_cast<std::size_t>(n + 2 * radius));
  for (int i = -radius; i < n + radius; ++i)
    padded[static_cast<std::size_t>(i + radius)] =
        src[static_cast<std::size_t>(reflect_index(i, n)) * stride];
  for (int x = 0; x < n; ++x) {
    double acc = 0.0;
    const double* window = padded.data() + x;
    for (std::size_t t = 0; t < kernel.size(); ++t) acc += kernel[t] * window[t];
    dst[static_cast<std::size_t>(x) * stride] = acc;
  }
}

}  // namespace

void gaussian_blur(ImageBuffer& img, double sigma) {
  const std::vector<double> kernel = gaussian_kernel(sigma);
  const int w = img.width, h = img.height;
  std::vector<double> tmp(img.pixels.size());
  std::vector<double> padded;

  // horizontal pass: each (row, channel) line has stride 3
  for (int y = 0; y < h; ++y)
    for (int ch = 0; ch < 3; ++ch) {
      const std::size_t base = (static_cast<std::size_t>(y) * w) * 3 + ch;
      convolve_line(img.pixels.data() + base, w, 3, kernel, padded,
                    tmp.data() + base);
    }
  // vertical pass: each (column, channel) line has stride 3*w
  for (int x = 0; x < w; ++x)
    for (int ch = 0; ch < 3; ++ch) {
      const std::size_t base = static_cast<std::size_t>(x) * 3 + ch;
      convolve_line(tmp.data() + base, h, 3 * w, kernel, padded,
                    img.pixels.data() + base);
    }
}

void clip01(ImageBuffer& img) {
  for (double& v : img.pixels) v = std::clamp(v, 0.0, 1.0);
}

ImageBuffer center_crop_square(const ImageBuffer& img) {
  const int side = std::min(img.width, img.height);
  const int x0 = (img.width - side) / 2;
  const int y0 = (img.height - side) / 2;
  ImageBuffer out;
  out.width = side;
  out.height = side;
  out.pixels.resize(static_cast<std::size_t>(3) * side * side);
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x)
      for (int ch = 0; ch < 3; ++ch)
        out.at(x, y, ch) = img.at(x0 + x, y0 + y, ch);
  return out;
}

ImageBuffer resize_bilinear(const ImageBuffer& img, int width, int height) {
  ImageBuffer out;
  out.width = width;
  out.height = height;
  out.pixels.resize(static_cast<std::size_t>(3) * width * height);
  const double sx = static_cast<double>(img.width) / width;
  const double sy = static_cast<double>(img.height) / height;
  for (int y = 0; y < height; ++y) {
    double fy = (y + 0.5) * sy - 0.5;
    fy = std::clamp(fy, 0.0, static_cast<double>(img.height - 1));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double wy = fy - y0;
    for (int x = 0; x < width; ++x) {
      double fx = (x + 0.5) * sx - 0.5;
      fx = std::clamp(fx, 0.0, static_cast<double>(img.width - 1));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, img.width - 1);
      const double wx = fx - x0;
      for (int ch = 0; ch < 3; ++ch) {
        const double top =
            img.at(x0, y0, ch) * (1.0 - wx) + img.at(x1, y0, ch) * wx;
        const double bottom =
            img.at(x0, y1, ch) * (1.0 - wx) + img.at(x1, y1, ch) * wx;
        out.at(x, y, ch) = top * (1.0 - wy) + bottom * wy;
      }
    }
  }
  return out;
}

std::vector<uint8_t> quantize_rgb8(const ImageBuffer& img) {
  std::vector<uint8_t> bytes(img.pixels.size());
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    const long v = std::lround(255.0 * img.pixels[i]);
    bytes[i] = static_cast<uint8_t>(std::clamp(v, 0L, 255L));
  }
  return bytes;
}

}  // namespace oodeval
