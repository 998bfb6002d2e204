// SPDX-License-Identifier: Apache-2.0
#include "oodeval/unitgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "oodeval/errors.hpp"
#include "oodeval/numerics.hpp"
#include "oodeval/parallel.hpp"
#include "oodeval/png_io.hpp"
#include "oodeval/rng.hpp"

namespace oodeval {

namespace {

namespace fs = std::filesystem;

constexpr double kGaussianSigmas[] = {0.05, 0.075, 0.1, 0.15, 0.2, 0.3, 0.5};
constexpr int kStripeCounts[] = {4, 5, 7, 10, 15, 20};
constexpr double kSmoothSigmas[] = {10, 15, 25, 40, 60, 85};
constexpr double kSmoothPermSigmas[] = {1, 1.5, 2, 3, 4, 6, 8};
constexpr double kBlobSigmas[] = {1.5, 2, 2.5, 3, 3.5, 4};

template <typename T, std::size_t N>
T choice(Xoshiro256pp& rng, const T (&options)[N]) {
  return options[rng.bounded(N)];
}

void fill_uniform(ImageBuffer& img, Xoshiro256pp& rng) {
  for (double& v : img.pixels) v = rng.uniform01();
}

void fill_bernoulli(ImageBuffer& img, Xoshiro256pp& rng, double p_one) {
  for (double& v : img.pixels) v = rng.bernoulli(p_one) ? 1.0 : 0.0;
}

/// Stripe k of S over a length-L axis covers [floor(k*L/S), floor((k+1)*L/S)).
void paint_stripes(ImageBuffer& img, bool horizontal,
                   const std::vector<std::array<double, 3>>& colors) {
  const int stripes = static_cast<int>(colors.size());
  const int length = horizontal ? img.height : img.width;
  std::vector<int> stripe_index(static_cast<std::size_t>(length));
  int k = 0;
  for (int c = 0; c < length; ++c) {
    while (k + 1 < stripes && c >= ((k + 1) * length) / stripes) ++k;
    stripe_index[static_cast<std::size_t>(c)] = k;
  }
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      const auto& color =
          colors[static_cast<std::size_t>(stripe_index[horizontal ? y : x])];
      for (int ch = 0; ch < 3; ++ch) img.at(x, y, ch) = color[ch];
    }
}

std::array<double, 3> random_color(Xoshiro256pp& rng) {
  std::array<double, 3> c;
  for (double& ch : c) ch = rng.uniform01();
  return c;
}

std::array<double, 3> random_primary_color(Xoshiro256pp& rng) {
  std::array<double, 3> c;
  for (double& ch : c) ch = rng.bernoulli(0.5) ? 1.0 : 0.0;
  return c;
}

void rescale_global(ImageBuffer& img) {
  const auto [lo_it, hi_it] =
      std::minmax_element(img.pixels.begin(), img.pixels.end());
  const double lo = *lo_it, hi = *hi_it;
  if (hi == lo) return;  // flat image; cannot occur for noise inputs
  for (double& v : img.pixels) v = (v - lo) / (hi - lo);
}

void rescale_per_channel(ImageBuffer& img) {
  for (int ch = 0; ch < 3; ++ch) {
    double lo = img.pixels[static_cast<std::size_t>(ch)], hi = lo;
    for (std::size_t i = static_cast<std::size_t>(ch); i < img.pixels.size();
         i += 3) {
      lo = std::min(lo, img.pixels[i]);
      hi = std::max(hi, img.pixels[i]);
    }
    if (hi == lo) continue;
    for (std::size_t i = static_cast<std::size_t>(ch); i < img.pixels.size();
         i += 3)
      img.pixels[i] = (img.pixels[i] - lo) / (hi - lo);
  }
}

/// Linear map sending the channel's 2.5th quantile to center-delta and the
/// 97.5th to center+delta.
void rescale_to_quantile_band(ImageBuffer& img,
                              const std::array<double, 3>& center,
                              double delta) {
  std::vector<double> values(img.pixels.size() / 3);
  for (int ch = 0; ch < 3; ++ch) {
    std::size_t n = 0;
    for (std::size_t i = static_cast<std::size_t>(ch); i < img.pixels.size();
         i += 3)
      values[n++] = img.pixels[i];
    std::sort(values.begin(), values.end());
    const double q_lo = quantile_sorted(values, 0.025);
    const double q_hi = quantile_sorted(values, 0.975);
    if (q_hi == q_lo) {
      for (std::size_t i = static_cast<std::size_t>(ch); i < img.pixels.size();
           i += 3)
        img.pixels[i] = center[ch];
      continue;
    }
    const double scale = 2.0 * delta / (q_hi - q_lo);
    for (std::size_t i = static_cast<std::size_t>(ch); i < img.pixels.size();
         i += 3)
      img.pixels[i] = (center[ch] - delta) + (img.pixels[i] - q_lo) * scale;
  }
}

ImageBuffer load_permutation_source(const RecipeSpec& spec, uint64_t index,
                                    const std::vector<std::string>& sources) {
  const DecodedPng png =
      decode_png_rgb8(sources[static_cast<std::size_t>(index % sources.size())]);
  ImageBuffer img;
  img.width = png.width;
  img.height = png.height;
  img.pixels.resize(png.rgb.size());
  for (std::size_t i = 0; i < png.rgb.size(); ++i)
    img.pixels[i] = png.rgb[i] / 255.0;
  return resize_bilinear(center_crop_square(img), spec.width, spec.height);
}

/// Fisher-Yates over whole RGB triples (no remixing of colours).
void shuffle_pixels(ImageBuffer& img, Xoshiro256pp& rng) {
  const std::size_t n = img.pixels.size() / 3;
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t j = rng.bounded(i + 1);
    for (int ch = 0; ch < 3; ++ch)
      std::swap(img.pixels[3 * i + static_cast<std::size_t>(ch)],
                img.pixels[3 * j + static_cast<std::size_t>(ch)]);
  }
}

ImageBuffer make_pixel_perm(const RecipeSpec& spec, uint64_t index,
                            const std::vector<std::string>* sources,
                            Xoshiro256pp& rng) {
  if (sources == nullptr || sources->empty())
    throw DataError("pixel permutation recipes require a source directory "
                    "with at least one PNG image");
  ImageBuffer img = load_permutation_source(spec, index, *sources);
  shuffle_pixels(img, rng);
  return img;
}

}  // namespace

const std::vector<Recipe>& all_recipes() {
  static const std::vector<Recipe> recipes = {
      Recipe::uniform,        Recipe::gaussian,
      Recipe::rademacher,     Recipe::pixel_perm,
      Recipe::black,          Recipe::white,
      Recipe::grey,           Recipe::monochrome,
      Recipe::tricolour,      Recipe::tricolour_primary,
      Recipe::hstripes,       Recipe::vstripes,
      Recipe::smooth,         Recipe::smooth_plus,
      Recipe::smooth_color,   Recipe::smooth_pixel_perm,
      Recipe::blobs};
  return recipes;
}

const char* recipe_name(Recipe r) {
  switch (r) {
    case Recipe::uniform: return "uniform";
    case Recipe::gaussian: return "gaussian";
    case Recipe::rademacher: return "rademacher";
    case Recipe::pixel_perm: return "pixel_perm";
    case Recipe::black: return "black";
    case Recipe::white: return "white";
    case Recipe::grey: return "grey";
    case Recipe::monochrome: return "monochrome";
    case Recipe::tricolour: return "tricolour";
    case Recipe::tricolour_primary: return "tricolour_primary";
    case Recipe::hstripes: return "hstripes";
    case Recipe::vstripes: return "vstripes";
    case Recipe::smooth: return "smooth";
    case Recipe::smooth_plus: return "smooth_plus";
    case Recipe::smooth_color: return "smooth_color";
    case Recipe::smooth_pixel_perm: return "smooth_pixel_perm";
    case Recipe::blobs: return "blobs";
  }
  return "?";
}

Recipe recipe_from_name(const std::string& name) {
  for (Recipe r : all_recipes())
    if (name == recipe_name(r)) return r;
  throw DataError("unknown recipe '" + name + "'");
}

bool recipe_needs_sources(Recipe r) {
  return r == Recipe::pixel_perm || r == Recipe::smooth_pixel_perm;
}

void validate_spec(const RecipeSpec& spec) {
  if (spec.width < 8 || spec.height < 8)
    throw DataError("recipe spec: width and height must be >= 8");
  if (spec.count < 1) throw DataError("recipe spec: count must be >= 1");
  if (recipe_needs_sources(spec.recipe) && spec.source_dir.empty())
    throw DataError(std::string("recipe '") + recipe_name(spec.recipe) +
                    "' requires --source-dir");
}

std::vector<std::string> list_source_images(const std::string& dir) {
  if (!fs::is_directory(dir))
    throw DataError("source directory not found: " + dir);
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".png")
      files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());
  return files;
}

ImageBuffer generate_image(const RecipeSpec& spec, uint64_t index,
                           const std::vector<std::string>* sources) {
  Xoshiro256pp rng(splitmix64(spec.base_seed ^ index));
  ImageBuffer img = ImageBuffer::filled(spec.width, spec.height, 0.0);

  switch (spec.recipe) {
    case Recipe::uniform:
      fill_uniform(img, rng);
      break;
    case Recipe::gaussian: {
      const double sigma = choice(rng, kGaussianSigmas);
      for (double& v : img.pixels) v = rng.normal(0.5, sigma);
      break;
    }
    case Recipe::rademacher:
      fill_bernoulli(img, rng, 0.5);
      break;
    case Recipe::pixel_perm:
      img = make_pixel_perm(spec, index, sources, rng);
      break;
    case Recipe::black:
      break;
    case Recipe::white:
      img = ImageBuffer::filled(spec.width, spec.height, 1.0);
      break;
    case Recipe::grey: {
      const double v = rng.uniform01();
      std::fill(img.pixels.begin(), img.pixels.end(), v);
      break;
    }
    case Recipe::monochrome: {
      const auto color = random_color(rng);
      for (std::size_t i = 0; i < img.pixels.size(); ++i)
        img.pixels[i] = color[i % 3];
      break;
    }
    case Recipe::tricolour:
    case Recipe::tricolour_primary: {
      const bool horizontal = rng.bernoulli(0.5);
      std::vector<std::array<double, 3>> colors(3);
      for (auto& c : colors)
        c = spec.recipe == Recipe::tricolour ? random_color(rng)
                                             : random_primary_color(rng);
      paint_stripes(img, horizontal, colors);
      break;
    }
    case Recipe::hstripes:
    case Recipe::vstripes: {
      const int stripes = choice(rng, kStripeCounts);
      std::vector<std::array<double, 3>> colors(
          static_cast<std::size_t>(stripes));
      for (auto& c : colors) c = random_color(rng);
      paint_stripes(img, spec.recipe == Recipe::hstripes, colors);
      break;
    }
    case Recipe::smooth:
    case Recipe::smooth_plus: {
      const double sigma = choice(rng, kSmoothSigmas);
      fill_uniform(img, rng);
      gaussian_blur(img, sigma);
      if (spec.recipe == Recipe::smooth)
        rescale_global(img);
      else
        rescale_per_channel(img);
      break;
    }
    case Recipe::smooth_color: {
      const double sigma = choice(rng, kSmoothSigmas);
      const double delta = 0.1 + 0.2 * rng.uniform01();
      const auto center = random_color(rng);
      fill_uniform(img, rng);
      gaussian_blur(img, sigma);
      rescale_to_quantile_band(img, center, delta);
      break;
    }
    case Recipe::smooth_pixel_perm: {
      const double sigma = choice(rng, kSmoothPermSigmas);
      img = make_pixel_perm(spec, index, sources, rng);
      gaussian_blur(img, sigma);
      break;
    }
    case Recipe::blobs: {
      const double sigma = choice(rng, kBlobSigmas);
      fill_bernoulli(img, rng, 0.7);
      gaussian_blur(img, sigma);
      for (double& v : img.pixels)
        if (v < 0.75) v = 0.0;
      break;
    }
  }

  clip01(img);
  return img;
}

SuiteResult generate_suite(const RecipeSpec& spec, const std::string& out_dir) {
  validate_spec(spec);
  std::vector<std::string> sources;
  if (recipe_needs_sources(spec.recipe)) {
    sources = list_source_images(spec.source_dir);
    if (sources.empty())
      throw DataError("source directory has no PNG images: " + spec.source_dir);
  }

  fs::create_directories(out_dir);
  SuiteResult result;
  result.directory = out_dir;
  result.files.resize(static_cast<std::size_t>(spec.count));

  parallel_for(static_cast<std::size_t>(spec.count), [&](std::size_t i) {
    const ImageBuffer img = generate_image(spec, i, &sources);
    const std::vector<uint8_t> png =
        encode_png_rgb8(quantize_rgb8(img), img.width, img.height);
    char name[64];
    std::snprintf(name, sizeof name, "%s_%05zu.png", recipe_name(spec.recipe),
                  i);
    write_file((fs::path(out_dir) / name).string(), png);
    result.files[i] = SuiteFile{name, sha256_hex(png)};
  });

  nlohmann::ordered_json manifest;
  manifest["recipe"] = recipe_name(spec.recipe);
  manifest["seed"] = spec.base_seed;
  manifest["width"] = spec.width;
  manifest["height"] = spec.height;
  manifest["count"] = spec.count;
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const auto& f : result.files)
    files.push_back({{"name", f.name}, {"sha256", f.sha256}});
  manifest["files"] = std::move(files);

  std::ofstream out(fs::path(out_dir) / "manifest.json");
  if (!out) throw DataError("generate_suite: cannot write manifest");
  out << manifest.dump(2) << '\n';
  return result;
}

}  // namespace oodeval
