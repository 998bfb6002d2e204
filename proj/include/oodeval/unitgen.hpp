// SPDX-License-Identifier: Apache-2.0
//
// Synthetic OOD unit-test image suites. Every image is generated from its
// own PRNG seeded as splitmix64(base_seed XOR index) feeding xoshiro256++,
// so suites are reproducible image-by-image and across thread counts.
//
// Draw order within a recipe is fixed and versioned: recipe-level
// parameters first (sigma, then delta, then colour for smooth_color;
// orientation before stripe colours), then per-pixel draws row-major with
// channels in R,G,B order. The Gaussian filter uses standard deviation
// sigma, truncation radius ceil(4*sigma) and reflect boundaries. Channel
// values are clipped to [0,1] at the end of every recipe.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oodeval/image.hpp"

namespace oodeval {

enum class Recipe {
  uniform,
  gaussian,
  rademacher,
  pixel_perm,
  black,
  white,
  grey,
  monochrome,
  tricolour,
  tricolour_primary,
  hstripes,
  vstripes,
  smooth,
  smooth_plus,
  smooth_color,
  smooth_pixel_perm,
  blobs,
};

const std::vector<Recipe>& all_recipes();
const char* recipe_name(Recipe r);
Recipe recipe_from_name(const std::string& name);  // DataError on unknown

/// True for pixel_perm and smooth_pixel_perm, which need source images.
bool recipe_needs_sources(Recipe r);

struct RecipeSpec {
  Recipe recipe = Recipe::uniform;
  int width = 224;
  int height = 224;
  int count = 400;
  uint64_t base_seed = 0;
  std::string source_dir;  // required for pixel-permutation recipes
};

void validate_spec(const RecipeSpec& spec);

/// Lexically sorted decodable source paths under dir (PNG files).
std::vector<std::string> list_source_images(const std::string& dir);

/// Generates image `index` of the suite. `sources` must be the lexically
/// sorted source list for pixel-permutation recipes (cycled by index) and
/// may be null otherwise.
ImageBuffer generate_image(const RecipeSpec& spec, uint64_t index,
                           const std::vector<std::string>* sources = nullptr);

struct SuiteFile {
  std::string name;
  std::string sha256;
};

struct SuiteResult {
  std::string directory;
  std::vector<SuiteFile> files;
};

/// Writes count PNGs named <recipe>_<index:05>.png plus manifest.json
/// ({recipe, seed, dims, files:[{name, sha256}]}) into out_dir.
/// Byte-identical for identical specs regardless of thread count.
SuiteResult generate_suite(const RecipeSpec& spec, const std::string& out_dir);

}  // namespace oodeval
