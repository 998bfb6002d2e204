// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>

#include "oodeval/errors.hpp"
#include "oodeval/matrix_io.hpp"
#include "testutil.hpp"

using namespace oodeval;

namespace {

std::vector<uint8_t> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::vector<uint8_t>((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("1x1 f32 matrix file is 28 bytes: 24-byte header + one value") {
  testutil::TempDir tmp("mio");
  write_matrix(tmp.str("m.oodm"), MatrixFile::from_f32(1, 1, {0.0f}));
  const auto bytes = slurp(tmp.str("m.oodm"));
  REQUIRE(bytes.size() == 28);
  // magic, version 1 LE, dtype f32, pad
  CHECK(bytes[0] == 'O');
  CHECK(bytes[1] == 'O');
  CHECK(bytes[2] == 'D');
  CHECK(bytes[3] == 'M');
  CHECK(bytes[4] == 1);
  CHECK(bytes[5] == 0);
  CHECK(bytes[6] == 0);
  CHECK(bytes[7] == 0);
  // value 0.0f -> 4 zero bytes
  for (int i = 24; i < 28; ++i) CHECK(bytes[static_cast<std::size_t>(i)] == 0);
}

TEST_CASE("u32 payload is little-endian row-major") {
  testutil::TempDir tmp("mio");
  write_matrix(tmp.str("m.oodm"), MatrixFile::from_u32(2, 2, {1, 2, 3, 4}));
  const auto bytes = slurp(tmp.str("m.oodm"));
  REQUIRE(bytes.size() == 24 + 16);
  const uint8_t expected[16] = {1, 0, 0, 0, 2, 0, 0, 0, 3, 0, 0, 0, 4, 0, 0, 0};
  for (int i = 0; i < 16; ++i)
    CHECK(bytes[static_cast<std::size_t>(24 + i)] == expected[i]);
}

TEST_CASE("write/read round-trips bit-exactly") {
  testutil::TempDir tmp("mio");
  std::mt19937 rng(7);
  std::uniform_real_distribution<float> dist(-100.0f, 100.0f);
  for (int iter = 0; iter < 20; ++iter) {
    const uint64_t rows = 1 + rng() % 8;
    const uint64_t cols = 1 + rng() % 8;
    std::vector<float> data(rows * cols);
    for (float& v : data) v = dist(rng);
    const MatrixFile m = MatrixFile::from_f32(rows, cols, data);
    write_matrix(tmp.str("rt.oodm"), m);
    CHECK(read_matrix(tmp.str("rt.oodm")) == m);
  }
  // u32 side
  const MatrixFile u = MatrixFile::from_u32(3, 4, {0, 1, 2, 3, 4, 5, 6, 7, 8,
                                                   9, 10, 0xffffffffu});
  write_matrix(tmp.str("u.oodm"), u);
  CHECK(read_matrix(tmp.str("u.oodm")) == u);
}

TEST_CASE("reader rejects bad magic, bad version, bad dtype, truncation") {
  testutil::TempDir tmp("mio");
  const std::string path = tmp.str("m.oodm");
  write_matrix(path, MatrixFile::from_f32(2, 3, {1, 2, 3, 4, 5, 6}));
  const auto original = slurp(path);

  auto rewrite = [&](std::vector<uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
  };

  auto corrupted = original;
  corrupted[0] = 'X';
  rewrite(corrupted);
  CHECK_THROWS_WITH_AS(read_matrix(path),
                       doctest::Contains("bad magic"), DataError);

  corrupted = original;
  corrupted[4] = 9;
  rewrite(corrupted);
  CHECK_THROWS_WITH_AS(read_matrix(path),
                       doctest::Contains("version"), DataError);

  corrupted = original;
  corrupted[6] = 7;
  rewrite(corrupted);
  CHECK_THROWS_WITH_AS(read_matrix(path), doctest::Contains("dtype"),
                       DataError);

  corrupted = original;
  corrupted.resize(corrupted.size() - 5);
  rewrite(corrupted);
  CHECK_THROWS_WITH_AS(read_matrix(path), doctest::Contains("truncated"),
                       DataError);
}

TEST_CASE("non-finite f32 values are rejected on write and on read") {
  testutil::TempDir tmp("mio");
  const float inf = std::numeric_limits<float>::infinity();
  CHECK_THROWS_AS(
      write_matrix(tmp.str("bad.oodm"), MatrixFile::from_f32(1, 2, {1.0f, inf})),
      DataError);

  // smuggle a NaN into an otherwise valid file
  const std::string path = tmp.str("nan.oodm");
  write_matrix(path, MatrixFile::from_f32(1, 1, {1.0f}));
  auto bytes = slurp(path);
  bytes[24] = 0x00;
  bytes[25] = 0x00;
  bytes[26] = 0xc0;
  bytes[27] = 0x7f;  // quiet NaN
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  out.close();
  CHECK_THROWS_WITH_AS(read_matrix(path), doctest::Contains("non-finite"),
                       DataError);
}

TEST_CASE("count mismatch between dims and payload is rejected") {
  testutil::TempDir tmp("mio");
  CHECK_THROWS_AS(
      write_matrix(tmp.str("m.oodm"), MatrixFile::from_f32(2, 2, {1.0f})),
      DataError);
}
