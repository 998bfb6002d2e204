// SPDX-License-Identifier: Apache-2.0
#include "oodeval/matrix_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "oodeval/errors.hpp"

namespace oodeval {

namespace {

constexpr char kMagic[4] = {'O', 'O', 'D', 'M'};
constexpr uint16_t kVersion = 1;

void put_u16(std::string& out, uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

uint16_t get_u16(const uint8_t* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

uint32_t get_u32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

uint64_t get_u64(const uint8_t* p) {
  uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

}  // namespace

MatrixFile MatrixFile::from_f32(uint64_t rows, uint64_t cols,
                                std::vector<float> data) {
  MatrixFile m;
  m.dtype = Dtype::f32;
  m.rows = rows;
  m.cols = cols;
  m.f32 = std::move(data);
  return m;
}

MatrixFile MatrixFile::from_u32(uint64_t rows, uint64_t cols,
                                std::vector<uint32_t> data) {
  MatrixFile m;
  m.dtype = Dtype::u32;
  m.rows = rows;
  m.cols = cols;
  m.u32 = std::move(data);
  return m;
}

bool MatrixFile::operator==(const MatrixFile& other) const {
  if (dtype != other.dtype || rows != other.rows || cols != other.cols)
    return false;
  if (dtype == Dtype::u32) return u32 == other.u32;
  if (f32.size() != other.f32.size()) return false;
  // bit-exact comparison, not value comparison
  return std::memcmp(f32.data(), other.f32.data(),
                     f32.size() * sizeof(float)) == 0;
}

void write_matrix(const std::string& path, const MatrixFile& m) {
  const uint64_t count = m.rows * m.cols;
  if (m.dtype == Dtype::f32) {
    if (m.f32.size() != count)
      throw DataError("write_matrix: rows*cols != stored value count");
    for (float v : m.f32)
      if (!std::isfinite(v))
        throw DataError("write_matrix: non-finite f32 value present");
  } else {
    if (m.u32.size() != count)
      throw DataError("write_matrix: rows*cols != stored value count");
  }

  std::string bytes;
  bytes.reserve(24 + count * 4);
  bytes.append(kMagic, 4);
  put_u16(bytes, kVersion);
  bytes.push_back(static_cast<char>(m.dtype));
  bytes.push_back(0);  // pad
  put_u64(bytes, m.rows);
  put_u64(bytes, m.cols);
  if (m.dtype == Dtype::f32) {
    for (float v : m.f32) put_u32(bytes, std::bit_cast<uint32_t>(v));
  } else {
    for (uint32_t v : m.u32) put_u32(bytes, v);
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("write_matrix: cannot open " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write_matrix: write failed for " + path);
}

MatrixFile read_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("read_matrix: cannot open " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());

  if (bytes.size() < 24) throw DataError("read_matrix: truncated header in " + path);
  if (std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw DataError("read_matrix: bad magic in " + path);
  if (get_u16(bytes.data() + 4) != kVersion)
    throw DataError("read_matrix: unsupported version in " + path);
  const uint8_t dtype_byte = bytes[6];
  if (dtype_byte > 1) throw DataError("read_matrix: bad dtype in " + path);

  MatrixFile m;
  m.dtype = static_cast<Dtype>(dtype_byte);
  m.rows = get_u64(bytes.data() + 8);
  m.cols = get_u64(bytes.data() + 16);
  const uint64_t count = m.rows * m.cols;
  if (bytes.size() != 24 + count * 4)
    throw DataError("read_matrix: truncated or oversized payload in " + path);

  const uint8_t* p = bytes.data() + 24;
  if (m.dtype == Dtype::f32) {
    m.f32.resize(count);
    for (uint64_t i = 0; i < count; ++i) {
      m.f32[i] = std::bit_cast<float>(get_u32(p + 4 * i));
      if (!std::isfinite(m.f32[i]))
        throw DataError("read_matrix: non-finite f32 value in " + path);
    }
  } else {
    m.u32.resize(count);
    for (uint64_t i = 0; i < count; ++i) m.u32[i] = get_u32(p + 4 * i);
  }
  return m;
}

}  // namespace oodeval
