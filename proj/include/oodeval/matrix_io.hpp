// SPDX-License-Identifier: Apache-2.0
//
// Minimal binary matrix container used for every array this toolkit reads
// or writes. File layout, all little-endian:
//
//   magic   "OODM"   4 bytes
//   version u16 = 1
//   dtype   u8       0 = f32, 1 = u32
//   pad     u8 = 0
//   rows    u64
//   cols    u64
//   data    rows*cols values, row-major
//
// f32 payloads must be finite; the reader and writer both reject NaN/Inf.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace oodeval {

enum class Dtype : uint8_t { f32 = 0, u32 = 1 };

struct MatrixFile {
  Dtype dtype = Dtype::f32;
  uint64_t rows = 0;
  uint64_t cols = 0;
  std::vector<float> f32;     // populated when dtype == f32
  std::vector<uint32_t> u32;  // populated when dtype == u32

  static MatrixFile from_f32(uint64_t rows, uint64_t cols,
                             std::vector<float> data);
  static MatrixFile from_u32(uint64_t rows, uint64_t cols,
                             std::vector<uint32_t> data);

  bool operator==(const MatrixFile& other) const;
};

/// Writes m to path. Throws DataError on invariant violations (count
/// mismatch, non-finite f32 values) and on I/O failure.
void write_matrix(const std::string& path, const MatrixFile& m);

/// Inverse of write_matrix. Validates magic, version, dtype, exact payload
/// size and f32 finiteness; throws DataError otherwise.
MatrixFile read_matrix(const std::string& path);

}  // namespace oodeval
