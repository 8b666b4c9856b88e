#pragma once

#include <string>

namespace convsarc {

struct EncoderParams;

// Binary tensor container, format version 1:
//   magic "CSWT", u32 version, u64 tensor count, then per tensor:
//   u32 name length, name bytes, u64 rows, u64 cols, rows*cols
//   little-endian doubles (column-major).
void save_weights(const std::string& path, EncoderParams& params);

// Fills an already-shaped EncoderParams; every tensor must be present
// with matching dimensions.
void load_weights(const std::string& path, EncoderParams& params);

}  // namespace convsarc
