#ifndef GBX_TENSOR_IO_HPP
#define GBX_TENSOR_IO_HPP

#include <string>
#include <variant>

#include "gbx/tensor.hpp"

namespace gbx {

using AnyTensor = std::variant<ResponseTensor, PerQueryDistances>;

// Writes <path>.gbx (binary) and <path>.json (manifest).
//
// Binary layout, little-endian on every platform:
//   magic "GBX1" | version u16 | rank u8 | dims u64[rank] | payload f32[]
// rank 4 = response tensor (n, M, R, p), rank 3 = per-query distances
// (M, n, n). Payload is row-major float32, so float32-valued inputs
// round-trip bit-exactly.
void write_tensor(const std::string& path, const ResponseTensor& tensor, const Manifest& manifest);
void write_tensor(const std::string& path, const PerQueryDistances& tensor, const Manifest& manifest);

// Inverse of write_tensor; validates tensor invariants and manifest
// consistency on load.
std::pair<AnyTensor, Manifest> read_tensor(const std::string& path);

// Manifest JSON (de)serialization, shared with the CLI.
std::string manifest_to_json(const Manifest& m);
Manifest manifest_from_json(const std::string& text);

}  // namespace gbx

#endif
