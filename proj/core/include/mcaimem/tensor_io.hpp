#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace mcaimem {

struct Int8Tensor {
  std::vector<std::size_t> shape;
  std::vector<std::int8_t> data;

  [[nodiscard]] std::size_t element_count() const;
};

/// Sidecar header path for a raw tensor blob: "<blob>.hdr".
std::filesystem::path tensor_header_path(const std::filesystem::path& blob);

/// Reads raw little-endian INT8 bytes plus the sidecar header, which holds
///   dtype: int8
///   shape: d0,d1,...
/// The byte count must match the product of the shape.
Int8Tensor read_tensor(const std::filesystem::path& blob);
void write_tensor(const std::filesystem::path& blob, const Int8Tensor& t);

}  // namespace mcaimem
