#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "advrex/diffnet.hpp"

namespace advrex {

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Reads an IDX image/label file pair (big-endian headers, magic 0x00000803
// for images and 0x00000801 for labels). Pixels are scaled to [0,1] by
// division by 255 and flattened row-major. limit = 0 loads everything;
// otherwise the first `limit` samples in file order.
Batch load_mnist_idx(const std::string& images_path,
                     const std::string& labels_path, std::size_t limit = 0);

enum class SyntheticKind { Gaussians, Moons };

// Deterministic 2-D labeled dataset scaled into [0,1]^2.
Batch synthetic_dataset(SyntheticKind kind, std::size_t n, double noise,
                        std::uint64_t seed);
Batch synthetic_dataset(const std::string& kind, std::size_t n, double noise,
                        std::uint64_t seed);

// IDX writers. Images as unsigned bytes (magic 0x00000803) or doubles
// (type byte 0x0E); labels as unsigned bytes (magic 0x00000801).
void write_idx_images_u8(const std::string& path,
                         const std::vector<std::uint8_t>& pixels,
                         std::uint32_t n, std::uint32_t rows, std::uint32_t cols);
void write_idx_labels_u8(const std::string& path,
                         const std::vector<std::uint8_t>& labels);
void write_idx_matrix_f64(const std::string& path, const Matrix& data);

}  // namespace advrex
