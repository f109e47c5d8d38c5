#include "advrex/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "advrex/rng.hpp"

namespace advrex {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::uint32_t read_be_u32(std::istream& in, const std::string& path,
                          const char* field) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4))
    throw FormatError(path + ": truncated while reading " + field);
  return (std::uint32_t(bytes[0]) << 24) | (std::uint32_t(bytes[1]) << 16) |
         (std::uint32_t(bytes[2]) << 8) | std::uint32_t(bytes[3]);
}

void write_be_u32(std::ostream& out, std::uint32_t v) {
  unsigned char bytes[4] = {static_cast<unsigned char>(v >> 24),
                            static_cast<unsigned char>(v >> 16),
                            static_cast<unsigned char>(v >> 8),
                            static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

}  // namespace

Batch load_mnist_idx(const std::string& images_path,
                     const std::string& labels_path, std::size_t limit) {
  std::ifstream images(images_path, std::ios::binary);
  if (!images) throw FormatError(images_path + ": cannot open");
  std::ifstream labels(labels_path, std::ios::binary);
  if (!labels) throw FormatError(labels_path + ": cannot open");

  const std::uint32_t image_magic = read_be_u32(images, images_path, "magic");
  if (image_magic != kImagesMagic)
    throw FormatError(images_path + ": bad magic (expected 0x00000803)");
  const std::uint32_t n_images = read_be_u32(images, images_path, "count");
  const std::uint32_t rows = read_be_u32(images, images_path, "rows");
  const std::uint32_t cols = read_be_u32(images, images_path, "cols");

  const std::uint32_t label_magic = read_be_u32(labels, labels_path, "magic");
  if (label_magic != kLabelsMagic)
    throw FormatError(labels_path + ": bad magic (expected 0x00000801)");
  const std::uint32_t n_labels = read_be_u32(labels, labels_path, "count");

  if (n_images != n_labels)
    throw FormatError(images_path + ": image count " + std::to_string(n_images) +
                      " does not match label count " + std::to_string(n_labels) +
                      " in " + labels_path);

  std::size_t n = n_images;
  if (limit > 0) n = std::min<std::size_t>(n, limit);
  const std::size_t dim = static_cast<std::size_t>(rows) * cols;

  Batch batch;
  batch.inputs = Matrix(n, dim);
  batch.labels.resize(n);

  std::vector<unsigned char> pixel_row(dim);
  for (std::size_t i = 0; i < n; ++i) {
    if (!images.read(reinterpret_cast<char*>(pixel_row.data()),
                     static_cast<std::streamsize>(dim)))
      throw FormatError(images_path + ": truncated pixel data at sample " +
                        std::to_string(i));
    auto out = batch.inputs.row(i);
    for (std::size_t j = 0; j < dim; ++j)
      out[j] = static_cast<double>(pixel_row[j]) / 255.0;
    unsigned char label;
    if (!labels.read(reinterpret_cast<char*>(&label), 1))
      throw FormatError(labels_path + ": truncated label data at sample " +
                        std::to_string(i));
    batch.labels[i] = static_cast<int>(label);
  }
  return batch;
}

Batch synthetic_dataset(SyntheticKind kind, std::size_t n, double noise,
                        std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("synthetic_dataset: n must be >= 2");

  Batch batch;
  batch.inputs = Matrix(n, 2);
  batch.labels.resize(n);
  CounterRng rng(seed, CounterRng::kSynthetic);

  switch (kind) {
    case SyntheticKind::Gaussians: {
      // Two clusters on the diagonal of the unit square.
      const double centers[2][2] = {{0.3, 0.3}, {0.7, 0.7}};
      for (std::size_t i = 0; i < n; ++i) {
        const int label = static_cast<int>(i % 2);
        batch.labels[i] = label;
        for (std::size_t j = 0; j < 2; ++j) {
          const double v = centers[label][j] + noise * rng.normal();
          batch.inputs(i, j) = std::clamp(v, 0.0, 1.0);
        }
      }
      return batch;
    }
    case SyntheticKind::Moons: {
      // Two interleaving half circles, jittered, mapped into [0,1]^2.
      for (std::size_t i = 0; i < n; ++i) {
        const int label = static_cast<int>(i % 2);
        batch.labels[i] = label;
        const double t = M_PI * rng.uniform01();
        double x, y;
        if (label == 0) {
          x = std::cos(t);
          y = std::sin(t);
        } else {
          x = 1.0 - std::cos(t);
          y = 0.5 - std::sin(t);
        }
        x += noise * rng.normal();
        y += noise * rng.normal();
        // Raw coordinates live in roughly [-1.25, 2.25] x [-0.75, 1.25].
        batch.inputs(i, 0) = std::clamp((x + 1.25) / 3.5, 0.0, 1.0);
        batch.inputs(i, 1) = std::clamp((y + 0.75) / 2.0, 0.0, 1.0);
      }
      return batch;
    }
  }
  throw std::invalid_argument("synthetic_dataset: unknown kind");
}

Batch synthetic_dataset(const std::string& kind, std::size_t n, double noise,
                        std::uint64_t seed) {
  if (kind == "gaussians") return synthetic_dataset(SyntheticKind::Gaussians, n, noise, seed);
  if (kind == "moons") return synthetic_dataset(SyntheticKind::Moons, n, noise, seed);
  throw std::invalid_argument("synthetic_dataset: unknown kind '" + kind + "'");
}

void write_idx_images_u8(const std::string& path,
                         const std::vector<std::uint8_t>& pixels,
                         std::uint32_t n, std::uint32_t rows, std::uint32_t cols) {
  if (pixels.size() != static_cast<std::size_t>(n) * rows * cols)
    throw std::invalid_argument("write_idx_images_u8: pixel count mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(path + ": cannot open for writing");
  write_be_u32(out, kImagesMagic);
  write_be_u32(out, n);
  write_be_u32(out, rows);
  write_be_u32(out, cols);
  out.write(reinterpret_cast<const char*>(pixels.data()),
            static_cast<std::streamsize>(pixels.size()));
  if (!out) throw FormatError(path + ": write failed");
}

void write_idx_labels_u8(const std::string& path,
                         const std::vector<std::uint8_t>& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(path + ": cannot open for writing");
  write_be_u32(out, kLabelsMagic);
  write_be_u32(out, static_cast<std::uint32_t>(labels.size()));
  out.write(reinterpret_cast<const char*>(labels.data()),
            static_cast<std::streamsize>(labels.size()));
  if (!out) throw FormatError(path + ": write failed");
}

void write_idx_matrix_f64(const std::string& path, const Matrix& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(path + ": cannot open for writing");
  // Type byte 0x0E (double), 2 dimensions.
  write_be_u32(out, 0x00000E02);
  write_be_u32(out, static_cast<std::uint32_t>(data.rows));
  write_be_u32(out, static_cast<std::uint32_t>(data.cols));
  out.write(reinterpret_cast<const char*>(data.data.data()),
            static_cast<std::streamsize>(data.data.size() * sizeof(double)));
  if (!out) throw FormatError(path + ": write failed");
}

}  // namespace advrex
