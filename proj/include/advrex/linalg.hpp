#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace advrex {

// Dense row-major matrix of doubles. Small wrapper; heavy products go
// through BLAS (see gemm below).
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * cols, cols};
  }

  std::size_t size() const { return data.size(); }
  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
};

// C = alpha * op(A) * op(B) + beta * C, row-major.
void gemm(bool transpose_a, bool transpose_b, double alpha, const Matrix& a,
          const Matrix& b, double beta, Matrix& c);

bool all_finite(std::span<const double> v);
bool all_finite(const Matrix& m);

double dot(std::span<const double> a, std::span<const double> b);
double norm_l1(std::span<const double> v);
double norm_l2(std::span<const double> v);
double norm_linf(std::span<const double> v);

}  // namespace advrex
