#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace soga {

// Dense row-major matrix of 64-bit floats. Scalars are 1x1, row vectors 1xC,
// column vectors Nx1.
struct Tensor {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  static Tensor scalar(double v);
  static Tensor from_rows(std::initializer_list<std::initializer_list<double>> rs);

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::size_t size() const { return data.size(); }
  bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }
  bool is_scalar() const { return rows == 1 && cols == 1; }
  double scalar_value() const;

  bool operator==(const Tensor& o) const {
    return rows == o.rows && cols == o.cols && data == o.data;
  }
};

// Compressed sparse row matrix with explicit values and sorted column indices
// within each row.
struct SparseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr;  // rows + 1 entries
  std::vector<int> col;
  std::vector<double> val;

  static SparseMatrix identity(std::size_t n);
  SparseMatrix transpose() const;
  std::size_t nnz() const { return col.size(); }
};

bool all_finite(const Tensor& t);
std::string shape_string(const Tensor& t);

// Glorot-style uniform init: U(-s, s) with s = sqrt(6 / (fan_in + fan_out)).
Tensor glorot_uniform(std::size_t rows, std::size_t cols, std::mt19937_64& rng);
Tensor gaussian(std::size_t rows, std::size_t cols, double mean, double stddev,
                std::mt19937_64& rng);

}  // namespace soga
