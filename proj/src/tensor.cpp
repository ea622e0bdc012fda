#include "soga/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "soga/error.hpp"

namespace soga {

Tensor Tensor::scalar(double v) {
  Tensor t(1, 1);
  t.data[0] = v;
  return t;
}

Tensor Tensor::from_rows(std::initializer_list<std::initializer_list<double>> rs) {
  Tensor t;
  t.rows = rs.size();
  t.cols = rs.size() ? rs.begin()->size() : 0;
  t.data.reserve(t.rows * t.cols);
  for (const auto& r : rs) {
    if (r.size() != t.cols) throw ShapeError("from_rows: ragged row");
    t.data.insert(t.data.end(), r.begin(), r.end());
  }
  return t;
}

double Tensor::scalar_value() const {
  if (!is_scalar()) throw ShapeError("expected 1x1 tensor, got " + shape_string(*this));
  return data[0];
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  SparseMatrix s;
  s.rows = s.cols = n;
  s.row_ptr.resize(n + 1);
  s.col.resize(n);
  s.val.assign(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    s.row_ptr[i] = i;
    s.col[i] = static_cast<int>(i);
  }
  s.row_ptr[n] = n;
  return s;
}

SparseMatrix SparseMatrix::transpose() const {
  SparseMatrix t;
  t.rows = cols;
  t.cols = rows;
  t.row_ptr.assign(cols + 1, 0);
  t.col.resize(col.size());
  t.val.resize(val.size());
  for (int c : col) t.row_ptr[static_cast<std::size_t>(c) + 1]++;
  for (std::size_t i = 0; i < cols; ++i) t.row_ptr[i + 1] += t.row_ptr[i];
  std::vector<std::size_t> cursor(t.row_ptr.begin(), t.row_ptr.end() - 1);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      std::size_t pos = cursor[static_cast<std::size_t>(col[k])]++;
      t.col[pos] = static_cast<int>(r);
      t.val[pos] = val[k];
    }
  }
  return t;
}

bool all_finite(const Tensor& t) {
  return std::all_of(t.data.begin(), t.data.end(),
                     [](double v) { return std::isfinite(v); });
}

std::string shape_string(const Tensor& t) {
  std::ostringstream os;
  os << "(" << t.rows << "x" << t.cols << ")";
  return os.str();
}

Tensor glorot_uniform(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  const double s = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> dist(-s, s);
  Tensor t(rows, cols);
  for (double& v : t.data) v = dist(rng);
  return t;
}

Tensor gaussian(std::size_t rows, std::size_t cols, double mean, double stddev,
                std::mt19937_64& rng) {
  std::normal_distribution<double> dist(mean, stddev);
  Tensor t(rows, cols);
  for (double& v : t.data) v = dist(rng);
  return t;
}

}  // namespace soga
