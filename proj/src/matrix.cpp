#include "patchnorm/matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace patchnorm {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
  if (rows == 0 || cols == 0) {
    throw std::invalid_argument("Matrix: dimensions must be >= 1");
  }
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (rows == 0 || cols == 0) {
    throw std::invalid_argument("Matrix: dimensions must be >= 1");
  }
  if (data_.size() != rows * cols) {
    throw std::invalid_argument("Matrix: data length != rows*cols");
  }
}

Matrix mat_random_uniform(std::size_t rows, std::size_t cols, double lo,
                          double hi, std::uint64_t seed) {
  if (rows == 0 || cols == 0) {
    throw std::invalid_argument("mat_random_uniform: dimensions must be >= 1");
  }
  if (!(lo < hi)) {
    throw std::invalid_argument("mat_random_uniform: need lo < hi");
  }
  Matrix m(rows, cols);
  UniformRng rng(seed);
  for (double& v : m.data()) v = rng.next(lo, hi);
  return m;
}

RowStats row_mean_var(const Matrix& m) {
  RowStats s;
  s.mean.resize(m.rows());
  s.var.resize(m.rows());
  const double inv_d = 1.0 / static_cast<double>(m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double mu = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) mu += m(r, c);
    mu *= inv_d;
    double var = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const double d = m(r, c) - mu;
      var += d * d;
    }
    s.mean[r] = mu;
    s.var[r] = var * inv_d;
  }
  return s;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("operator+: shape mismatch");
  Matrix out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] += b.data()[i];
  return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("operator-: shape mismatch");
  Matrix out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] -= b.data()[i];
  return out;
}

Matrix scale_shift(const Matrix& m, double a, double b) {
  Matrix out = m;
  for (double& v : out.data()) v = a * v + b;
  return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: shape mismatch");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) {
        out(i, j) += aik * b(k, j);
      }
    }
  }
  return out;
}

double frobenius_norm(const Matrix& m) {
  double s = 0.0;
  for (double v : m.data()) s += v * v;
  return std::sqrt(s);
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("max_abs_diff: shape mismatch");
  double mx = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mx = std::max(mx, std::fabs(a.data()[i] - b.data()[i]));
  }
  return mx;
}

}  // namespace patchnorm
