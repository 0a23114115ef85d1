#ifndef PATCHNORM_MATRIX_HPP
#define PATCHNORM_MATRIX_HPP

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace patchnorm {

// Dense row-major float64 matrix. Immutable by convention after
// construction; every public operation returns a fresh value.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Deterministic uniform stream: mt19937_64 (sequence fixed by the C++
// standard) mapped to [0,1) via the top 53 bits. Identical output on
// every platform for the same seed.
class UniformRng {
 public:
  explicit UniformRng(std::uint64_t seed) : engine_(seed) {}

  double next() {  // in [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double next(double lo, double hi) { return lo + (hi - lo) * next(); }
  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

Matrix mat_random_uniform(std::size_t rows, std::size_t cols, double lo,
                          double hi, std::uint64_t seed);

struct RowStats {
  std::vector<double> mean;
  std::vector<double> var;  // population variance (divide by cols)
};

RowStats row_mean_var(const Matrix& m);

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix scale_shift(const Matrix& m, double a, double b);  // a*m + b
Matrix matmul(const Matrix& a, const Matrix& b);

double frobenius_norm(const Matrix& m);
double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace patchnorm

#endif  // PATCHNORM_MATRIX_HPP
