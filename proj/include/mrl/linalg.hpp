#pragma once

#include <cstddef>
#include <vector>

// Dense k x k helpers for the ridge solves. k stays small (<= 64), so a plain
// row-major buffer plus Cholesky covers everything the engines need.
namespace mrl::linalg {

class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Mat identity(std::size_t n, double scale = 1.0) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = scale;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  const double* row(std::size_t r) const { return data_.data() + r * cols_; }
  double* row(std::size_t r) { return data_.data() + r * cols_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// A += x x^T (symmetric rank-1 update, full matrix written).
void syr_update(Mat& a, const double* x);

// Lower Cholesky factor of an SPD matrix. Throws std::runtime_error if a
// pivot is not strictly positive.
Mat cholesky(const Mat& a);

// Solves L L^T x = b given the lower factor.
std::vector<double> chol_solve(const Mat& l, const double* b);

// Squared Mahalanobis form q^T (L L^T)^{-1} q = ||L^{-1} q||^2.
double chol_quadform(const Mat& l, const double* q);

// Forward substitution L z = b.
std::vector<double> forward_subst(const Mat& l, const double* b);

Mat spd_inverse(const Mat& a);

}  // namespace mrl::linalg
