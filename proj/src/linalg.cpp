#include "mrl/linalg.hpp"

#include <cmath>
#include <stdexcept>

#include "mrl/kernels.hpp"

namespace mrl::linalg {

void syr_update(Mat& a, const double* x) {
  const std::size_t n = a.rows();
  for (std::size_t r = 0; r < n; ++r) kernels::axpy(x[r], x, a.row(r), n);
}

Mat cholesky(const Mat& a) {
  const std::size_t n = a.rows();
  Mat l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j) - kernels::sumsq(l.row(j), j);
    if (d <= 0.0) throw std::runtime_error("cholesky: matrix not positive definite");
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      const double s = a(i, j) - kernels::dot(l.row(i), l.row(j), j);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

std::vector<double> forward_subst(const Mat& l, const double* b) {
  const std::size_t n = l.rows();
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = (b[i] - kernels::dot(l.row(i), z.data(), i)) / l(i, i);
  }
  return z;
}

std::vector<double> chol_solve(const Mat& l, const double* b) {
  const std::size_t n = l.rows();
  std::vector<double> x = forward_subst(l, b);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= l(j, ii) * x[j];
    x[ii] = s / l(ii, ii);
  }
  return x;
}

double chol_quadform(const Mat& l, const double* q) {
  const std::vector<double> z = forward_subst(l, q);
  return kernels::sumsq(z.data(), z.size());
}

Mat spd_inverse(const Mat& a) {
  const std::size_t n = a.rows();
  const Mat l = cholesky(a);
  Mat inv(n, n);
  std::vector<double> e(n, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    e[c] = 1.0;
    const std::vector<double> col = chol_solve(l, e.data());
    for (std::size_t r = 0; r < n; ++r) inv(r, c) = col[r];
    e[c] = 0.0;
  }
  return inv;
}

}  // namespace mrl::linalg
