#pragma once

#include <cstddef>

// Data-parallel inner loops used by the math layers. Every kernel has a
// scalar reference implementation; on x86-64 an AVX2/FMA variant is selected
// at runtime when the CPU supports it. Both variants are exposed directly so
// tests can check them against each other.
namespace mrl::kernels {

enum class Backend { kScalar, kAvx2 };

Backend active_backend();
bool backend_supported(Backend b);
// Overrides the dispatch (tests, benchmarking). Throws if unsupported.
void set_backend(Backend b);

// Dispatched entry points.
double dot(const double* a, const double* b, std::size_t n);
double sumsq(const double* a, std::size_t n);
double sumsq_diff(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
// y = A x for row-major A (rows x cols).
void matvec(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
// out = A^T y for row-major A (rows x cols); out has cols entries.
void matvec_t(const double* a, std::size_t rows, std::size_t cols, const double* y, double* out);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double sumsq(const double* a, std::size_t n);
double sumsq_diff(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void matvec(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
void matvec_t(const double* a, std::size_t rows, std::size_t cols, const double* y, double* out);
}  // namespace scalar

#if defined(MRL_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double sumsq(const double* a, std::size_t n);
double sumsq_diff(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void matvec(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
void matvec_t(const double* a, std::size_t rows, std::size_t cols, const double* y, double* out);
}  // namespace avx2
#endif

}  // namespace mrl::kernels
