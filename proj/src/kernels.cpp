#include "mrl/kernels.hpp"

#include <stdexcept>

namespace mrl::kernels {
namespace {

struct Table {
  double (*dot)(const double*, const double*, std::size_t);
  double (*sumsq)(const double*, std::size_t);
  double (*sumsq_diff)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*matvec)(const double*, std::size_t, std::size_t, const double*, double*);
  void (*matvec_t)(const double*, std::size_t, std::size_t, const double*, double*);
};

constexpr Table kScalarTable = {scalar::dot,  scalar::sumsq,  scalar::sumsq_diff,
                                scalar::axpy, scalar::matvec, scalar::matvec_t};

#if defined(MRL_HAVE_AVX2)
constexpr Table kAvx2Table = {avx2::dot,  avx2::sumsq,  avx2::sumsq_diff,
                              avx2::axpy, avx2::matvec, avx2::matvec_t};

bool cpu_has_avx2() {
#if defined(__GNUC__) || defined(__clang__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}
#endif

Backend pick_default() {
#if defined(MRL_HAVE_AVX2)
  if (cpu_has_avx2()) return Backend::kAvx2;
#endif
  return Backend::kScalar;
}

Backend g_backend = pick_default();

const Table& table_for(Backend b) {
#if defined(MRL_HAVE_AVX2)
  if (b == Backend::kAvx2) return kAvx2Table;
#endif
  (void)b;
  return kScalarTable;
}

const Table* g_table = &table_for(g_backend);

}  // namespace

Backend active_backend() { return g_backend; }

bool backend_supported(Backend b) {
  if (b == Backend::kScalar) return true;
#if defined(MRL_HAVE_AVX2)
  if (b == Backend::kAvx2) return cpu_has_avx2();
#endif
  return false;
}

void set_backend(Backend b) {
  if (!backend_supported(b)) throw std::runtime_error("kernel backend not supported on this CPU");
  g_backend = b;
  g_table = &table_for(b);
}

double dot(const double* a, const double* b, std::size_t n) { return g_table->dot(a, b, n); }
double sumsq(const double* a, std::size_t n) { return g_table->sumsq(a, n); }
double sumsq_diff(const double* a, const double* b, std::size_t n) {
  return g_table->sumsq_diff(a, b, n);
}
void axpy(double alpha, const double* x, double* y, std::size_t n) {
  g_table->axpy(alpha, x, y, n);
}
void matvec(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  g_table->matvec(a, rows, cols, x, y);
}
void matvec_t(const double* a, std::size_t rows, std::size_t cols, const double* y, double* out) {
  g_table->matvec_t(a, rows, cols, y, out);
}

}  // namespace mrl::kernels
