#include <cmath>
#include <stdexcept>

#include "mrl/harness.hpp"
#include "mrl/kernels.hpp"

namespace mrl::harness {

KernelMatrix kernel_matrix(const FeatureMap& phi,
                           const std::vector<std::vector<Input>>& by_category) {
  const int c = static_cast<int>(by_category.size());
  if (c == 0) throw std::invalid_argument("kernel_matrix: no categories");
  const int k = phi.dim_k;
  KernelMatrix out;
  out.templates = linalg::Mat(c, k);
  for (int i = 0; i < c; ++i) {
    if (by_category[i].empty()) throw std::invalid_argument("kernel_matrix: empty category");
    for (const Input& x : by_category[i]) {
      const std::vector<double> f = phi.eval(x);
      kernels::axpy(1.0, f.data(), out.templates.row(i), k);
    }
    const double inv = 1.0 / static_cast<double>(by_category[i].size());
    for (int j = 0; j < k; ++j) out.templates(i, j) *= inv;
  }
  out.c = linalg::Mat(c, c);
  for (int i = 0; i < c; ++i) {
    for (int j = 0; j < c; ++j) {
      out.c(i, j) = kernels::dot(out.templates.row(i), out.templates.row(j), k);
    }
  }
  return out;
}

std::vector<BonusErrorPoint> bonus_vs_error(const ConfidenceSet& set, const DesignCache& cache,
                                            int task,
                                            const std::vector<std::pair<Input, double>>& heldout) {
  std::vector<BonusErrorPoint> out;
  out.reserve(heldout.size());
  const int k = set.cls->dim_k();
  // One solve per candidate, reused across heldout points.
  std::vector<PerPhiSolve> solves;
  std::vector<double> slacks;
  for (int m = 0; m < static_cast<int>(set.cls->members.size()); ++m) {
    solves.push_back(per_phi_solve(set, cache, m));
    slacks.push_back(std::max(set.beta - solves.back().residual, 0.0));
  }
  for (const auto& [x, y] : heldout) {
    double optimistic = -std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < solves.size(); ++m) {
      const std::vector<double> q = set.cls->members[m].eval(x);
      const double mean = kernels::dot(q.data(), solves[m].head_fit.row(task), k);
      const double bonus =
          std::sqrt(slacks[m] * linalg::chol_quadform(solves[m].chol[task], q.data()));
      optimistic = std::max(optimistic, set.center.clamp(mean + bonus));
    }
    const double pred = set.center.predict(task, x);
    BonusErrorPoint p;
    p.abs_error = std::abs(pred - y);
    p.bonus = std::max(0.0, optimistic - pred);
    out.push_back(p);
  }
  return out;
}

}  // namespace mrl::harness
