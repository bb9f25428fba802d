#include "mrl/eluder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mrl/kernels.hpp"

namespace mrl::eluder {

namespace {

// Squared prediction gaps of every unordered function pair at every domain
// point. Identical-function pairs never constrain anything and are skipped.
struct PairGaps {
  int num_points = 0;
  std::vector<std::vector<double>> gapsq;  // [pair][point]

  explicit PairGaps(const ScalarClass& cls) {
    num_points = cls.domain_size();
    const int nf = cls.num_functions();
    for (int f = 0; f < nf; ++f) {
      for (int g = f + 1; g < nf; ++g) {
        std::vector<double> row(num_points);
        for (int x = 0; x < num_points; ++x) {
          const double d = cls.values[f][x] - cls.values[g][x];
          row[x] = d * d;
        }
        gapsq.push_back(std::move(row));
      }
    }
  }
};

bool independent_given_norms(const PairGaps& pg, const std::vector<double>& normsq, int x,
                             double epssq) {
  for (std::size_t p = 0; p < pg.gapsq.size(); ++p) {
    if (normsq[p] <= epssq && pg.gapsq[p][x] > epssq) return true;
  }
  return false;
}

struct Dfs {
  const PairGaps& pg;
  double epssq;
  std::vector<double> normsq;
  std::vector<signed char> memo;  // additional length achievable from a subset

  Dfs(const PairGaps& pg_in, double epssq_in)
      : pg(pg_in),
        epssq(epssq_in),
        normsq(pg_in.gapsq.size(), 0.0),
        memo(std::size_t{1} << pg_in.num_points, -1) {}

  int run(std::uint32_t mask) {
    if (memo[mask] >= 0) return memo[mask];
    int best = 0;
    for (int x = 0; x < pg.num_points; ++x) {
      if (mask & (1u << x)) continue;
      if (!independent_given_norms(pg, normsq, x, epssq)) continue;
      for (std::size_t p = 0; p < normsq.size(); ++p) normsq[p] += pg.gapsq[p][x];
      best = std::max(best, 1 + run(mask | (1u << x)));
      for (std::size_t p = 0; p < normsq.size(); ++p) normsq[p] -= pg.gapsq[p][x];
    }
    memo[mask] = static_cast<signed char>(best);
    return best;
  }
};

}  // namespace

ScalarClass make_scalar_class(const std::vector<std::function<double(const Input&)>>& fns,
                              const std::vector<Input>& domain) {
  ScalarClass cls;
  cls.values.reserve(fns.size());
  for (const auto& f : fns) {
    std::vector<double> row;
    row.reserve(domain.size());
    for (const Input& x : domain) row.push_back(f(x));
    cls.values.push_back(std::move(row));
  }
  return cls;
}

ScalarClass scalarize_linear(const FeatureClass& cls,
                             const std::vector<std::vector<double>>& heads,
                             const std::vector<Input>& domain) {
  ScalarClass out;
  for (const FeatureMap& member : cls.members) {
    std::vector<std::vector<double>> feats;
    feats.reserve(domain.size());
    for (const Input& x : domain) feats.push_back(member.eval(x));
    for (const auto& theta : heads) {
      std::vector<double> row(domain.size());
      for (std::size_t x = 0; x < domain.size(); ++x) {
        row[x] = kernels::dot(feats[x].data(), theta.data(), theta.size());
      }
      out.values.push_back(std::move(row));
    }
  }
  return out;
}

std::vector<std::vector<double>> unit_ball_grid(int dim, double step) {
  const int half = static_cast<int>(std::floor(1.0 / step));
  std::vector<std::vector<double>> grid;
  std::vector<double> point(dim, 0.0);
  std::function<void(int)> rec = [&](int d) {
    if (d == dim) {
      if (kernels::sumsq(point.data(), dim) <= 1.0 + 1e-12) grid.push_back(point);
      return;
    }
    for (int i = -half; i <= half; ++i) {
      point[d] = i * step;
      rec(d + 1);
    }
  };
  rec(0);
  return grid;
}

bool is_eps_dependent(int x, const std::vector<int>& X, const ScalarClass& cls, double eps) {
  if (eps <= 0.0) throw std::invalid_argument("eps must be positive");
  const PairGaps pg(cls);
  const double epssq = eps * eps;
  std::vector<double> normsq(pg.gapsq.size(), 0.0);
  for (int xi : X) {
    for (std::size_t p = 0; p < normsq.size(); ++p) normsq[p] += pg.gapsq[p][xi];
  }
  return !independent_given_norms(pg, normsq, x, epssq);
}

int eluder_dimension_exhaustive(const ScalarClass& cls, double eps, int domain_guard) {
  if (eps <= 0.0) throw std::invalid_argument("eps must be positive");
  if (cls.domain_size() > domain_guard)
    throw std::length_error("domain too large for exhaustive eluder search");

  const PairGaps pg(cls);
  // Definition 2 takes the best eps' >= eps; for a finite class only the
  // achievable gap values can change independence status.
  std::vector<double> candidates = {eps};
  for (const auto& row : pg.gapsq) {
    for (double gsq : row) {
      const double g = std::sqrt(gsq);
      if (g >= eps) candidates.push_back(g);
    }
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  int best = 0;
  for (double epsp : candidates) {
    Dfs dfs(pg, epsp * epsp);
    best = std::max(best, dfs.run(0));
  }
  return best;
}

int eluder_dimension_greedy(const ScalarClass& cls, double eps) {
  if (eps <= 0.0) throw std::invalid_argument("eps must be positive");
  const PairGaps pg(cls);
  const double epssq = eps * eps;
  std::vector<double> normsq(pg.gapsq.size(), 0.0);
  int length = 0;
  for (;;) {
    int next = -1;
    for (int x = 0; x < pg.num_points; ++x) {
      if (independent_given_norms(pg, normsq, x, epssq)) {
        next = x;
        break;
      }
    }
    if (next < 0) break;
    for (std::size_t p = 0; p < normsq.size(); ++p) normsq[p] += pg.gapsq[p][next];
    ++length;
  }
  return length;
}

}  // namespace mrl::eluder
