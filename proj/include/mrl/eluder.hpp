#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mrl/function_class.hpp"

// Eluder-dimension machinery for finite scalar classes on finite domains.
// The exhaustive routine is the test oracle; the greedy one is a scalable
// lower bound.
namespace mrl::eluder {

struct ScalarClass {
  // values[f][x] = f-th function evaluated at the x-th domain point.
  std::vector<std::vector<double>> values;

  int num_functions() const { return static_cast<int>(values.size()); }
  int domain_size() const { return values.empty() ? 0 : static_cast<int>(values[0].size()); }
};

// Tabulates explicit functions on an explicit domain.
ScalarClass make_scalar_class(const std::vector<std::function<double(const Input&)>>& fns,
                              const std::vector<Input>& domain);

// Linear scalar class {x -> phi_j(x)^T theta} over all members of a feature
// class and all heads in the given grid, tabulated on `domain`.
ScalarClass scalarize_linear(const FeatureClass& cls, const std::vector<std::vector<double>>& heads,
                             const std::vector<Input>& domain);

// Heads theta on a `step`-grid of the unit L2 ball in dim dimensions.
std::vector<std::vector<double>> unit_ball_grid(int dim, double step);

// True iff every pair of functions that agrees on X up to eps (in the
// sequence 2-norm) also agrees at x up to eps. X may contain repeats.
bool is_eps_dependent(int x, const std::vector<int>& X, const ScalarClass& cls, double eps);

// Longest sequence in which every element is eps'-independent of its
// predecessors for some eps' >= eps; eps' is searched over eps and all
// achievable pairwise gaps >= eps. Throws if the domain exceeds the guard.
int eluder_dimension_exhaustive(const ScalarClass& cls, double eps, int domain_guard = 12);

// Greedy front-to-back extension at level eps; never exceeds the exhaustive
// value.
int eluder_dimension_greedy(const ScalarClass& cls, double eps);

}  // namespace mrl::eluder
