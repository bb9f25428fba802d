#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "mrl/function_class.hpp"

namespace mrl::bandit {

enum class NoiseKind { kGaussian, kUniform };

// Ground-truth environment: the representation class, the true multihead
// function, and a seeded context generator. The class lives behind a
// shared_ptr so instances can be copied without dangling the truth binding.
struct BanditInstance {
  int num_tasks = 0;
  std::shared_ptr<FeatureClass> cls;
  MultiheadFunction truth;
  // (run_seed, step) -> per task a finite set of fused context-action inputs.
  std::function<std::vector<std::vector<Input>>(std::uint64_t, int)> context_sampler;
  double noise_sigma = 0.01;
  NoiseKind noise_kind = NoiseKind::kGaussian;

  int dim_k() const { return cls->dim_k(); }
};

struct StepRecord {
  int t = 0;
  int task = 0;
  int action = 0;
  double reward = 0.0;
  double inst_regret = 0.0;
  double cum_regret = 0.0;
};

// Per-step aggregates shared by all tasks of the step.
struct StepAggregate {
  double beta = 0.0;
  std::optional<double> width;
  std::optional<bool> contained;
  double optimistic_total = 0.0;  // selected tuple's optimistic value
  double truth_opt_total = 0.0;   // truth at its own optimal tuple
};

struct RegretTrace {
  std::vector<StepRecord> rows;      // (t, task)-major order
  std::vector<StepAggregate> steps;  // indexed by t-1
  double total_regret = 0.0;

  // Cumulative regret after the last task of step `t` (1-based).
  double cum_at(int t) const;
};

struct BetaConfig {
  enum class Mode { kTheory, kTuned };
  Mode mode = Mode::kTheory;
  // Tuned schedule a*log(b*t + c).
  double a = 0.4;
  double b = 0.5;
  double c = 2.0;
  // Inherent-Bellman-error term used by the MDP theory radius.
  double ibe = 0.0;

  static BetaConfig theory() { return {}; }
  static BetaConfig tuned(double a, double b, double c);
  double tuned_value(int t) const;
};

struct GfucbConfig {
  double delta = 0.1;
  double alpha = -1.0;  // negative = "auto" = 1/(k M T)
  double ridge = 1e-6;
  Strategy strategy = Strategy::kDecoupled;
  BetaConfig beta;
  bool record_width = false;
  bool record_containment = false;

  double resolve_alpha(int dim_k, int num_tasks, int horizon) const;
};

struct GfucbResult {
  RegretTrace trace;
  MultiheadFunction fhat;  // final ERM fit
  std::shared_ptr<FeatureClass> cls;
  std::shared_ptr<MultitaskHistory> history;
};

// Options for the latent-category environment (the finite-class analog of a
// digit bandit: K observations per context, one-hot decoders as candidates).
// Decoy decoders come in two flavors: random-anchor partitions (coarsely
// wrong everywhere) and pair-merge relabelings (correct except for one
// merged category pair, so only pooled data across tasks rejects them fast).
struct LatentCategoryOptions {
  enum class DecoyStyle { kRandomAnchor, kPairMerge };
  int num_members = 8;
  double perturb_sigma = 0.05;
  double noise_sigma = 0.01;
  DecoyStyle decoy_style = DecoyStyle::kRandomAnchor;
};

BanditInstance make_latent_category_bandit(int categories, int actions_per_context,
                                           int num_tasks, int dim_k, std::uint64_t seed,
                                           const LatentCategoryOptions& opts = {});

// Linear representation class: candidate matrices B mapping pool vectors to
// features. Validates the norm bound on every (matrix, pool point) pair.
BanditInstance make_linear_rep_bandit(const std::vector<Input>& pool,
                                      const std::vector<linalg::Mat>& matrices, int true_index,
                                      const linalg::Mat& task_heads, int actions_per_context,
                                      std::uint64_t seed, double noise_sigma = 0.01);

// Seeded random instance of the linear representation environment.
BanditInstance gen_linear_rep_bandit(int dim_k, int input_dim, int pool_size, int num_members,
                                     int num_tasks, int actions_per_context, std::uint64_t seed,
                                     double noise_sigma = 0.01);

GfucbResult gfucb_run(const BanditInstance& inst, int horizon, const GfucbConfig& cfg,
                      std::uint64_t seed);

struct EpsSchedule {
  enum class Kind { kConst, kInvT, kInvSqrtT };
  Kind kind = Kind::kConst;
  double eps0 = 0.1;

  double value(int t) const;
};

// Independent per-task ERM + epsilon-random exploration baseline.
RegretTrace eps_greedy_run(const BanditInstance& inst, int horizon, const EpsSchedule& schedule,
                           double ridge, std::uint64_t seed);

}  // namespace mrl::bandit
