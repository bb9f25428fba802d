#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mrl/bandit.hpp"
#include "mrl/function_class.hpp"
#include "mrl/linalg.hpp"

namespace mrl::transfer {

// A new task whose truth is a bounded mixture of the training tasks' value
// functions, to be solved by LinUCB on a frozen representation.
struct TransferTask {
  FeatureMap frozen_phi;
  std::vector<double> mixture;
  std::function<double(const Input&)> target;  // true mean reward, clamped
  // (run_seed, step) -> finite action set of fused inputs.
  std::function<std::vector<Input>(std::uint64_t, int)> context_sampler;
  double noise_sigma = 0.01;
};

struct LinUCBState {
  linalg::Mat v;               // lambda I + sum phi phi^T, rank-1 updated
  std::vector<double> b;       // sum phi R
  double lambda_reg = 1.0;
  int samples = 0;
  std::vector<std::vector<double>> feats;  // played features, for audits
};

// The pretrained ERM's selected member and final head matrix.
std::pair<FeatureMap, linalg::Mat> extract_representation(const bandit::GfucbResult& trained);

// Builds the mixture task from a bandit instance; throws if sum |lambda_i|
// exceeds the bound. The instance's context distribution is reused.
TransferTask synthesize_target_task(const bandit::BanditInstance& inst,
                                    const std::vector<double>& mixture, double bound = 1.0);

// Elliptical radius sqrt(lambda k) + sqrt(2 log(1/delta) + k log(1 + s/(k lambda))).
double linucb_radius(int dim_k, double lambda_reg, double delta, int step);

// One arbitrary initial action, then ridge regression + elliptical bonus on
// the frozen representation. Exact regret against the mixture target.
// bonus_scale multiplies the elliptical term (1 = the theoretical radius;
// experiments typically run a small tuned coefficient).
bandit::RegretTrace linucb_transfer_run(const TransferTask& task, int steps, double lambda_reg,
                                        double delta, std::uint64_t seed,
                                        LinUCBState* final_state = nullptr,
                                        double bonus_scale = 1.0);

// Sup over test inputs of |sum_i lambda_i fhat^(i)(x) - f^(M+1)(x)|; the
// executable form of the pseudo-target bound.
double mixture_sup_error(const bandit::GfucbResult& trained, const std::vector<double>& mixture,
                         const TransferTask& task, const std::vector<Input>& test_inputs);

}  // namespace mrl::transfer
