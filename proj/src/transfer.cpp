#include "mrl/transfer.hpp"

#include <cmath>
#include <stdexcept>

#include "mrl/kernels.hpp"
#include "mrl/rng.hpp"

namespace mrl::transfer {

std::pair<FeatureMap, linalg::Mat> extract_representation(const bandit::GfucbResult& trained) {
  return {trained.cls->members[trained.fhat.phi_index], trained.fhat.heads};
}

TransferTask synthesize_target_task(const bandit::BanditInstance& inst,
                                    const std::vector<double>& mixture, double bound) {
  if (static_cast<int>(mixture.size()) != inst.num_tasks)
    throw std::invalid_argument("synthesize_target_task: mixture length must equal task count");
  double l1 = 0.0;
  for (double l : mixture) l1 += std::abs(l);
  if (l1 > bound + 1e-12)
    throw std::invalid_argument("synthesize_target_task: mixture exceeds the L1 bound");

  TransferTask task;
  task.frozen_phi = inst.cls->members[inst.cls->true_index];
  task.mixture = mixture;
  task.noise_sigma = inst.noise_sigma;
  const MultiheadFunction truth = inst.truth;
  task.target = [truth, mixture](const Input& x) {
    double v = 0.0;
    for (std::size_t i = 0; i < mixture.size(); ++i)
      v += mixture[i] * truth.predict(static_cast<int>(i), x);
    return std::min(1.0, std::max(-1.0, v));
  };
  const auto sampler = inst.context_sampler;
  task.context_sampler = [sampler](std::uint64_t run_seed, int t) {
    return sampler(run_seed, t)[0];
  };
  return task;
}

double linucb_radius(int dim_k, double lambda_reg, double delta, int step) {
  if (dim_k < 1 || lambda_reg <= 0.0) throw std::invalid_argument("linucb_radius: bad k or lambda");
  if (delta <= 0.0 || delta > 1.0) throw std::invalid_argument("linucb_radius: bad delta");
  const double k = dim_k;
  return std::sqrt(lambda_reg * k) +
         std::sqrt(2.0 * std::log(1.0 / delta) +
                   k * std::log(1.0 + step / (k * lambda_reg)));
}

bandit::RegretTrace linucb_transfer_run(const TransferTask& task, int steps, double lambda_reg,
                                        double delta, std::uint64_t seed,
                                        LinUCBState* final_state, double bonus_scale) {
  if (steps < 1) throw std::invalid_argument("linucb_transfer_run: steps must be >= 1");
  const int k = task.frozen_phi.dim_k;

  LinUCBState st;
  st.lambda_reg = lambda_reg;
  st.v = linalg::Mat::identity(k, lambda_reg);
  st.b.assign(k, 0.0);

  auto observe = [&](const Input& x, int t) {
    rng::Stream noise(rng::derive(seed, {rng::kTagNoise, static_cast<std::uint64_t>(t), 0, 1}));
    const double reward = task.target(x) + task.noise_sigma * noise.gauss();
    const std::vector<double> f = task.frozen_phi.eval(x);
    linalg::syr_update(st.v, f.data());
    kernels::axpy(reward, f.data(), st.b.data(), k);
    st.feats.push_back(f);
    ++st.samples;
    return reward;
  };

  bandit::RegretTrace trace;
  // Arbitrary initial action: first action of the step-0 context.
  observe(task.context_sampler(seed, 0)[0], 0);

  for (int s = 1; s <= steps; ++s) {
    const std::vector<Input> actions = task.context_sampler(seed, s);
    const linalg::Mat l = linalg::cholesky(st.v);
    const std::vector<double> theta = linalg::chol_solve(l, st.b.data());
    const double radius = linucb_radius(k, lambda_reg, delta, s);

    int best_a = 0;
    double best_v = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < actions.size(); ++a) {
      const std::vector<double> f = task.frozen_phi.eval(actions[a]);
      const double mean = kernels::dot(f.data(), theta.data(), k);
      const double ucb =
          mean + bonus_scale * radius * std::sqrt(linalg::chol_quadform(l, f.data()));
      if (ucb > best_v) {
        best_v = ucb;
        best_a = static_cast<int>(a);
      }
    }

    double opt = -std::numeric_limits<double>::infinity();
    for (const Input& x : actions) opt = std::max(opt, task.target(x));
    const double mean = task.target(actions[best_a]);
    const double reward = observe(actions[best_a], s);

    bandit::StepRecord row;
    row.t = s;
    row.task = 0;
    row.action = best_a;
    row.reward = reward;
    row.inst_regret = opt - mean;
    trace.total_regret += row.inst_regret;
    row.cum_regret = trace.total_regret;
    trace.rows.push_back(row);
    bandit::StepAggregate agg;
    agg.beta = radius;
    agg.optimistic_total = best_v;
    agg.truth_opt_total = opt;
    trace.steps.push_back(agg);
  }
  if (final_state) *final_state = std::move(st);
  return trace;
}

double mixture_sup_error(const bandit::GfucbResult& trained, const std::vector<double>& mixture,
                         const TransferTask& task, const std::vector<Input>& test_inputs) {
  double sup = 0.0;
  for (const Input& x : test_inputs) {
    double pred = 0.0;
    for (std::size_t i = 0; i < mixture.size(); ++i)
      pred += mixture[i] * trained.fhat.predict(static_cast<int>(i), x);
    sup = std::max(sup, std::abs(pred - task.target(x)));
  }
  return sup;
}

}  // namespace mrl::transfer
