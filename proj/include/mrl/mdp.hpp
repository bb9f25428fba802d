#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "mrl/bandit.hpp"
#include "mrl/function_class.hpp"

namespace mrl::mdp {

// Finite multitask episodic MDP with a shared finite representation class
// over fused (state, action) inputs. Transitions are stored per task and
// level as row-major (S*A) x S blocks.
struct MDPInstance {
  int num_states = 0;
  int num_actions = 0;
  int horizon = 0;
  int num_tasks = 0;

  // transitions[task] has horizon * (S*A) * S entries; row (h, s, a) holds
  // the next-state distribution.
  std::vector<std::vector<double>> transitions;
  std::vector<std::vector<double>> rewards;  // [task][(s*A + a)] mean reward
  std::vector<std::vector<double>> start;    // [task][s] initial distribution

  std::shared_ptr<FeatureClass> cls;
  // Heads reproducing the reward table through the true member (one row per
  // task); environments fill this so reductions can share exact truths.
  linalg::Mat true_heads;
  double noise_sigma = 0.01;  // uniform half-width on observed rewards
  double head_bound = 1.0;    // D

  Input input_of(int s, int a) const {
    return Input{static_cast<double>(s), static_cast<double>(a)};
  }
  int sa_index(int s, int a) const { return s * num_actions + a; }
  const double* p_row(int task, int h, int s, int a) const {
    const std::size_t sa = static_cast<std::size_t>(num_states) * num_actions;
    return transitions[task].data() + ((static_cast<std::size_t>(h) - 1) * sa + sa_index(s, a)) *
                                          num_states;
  }
};

struct Transition {
  int state = 0;
  int action = 0;
  double reward = 0.0;  // observed (noisy)
  int next_state = 0;
};

// One episode: exactly H transitions per task.
struct EpisodeLog {
  std::vector<std::vector<Transition>> steps;  // [task][h-1]
};

struct MazeLayout {
  int start = 0;
  int exit = 15;
  std::vector<int> lava;  // at most two cells
};

struct GridMazeOptions {
  int horizon = 20;
  int num_members = 3;
  double noise_sigma = 0.01;
  double step_reward = -0.01;
  double lava_reward = -0.1;
  double exit_bonus = 1.0;
};

// 4x4 grid with up/down/left/right moves; boundary-blocked moves keep the
// position, entering the exit pays the bonus (net of the step cost) and the
// exit is absorbing with zero reward. Candidate representations are the true
// tabular one-hot over (s, a) plus index-permuted decoys.
MDPInstance make_grid_maze(const std::vector<MazeLayout>& layouts, std::uint64_t seed,
                           const GridMazeOptions& opts = {});

struct RandomLinearOptions {
  int num_members = 4;
  double noise_sigma = 0.01;
};

// Random linear MDP: true features on the k-simplex, transitions mixtures of
// stochastic factor rows, rewards linear in the features. Tabular-complete
// head spaces make the inherent Bellman error zero by construction.
MDPInstance make_random_linear_mdp(int dim_k, int num_states, int num_actions, int horizon,
                                   int num_tasks, std::uint64_t seed,
                                   const RandomLinearOptions& opts = {});

// Exact finite-horizon value iteration; returns V[h-1][s] for h = 1..H+1
// (last row zero).
std::vector<std::vector<double>> value_iteration(const MDPInstance& inst, int task);

// Per-level regression data: fused inputs and observed rewards live in the
// history, successor states alongside.
struct LevelData {
  MultitaskHistory history;
  std::vector<std::vector<int>> next_states;  // [task][sample]

  explicit LevelData(int num_tasks = 0) : history(num_tasks), next_states(num_tasks) {}
};

// Ridge fit of targets R + V_next(s') per candidate member and task, heads
// projected onto the D-ball by radial scaling; minimal-loss member wins.
// Targets are clamped to [-1, 2].
MultiheadFunction lsvi_fit_level(const LevelData& data, const DesignCache& cache,
                                 const std::vector<std::vector<double>>& v_next, double ridge,
                                 double head_bound, double value_cap = 1.0);
MultiheadFunction lsvi_fit_level(const LevelData& data, const FeatureClass& cls,
                                 const std::vector<std::vector<double>>& v_next, double ridge,
                                 double head_bound, double value_cap = 1.0);

// Q-values of a fitted level function, collapsed to a state-value table
// clamp(max_a f(s,a), 0, 1) per task.
std::vector<std::vector<double>> induced_value_table(const MDPInstance& inst,
                                                     const MultiheadFunction& f);

// Level radius beta_{h,t} = (B1 + sqrt(MT) I + sqrt(B2))^2 with
// B1 = sqrt(2Mk + log_cover + log(1/delta)) + 1 and
// B2 = 2 sqrt(MT + log(2MT^2/delta)).
double beta_mdp(int num_tasks, int dim_k, int episodes, double log_cover, double delta,
                double ibe);

struct MtlsviResult {
  bandit::RegretTrace trace;
  std::vector<EpisodeLog> episodes;
};

// Backward LSVI with per-level functional confidence sets (one bandit-style
// optimistic selection per level). Per-episode value gaps are exact: the
// greedy policy induced by each level's winning candidate is evaluated by
// dense dynamic programming against the known instance.
MtlsviResult mtlsvi_run(const MDPInstance& inst, int episodes, const bandit::GfucbConfig& cfg,
                        std::uint64_t seed);

// Monte-Carlo inherent-Bellman-error estimate: random members of the
// Q-class are pushed through the exact Bellman operator and refit within the
// class; returns the largest sup-norm residual seen. A heuristic lower bound
// of the sup with least-squares (not Chebyshev) fitting bias.
double ibe_estimate(const MDPInstance& inst, const FeatureClass& cls, int n_samples,
                    std::uint64_t seed);

// The 1-horizon reduction: a bandit whose contexts are start states, action
// features the fused (s, a) inputs, and uniform reward noise with matching
// stream tags, so traces can be compared step by step.
bandit::BanditInstance induced_bandit(const MDPInstance& inst);

}  // namespace mrl::mdp
