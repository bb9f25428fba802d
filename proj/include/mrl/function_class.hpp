#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mrl/linalg.hpp"

namespace mrl {

// A context-action (or state-action) pair, already fused into one vector.
using Input = std::vector<double>;

// One member of the representation class: a pure map from inputs to a
// k-vector with ||phi(x)||_2 <= 1 on its declared domain.
struct FeatureMap {
  int id = 0;
  int dim_k = 0;
  std::function<std::vector<double>(const Input&)> eval;
};

// Finite ordered representation class. Finite classes cover themselves, so
// the log covering number is log(member count) at every scale.
struct FeatureClass {
  std::vector<FeatureMap> members;
  int true_index = -1;  // ground truth; known to environments and tests only

  int dim_k() const { return members.empty() ? 0 : members.front().dim_k; }
  double log_cover(double alpha) const;
};

// Shared representation index plus one linear head per task. Predictions are
// clamped to [-value_cap, value_cap]; that is how the |f(x)| <= 1 membership
// constraint is enforced throughout.
struct MultiheadFunction {
  const FeatureClass* cls = nullptr;
  int phi_index = 0;
  linalg::Mat heads;  // one row per task, k entries each
  double value_cap = 1.0;

  int tasks() const { return static_cast<int>(heads.rows()); }
  const double* head(int task) const { return heads.row(task); }
  double clamp(double v) const;
  double predict(int task, const Input& x) const;
  // Same, with the features already evaluated.
  double predict_feat(int task, const double* feat) const;
};

// Append-only per-task (input, reward) sequences; defines the empirical
// 2-norm every confidence-set computation runs over.
struct MultitaskHistory {
  explicit MultitaskHistory(int num_tasks = 0)
      : inputs(num_tasks), rewards(num_tasks) {}

  std::vector<std::vector<Input>> inputs;
  std::vector<std::vector<double>> rewards;

  int num_tasks() const { return static_cast<int>(inputs.size()); }
  int len(int task) const { return static_cast<int>(inputs[task].size()); }
  int total() const;
  void append(int task, Input x, double reward);
};

// Caches evaluated features (and reward cross-products) for every
// (member, task) pair of a history. The engines keep one per run and sync it
// as the history grows, which turns all repeated fits into rank-1 updates
// plus kernel calls over contiguous rows.
class DesignCache {
 public:
  DesignCache(const FeatureClass& cls, const MultitaskHistory& history);

  void sync();

  const FeatureClass& cls() const { return *cls_; }
  const MultitaskHistory& history() const { return *history_; }
  int n(int task) const { return synced_[task]; }
  // Row-major n x k feature block for one (member, task).
  const std::vector<double>& rows(int member, int task) const {
    return rows_[idx(member, task)];
  }
  const linalg::Mat& gram(int member, int task) const { return gram_[idx(member, task)]; }
  const std::vector<double>& feat_rewards(int member, int task) const {
    return xtr_[idx(member, task)];
  }
  double reward_sumsq(int task) const { return reward_sumsq_[task]; }

 private:
  std::size_t idx(int member, int task) const {
    return static_cast<std::size_t>(member) * history_->num_tasks() + task;
  }

  const FeatureClass* cls_;
  const MultitaskHistory* history_;
  std::vector<std::vector<double>> rows_;
  std::vector<linalg::Mat> gram_;
  std::vector<std::vector<double>> xtr_;
  std::vector<double> reward_sumsq_;
  std::vector<int> synced_;
};

// || f - g ||^2_{2,E}: summed squared prediction differences over the whole
// history. Throws std::invalid_argument on task-count or class mismatch.
double empirical_sq_distance(const MultiheadFunction& f, const MultiheadFunction& g,
                             const MultitaskHistory& history);
double empirical_sq_distance(const MultiheadFunction& f, const MultiheadFunction& g,
                             const DesignCache& cache);

// Exact ERM over the finite class: per candidate member, closed-form ridge
// least squares per task; minimal total (ridge-penalized) loss wins, ties to
// the lowest member index. Empty history returns member 0 with zero heads.
MultiheadFunction erm_fit(const MultitaskHistory& history, const FeatureClass& cls, double ridge,
                          double value_cap = 1.0);
MultiheadFunction erm_fit(const DesignCache& cache, double ridge, double value_cap = 1.0);

// Data loss plus ridge penalty of an explicit multihead function; the
// quantity erm_fit minimizes.
double total_ridge_loss(const MultiheadFunction& f, const MultitaskHistory& history, double ridge);

// Confidence width term
//   beta_t = 12 M k + 12 (log_cover + log(1/delta))
//            + 8 alpha sqrt(M t k (M t + log(2 M t^2 / delta))).
double beta_bandit(int num_tasks, int dim_k, int step, double log_cover, double alpha,
                   double delta);

struct ConfidenceSet {
  MultiheadFunction center;
  double beta = 0.0;
  const MultitaskHistory* history = nullptr;
  const FeatureClass* cls = nullptr;
  double ridge = 1e-6;
};

// Membership: squared empirical distance to the center at most beta,
// boundary inclusive. Prediction caps hold by construction (clamping).
bool confidence_contains(const MultiheadFunction& candidate, const ConfidenceSet& set);

// Closed-form realization of the per-candidate optimization oracle: ridge
// fit of the center's predictions in the candidate's feature coordinates.
struct PerPhiSolve {
  int phi_index = 0;
  std::vector<linalg::Mat> chol;  // per task, lower factor of X^T X + ridge I
  linalg::Mat head_fit;           // one row per task: least-squares head wbar_i
  double residual = 0.0;          // c' = sum_i ||X_i wbar_i - yhat_i||^2
};

PerPhiSolve per_phi_solve(const ConfidenceSet& set, const DesignCache& cache, int phi_index);

enum class Strategy { kDecoupled, kSweep, kExact };

Strategy strategy_from_string(const std::string& s);
std::string to_string(Strategy s);

struct SelectResult {
  std::vector<int> actions;     // chosen action index per task
  std::vector<double> values;   // per-task optimistic values, clamped
  double total_value = 0.0;
  int witness_phi = 0;
  linalg::Mat witness_heads;    // the winning candidate's fitted heads
  double witness_slack = 0.0;
};

// Joint optimistic action choice over the confidence set; queries hold the
// fused context-action input for every available action of every task.
SelectResult optimistic_select(const ConfidenceSet& set,
                               const std::vector<std::vector<Input>>& queries, Strategy strategy);
SelectResult optimistic_select(const ConfidenceSet& set, const DesignCache& cache,
                               const std::vector<std::vector<Input>>& queries, Strategy strategy);

// Confidence-set width at one input per task:
//   sup_{f_up, f_lo in F} sum_i f_up^(i)(x_i) - f_lo^(i)(x_i).
double width(const ConfidenceSet& set, const std::vector<Input>& points);
double width(const ConfidenceSet& set, const DesignCache& cache,
             const std::vector<Input>& points);

}  // namespace mrl
