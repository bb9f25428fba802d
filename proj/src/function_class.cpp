#include "mrl/function_class.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mrl/kernels.hpp"

namespace mrl {

namespace {

void check_same_binding(const MultiheadFunction& f, const MultiheadFunction& g, int num_tasks) {
  if (f.cls == nullptr || g.cls == nullptr || f.cls != g.cls)
    throw std::invalid_argument("multihead functions bound to different classes");
  if (f.tasks() != num_tasks || g.tasks() != num_tasks)
    throw std::invalid_argument("task count mismatch with history");
}

linalg::Mat ridged(const linalg::Mat& gram, double ridge) {
  linalg::Mat g = gram;
  for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) += ridge;
  return g;
}

// Center predictions on the history of one task, clamped.
std::vector<double> center_predictions(const ConfidenceSet& set, const DesignCache& cache,
                                       int task) {
  const int n = cache.n(task);
  std::vector<double> y(n);
  const auto& rows = cache.rows(set.center.phi_index, task);
  const int k = set.cls->dim_k();
  kernels::matvec(rows.data(), n, k, set.center.head(task), y.data());
  for (double& v : y) v = set.center.clamp(v);
  return y;
}

}  // namespace

double FeatureClass::log_cover(double) const {
  if (members.empty()) throw std::invalid_argument("empty feature class");
  return std::log(static_cast<double>(members.size()));
}

double MultiheadFunction::clamp(double v) const {
  return std::min(value_cap, std::max(-value_cap, v));
}

double MultiheadFunction::predict(int task, const Input& x) const {
  const std::vector<double> feat = cls->members[phi_index].eval(x);
  return predict_feat(task, feat.data());
}

double MultiheadFunction::predict_feat(int task, const double* feat) const {
  return clamp(kernels::dot(feat, head(task), heads.cols()));
}

int MultitaskHistory::total() const {
  int n = 0;
  for (const auto& v : inputs) n += static_cast<int>(v.size());
  return n;
}

void MultitaskHistory::append(int task, Input x, double reward) {
  if (task < 0 || task >= num_tasks()) throw std::invalid_argument("task index out of range");
  inputs[task].push_back(std::move(x));
  rewards[task].push_back(reward);
}

DesignCache::DesignCache(const FeatureClass& cls, const MultitaskHistory& history)
    : cls_(&cls), history_(&history) {
  const std::size_t slots =
      cls.members.size() * static_cast<std::size_t>(history.num_tasks());
  rows_.resize(slots);
  xtr_.resize(slots);
  const int k = cls.dim_k();
  gram_.assign(slots, linalg::Mat(k, k));
  for (auto& v : xtr_) v.assign(k, 0.0);
  reward_sumsq_.assign(history.num_tasks(), 0.0);
  synced_.assign(history.num_tasks(), 0);
  sync();
}

void DesignCache::sync() {
  const int k = cls_->dim_k();
  for (int task = 0; task < history_->num_tasks(); ++task) {
    const int n = history_->len(task);
    for (int s = synced_[task]; s < n; ++s) {
      const Input& x = history_->inputs[task][s];
      const double r = history_->rewards[task][s];
      reward_sumsq_[task] += r * r;
      for (std::size_t m = 0; m < cls_->members.size(); ++m) {
        const std::vector<double> feat = cls_->members[m].eval(x);
        auto& block = rows_[idx(static_cast<int>(m), task)];
        block.insert(block.end(), feat.begin(), feat.end());
        linalg::syr_update(gram_[idx(static_cast<int>(m), task)], feat.data());
        kernels::axpy(r, feat.data(), xtr_[idx(static_cast<int>(m), task)].data(), k);
      }
    }
    synced_[task] = n;
  }
}

double empirical_sq_distance(const MultiheadFunction& f, const MultiheadFunction& g,
                             const MultitaskHistory& history) {
  check_same_binding(f, g, history.num_tasks());
  double acc = 0.0;
  for (int task = 0; task < history.num_tasks(); ++task) {
    for (const Input& x : history.inputs[task]) {
      const double d = f.predict(task, x) - g.predict(task, x);
      acc += d * d;
    }
  }
  return acc;
}

double empirical_sq_distance(const MultiheadFunction& f, const MultiheadFunction& g,
                             const DesignCache& cache) {
  check_same_binding(f, g, cache.history().num_tasks());
  const int k = cache.cls().dim_k();
  double acc = 0.0;
  std::vector<double> pf, pg;
  for (int task = 0; task < cache.history().num_tasks(); ++task) {
    const int n = cache.n(task);
    pf.resize(n);
    pg.resize(n);
    kernels::matvec(cache.rows(f.phi_index, task).data(), n, k, f.head(task), pf.data());
    kernels::matvec(cache.rows(g.phi_index, task).data(), n, k, g.head(task), pg.data());
    for (int s = 0; s < n; ++s) {
      const double d = f.clamp(pf[s]) - g.clamp(pg[s]);
      acc += d * d;
    }
  }
  return acc;
}

MultiheadFunction erm_fit(const MultitaskHistory& history, const FeatureClass& cls, double ridge,
                          double value_cap) {
  DesignCache cache(cls, history);
  return erm_fit(cache, ridge, value_cap);
}

MultiheadFunction erm_fit(const DesignCache& cache, double ridge, double value_cap) {
  if (ridge <= 0.0) throw std::invalid_argument("ridge must be positive");
  const FeatureClass& cls = cache.cls();
  const int num_tasks = cache.history().num_tasks();
  const int k = cls.dim_k();

  MultiheadFunction best;
  double best_loss = std::numeric_limits<double>::infinity();
  for (int m = 0; m < static_cast<int>(cls.members.size()); ++m) {
    linalg::Mat heads(num_tasks, k);
    double loss = 0.0;
    for (int task = 0; task < num_tasks; ++task) {
      const linalg::Mat l = linalg::cholesky(ridged(cache.gram(m, task), ridge));
      const std::vector<double> w = linalg::chol_solve(l, cache.feat_rewards(m, task).data());
      // Penalized loss collapses to r^T r - w^T (X^T r) at the ridge optimum.
      loss += cache.reward_sumsq(task) -
              kernels::dot(w.data(), cache.feat_rewards(m, task).data(), k);
      std::copy(w.begin(), w.end(), heads.row(task));
    }
    if (loss < best_loss) {
      best_loss = loss;
      best.cls = &cls;
      best.phi_index = m;
      best.heads = std::move(heads);
      best.value_cap = value_cap;
    }
  }
  return best;
}

double total_ridge_loss(const MultiheadFunction& f, const MultitaskHistory& history,
                        double ridge) {
  double loss = 0.0;
  for (int task = 0; task < history.num_tasks(); ++task) {
    for (int s = 0; s < history.len(task); ++s) {
      const double d = f.predict(task, history.inputs[task][s]) - history.rewards[task][s];
      loss += d * d;
    }
    loss += ridge * kernels::sumsq(f.head(task), f.heads.cols());
  }
  return loss;
}

double beta_bandit(int num_tasks, int dim_k, int step, double log_cover, double alpha,
                   double delta) {
  if (num_tasks < 1 || dim_k < 1 || step < 1)
    throw std::invalid_argument("beta_bandit: M, k, t must be >= 1");
  if (delta <= 0.0 || delta > 1.0)
    throw std::invalid_argument("beta_bandit: delta must be in (0, 1]");
  if (alpha < 0.0 || log_cover < 0.0)
    throw std::invalid_argument("beta_bandit: alpha and log_cover must be nonnegative");
  const double m = num_tasks;
  const double k = dim_k;
  const double t = step;
  const double log_term = log_cover + std::log(1.0 / delta);
  const double tail = std::log(2.0 * m * t * t / delta);
  return 12.0 * m * k + 12.0 * log_term + 8.0 * alpha * std::sqrt(m * t * k * (m * t + tail));
}

bool confidence_contains(const MultiheadFunction& candidate, const ConfidenceSet& set) {
  return empirical_sq_distance(candidate, set.center, *set.history) <= set.beta;
}

PerPhiSolve per_phi_solve(const ConfidenceSet& set, const DesignCache& cache, int phi_index) {
  const int num_tasks = set.history->num_tasks();
  const int k = set.cls->dim_k();
  PerPhiSolve out;
  out.phi_index = phi_index;
  out.head_fit = linalg::Mat(num_tasks, k);
  out.chol.reserve(num_tasks);
  double residual = 0.0;
  std::vector<double> xty(k);
  for (int task = 0; task < num_tasks; ++task) {
    out.chol.push_back(linalg::cholesky(ridged(cache.gram(phi_index, task), set.ridge)));
    const std::vector<double> yhat = center_predictions(set, cache, task);
    kernels::matvec_t(cache.rows(phi_index, task).data(), cache.n(task), k, yhat.data(),
                      xty.data());
    const std::vector<double> w = linalg::chol_solve(out.chol.back(), xty.data());
    residual += kernels::sumsq(yhat.data(), yhat.size()) -
                kernels::dot(w.data(), xty.data(), k) -
                set.ridge * kernels::sumsq(w.data(), k);
    std::copy(w.begin(), w.end(), out.head_fit.row(task));
  }
  out.residual = std::max(residual, 0.0);
  return out;
}

Strategy strategy_from_string(const std::string& s) {
  if (s == "decoupled") return Strategy::kDecoupled;
  if (s == "sweep") return Strategy::kSweep;
  if (s == "exact") return Strategy::kExact;
  throw std::invalid_argument("unknown strategy: " + s);
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::kDecoupled: return "decoupled";
    case Strategy::kSweep: return "sweep";
    case Strategy::kExact: return "exact";
  }
  return "?";
}

namespace {

// Per-candidate scores for one task: mean and bonus base of every action.
struct TaskScores {
  std::vector<double> mean;        // q^T wbar
  std::vector<double> bonus_base;  // q^T G^{-1} q
};

struct PhiScores {
  PerPhiSolve solve;
  double slack = 0.0;
  std::vector<TaskScores> tasks;
};

PhiScores score_phi(const ConfidenceSet& set, const DesignCache& cache, int phi_index,
                    const std::vector<std::vector<Input>>& queries) {
  PhiScores out;
  out.solve = per_phi_solve(set, cache, phi_index);
  out.slack = std::max(set.beta - out.solve.residual, 0.0);
  const int num_tasks = static_cast<int>(queries.size());
  out.tasks.resize(num_tasks);
  for (int task = 0; task < num_tasks; ++task) {
    auto& ts = out.tasks[task];
    const auto& acts = queries[task];
    ts.mean.resize(acts.size());
    ts.bonus_base.resize(acts.size());
    for (std::size_t a = 0; a < acts.size(); ++a) {
      const std::vector<double> q = set.cls->members[phi_index].eval(acts[a]);
      ts.mean[a] = kernels::dot(q.data(), out.solve.head_fit.row(task), q.size());
      ts.bonus_base[a] = linalg::chol_quadform(out.solve.chol[task], q.data());
    }
  }
  return out;
}

// Clamped optimistic value of a full action tuple: the joint slack is shared
// across tasks in proportion to each bonus base (the Cauchy-Schwarz split).
double tuple_value(const ConfidenceSet& set, const PhiScores& ps, const std::vector<int>& tuple,
                   std::vector<double>* per_task) {
  const int num_tasks = static_cast<int>(tuple.size());
  double base_sum = 0.0;
  for (int i = 0; i < num_tasks; ++i) base_sum += ps.tasks[i].bonus_base[tuple[i]];
  const double scale =
      (ps.slack > 0.0 && base_sum > 0.0) ? std::sqrt(ps.slack / base_sum) : 0.0;
  double total = 0.0;
  for (int i = 0; i < num_tasks; ++i) {
    const double v = set.center.clamp(ps.tasks[i].mean[tuple[i]] +
                                      scale * ps.tasks[i].bonus_base[tuple[i]]);
    if (per_task) (*per_task)[i] = v;
    total += v;
  }
  return total;
}

struct PhiChoice {
  std::vector<int> actions;
  std::vector<double> values;
  double total = -std::numeric_limits<double>::infinity();
};

PhiChoice choose_decoupled(const ConfidenceSet& set, const PhiScores& ps) {
  PhiChoice c;
  const int num_tasks = static_cast<int>(ps.tasks.size());
  c.actions.resize(num_tasks);
  c.values.resize(num_tasks);
  c.total = 0.0;
  for (int i = 0; i < num_tasks; ++i) {
    const auto& ts = ps.tasks[i];
    int best_a = 0;
    double best_v = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < ts.mean.size(); ++a) {
      const double v =
          set.center.clamp(ts.mean[a] + std::sqrt(ps.slack * ts.bonus_base[a]));
      if (v > best_v) {
        best_v = v;
        best_a = static_cast<int>(a);
      }
    }
    c.actions[i] = best_a;
    c.values[i] = best_v;
    c.total += best_v;
  }
  return c;
}

PhiChoice choose_exact(const ConfidenceSet& set, const PhiScores& ps) {
  const int num_tasks = static_cast<int>(ps.tasks.size());
  std::vector<int> tuple(num_tasks, 0);
  std::vector<double> vals(num_tasks);
  PhiChoice c;
  for (;;) {
    const double total = tuple_value(set, ps, tuple, &vals);
    if (total > c.total) {
      c.total = total;
      c.actions = tuple;
      c.values = vals;
    }
    int pos = num_tasks - 1;
    while (pos >= 0) {
      if (++tuple[pos] < static_cast<int>(ps.tasks[pos].mean.size())) break;
      tuple[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return c;
}

PhiChoice choose_sweep(const ConfidenceSet& set, const PhiScores& ps) {
  const int num_tasks = static_cast<int>(ps.tasks.size());
  std::vector<double> lambdas = {0.0};
  for (int i = 0; i < 25; ++i) lambdas.push_back(1e-3 * std::pow(10.0, 6.0 * i / 24.0));
  for (const auto& ts : ps.tasks) {
    const std::size_t na = ts.mean.size();
    for (std::size_t a = 0; a < na; ++a) {
      for (std::size_t a2 = 0; a2 < na; ++a2) {
        const double db = ts.bonus_base[a2] - ts.bonus_base[a];
        if (db == 0.0) continue;
        const double lam = (ts.mean[a] - ts.mean[a2]) / db;
        if (lam > 0.0 && std::isfinite(lam)) lambdas.push_back(lam);
      }
    }
  }
  std::sort(lambdas.begin(), lambdas.end());
  lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());

  PhiChoice c;
  std::vector<int> tuple(num_tasks);
  std::vector<double> vals(num_tasks);
  auto consider = [&](const std::vector<int>& t) {
    const double total = tuple_value(set, ps, t, &vals);
    if (total > c.total) {
      c.total = total;
      c.actions = t;
      c.values = vals;
    }
  };
  for (double lam : lambdas) {
    for (int i = 0; i < num_tasks; ++i) {
      const auto& ts = ps.tasks[i];
      int best_a = 0;
      double best_v = -std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < ts.mean.size(); ++a) {
        const double v = ts.mean[a] + lam * ts.bonus_base[a];
        if (v > best_v) {
          best_v = v;
          best_a = static_cast<int>(a);
        }
      }
      tuple[i] = best_a;
    }
    consider(tuple);
  }
  // lambda -> infinity: pure bonus maximization, means as tie-breaker.
  for (int i = 0; i < num_tasks; ++i) {
    const auto& ts = ps.tasks[i];
    int best_a = 0;
    for (std::size_t a = 1; a < ts.mean.size(); ++a) {
      if (ts.bonus_base[a] > ts.bonus_base[best_a] ||
          (ts.bonus_base[a] == ts.bonus_base[best_a] && ts.mean[a] > ts.mean[best_a])) {
        best_a = static_cast<int>(a);
      }
    }
    tuple[i] = best_a;
  }
  consider(tuple);
  return c;
}

}  // namespace

SelectResult optimistic_select(const ConfidenceSet& set,
                               const std::vector<std::vector<Input>>& queries,
                               Strategy strategy) {
  DesignCache cache(*set.cls, *set.history);
  return optimistic_select(set, cache, queries, strategy);
}

SelectResult optimistic_select(const ConfidenceSet& set, const DesignCache& cache,
                               const std::vector<std::vector<Input>>& queries,
                               Strategy strategy) {
  if (set.beta < 0.0) throw std::invalid_argument("optimistic_select: beta must be >= 0");
  if (queries.size() != static_cast<std::size_t>(set.history->num_tasks()))
    throw std::invalid_argument("optimistic_select: one query per task required");
  for (const auto& acts : queries)
    if (acts.empty()) throw std::invalid_argument("optimistic_select: empty action set");

  SelectResult best;
  double best_total = -std::numeric_limits<double>::infinity();
  for (int m = 0; m < static_cast<int>(set.cls->members.size()); ++m) {
    const PhiScores ps = score_phi(set, cache, m, queries);
    PhiChoice choice;
    switch (strategy) {
      case Strategy::kDecoupled: choice = choose_decoupled(set, ps); break;
      case Strategy::kExact: choice = choose_exact(set, ps); break;
      case Strategy::kSweep: choice = choose_sweep(set, ps); break;
    }
    if (choice.total > best_total) {
      best_total = choice.total;
      best.actions = std::move(choice.actions);
      best.values = std::move(choice.values);
      best.total_value = choice.total;
      best.witness_phi = m;
      best.witness_heads = ps.solve.head_fit;
      best.witness_slack = ps.slack;
    }
  }
  return best;
}

double width(const ConfidenceSet& set, const std::vector<Input>& points) {
  DesignCache cache(*set.cls, *set.history);
  return width(set, cache, points);
}

double width(const ConfidenceSet& set, const DesignCache& cache,
             const std::vector<Input>& points) {
  const int num_tasks = set.history->num_tasks();
  if (static_cast<int>(points.size()) != num_tasks)
    throw std::invalid_argument("width: one input per task required");
  std::vector<std::vector<Input>> queries(num_tasks);
  for (int i = 0; i < num_tasks; ++i) queries[i] = {points[i]};

  double upper = -std::numeric_limits<double>::infinity();
  double lower = std::numeric_limits<double>::infinity();
  for (int m = 0; m < static_cast<int>(set.cls->members.size()); ++m) {
    const PhiScores ps = score_phi(set, cache, m, queries);
    double base_sum = 0.0;
    for (int i = 0; i < num_tasks; ++i) base_sum += ps.tasks[i].bonus_base[0];
    const double scale =
        (ps.slack > 0.0 && base_sum > 0.0) ? std::sqrt(ps.slack / base_sum) : 0.0;
    double up = 0.0;
    double lo = 0.0;
    for (int i = 0; i < num_tasks; ++i) {
      const double mean = ps.tasks[i].mean[0];
      const double share = scale * ps.tasks[i].bonus_base[0];
      up += set.center.clamp(mean + share);
      lo += set.center.clamp(mean - share);
    }
    upper = std::max(upper, up);
    lower = std::min(lower, lo);
  }
  return upper - lower;
}

}  // namespace mrl
