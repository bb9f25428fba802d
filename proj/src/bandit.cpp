#include "mrl/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mrl/kernels.hpp"
#include "mrl/rng.hpp"

namespace mrl::bandit {

namespace {

std::vector<double> unit_gauss_vector(rng::Stream& s, int dim) {
  std::vector<double> v(dim);
  double nrm = 0.0;
  do {
    for (double& x : v) x = s.gauss();
    nrm = std::sqrt(kernels::sumsq(v.data(), dim));
  } while (nrm < 1e-12);
  for (double& x : v) x /= nrm;
  return v;
}

int nearest_anchor(const std::vector<std::vector<double>>& anchors, const Input& x) {
  int best = 0;
  double best_d = kernels::sumsq_diff(anchors[0].data(), x.data(), x.size());
  for (std::size_t j = 1; j < anchors.size(); ++j) {
    const double d = kernels::sumsq_diff(anchors[j].data(), x.data(), x.size());
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(j);
    }
  }
  return best;
}

FeatureMap make_decoder(int id, int categories, std::vector<std::vector<double>> anchors,
                        std::vector<int> relabel = {}) {
  FeatureMap fm;
  fm.id = id;
  fm.dim_k = categories;
  if (relabel.empty()) {
    relabel.resize(categories);
    for (int i = 0; i < categories; ++i) relabel[i] = i;
  }
  fm.eval = [categories, anchors = std::move(anchors),
             relabel = std::move(relabel)](const Input& x) {
    std::vector<double> one_hot(categories, 0.0);
    one_hot[relabel[nearest_anchor(anchors, x)]] = 1.0;
    return one_hot;
  };
  return fm;
}

double draw_noise(const BanditInstance& inst, std::uint64_t seed, int t, int task) {
  rng::Stream s(rng::derive(seed, {rng::kTagNoise, static_cast<std::uint64_t>(t),
                                   static_cast<std::uint64_t>(task), 1}));
  if (inst.noise_kind == NoiseKind::kUniform)
    return s.uniform(-inst.noise_sigma, inst.noise_sigma);
  return inst.noise_sigma * s.gauss();
}

}  // namespace

double RegretTrace::cum_at(int t) const {
  double last = 0.0;
  for (const StepRecord& r : rows) {
    if (r.t > t) break;
    last = r.cum_regret;
  }
  return last;
}

BetaConfig BetaConfig::tuned(double a, double b, double c) {
  BetaConfig cfg;
  cfg.mode = Mode::kTuned;
  cfg.a = a;
  cfg.b = b;
  cfg.c = c;
  return cfg;
}

double BetaConfig::tuned_value(int t) const { return a * std::log(b * t + c); }

double GfucbConfig::resolve_alpha(int dim_k, int num_tasks, int horizon) const {
  if (alpha >= 0.0) return alpha;
  return 1.0 / (static_cast<double>(dim_k) * num_tasks * horizon);
}

BanditInstance make_latent_category_bandit(int categories, int actions_per_context,
                                           int num_tasks, int dim_k, std::uint64_t seed,
                                           const LatentCategoryOptions& opts) {
  if (categories < 2) throw std::invalid_argument("latent bandit: need at least 2 categories");
  if (actions_per_context < 2) throw std::invalid_argument("latent bandit: need at least 2 actions");
  if (dim_k != categories)
    throw std::invalid_argument("latent bandit: one-hot layout requires k == categories");
  if (opts.num_members < 1) throw std::invalid_argument("latent bandit: need >= 1 member");

  rng::Stream env(rng::derive(seed, {rng::kTagEnv}));
  const int c = categories;

  std::vector<std::vector<double>> prototypes(c, std::vector<double>(c, 0.0));
  for (int i = 0; i < c; ++i) prototypes[i][i] = 1.0;

  const int true_index = static_cast<int>(env.below(opts.num_members));
  auto cls = std::make_shared<FeatureClass>();
  cls->true_index = true_index;
  std::vector<std::pair<int, int>> used_pairs;
  for (int m = 0; m < opts.num_members; ++m) {
    if (m == true_index) {
      cls->members.push_back(make_decoder(m, c, prototypes));
      continue;
    }
    if (opts.decoy_style == LatentCategoryOptions::DecoyStyle::kPairMerge) {
      // Correct nearest-prototype decoding except one merged category pair.
      int u = 0, v = 0;
      for (int attempt = 0; attempt < 500; ++attempt) {
        u = static_cast<int>(env.below(c));
        v = static_cast<int>(env.below(c));
        if (u == v) continue;
        if (std::find(used_pairs.begin(), used_pairs.end(), std::make_pair(u, v)) ==
            used_pairs.end())
          break;
      }
      used_pairs.emplace_back(u, v);
      std::vector<int> relabel(c);
      for (int j = 0; j < c; ++j) relabel[j] = j;
      relabel[u] = v;
      cls->members.push_back(make_decoder(m, c, prototypes, std::move(relabel)));
      continue;
    }
    // Decoys decode by nearest random anchor. Resample until the decoy
    // merges at least two clean prototypes, so it cannot be a mere
    // relabeling of the true decoder.
    std::vector<std::vector<double>> anchors;
    for (int attempt = 0; attempt < 200; ++attempt) {
      anchors.clear();
      for (int j = 0; j < c; ++j) anchors.push_back(unit_gauss_vector(env, c));
      std::vector<int> decode(c);
      for (int j = 0; j < c; ++j) decode[j] = nearest_anchor(anchors, prototypes[j]);
      std::vector<int> sorted = decode;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) break;
    }
    cls->members.push_back(make_decoder(m, c, std::move(anchors)));
  }

  // Distinct per-task digit-to-reward mappings: evenly spaced values in
  // [0, 1], permuted per task.
  linalg::Mat heads(num_tasks, c);
  for (int i = 0; i < num_tasks; ++i) {
    std::vector<double> sigma(c);
    for (int j = 0; j < c; ++j) sigma[j] = c == 1 ? 1.0 : static_cast<double>(j) / (c - 1);
    for (int j = c - 1; j > 0; --j) std::swap(sigma[j], sigma[env.below(j + 1)]);
    std::copy(sigma.begin(), sigma.end(), heads.row(i));
  }

  BanditInstance inst;
  inst.num_tasks = num_tasks;
  inst.cls = cls;
  inst.truth.cls = cls.get();
  inst.truth.phi_index = true_index;
  inst.truth.heads = std::move(heads);
  inst.truth.value_cap = 1.0;
  inst.noise_sigma = opts.noise_sigma;
  inst.noise_kind = NoiseKind::kGaussian;

  const double perturb = opts.perturb_sigma;
  const int actions = actions_per_context;
  inst.context_sampler = [prototypes, perturb, actions, num_tasks, c](std::uint64_t run_seed,
                                                                      int t) {
    std::vector<std::vector<Input>> contexts(num_tasks);
    for (int task = 0; task < num_tasks; ++task) {
      rng::Stream s(rng::derive(run_seed, {rng::kTagContext, static_cast<std::uint64_t>(t),
                                           static_cast<std::uint64_t>(task), 1}));
      contexts[task].reserve(actions);
      for (int a = 0; a < actions; ++a) {
        Input obs = prototypes[s.below(c)];
        if (perturb > 0.0) {
          for (double& v : obs) v += perturb * s.gauss();
        }
        contexts[task].push_back(std::move(obs));
      }
    }
    return contexts;
  };
  return inst;
}

BanditInstance make_linear_rep_bandit(const std::vector<Input>& pool,
                                      const std::vector<linalg::Mat>& matrices, int true_index,
                                      const linalg::Mat& task_heads, int actions_per_context,
                                      std::uint64_t seed, double noise_sigma) {
  if (pool.empty() || matrices.empty()) throw std::invalid_argument("linear bandit: empty pool or class");
  if (true_index < 0 || true_index >= static_cast<int>(matrices.size()))
    throw std::invalid_argument("linear bandit: true matrix must be in the class");
  if (actions_per_context > static_cast<int>(pool.size()))
    throw std::invalid_argument("linear bandit: more actions than pool points");
  const int k = static_cast<int>(matrices[0].rows());
  const int p = static_cast<int>(matrices[0].cols());

  auto cls = std::make_shared<FeatureClass>();
  cls->true_index = true_index;
  for (std::size_t m = 0; m < matrices.size(); ++m) {
    const linalg::Mat& b = matrices[m];
    for (const Input& x : pool) {
      std::vector<double> f(k);
      kernels::matvec(b.data(), k, p, x.data(), f.data());
      if (kernels::sumsq(f.data(), k) > 1.0 + 1e-9)
        throw std::invalid_argument("linear bandit: feature norm bound violated on pool");
    }
    FeatureMap fm;
    fm.id = static_cast<int>(m);
    fm.dim_k = k;
    fm.eval = [b, k, p](const Input& x) {
      std::vector<double> f(k);
      kernels::matvec(b.data(), k, p, x.data(), f.data());
      return f;
    };
    cls->members.push_back(std::move(fm));
  }

  // Truth must produce rewards in [-1, 1] before noise.
  for (const Input& x : pool) {
    const std::vector<double> f = cls->members[true_index].eval(x);
    for (int i = 0; i < static_cast<int>(task_heads.rows()); ++i) {
      if (std::abs(kernels::dot(f.data(), task_heads.row(i), k)) > 1.0 + 1e-9)
        throw std::invalid_argument("linear bandit: reward bound violated on pool");
    }
  }

  BanditInstance inst;
  inst.num_tasks = static_cast<int>(task_heads.rows());
  inst.cls = cls;
  inst.truth.cls = cls.get();
  inst.truth.phi_index = true_index;
  inst.truth.heads = task_heads;
  inst.truth.value_cap = 1.0;
  inst.noise_sigma = noise_sigma;
  (void)seed;

  const int actions = actions_per_context;
  const int num_tasks = inst.num_tasks;
  inst.context_sampler = [pool, actions, num_tasks](std::uint64_t run_seed, int t) {
    std::vector<std::vector<Input>> contexts(num_tasks);
    for (int task = 0; task < num_tasks; ++task) {
      rng::Stream s(rng::derive(run_seed, {rng::kTagContext, static_cast<std::uint64_t>(t),
                                           static_cast<std::uint64_t>(task), 1}));
      std::vector<int> order(pool.size());
      std::iota(order.begin(), order.end(), 0);
      for (int a = 0; a < actions; ++a) {
        const int j = a + static_cast<int>(s.below(static_cast<std::uint32_t>(order.size() - a)));
        std::swap(order[a], order[j]);
        contexts[task].push_back(pool[order[a]]);
      }
    }
    return contexts;
  };
  return inst;
}

BanditInstance gen_linear_rep_bandit(int dim_k, int input_dim, int pool_size, int num_members,
                                     int num_tasks, int actions_per_context, std::uint64_t seed,
                                     double noise_sigma) {
  rng::Stream env(rng::derive(seed, {rng::kTagEnv, 7}));
  std::vector<Input> pool(pool_size);
  for (Input& x : pool) {
    x = unit_gauss_vector(env, input_dim);
  }
  std::vector<linalg::Mat> mats;
  for (int m = 0; m < num_members; ++m) {
    linalg::Mat b(dim_k, input_dim);
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) = env.gauss();
    double max_norm = 0.0;
    std::vector<double> f(dim_k);
    for (const Input& x : pool) {
      kernels::matvec(b.data(), dim_k, input_dim, x.data(), f.data());
      max_norm = std::max(max_norm, std::sqrt(kernels::sumsq(f.data(), dim_k)));
    }
    const double scale = max_norm > 0.0 ? 1.0 / max_norm : 1.0;
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) *= scale;
    mats.push_back(std::move(b));
  }
  const int true_index = static_cast<int>(env.below(num_members));

  linalg::Mat heads(num_tasks, dim_k);
  for (int i = 0; i < num_tasks; ++i) {
    std::vector<double> theta = unit_gauss_vector(env, dim_k);
    // Scale to meet both the parameter bound and the reward range on the pool.
    double max_abs = 0.0;
    std::vector<double> f(dim_k);
    for (const Input& x : pool) {
      kernels::matvec(mats[true_index].data(), dim_k, input_dim, x.data(), f.data());
      max_abs = std::max(max_abs, std::abs(kernels::dot(f.data(), theta.data(), dim_k)));
    }
    double scale = std::sqrt(static_cast<double>(dim_k));
    if (max_abs * scale > 1.0) scale = 1.0 / max_abs;
    for (int j = 0; j < dim_k; ++j) heads(i, j) = theta[j] * scale;
  }
  return make_linear_rep_bandit(pool, mats, true_index, heads, actions_per_context, seed,
                                noise_sigma);
}

GfucbResult gfucb_run(const BanditInstance& inst, int horizon, const GfucbConfig& cfg,
                      std::uint64_t seed) {
  if (horizon < 1) throw std::invalid_argument("gfucb_run: horizon must be >= 1");
  const int num_tasks = inst.num_tasks;
  const int k = inst.dim_k();
  const double alpha = cfg.resolve_alpha(k, num_tasks, horizon);
  const double log_cover = inst.cls->log_cover(alpha);

  GfucbResult result;
  result.cls = inst.cls;
  result.history = std::make_shared<MultitaskHistory>(num_tasks);
  MultitaskHistory& history = *result.history;
  DesignCache cache(*inst.cls, history);

  RegretTrace& trace = result.trace;
  trace.rows.reserve(static_cast<std::size_t>(horizon) * num_tasks);
  trace.steps.reserve(horizon);

  for (int t = 1; t <= horizon; ++t) {
    cache.sync();
    MultiheadFunction fhat = erm_fit(cache, cfg.ridge);
    const double beta = cfg.beta.mode == BetaConfig::Mode::kTheory
                            ? beta_bandit(num_tasks, k, t, log_cover, alpha, cfg.delta)
                            : cfg.beta.tuned_value(t);
    ConfidenceSet set{fhat, beta, &history, inst.cls.get(), cfg.ridge};

    const std::vector<std::vector<Input>> contexts = inst.context_sampler(seed, t);
    const SelectResult sel = optimistic_select(set, cache, contexts, cfg.strategy);

    StepAggregate agg;
    agg.beta = beta;
    agg.optimistic_total = sel.total_value;
    if (cfg.record_containment)
      agg.contained = empirical_sq_distance(inst.truth, fhat, cache) <= beta;

    std::vector<Input> played(num_tasks);
    double truth_opt_total = 0.0;
    for (int task = 0; task < num_tasks; ++task) {
      const auto& acts = contexts[task];
      const int a = sel.actions[task];
      double best_mean = -2.0;
      for (const Input& x : acts) best_mean = std::max(best_mean, inst.truth.predict(task, x));
      const double mean = inst.truth.predict(task, acts[a]);
      const double reward = mean + draw_noise(inst, seed, t, task);
      history.append(task, acts[a], reward);
      played[task] = acts[a];
      truth_opt_total += best_mean;

      StepRecord row;
      row.t = t;
      row.task = task;
      row.action = a;
      row.reward = reward;
      row.inst_regret = best_mean - mean;
      trace.total_regret += row.inst_regret;
      row.cum_regret = trace.total_regret;
      trace.rows.push_back(row);
    }
    agg.truth_opt_total = truth_opt_total;
    if (cfg.record_width) agg.width = width(set, cache, played);
    trace.steps.push_back(std::move(agg));
    if (t == horizon) {
      cache.sync();
      result.fhat = erm_fit(cache, cfg.ridge);
    }
  }
  return result;
}

double EpsSchedule::value(int t) const {
  switch (kind) {
    case Kind::kConst: return eps0;
    case Kind::kInvT: return std::min(1.0, eps0 / t);
    case Kind::kInvSqrtT: return std::min(1.0, eps0 / std::sqrt(static_cast<double>(t)));
  }
  return eps0;
}

RegretTrace eps_greedy_run(const BanditInstance& inst, int horizon, const EpsSchedule& schedule,
                           double ridge, std::uint64_t seed) {
  if (horizon < 1) throw std::invalid_argument("eps_greedy_run: horizon must be >= 1");
  const int num_tasks = inst.num_tasks;

  // Each task is solved independently: its own history, cache, and fit.
  std::vector<MultitaskHistory> histories(num_tasks, MultitaskHistory(1));
  std::vector<DesignCache> caches;
  caches.reserve(num_tasks);
  for (int task = 0; task < num_tasks; ++task) caches.emplace_back(*inst.cls, histories[task]);

  RegretTrace trace;
  for (int t = 1; t <= horizon; ++t) {
    const std::vector<std::vector<Input>> contexts = inst.context_sampler(seed, t);
    StepAggregate agg;
    double truth_opt_total = 0.0;
    for (int task = 0; task < num_tasks; ++task) {
      caches[task].sync();
      const MultiheadFunction fit = erm_fit(caches[task], ridge);
      const auto& acts = contexts[task];
      rng::Stream explore(rng::derive(seed, {rng::kTagExplore, static_cast<std::uint64_t>(t),
                                             static_cast<std::uint64_t>(task), 1}));
      int a;
      if (explore.uniform01() < schedule.value(t)) {
        a = static_cast<int>(explore.below(static_cast<std::uint32_t>(acts.size())));
      } else {
        a = 0;
        double best = fit.predict(0, acts[0]);
        for (std::size_t j = 1; j < acts.size(); ++j) {
          const double v = fit.predict(0, acts[j]);
          if (v > best) {
            best = v;
            a = static_cast<int>(j);
          }
        }
      }
      double best_mean = -2.0;
      for (const Input& x : acts) best_mean = std::max(best_mean, inst.truth.predict(task, x));
      const double mean = inst.truth.predict(task, acts[a]);
      const double reward = mean + draw_noise(inst, seed, t, task);
      histories[task].append(0, acts[a], reward);
      truth_opt_total += best_mean;

      StepRecord row;
      row.t = t;
      row.task = task;
      row.action = a;
      row.reward = reward;
      row.inst_regret = best_mean - mean;
      trace.total_regret += row.inst_regret;
      row.cum_regret = trace.total_regret;
      trace.rows.push_back(row);
    }
    agg.truth_opt_total = truth_opt_total;
    trace.steps.push_back(std::move(agg));
  }
  return trace;
}

}  // namespace mrl::bandit
