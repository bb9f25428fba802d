#include "mrl/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "mrl/kernels.hpp"
#include "mrl/linalg.hpp"
#include "mrl/rng.hpp"

namespace mrl::mdp {

namespace {

int sample_categorical(rng::Stream& s, const double* dist, int n) {
  const double u = s.uniform01();
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += dist[i];
    if (u < acc) return i;
  }
  return n - 1;
}

std::vector<double> dirichlet_row(rng::Stream& s, int n) {
  std::vector<double> row(n);
  double sum = 0.0;
  for (double& v : row) {
    v = -std::log(std::max(s.uniform01(), 1e-300));
    sum += v;
  }
  for (double& v : row) v /= sum;
  return row;
}

FeatureMap one_hot_map(int id, int dim, std::vector<int> perm, int num_actions) {
  FeatureMap fm;
  fm.id = id;
  fm.dim_k = dim;
  fm.eval = [dim, num_actions, perm = std::move(perm)](const Input& x) {
    const int s = static_cast<int>(x[0]);
    const int a = static_cast<int>(x[1]);
    std::vector<double> f(dim, 0.0);
    f[perm[s * num_actions + a]] = 1.0;
    return f;
  };
  return fm;
}

// Per-member feature rows over all (s, a), evaluated once.
std::vector<std::vector<double>> member_tables(const MDPInstance& inst) {
  const int k = inst.cls->dim_k();
  const int sa = inst.num_states * inst.num_actions;
  std::vector<std::vector<double>> tables(inst.cls->members.size());
  for (std::size_t m = 0; m < tables.size(); ++m) {
    tables[m].resize(static_cast<std::size_t>(sa) * k);
    for (int s = 0; s < inst.num_states; ++s) {
      for (int a = 0; a < inst.num_actions; ++a) {
        const std::vector<double> f = inst.cls->members[m].eval(inst.input_of(s, a));
        std::copy(f.begin(), f.end(),
                  tables[m].begin() + static_cast<std::size_t>(inst.sa_index(s, a)) * k);
      }
    }
  }
  return tables;
}

}  // namespace

MDPInstance make_grid_maze(const std::vector<MazeLayout>& layouts, std::uint64_t seed,
                           const GridMazeOptions& opts) {
  if (layouts.empty()) throw std::invalid_argument("grid maze: need at least one layout");
  constexpr int kSide = 4;
  const int S = kSide * kSide;
  const int A = 4;

  MDPInstance inst;
  inst.num_states = S;
  inst.num_actions = A;
  inst.horizon = opts.horizon;
  inst.num_tasks = static_cast<int>(layouts.size());
  inst.noise_sigma = opts.noise_sigma;

  auto move = [&](int s, int a) {
    int r = s / kSide;
    int c = s % kSide;
    switch (a) {
      case 0: r = std::max(0, r - 1); break;
      case 1: r = std::min(kSide - 1, r + 1); break;
      case 2: c = std::max(0, c - 1); break;
      case 3: c = std::min(kSide - 1, c + 1); break;
      default: break;
    }
    return r * kSide + c;
  };

  for (const MazeLayout& lay : layouts) {
    if (lay.start < 0 || lay.start >= S || lay.exit < 0 || lay.exit >= S)
      throw std::invalid_argument("grid maze: start/exit out of range");
    if (lay.lava.size() > 2) throw std::invalid_argument("grid maze: at most two lava cells");
    // Exit reachability (trivially true on an open grid, but the contract
    // demands the check).
    std::vector<char> seen(S, 0);
    std::queue<int> q;
    q.push(lay.start);
    seen[lay.start] = 1;
    while (!q.empty()) {
      const int s = q.front();
      q.pop();
      for (int a = 0; a < A; ++a) {
        const int ns = move(s, a);
        if (!seen[ns]) {
          seen[ns] = 1;
          q.push(ns);
        }
      }
    }
    if (!seen[lay.exit]) throw std::invalid_argument("grid maze: exit unreachable");

    std::vector<double> p(static_cast<std::size_t>(opts.horizon) * S * A * S, 0.0);
    std::vector<double> r(static_cast<std::size_t>(S) * A, 0.0);
    auto is_lava = [&](int s) {
      return std::find(lay.lava.begin(), lay.lava.end(), s) != lay.lava.end();
    };
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        const int ns = s == lay.exit ? lay.exit : move(s, a);
        double rr = 0.0;
        if (s != lay.exit) {
          if (ns == lay.exit) rr = opts.exit_bonus + opts.step_reward;
          else if (is_lava(ns)) rr = opts.lava_reward;
          else rr = opts.step_reward;
        }
        r[inst.sa_index(s, a)] = rr;
        for (int h = 0; h < opts.horizon; ++h) {
          p[(static_cast<std::size_t>(h) * S * A + inst.sa_index(s, a)) * S + ns] = 1.0;
        }
      }
    }
    inst.transitions.push_back(std::move(p));
    inst.rewards.push_back(std::move(r));
    std::vector<double> st(S, 0.0);
    st[lay.start] = 1.0;
    inst.start.push_back(std::move(st));
  }

  const int k = S * A;
  rng::Stream env(rng::derive(seed, {rng::kTagEnv, 11}));
  auto cls = std::make_shared<FeatureClass>();
  cls->true_index = 0;
  std::vector<int> ident(k);
  for (int i = 0; i < k; ++i) ident[i] = i;
  cls->members.push_back(one_hot_map(0, k, ident, A));
  for (int m = 1; m < opts.num_members; ++m) {
    std::vector<int> perm = ident;
    for (int i = k - 1; i > 0; --i) std::swap(perm[i], perm[env.below(i + 1)]);
    cls->members.push_back(one_hot_map(m, k, std::move(perm), A));
  }
  inst.cls = cls;
  inst.true_heads = linalg::Mat(inst.num_tasks, k);
  for (int task = 0; task < inst.num_tasks; ++task)
    std::copy(inst.rewards[task].begin(), inst.rewards[task].end(), inst.true_heads.row(task));
  inst.head_bound = std::sqrt(static_cast<double>(k));
  return inst;
}

MDPInstance make_random_linear_mdp(int dim_k, int num_states, int num_actions, int horizon,
                                   int num_tasks, std::uint64_t seed,
                                   const RandomLinearOptions& opts) {
  if (dim_k > num_states * num_actions)
    throw std::invalid_argument("random linear mdp: k must not exceed |S||A|");
  MDPInstance inst;
  inst.num_states = num_states;
  inst.num_actions = num_actions;
  inst.horizon = horizon;
  inst.num_tasks = num_tasks;
  inst.noise_sigma = opts.noise_sigma;

  rng::Stream env(rng::derive(seed, {rng::kTagEnv, 13}));
  const int sa = num_states * num_actions;

  // Candidate simplex-valued feature maps; one of them is the truth.
  auto cls = std::make_shared<FeatureClass>();
  const int true_index = static_cast<int>(env.below(opts.num_members));
  cls->true_index = true_index;
  std::vector<std::vector<double>> true_table;
  for (int m = 0; m < opts.num_members; ++m) {
    std::vector<std::vector<double>> table(sa);
    for (auto& row : table) row = dirichlet_row(env, dim_k);
    if (m == true_index) true_table = table;
    FeatureMap fm;
    fm.id = m;
    fm.dim_k = dim_k;
    fm.eval = [table = std::move(table), num_actions](const Input& x) {
      const int s = static_cast<int>(x[0]);
      const int a = static_cast<int>(x[1]);
      return table[s * num_actions + a];
    };
    cls->members.push_back(std::move(fm));
  }
  inst.cls = cls;

  for (int task = 0; task < num_tasks; ++task) {
    // Factor rows mu_{h,j}(.) and reward direction theta_r per task.
    std::vector<double> p(static_cast<std::size_t>(horizon) * sa * num_states, 0.0);
    for (int h = 0; h < horizon; ++h) {
      std::vector<std::vector<double>> mu(dim_k);
      for (auto& row : mu) row = dirichlet_row(env, num_states);
      for (int i = 0; i < sa; ++i) {
        double* dst = p.data() + (static_cast<std::size_t>(h) * sa + i) * num_states;
        for (int j = 0; j < dim_k; ++j)
          kernels::axpy(true_table[i][j], mu[j].data(), dst, num_states);
      }
    }
    inst.transitions.push_back(std::move(p));

    std::vector<double> theta_r(dim_k);
    for (double& v : theta_r) v = env.uniform01() / horizon;
    std::vector<double> r(sa);
    for (int i = 0; i < sa; ++i)
      r[i] = kernels::dot(true_table[i].data(), theta_r.data(), dim_k);
    inst.rewards.push_back(std::move(r));

    inst.start.push_back(std::vector<double>(num_states, 1.0 / num_states));
    if (task == 0) inst.true_heads = linalg::Mat(num_tasks, dim_k);
    std::copy(theta_r.begin(), theta_r.end(), inst.true_heads.row(task));
  }
  inst.head_bound = std::sqrt(static_cast<double>(dim_k)) * (1.0 + 1.0 / horizon);
  return inst;
}

std::vector<std::vector<double>> value_iteration(const MDPInstance& inst, int task) {
  const int S = inst.num_states;
  const int A = inst.num_actions;
  std::vector<std::vector<double>> v(inst.horizon + 1, std::vector<double>(S, 0.0));
  for (int h = inst.horizon; h >= 1; --h) {
    for (int s = 0; s < S; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < A; ++a) {
        double q = inst.rewards[task][inst.sa_index(s, a)];
        if (h < inst.horizon)
          q += kernels::dot(inst.p_row(task, h, s, a), v[h].data(), S);
        best = std::max(best, q);
      }
      v[h - 1][s] = best;
    }
  }
  return v;
}

MultiheadFunction lsvi_fit_level(const LevelData& data, const DesignCache& cache,
                                 const std::vector<std::vector<double>>& v_next, double ridge,
                                 double head_bound, double value_cap) {
  const FeatureClass& cls = cache.cls();
  const int num_tasks = data.history.num_tasks();
  const int k = cls.dim_k();

  // Regression targets R + V_next(s'), clamped to [-1, 2].
  std::vector<std::vector<double>> targets(num_tasks);
  std::vector<double> target_sumsq(num_tasks, 0.0);
  for (int task = 0; task < num_tasks; ++task) {
    const int n = data.history.len(task);
    targets[task].resize(n);
    for (int j = 0; j < n; ++j) {
      double y = data.history.rewards[task][j];
      if (!v_next.empty()) y += v_next[task][data.next_states[task][j]];
      y = std::min(2.0, std::max(-1.0, y));
      targets[task][j] = y;
      target_sumsq[task] += y * y;
    }
  }

  MultiheadFunction best;
  double best_loss = std::numeric_limits<double>::infinity();
  std::vector<double> xty(k);
  for (int m = 0; m < static_cast<int>(cls.members.size()); ++m) {
    linalg::Mat heads(num_tasks, k);
    double loss = 0.0;
    for (int task = 0; task < num_tasks; ++task) {
      linalg::Mat g = cache.gram(m, task);
      for (int i = 0; i < k; ++i) g(i, i) += ridge;
      const linalg::Mat l = linalg::cholesky(g);
      kernels::matvec_t(cache.rows(m, task).data(), cache.n(task), k, targets[task].data(),
                        xty.data());
      std::vector<double> w = linalg::chol_solve(l, xty.data());
      const double norm = std::sqrt(kernels::sumsq(w.data(), k));
      if (norm > head_bound) {
        const double scale = head_bound / norm;
        for (double& x : w) x *= scale;
        // Projected heads need the explicit quadratic; the shortcut below
        // only holds at the unconstrained optimum.
        std::vector<double> gw(k);
        kernels::matvec(cache.gram(m, task).data(), k, k, w.data(), gw.data());
        loss += kernels::dot(w.data(), gw.data(), k) - 2.0 * kernels::dot(w.data(), xty.data(), k) +
                target_sumsq[task] + ridge * kernels::sumsq(w.data(), k);
      } else {
        loss += target_sumsq[task] - kernels::dot(w.data(), xty.data(), k);
      }
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

MultiheadFunction lsvi_fit_level(const LevelData& data, const FeatureClass& cls,
                                 const std::vector<std::vector<double>>& v_next, double ridge,
                                 double head_bound, double value_cap) {
  DesignCache cache(cls, data.history);
  return lsvi_fit_level(data, cache, v_next, ridge, head_bound, value_cap);
}

std::vector<std::vector<double>> induced_value_table(const MDPInstance& inst,
                                                     const MultiheadFunction& f) {
  const int k = inst.cls->dim_k();
  std::vector<std::vector<double>> v(inst.num_tasks, std::vector<double>(inst.num_states));
  for (int s = 0; s < inst.num_states; ++s) {
    std::vector<std::vector<double>> feats(inst.num_actions);
    for (int a = 0; a < inst.num_actions; ++a) feats[a] = inst.cls->members[f.phi_index].eval(inst.input_of(s, a));
    for (int task = 0; task < inst.num_tasks; ++task) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < inst.num_actions; ++a)
        best = std::max(best, kernels::dot(feats[a].data(), f.head(task), k));
      v[task][s] = std::min(1.0, std::max(0.0, best));
    }
  }
  return v;
}

double beta_mdp(int num_tasks, int dim_k, int episodes, double log_cover, double delta,
                double ibe) {
  if (num_tasks < 1 || dim_k < 1 || episodes < 1)
    throw std::invalid_argument("beta_mdp: M, k, T must be >= 1");
  if (delta <= 0.0 || delta > 1.0)
    throw std::invalid_argument("beta_mdp: delta must be in (0, 1]");
  if (log_cover < 0.0 || ibe < 0.0)
    throw std::invalid_argument("beta_mdp: log_cover and ibe must be nonnegative");
  const double m = num_tasks;
  const double k = dim_k;
  const double tt = episodes;
  const double b1 = std::sqrt(2.0 * m * k + log_cover + std::log(1.0 / delta)) + 1.0;
  const double b2 = 2.0 * std::sqrt(m * tt + std::log(2.0 * m * tt * tt / delta));
  const double root = b1 + std::sqrt(m * tt) * ibe + std::sqrt(b2);
  return root * root;
}

MtlsviResult mtlsvi_run(const MDPInstance& inst, int episodes, const bandit::GfucbConfig& cfg,
                        std::uint64_t seed) {
  if (episodes < 1) throw std::invalid_argument("mtlsvi_run: episodes must be >= 1");
  const int S = inst.num_states;
  const int A = inst.num_actions;
  const int H = inst.horizon;
  const int M = inst.num_tasks;
  const int k = inst.cls->dim_k();
  const double alpha = cfg.resolve_alpha(k, M, episodes);
  const double log_cover = inst.cls->log_cover(alpha);

  std::vector<LevelData> levels;
  levels.reserve(H);
  for (int h = 0; h < H; ++h) levels.emplace_back(M);
  std::vector<std::unique_ptr<DesignCache>> caches;
  for (int h = 0; h < H; ++h)
    caches.push_back(std::make_unique<DesignCache>(*inst.cls, levels[h].history));

  const std::vector<std::vector<double>> feat_tables = member_tables(inst);

  // Exact optimal values per task for regret accounting.
  std::vector<std::vector<std::vector<double>>> v_star(M);
  for (int task = 0; task < M; ++task) v_star[task] = value_iteration(inst, task);

  MtlsviResult result;
  bandit::RegretTrace& trace = result.trace;

  std::vector<MultiheadFunction> fits(H);
  std::vector<double> betas(H);
  // The winning candidate's per-task solve at each level, kept for exact
  // policy evaluation after the episode.
  std::vector<PerPhiSolve> winners(H);

  for (int t = 1; t <= episodes; ++t) {
    // Backward pass: refit every level against the freshly induced targets.
    std::vector<std::vector<double>> v_next;  // empty = all-zero V_{H+1}
    for (int h = H; h >= 1; --h) {
      caches[h - 1]->sync();
      fits[h - 1] = lsvi_fit_level(levels[h - 1], *caches[h - 1], v_next, cfg.ridge,
                                   inst.head_bound);
      betas[h - 1] = cfg.beta.mode == bandit::BetaConfig::Mode::kTheory
                         ? beta_mdp(M, k, episodes, log_cover, cfg.delta, cfg.beta.ibe)
                         : cfg.beta.tuned_value(t);
      v_next = induced_value_table(inst, fits[h - 1]);
    }

    // Forward pass.
    EpisodeLog log;
    log.steps.assign(M, {});
    std::vector<int> states(M);
    for (int task = 0; task < M; ++task) {
      rng::Stream s(rng::derive(seed, {rng::kTagContext, static_cast<std::uint64_t>(t),
                                       static_cast<std::uint64_t>(task), 1}));
      states[task] = sample_categorical(s, inst.start[task].data(), S);
    }
    const std::vector<int> start_states = states;

    double episode_beta = 0.0;
    std::vector<int> first_actions(M, 0);
    std::vector<double> episode_return(M, 0.0);
    for (int h = 1; h <= H; ++h) {
      ConfidenceSet set{fits[h - 1], betas[h - 1], &levels[h - 1].history, inst.cls.get(),
                        cfg.ridge};
      std::vector<std::vector<Input>> queries(M);
      for (int task = 0; task < M; ++task) {
        queries[task].reserve(A);
        for (int a = 0; a < A; ++a) queries[task].push_back(inst.input_of(states[task], a));
      }
      const SelectResult sel = optimistic_select(set, *caches[h - 1], queries, cfg.strategy);
      winners[h - 1] = per_phi_solve(set, *caches[h - 1], sel.witness_phi);
      if (h == 1) episode_beta = betas[0];

      for (int task = 0; task < M; ++task) {
        const int s0 = states[task];
        const int a = sel.actions[task];
        if (h == 1) first_actions[task] = a;
        rng::Stream noise(rng::derive(seed, {rng::kTagNoise, static_cast<std::uint64_t>(t),
                                             static_cast<std::uint64_t>(task),
                                             static_cast<std::uint64_t>(h)}));
        const double observed = inst.rewards[task][inst.sa_index(s0, a)] +
                                noise.uniform(-inst.noise_sigma, inst.noise_sigma);
        rng::Stream tr(rng::derive(seed, {rng::kTagTransition, static_cast<std::uint64_t>(t),
                                          static_cast<std::uint64_t>(task),
                                          static_cast<std::uint64_t>(h)}));
        const int ns = sample_categorical(tr, inst.p_row(task, h, s0, a), S);
        log.steps[task].push_back({s0, a, observed, ns});
        episode_return[task] += observed;
        levels[h - 1].history.append(task, inst.input_of(s0, a), observed);
        levels[h - 1].next_states[task].push_back(ns);
        states[task] = ns;
      }
    }

    // Exact evaluation of the policy the level winners induce.
    bandit::StepAggregate agg;
    agg.beta = episode_beta;
    double truth_opt_total = 0.0;
    for (int task = 0; task < M; ++task) {
      std::vector<double> v_pi(S, 0.0);
      for (int h = H; h >= 1; --h) {
        const PerPhiSolve& win = winners[h - 1];
        const std::vector<double>& table = feat_tables[win.phi_index];
        const double slack =
            std::max(betas[h - 1] - win.residual, 0.0);
        std::vector<double> v_new(S, 0.0);
        for (int s = 0; s < S; ++s) {
          int best_a = 0;
          double best_v = -std::numeric_limits<double>::infinity();
          for (int a = 0; a < A; ++a) {
            const double* q = table.data() + static_cast<std::size_t>(inst.sa_index(s, a)) * k;
            const double mean = kernels::dot(q, win.head_fit.row(task), k);
            const double bonus =
                std::sqrt(slack * linalg::chol_quadform(win.chol[task], q));
            const double v = std::min(1.0, std::max(-1.0, mean + bonus));
            if (v > best_v) {
              best_v = v;
              best_a = a;
            }
          }
          double q_pi = inst.rewards[task][inst.sa_index(s, best_a)];
          if (h < H) q_pi += kernels::dot(inst.p_row(task, h, s, best_a), v_pi.data(), S);
          v_new[s] = q_pi;
        }
        v_pi = std::move(v_new);
      }
      const double gap = v_star[task][0][start_states[task]] - v_pi[start_states[task]];
      truth_opt_total += v_star[task][0][start_states[task]];

      bandit::StepRecord row;
      row.t = t;
      row.task = task;
      row.action = first_actions[task];
      row.reward = episode_return[task];
      row.inst_regret = gap;
      trace.total_regret += gap;
      row.cum_regret = trace.total_regret;
      trace.rows.push_back(row);
    }
    agg.truth_opt_total = truth_opt_total;
    trace.steps.push_back(std::move(agg));
    result.episodes.push_back(std::move(log));
  }
  return result;
}

double ibe_estimate(const MDPInstance& inst, const FeatureClass& cls, int n_samples,
                    std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("ibe_estimate: need n_samples >= 1");
  const int S = inst.num_states;
  const int A = inst.num_actions;
  const int sa = S * A;
  const int k = cls.dim_k();

  // Tabulate member features and per-member Cholesky factors of the full
  // (s, a) design once.
  std::vector<std::vector<double>> tables(cls.members.size());
  std::vector<linalg::Mat> chols;
  for (std::size_t m = 0; m < cls.members.size(); ++m) {
    tables[m].resize(static_cast<std::size_t>(sa) * k);
    linalg::Mat gram(k, k);
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        const std::vector<double> f = cls.members[m].eval(inst.input_of(s, a));
        std::copy(f.begin(), f.end(),
                  tables[m].begin() + static_cast<std::size_t>(s * A + a) * k);
        linalg::syr_update(gram, f.data());
      }
    }
    for (int i = 0; i < k; ++i) gram(i, i) += 1e-12;
    chols.push_back(linalg::cholesky(gram));
  }

  double worst = 0.0;
  std::vector<double> image(sa);
  std::vector<double> vmax(S);
  std::vector<double> xty(k);
  for (int j = 0; j < n_samples; ++j) {
    rng::Stream s(rng::derive(seed, {rng::kTagDiag, static_cast<std::uint64_t>(j)}));
    const int h = 1 + static_cast<int>(s.below(inst.horizon));
    const int task = static_cast<int>(s.below(inst.num_tasks));
    const int phi = static_cast<int>(s.below(static_cast<std::uint32_t>(cls.members.size())));
    // Random head in the D-ball.
    std::vector<double> theta(k);
    for (double& v : theta) v = s.gauss();
    const double norm = std::sqrt(kernels::sumsq(theta.data(), k));
    const double radius =
        inst.head_bound * std::pow(s.uniform01(), 1.0 / k) / std::max(norm, 1e-12);
    for (double& v : theta) v *= radius;

    // Exact Bellman image of Q_{h+1} = phi^T theta.
    for (int st = 0; st < S; ++st) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < A; ++a) {
        const double* q = tables[phi].data() + static_cast<std::size_t>(st * A + a) * k;
        best = std::max(best, kernels::dot(q, theta.data(), k));
      }
      vmax[st] = best;
    }
    for (int i = 0; i < sa; ++i) {
      image[i] = inst.rewards[task][i] +
                 (h < inst.horizon
                      ? kernels::dot(inst.transitions[task].data() +
                                         (static_cast<std::size_t>(h - 1) * sa + i) * S,
                                     vmax.data(), S)
                      : 0.0);
    }

    // Best least-squares class member (head space unconstrained, matching
    // the tabular-complete reading), then its sup-norm residual.
    double best_residual = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < cls.members.size(); ++m) {
      kernels::matvec_t(tables[m].data(), sa, k, image.data(), xty.data());
      std::vector<double> w = linalg::chol_solve(chols[m], xty.data());
      double sup = 0.0;
      for (int i = 0; i < sa; ++i) {
        const double* q = tables[m].data() + static_cast<std::size_t>(i) * k;
        sup = std::max(sup, std::abs(kernels::dot(q, w.data(), k) - image[i]));
      }
      best_residual = std::min(best_residual, sup);
    }
    worst = std::max(worst, best_residual);
  }
  return worst;
}

bandit::BanditInstance induced_bandit(const MDPInstance& inst) {
  if (inst.horizon != 1)
    throw std::invalid_argument("induced_bandit: only defined for 1-horizon instances");
  bandit::BanditInstance b;
  b.num_tasks = inst.num_tasks;
  b.cls = inst.cls;
  b.truth.cls = inst.cls.get();
  b.truth.phi_index = inst.cls->true_index;
  b.truth.heads = inst.true_heads;
  b.truth.value_cap = 1.0;
  b.noise_sigma = inst.noise_sigma;
  b.noise_kind = bandit::NoiseKind::kUniform;

  const int S = inst.num_states;
  const int A = inst.num_actions;
  const int M = inst.num_tasks;
  const auto start = inst.start;
  b.context_sampler = [S, A, M, start](std::uint64_t run_seed, int t) {
    std::vector<std::vector<Input>> contexts(M);
    for (int task = 0; task < M; ++task) {
      rng::Stream s(rng::derive(run_seed, {rng::kTagContext, static_cast<std::uint64_t>(t),
                                           static_cast<std::uint64_t>(task), 1}));
      const int st = sample_categorical(s, start[task].data(), S);
      contexts[task].reserve(A);
      for (int a = 0; a < A; ++a)
        contexts[task].push_back(Input{static_cast<double>(st), static_cast<double>(a)});
    }
    return contexts;
  };
  return b;
}

}  // namespace mrl::mdp
