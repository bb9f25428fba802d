#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "mrl/eluder.hpp"
#include "mrl/harness.hpp"
#include "mrl/kernels.hpp"
#include "mrl/rng.hpp"

namespace mrl::harness {

namespace {

const std::vector<std::string> kTraceHeader = {"run_id", "t",           "task",
                                               "action", "reward",      "inst_regret",
                                               "cum_regret", "beta",    "width",
                                               "contained"};

const std::vector<std::string> kSummaryHeader = {
    "row_kind", "config_id", "kind",   "env",    "algorithm", "variant",
    "M",        "T",         "pretrain_T", "seed",   "run_id",    "n_seeds",
    "total_regret", "avg_per_task_regret", "sup_error"};

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  const int count = std::min(workers, n);
  pool.reserve(count);
  for (int w = 0; w < count; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

std::string opt_str(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::string opt_str(const std::optional<bool>& v) {
  return v ? std::string(*v ? "1" : "0") : std::string();
}

void append_trace_rows(std::vector<std::vector<std::string>>& out, int run_id,
                       const bandit::RegretTrace& trace) {
  for (const bandit::StepRecord& r : trace.rows) {
    const bandit::StepAggregate& agg = trace.steps[r.t - 1];
    out.push_back({std::to_string(run_id), std::to_string(r.t), std::to_string(r.task),
                   std::to_string(r.action), format_double(r.reward),
                   format_double(r.inst_regret), format_double(r.cum_regret),
                   format_double(agg.beta), opt_str(agg.width), opt_str(agg.contained)});
  }
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

bandit::GfucbConfig engine_config(const ExperimentConfig& cfg) {
  bandit::GfucbConfig ec;
  ec.delta = cfg.delta;
  ec.alpha = cfg.parsed_alpha();
  ec.ridge = cfg.ridge;
  ec.strategy = cfg.parsed_strategy();
  ec.beta = cfg.parsed_beta();
  ec.record_width = cfg.record_width;
  ec.record_containment = cfg.record_containment;
  return ec;
}

bandit::EpsSchedule eps_schedule(const ExperimentConfig& cfg) {
  bandit::EpsSchedule s;
  s.eps0 = cfg.eps0;
  if (cfg.eps_schedule == "inv_t") s.kind = bandit::EpsSchedule::Kind::kInvT;
  else if (cfg.eps_schedule == "inv_sqrt_t") s.kind = bandit::EpsSchedule::Kind::kInvSqrtT;
  else s.kind = bandit::EpsSchedule::Kind::kConst;
  return s;
}

bandit::BanditInstance make_bandit_instance(const ExperimentConfig& cfg, int num_tasks) {
  if (cfg.env == "latent_category") {
    bandit::LatentCategoryOptions opts;
    opts.num_members = cfg.num_members;
    opts.perturb_sigma = cfg.perturb_sigma;
    opts.noise_sigma = cfg.noise_sigma;
    if (cfg.decoy_style == "pair_merge")
      opts.decoy_style = bandit::LatentCategoryOptions::DecoyStyle::kPairMerge;
    return bandit::make_latent_category_bandit(cfg.categories, cfg.actions, num_tasks,
                                               cfg.dim_k, cfg.seed, opts);
  }
  if (cfg.env == "linear_rep") {
    return bandit::gen_linear_rep_bandit(cfg.dim_k, cfg.dim_k, 4 * cfg.dim_k, cfg.num_members,
                                         num_tasks, cfg.actions, cfg.seed, cfg.noise_sigma);
  }
  throw std::invalid_argument("bandit kind supports latent_category and linear_rep");
}

mdp::MDPInstance make_mdp_instance(const ExperimentConfig& cfg) {
  if (cfg.env == "grid_maze") {
    rng::Stream env(rng::derive(cfg.seed, {rng::kTagEnv, 21}));
    std::vector<mdp::MazeLayout> layouts;
    for (int task = 0; task < cfg.num_tasks; ++task) {
      mdp::MazeLayout lay;
      lay.exit = 15;
      do {
        lay.start = static_cast<int>(env.below(16));
      } while (lay.start == lay.exit);
      const int lava_count = static_cast<int>(env.below(3));
      while (static_cast<int>(lay.lava.size()) < lava_count) {
        const int cell = static_cast<int>(env.below(16));
        if (cell == lay.start || cell == lay.exit) continue;
        if (std::find(lay.lava.begin(), lay.lava.end(), cell) != lay.lava.end()) continue;
        lay.lava.push_back(cell);
      }
      layouts.push_back(lay);
    }
    mdp::GridMazeOptions opts;
    opts.horizon = cfg.mdp_horizon;
    opts.num_members = cfg.num_members;
    opts.noise_sigma = cfg.noise_sigma;
    return mdp::make_grid_maze(layouts, cfg.seed, opts);
  }
  if (cfg.env == "random_linear") {
    mdp::RandomLinearOptions opts;
    opts.num_members = cfg.num_members;
    opts.noise_sigma = cfg.noise_sigma;
    return mdp::make_random_linear_mdp(cfg.dim_k, cfg.num_states, cfg.num_actions,
                                       cfg.mdp_horizon, cfg.num_tasks, cfg.seed, opts);
  }
  throw std::invalid_argument("mdp kind supports grid_maze and random_linear");
}

std::vector<double> parse_mixture(const ExperimentConfig& cfg, int num_tasks) {
  if (cfg.mixture == "uniform")
    return std::vector<double>(num_tasks, 1.0 / num_tasks);
  if (cfg.mixture == "e1") {
    std::vector<double> m(num_tasks, 0.0);
    m[0] = 1.0;
    return m;
  }
  std::vector<double> m;
  std::string item;
  std::stringstream ss(cfg.mixture);
  while (std::getline(ss, item, ',')) m.push_back(std::stod(item));
  if (static_cast<int>(m.size()) != num_tasks)
    throw std::invalid_argument("config: mixture length must equal M");
  return m;
}

struct RunArtifacts {
  std::vector<std::string> trace_header;
  std::vector<std::vector<std::string>> trace_rows;
  std::vector<std::string> summary_header;
  std::vector<std::vector<std::string>> summary_rows;
  std::vector<Series> plot;
};

// Mean cumulative regret per step across a set of traces (averaged over
// seeds, summed over tasks within a run).
std::vector<std::pair<double, double>> mean_cum_curve(
    const std::vector<std::vector<double>>& per_run_cum) {
  std::vector<std::pair<double, double>> pts;
  if (per_run_cum.empty()) return pts;
  const std::size_t t_max = per_run_cum.front().size();
  for (std::size_t t = 0; t < t_max; ++t) {
    double acc = 0.0;
    for (const auto& run : per_run_cum) acc += run[t];
    pts.emplace_back(static_cast<double>(t + 1), acc / per_run_cum.size());
  }
  return pts;
}

std::vector<double> cum_by_step(const bandit::RegretTrace& trace, int horizon) {
  std::vector<double> out(horizon, 0.0);
  for (const bandit::StepRecord& r : trace.rows) out[r.t - 1] = r.cum_regret;
  double last = 0.0;
  for (double& v : out) {
    if (v == 0.0) v = last;
    last = v;
  }
  return out;
}

void run_regret_kind(const ExperimentConfig& cfg, RunArtifacts& art) {
  std::vector<int> task_counts = cfg.sweep_tasks.empty() ? std::vector<int>{cfg.num_tasks}
                                                         : cfg.sweep_tasks;
  std::vector<int> horizons =
      cfg.sweep_horizon.empty() ? std::vector<int>{cfg.horizon} : cfg.sweep_horizon;

  struct Job {
    int config_id;
    int m;
    int t_horizon;
    int seed_idx;
    int run_id;
  };
  std::vector<Job> jobs;
  int config_id = 0;
  for (int m : task_counts) {
    for (int horizon : horizons) {
      for (int s = 0; s < cfg.n_seeds; ++s)
        jobs.push_back({config_id, m, horizon, s, static_cast<int>(jobs.size())});
      ++config_id;
    }
  }

  struct JobResult {
    bandit::RegretTrace trace;
    double avg_per_task = 0.0;
    std::vector<double> cum_curve;
  };
  std::vector<JobResult> results(jobs.size());

  const bandit::GfucbConfig ec = engine_config(cfg);
  const bandit::EpsSchedule eps = eps_schedule(cfg);

  // Environments are fixed per config (cfg.seed); per-run randomness comes
  // from cfg.seed + seed index.
  parallel_for(static_cast<int>(jobs.size()), cfg.workers, [&](int j) {
    const Job& job = jobs[j];
    const std::uint64_t run_seed = cfg.seed + static_cast<std::uint64_t>(job.seed_idx);
    JobResult& res = results[j];
    if (cfg.kind == "bandit") {
      if (cfg.group_total > 0) {
        const bandit::BanditInstance base = make_bandit_instance(cfg, cfg.group_total);
        const GroupedOutcome grouped =
            run_grouped_bandit(base, job.m, job.t_horizon, ec, cfg.algorithm, eps, cfg.ridge,
                               run_seed);
        // Merge group traces into one run-level trace in (t, task) order.
        bandit::RegretTrace merged;
        merged.steps.resize(job.t_horizon);
        for (int t = 1; t <= job.t_horizon; ++t) {
          for (std::size_t g = 0; g < grouped.group_traces.size(); ++g) {
            const bandit::RegretTrace& gt = grouped.group_traces[g];
            for (int local = 0; local < job.m; ++local) {
              bandit::StepRecord row = gt.rows[(t - 1) * job.m + local];
              row.task = static_cast<int>(g) * job.m + local;
              merged.total_regret += row.inst_regret;
              row.cum_regret = merged.total_regret;
              merged.rows.push_back(row);
            }
            merged.steps[t - 1] = gt.steps[t - 1];
          }
        }
        res.trace = std::move(merged);
        res.avg_per_task = grouped.avg_per_task_regret;
      } else {
        const bandit::BanditInstance inst = make_bandit_instance(cfg, job.m);
        if (cfg.algorithm == "eps_greedy") {
          res.trace = bandit::eps_greedy_run(inst, job.t_horizon, eps, cfg.ridge, run_seed);
        } else {
          res.trace = bandit::gfucb_run(inst, job.t_horizon, ec, run_seed).trace;
        }
        res.avg_per_task = res.trace.total_regret / job.m;
      }
    } else {  // mdp
      ExperimentConfig sub = cfg;
      sub.num_tasks = job.m;
      const mdp::MDPInstance inst = make_mdp_instance(sub);
      res.trace = mdp::mtlsvi_run(inst, job.t_horizon, ec, run_seed).trace;
      res.avg_per_task = res.trace.total_regret / job.m;
    }
    res.cum_curve = cum_by_step(res.trace, job.t_horizon);
  });

  // Emit in deterministic order regardless of worker scheduling.
  std::map<int, std::vector<double>> avg_by_config;
  std::map<int, std::vector<std::vector<double>>> curves_by_config;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const Job& job = jobs[j];
    append_trace_rows(art.trace_rows, job.run_id, results[j].trace);
    art.summary_rows.push_back(
        {"seed", std::to_string(job.config_id), cfg.kind, cfg.env, cfg.algorithm, "",
         std::to_string(job.m), std::to_string(job.t_horizon), "",
         std::to_string(cfg.seed + job.seed_idx), std::to_string(job.run_id),
         std::to_string(cfg.n_seeds), format_double(results[j].trace.total_regret),
         format_double(results[j].avg_per_task), ""});
    avg_by_config[job.config_id].push_back(results[j].avg_per_task);
    curves_by_config[job.config_id].push_back(results[j].cum_curve);
  }
  for (const Job& job : jobs) {
    if (job.seed_idx != 0) continue;
    art.summary_rows.push_back(
        {"median", std::to_string(job.config_id), cfg.kind, cfg.env, cfg.algorithm, "",
         std::to_string(job.m), std::to_string(job.t_horizon), "", "", "",
         std::to_string(cfg.n_seeds), "",
         format_double(median(avg_by_config[job.config_id])), ""});
    Series s;
    s.name = "M=" + std::to_string(job.m) + " T=" + std::to_string(job.t_horizon);
    s.points = mean_cum_curve(curves_by_config[job.config_id]);
    art.plot.push_back(std::move(s));
  }
}

void run_transfer_kind(const ExperimentConfig& cfg, RunArtifacts& art) {
  const bandit::BanditInstance inst = make_bandit_instance(cfg, cfg.num_tasks);
  const std::vector<double> mixture = parse_mixture(cfg, cfg.num_tasks);
  transfer::TransferTask target = transfer::synthesize_target_task(inst, mixture);

  // Heldout inputs for the pseudo-target error, from a dedicated stream.
  std::vector<Input> test_inputs;
  for (int i = 0; i < cfg.heldout; ++i) {
    const auto ctx = inst.context_sampler(rng::derive(cfg.seed, {rng::kTagDiag, 77}), i + 1);
    test_inputs.push_back(ctx[0][i % ctx[0].size()]);
  }

  struct Job {
    int config_id;
    int pretrain_T;
    int seed_idx;
    int variant;  // 0 pretrained, 1 decoy
    int run_id;
  };
  std::vector<Job> jobs;
  int config_id = 0;
  for (int pt : cfg.pretrain_steps) {
    for (int v = 0; v < 2; ++v) {
      for (int s = 0; s < cfg.n_seeds; ++s)
        jobs.push_back({config_id, pt, s, v, static_cast<int>(jobs.size())});
      ++config_id;
    }
  }

  struct JobResult {
    bandit::RegretTrace trace;
    double sup_error = 0.0;
  };
  std::vector<JobResult> results(jobs.size());
  const bandit::GfucbConfig ec = engine_config(cfg);

  parallel_for(static_cast<int>(jobs.size()), cfg.workers, [&](int j) {
    const Job& job = jobs[j];
    const std::uint64_t run_seed = cfg.seed + static_cast<std::uint64_t>(job.seed_idx);
    transfer::TransferTask task = target;
    if (job.variant == 0) {
      const bandit::GfucbResult trained = bandit::gfucb_run(inst, job.pretrain_T, ec, run_seed);
      task.frozen_phi = transfer::extract_representation(trained).first;
      results[j].sup_error = transfer::mixture_sup_error(trained, mixture, target, test_inputs);
    } else {
      const int decoy = (inst.cls->true_index + 1) % static_cast<int>(inst.cls->members.size());
      task.frozen_phi = inst.cls->members[decoy];
      results[j].sup_error = std::nan("");
    }
    results[j].trace = transfer::linucb_transfer_run(
        task, cfg.transfer_steps, cfg.linucb_lambda, cfg.delta,
        rng::derive(run_seed, {rng::kTagEnv, 99}), nullptr, cfg.linucb_bonus_scale);
  });

  std::map<int, std::vector<double>> regret_by_config;
  std::map<int, std::vector<double>> sup_by_config;
  std::map<int, std::vector<std::vector<double>>> curves_by_config;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const Job& job = jobs[j];
    append_trace_rows(art.trace_rows, job.run_id, results[j].trace);
    const std::string variant = job.variant == 0 ? "pretrained" : "decoy";
    art.summary_rows.push_back(
        {"seed", std::to_string(job.config_id), cfg.kind, cfg.env, "linucb", variant,
         std::to_string(cfg.num_tasks), std::to_string(cfg.transfer_steps),
         std::to_string(job.pretrain_T), std::to_string(cfg.seed + job.seed_idx),
         std::to_string(job.run_id), std::to_string(cfg.n_seeds),
         format_double(results[j].trace.total_regret),
         format_double(results[j].trace.total_regret),
         std::isnan(results[j].sup_error) ? "" : format_double(results[j].sup_error)});
    regret_by_config[job.config_id].push_back(results[j].trace.total_regret);
    if (!std::isnan(results[j].sup_error))
      sup_by_config[job.config_id].push_back(results[j].sup_error);
    curves_by_config[job.config_id].push_back(
        cum_by_step(results[j].trace, cfg.transfer_steps));
  }
  for (const Job& job : jobs) {
    if (job.seed_idx != 0) continue;
    const std::string variant = job.variant == 0 ? "pretrained" : "decoy";
    const auto& sups = sup_by_config[job.config_id];
    art.summary_rows.push_back(
        {"median", std::to_string(job.config_id), cfg.kind, cfg.env, "linucb", variant,
         std::to_string(cfg.num_tasks), std::to_string(cfg.transfer_steps),
         std::to_string(job.pretrain_T), "", "", std::to_string(cfg.n_seeds),
         format_double(median(regret_by_config[job.config_id])),
         format_double(median(regret_by_config[job.config_id])),
         sups.empty() ? "" : format_double(median(sups))});
    Series s;
    s.name = variant + " T=" + std::to_string(job.pretrain_T);
    s.points = mean_cum_curve(curves_by_config[job.config_id]);
    art.plot.push_back(std::move(s));
  }
}

void run_eluder_kind(const ExperimentConfig& cfg, RunArtifacts& art) {
  eluder::ScalarClass cls;
  if (cfg.eluder_class == "two_point") {
    cls.values.assign(2, std::vector<double>(cfg.el_points, 0.0));
    cls.values[1][0] = 1.0;
  } else if (cfg.eluder_class == "linear_grid") {
    const auto heads = eluder::unit_ball_grid(cfg.el_dim, cfg.el_step);
    cls.values.reserve(heads.size());
    for (const auto& h : heads) cls.values.push_back(h);  // f_theta(e_i) = theta_i
  } else if (cfg.eluder_class == "random") {
    rng::Stream s(rng::derive(cfg.seed, {rng::kTagEnv, 31}));
    cls.values.assign(cfg.el_functions, std::vector<double>(cfg.el_points));
    for (auto& row : cls.values)
      for (double& v : row) v = s.uniform01();
  } else {
    throw std::invalid_argument("config: eluder_class must be two_point, linear_grid or random");
  }
  const int exhaustive = eluder::eluder_dimension_exhaustive(cls, cfg.eps);
  const int greedy = eluder::eluder_dimension_greedy(cls, cfg.eps);
  art.summary_header = {"class", "eps", "functions", "points", "dim_exhaustive", "dim_greedy",
                        "seed"};
  art.summary_rows.push_back({cfg.eluder_class, format_double(cfg.eps),
                              std::to_string(cls.num_functions()),
                              std::to_string(cls.domain_size()), std::to_string(exhaustive),
                              std::to_string(greedy), std::to_string(cfg.seed)});
}

void run_diagnostics_kind(const ExperimentConfig& cfg, RunArtifacts& art) {
  ExperimentConfig sub = cfg;
  sub.env = "latent_category";
  const bandit::BanditInstance inst = make_bandit_instance(sub, std::max(cfg.num_tasks, 2));
  const bandit::GfucbConfig ec = engine_config(cfg);
  art.trace_header = {"n_train", "point", "abs_error", "bonus"};
  art.summary_header = {"metric", "i", "j", "n_train", "value", "extra"};

  // Heldout labelled inputs for task 0.
  std::vector<std::pair<Input, double>> heldout;
  for (int i = 0; i < cfg.heldout; ++i) {
    const auto ctx = inst.context_sampler(rng::derive(cfg.seed, {rng::kTagDiag, 5}), i + 1);
    const Input& x = ctx[0][i % ctx[0].size()];
    heldout.emplace_back(x, inst.truth.predict(0, x));
  }

  std::vector<std::pair<double, double>> shrink_curve;
  for (int n_train : cfg.train_sizes) {
    const bandit::GfucbResult trained = bandit::gfucb_run(inst, n_train, ec, cfg.seed);
    const double beta =
        ec.beta.mode == bandit::BetaConfig::Mode::kTheory
            ? beta_bandit(inst.num_tasks, inst.dim_k(), n_train,
                          inst.cls->log_cover(1.0), ec.resolve_alpha(inst.dim_k(),
                                                                     inst.num_tasks, n_train),
                          ec.delta)
            : ec.beta.tuned_value(n_train);
    ConfidenceSet set{trained.fhat, beta, trained.history.get(), inst.cls.get(), cfg.ridge};
    DesignCache cache(*inst.cls, *trained.history);
    const auto points = bonus_vs_error(set, cache, 0, heldout);
    double mean_bonus = 0.0;
    int covered = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      art.trace_rows.push_back({std::to_string(n_train), std::to_string(i),
                                format_double(points[i].abs_error),
                                format_double(points[i].bonus)});
      mean_bonus += points[i].bonus;
      if (points[i].bonus >= points[i].abs_error) ++covered;
    }
    mean_bonus /= points.empty() ? 1 : static_cast<double>(points.size());
    shrink_curve.emplace_back(n_train, mean_bonus);
    art.summary_rows.push_back({"mean_bonus", "", "", std::to_string(n_train),
                                format_double(mean_bonus),
                                format_double(static_cast<double>(covered) /
                                              std::max<std::size_t>(points.size(), 1))});
  }

  // Kernel matrix of the final trained representation over labelled samples.
  const bandit::GfucbResult trained =
      bandit::gfucb_run(inst, cfg.train_sizes.back(), ec, cfg.seed);
  const FeatureMap phi = inst.cls->members[trained.fhat.phi_index];
  std::vector<std::vector<Input>> by_category(cfg.categories);
  rng::Stream ds(rng::derive(cfg.seed, {rng::kTagDiag, 9}));
  for (int c = 0; c < cfg.categories; ++c) {
    for (int i = 0; i < 20; ++i) {
      Input x(cfg.categories, 0.0);
      x[c] = 1.0;
      for (double& v : x) v += cfg.perturb_sigma * ds.gauss();
      by_category[c].push_back(std::move(x));
    }
  }
  const KernelMatrix km = kernel_matrix(phi, by_category);
  // Double-sum cross-check of the template form.
  double max_diff = 0.0;
  for (int i = 0; i < cfg.categories; ++i) {
    for (int j = 0; j < cfg.categories; ++j) {
      double acc = 0.0;
      for (const Input& xi : by_category[i]) {
        const std::vector<double> fi = phi.eval(xi);
        for (const Input& xj : by_category[j]) {
          const std::vector<double> fj = phi.eval(xj);
          acc += kernels::dot(fi.data(), fj.data(), fi.size());
        }
      }
      acc /= static_cast<double>(by_category[i].size() * by_category[j].size());
      max_diff = std::max(max_diff, std::abs(acc - km.c(i, j)));
      art.summary_rows.push_back({"kernel", std::to_string(i), std::to_string(j), "",
                                  format_double(km.c(i, j)), format_double(acc)});
    }
  }
  art.summary_rows.push_back(
      {"kernel_max_diff", "", "", "", format_double(max_diff), ""});
  Series s;
  s.name = "mean_bonus";
  s.points = shrink_curve;
  art.plot.push_back(std::move(s));
}

}  // namespace

bandit::BanditInstance slice_tasks(const bandit::BanditInstance& base, int first_task,
                                   int num_tasks) {
  if (first_task < 0 || first_task + num_tasks > base.num_tasks)
    throw std::invalid_argument("slice_tasks: range out of bounds");
  bandit::BanditInstance out = base;
  out.num_tasks = num_tasks;
  out.truth.heads = linalg::Mat(num_tasks, base.dim_k());
  for (int i = 0; i < num_tasks; ++i) {
    std::copy(base.truth.heads.row(first_task + i),
              base.truth.heads.row(first_task + i) + base.dim_k(),
              out.truth.heads.row(i));
  }
  const auto sampler = base.context_sampler;
  out.context_sampler = [sampler, first_task, num_tasks](std::uint64_t run_seed, int t) {
    auto all = sampler(run_seed, t);
    std::vector<std::vector<Input>> sub(all.begin() + first_task,
                                        all.begin() + first_task + num_tasks);
    return sub;
  };
  return out;
}

GroupedOutcome run_grouped_bandit(const bandit::BanditInstance& base, int group_size,
                                  int horizon, const bandit::GfucbConfig& cfg,
                                  const std::string& algorithm,
                                  const bandit::EpsSchedule& eps_sched, double ridge,
                                  std::uint64_t seed) {
  if (base.num_tasks % group_size != 0)
    throw std::invalid_argument("run_grouped_bandit: group size must divide task count");
  GroupedOutcome out;
  const int groups = base.num_tasks / group_size;
  double total = 0.0;
  for (int g = 0; g < groups; ++g) {
    const bandit::BanditInstance sub = slice_tasks(base, g * group_size, group_size);
    bandit::RegretTrace trace;
    if (algorithm == "eps_greedy") {
      trace = bandit::eps_greedy_run(sub, horizon, eps_sched, ridge, seed);
    } else {
      trace = bandit::gfucb_run(sub, horizon, cfg, seed).trace;
    }
    total += trace.total_regret;
    out.group_traces.push_back(std::move(trace));
  }
  out.avg_per_task_regret = total / base.num_tasks;
  return out;
}

double containment_monte_carlo(const ExperimentConfig& cfg, int n_runs) {
  if (n_runs < 1) throw std::invalid_argument("containment_monte_carlo: need n_runs >= 1");
  const bandit::BanditInstance inst = make_bandit_instance(cfg, cfg.num_tasks);
  bandit::GfucbConfig ec = engine_config(cfg);
  ec.record_containment = true;
  std::vector<char> ok(n_runs, 0);
  parallel_for(n_runs, cfg.workers, [&](int i) {
    const bandit::GfucbResult res =
        bandit::gfucb_run(inst, cfg.horizon, ec, cfg.seed + static_cast<std::uint64_t>(i));
    bool all = true;
    for (const auto& step : res.trace.steps)
      if (!step.contained.value_or(false)) all = false;
    ok[i] = all ? 1 : 0;
  });
  int hits = 0;
  for (char c : ok) hits += c;
  return static_cast<double>(hits) / n_runs;
}

void run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  std::filesystem::create_directories(cfg.out_dir);
  RunArtifacts art;
  art.trace_header = kTraceHeader;
  art.summary_header = kSummaryHeader;

  if (cfg.kind == "bandit" || cfg.kind == "mdp") {
    run_regret_kind(cfg, art);
  } else if (cfg.kind == "transfer") {
    run_transfer_kind(cfg, art);
  } else if (cfg.kind == "eluder") {
    run_eluder_kind(cfg, art);
  } else if (cfg.kind == "diagnostics") {
    run_diagnostics_kind(cfg, art);
  }

  if (cfg.kind != "eluder") {
    write_csv(cfg.out_dir + "/trace.csv", art.trace_header, art.trace_rows);
  }
  write_csv(cfg.out_dir + "/summary.csv", art.summary_header, art.summary_rows);
  if (cfg.svg && !art.plot.empty()) {
    write_line_svg(cfg.out_dir + "/plot.svg", cfg.kind + " cumulative regret", art.plot);
  }
}

}  // namespace mrl::harness
