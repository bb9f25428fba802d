#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mrl/bandit.hpp"
#include "mrl/function_class.hpp"
#include "mrl/mdp.hpp"
#include "mrl/transfer.hpp"

namespace mrl::harness {

// Flat key = value configuration; unknown keys are hard errors. The full key
// list lives in the README.
struct ExperimentConfig {
  std::string kind = "bandit";  // bandit | mdp | transfer | eluder | diagnostics
  std::string env = "latent_category";
  std::string algorithm = "gfucb";  // gfucb | eps_greedy (bandit kind)
  std::uint64_t seed = 1;
  int horizon = 100;  // T: steps (bandit) or episodes (mdp)
  int num_tasks = 1;
  int dim_k = 10;
  int categories = 10;
  int actions = 5;  // K
  int num_members = 8;
  double perturb_sigma = 0.05;
  double noise_sigma = 0.01;
  std::string decoy_style = "random_anchor";  // random_anchor | pair_merge
  double delta = 0.1;
  std::string alpha = "auto";
  double ridge = 1e-6;
  std::string strategy = "decoupled";
  std::string beta_mode = "theory";  // theory | tuned:a,b,c
  double ibe = 0.0;
  bool record_width = false;
  bool record_containment = false;

  // mdp
  int num_states = 6;
  int num_actions = 3;
  int mdp_horizon = 5;  // H

  // eps-greedy baseline
  std::string eps_schedule = "const";  // const | inv_t | inv_sqrt_t
  double eps0 = 0.1;

  // sweeps & replication
  std::vector<int> sweep_tasks;    // sweep_M
  std::vector<int> sweep_horizon;  // sweep_T
  int n_seeds = 1;
  int group_total = 0;  // latent grouping: total base tasks split into M-groups

  // transfer
  std::string mixture = "uniform";  // uniform | e1 | comma list
  std::vector<int> pretrain_steps = {350};
  int transfer_steps = 300;
  double linucb_lambda = 1.0;
  double linucb_bonus_scale = 1.0;

  // eluder
  std::string eluder_class = "linear_grid";  // two_point | linear_grid | onehot | random
  double eps = 0.5;
  int el_dim = 3;
  double el_step = 0.25;
  int el_functions = 8;
  int el_points = 8;

  // diagnostics
  std::vector<int> train_sizes = {10, 100, 1000};
  int heldout = 100;

  std::string out_dir = "out";
  bool svg = true;
  int workers = 1;

  Strategy parsed_strategy() const { return strategy_from_string(strategy); }
  bandit::BetaConfig parsed_beta() const;
  double parsed_alpha() const;  // negative means auto
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);
void validate(const ExperimentConfig& cfg);

// Dispatches on cfg.kind, writes trace.csv / summary.csv / plot.svg under
// cfg.out_dir. Throws on invalid configs or IO failures.
void run_experiment(const ExperimentConfig& cfg);

// Fraction of seeded runs in which the truth stays inside every F_t.
double containment_monte_carlo(const ExperimentConfig& cfg, int n_runs);

// Appendix-style diagnostics over a labelled dataset grouped by category.
struct KernelMatrix {
  linalg::Mat c;          // c x c correlation matrix <T_i, T_j>
  linalg::Mat templates;  // one row per category: mean feature vector
};

KernelMatrix kernel_matrix(const FeatureMap& phi,
                           const std::vector<std::vector<Input>>& by_category);

struct BonusErrorPoint {
  double abs_error = 0.0;
  double bonus = 0.0;
};

// Per heldout point: |fhat(x) - y| and the optimistic bonus the confidence
// set grants at x (decoupled single-input form, nonnegative).
std::vector<BonusErrorPoint> bonus_vs_error(const ConfidenceSet& set, const DesignCache& cache,
                                            int task,
                                            const std::vector<std::pair<Input, double>>& heldout);

// Latent-instance helpers shared by the orchestrator and the acceptance
// suite: slice a group of tasks out of a wider instance (shared class and
// per-base-task streams), and the paper-style grouping runner.
bandit::BanditInstance slice_tasks(const bandit::BanditInstance& base, int first_task,
                                   int num_tasks);

struct GroupedOutcome {
  double avg_per_task_regret = 0.0;                // at final step
  std::vector<bandit::RegretTrace> group_traces;   // one per group
};

GroupedOutcome run_grouped_bandit(const bandit::BanditInstance& base, int group_size,
                                  int horizon, const bandit::GfucbConfig& cfg,
                                  const std::string& algorithm,
                                  const bandit::EpsSchedule& eps_schedule, double ridge,
                                  std::uint64_t seed);

// CSV / SVG emission helpers (deterministic formatting, '.' decimal).
std::string format_double(double v);
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

void write_line_svg(const std::string& path, const std::string& title,
                    const std::vector<Series>& series);

}  // namespace mrl::harness
